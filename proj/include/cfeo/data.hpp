#pragma once

// Dataset model and CSV ingestion. A record is one observation
// (a, x, d, s, y): group label, covariates, decision, input prediction,
// observed outcome. a/d/s/y are binary; x is a fixed-width real vector.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cfeo/util.hpp"

namespace cfeo {

struct Record {
    int a = 0;
    std::vector<double> x;
    int d = 0;
    int s = 0;
    int y = 0;
};

struct Dataset {
    std::vector<Record> records;
    int covariate_dim = 0;

    std::size_t size() const { return records.size(); }

    Dataset subset(const std::vector<int>& idx) const {
        Dataset out;
        out.covariate_dim = covariate_dim;
        out.records.reserve(idx.size());
        for (int i : idx) out.records.push_back(records[static_cast<std::size_t>(i)]);
        return out;
    }
};

// Throws when the dataset cannot support the estimation pipeline:
// empty, mixed covariate widths, non-binary labels, a single-group sample,
// or no baseline (d=0) records to fit the outcome regression on.
inline void validate_dataset(const Dataset& ds) {
    if (ds.records.empty()) throw std::runtime_error("empty dataset");
    bool seen_a[2] = {false, false};
    bool seen_d0 = false;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const Record& r = ds.records[i];
        auto check_bin = [&](int v, const char* name) {
            if (v != 0 && v != 1) {
                throw std::runtime_error("non-binary " + std::string(name) +
                                         " at row " + std::to_string(i + 1));
            }
        };
        check_bin(r.a, "group");
        check_bin(r.d, "decision");
        check_bin(r.s, "input prediction");
        check_bin(r.y, "outcome");
        if (static_cast<int>(r.x.size()) != ds.covariate_dim) {
            throw std::runtime_error("covariate dimension mismatch at row " +
                                     std::to_string(i + 1));
        }
        for (double v : r.x) {
            if (!std::isfinite(v)) {
                throw std::runtime_error("non-finite covariate at row " +
                                         std::to_string(i + 1));
            }
        }
        seen_a[r.a] = true;
        if (r.d == 0) seen_d0 = true;
    }
    if (!seen_a[0] || !seen_a[1]) {
        throw std::runtime_error("dataset must contain both group labels");
    }
    if (!seen_d0) {
        throw std::runtime_error("dataset has no records with d=0");
    }
}

// Column-name configuration for load_csv. Empty covariates means
// auto-detect x1..xp from the header.
struct CsvSchema {
    std::string a = "a";
    std::string d = "d";
    std::string s = "s";
    std::string y = "y";
    std::vector<std::string> covariates;
};

namespace detail {

// RFC-4180-ish CSV: quoted fields may contain commas and doubled quotes;
// newlines are row separators only outside quotes.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_has_content = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_has_content = true;
                break;
            case ',':
                row.push_back(field);
                field.clear();
                row_has_content = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_has_content || !field.empty() || !row.empty()) {
                    row.push_back(field);
                    rows.push_back(row);
                }
                row.clear();
                field.clear();
                row_has_content = false;
                break;
            default:
                field.push_back(c);
                row_has_content = true;
                break;
        }
    }
    if (row_has_content || !field.empty() || !row.empty()) {
        row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<std::vector<std::string>> read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

inline int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return static_cast<int>(j);
    }
    return -1;
}

inline int require_column(const std::vector<std::string>& header, const std::string& name) {
    const int j = find_column(header, name);
    if (j < 0) throw std::runtime_error("missing column '" + name + "'");
    return j;
}

inline int parse_binary(const std::string& cell, const std::string& col, std::size_t row) {
    if (cell == "0") return 0;
    if (cell == "1") return 1;
    throw std::runtime_error("non-binary " + col + " value '" + cell + "' at row " +
                             std::to_string(row));
}

inline double parse_real(const std::string& cell, const std::string& col, std::size_t row) {
    if (cell.empty()) {
        throw std::runtime_error("non-numeric " + col + " value at row " + std::to_string(row));
    }
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw std::runtime_error("non-numeric " + col + " value '" + cell + "' at row " +
                                 std::to_string(row));
    }
    return v;
}

}  // namespace detail

inline Dataset load_csv(const std::string& path, const CsvSchema& schema = CsvSchema{}) {
    const auto rows = detail::read_csv_file(path);
    if (rows.empty()) throw std::runtime_error("empty dataset");
    const auto& header = rows.front();

    const int col_a = detail::require_column(header, schema.a);
    const int col_d = detail::require_column(header, schema.d);
    const int col_s = detail::require_column(header, schema.s);
    const int col_y = detail::require_column(header, schema.y);

    std::vector<int> cov_cols;
    std::vector<std::string> cov_names = schema.covariates;
    if (cov_names.empty()) {
        // default naming x1..xp, consecutive from x1
        for (int k = 1;; ++k) {
            const int j = detail::find_column(header, "x" + std::to_string(k));
            if (j < 0) break;
            cov_cols.push_back(j);
        }
    } else {
        for (const auto& name : cov_names) {
            cov_cols.push_back(detail::require_column(header, name));
        }
    }

    Dataset ds;
    ds.covariate_dim = static_cast<int>(cov_cols.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& cells = rows[i];
        if (cells.size() != header.size()) {
            throw std::runtime_error("row " + std::to_string(i) + " has " +
                                     std::to_string(cells.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        }
        Record r;
        r.a = detail::parse_binary(cells[col_a], schema.a, i);
        r.d = detail::parse_binary(cells[col_d], schema.d, i);
        r.s = detail::parse_binary(cells[col_s], schema.s, i);
        r.y = detail::parse_binary(cells[col_y], schema.y, i);
        r.x.reserve(cov_cols.size());
        for (std::size_t k = 0; k < cov_cols.size(); ++k) {
            r.x.push_back(detail::parse_real(cells[cov_cols[k]], header[cov_cols[k]], i));
        }
        ds.records.push_back(std::move(r));
    }
    if (ds.records.empty()) throw std::runtime_error("empty dataset");
    validate_dataset(ds);
    return ds;
}

// Writes with the default schema (a, x1..xp, d, s, y). Covariates use %.17g
// so a load_csv round trip reproduces the dataset exactly.
inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << "a";
    for (int k = 1; k <= ds.covariate_dim; ++k) out << ",x" << k;
    out << ",d,s,y\n";
    char buf[40];
    for (const Record& r : ds.records) {
        out << r.a;
        for (double v : r.x) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << ',' << r.d << ',' << r.s << ',' << r.y << '\n';
    }
}

// Deterministic train/test split; the training part receives
// ceil(fraction * n) records. Both parts keep the original row order.
inline std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double fraction,
                                                    std::uint64_t seed) {
    const std::size_t n = ds.size();
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::runtime_error("fraction must be in (0,1)");
    }
    const std::size_t n_train =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n) {
        throw std::runtime_error("split fraction yields an empty part");
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(hash_combine(seed, 0x5eedu));
    shuffle(idx, rng);
    std::vector<int> train_idx(idx.begin(), idx.begin() + static_cast<long>(n_train));
    std::vector<int> test_idx(idx.begin() + static_cast<long>(n_train), idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {ds.subset(train_idx), ds.subset(test_idx)};
}

struct FoldAssignment {
    std::size_t n = 0;
    int k = 0;
    std::vector<int> fold_of;  // record index -> fold id in [0, k)

    std::vector<int> indices_in(int fold) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < fold_of.size(); ++i) {
            if (fold_of[i] == fold) out.push_back(static_cast<int>(i));
        }
        return out;
    }

    std::vector<int> indices_not_in(int fold) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < fold_of.size(); ++i) {
            if (fold_of[i] != fold) out.push_back(static_cast<int>(i));
        }
        return out;
    }
};

// Balanced fold assignment: sizes differ by at most one, deterministic in
// (n, k, seed).
inline FoldAssignment assign_folds(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw std::runtime_error("fold count must be >= 2");
    if (n < static_cast<std::size_t>(k)) {
        throw std::runtime_error("fewer records than folds");
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(hash_combine(seed, 0xf01d5u));
    shuffle(idx, rng);
    FoldAssignment fa;
    fa.n = n;
    fa.k = k;
    fa.fold_of.assign(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
        fa.fold_of[static_cast<std::size_t>(idx[pos])] = static_cast<int>(pos % k);
    }
    return fa;
}

}  // namespace cfeo
