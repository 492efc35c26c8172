#pragma once

// Preparation of the ProPublica two-year recidivism file into the (a,x,d,s,y)
// layout. Conventions:
//   A: African-American -> 0, Caucasian -> 1; all other rows dropped.
//   S: decile_score >= 5.
//   D: 0 when the jail stay (c_jail_out - c_jail_in) is <= 3 calendar days,
//      1 otherwise; rows with unparseable/missing jail dates get D = 1.
//   Y: two_year_recid.
//   X: (male, age<25, age 25-45, age>45, priors_count, felony charge).
// The standard row filters (screening-to-arrest offset within 30 days,
// is_recid != -1, charge degree != 'O', score_text != 'N/A') are applied
// when those columns are present.

#include <optional>
#include <string>

#include "cfeo/data.hpp"

namespace cfeo {
namespace detail {

// days since 1970-01-01 for a civil date (Hinnant's algorithm)
inline long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

// Accepts "YYYY-MM-DD" or "YYYY-MM-DD hh:mm:ss"; only the date part is used.
inline std::optional<long> parse_date_days(const std::string& cell) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(cell.c_str(), "%d-%d-%d", &y, &m, &d) != 3) return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    return days_from_civil(y, m, d);
}

inline std::optional<double> parse_real_opt(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace detail

inline Dataset compas_prepare(const std::string& raw_path) {
    const auto rows = detail::read_csv_file(raw_path);
    if (rows.empty()) throw std::runtime_error("empty dataset");
    const auto& header = rows.front();

    const int col_race = detail::require_column(header, "race");
    const int col_decile = detail::require_column(header, "decile_score");
    const int col_jail_in = detail::require_column(header, "c_jail_in");
    const int col_jail_out = detail::require_column(header, "c_jail_out");
    const int col_sex = detail::require_column(header, "sex");
    const int col_age_cat = detail::require_column(header, "age_cat");
    const int col_priors = detail::require_column(header, "priors_count");
    const int col_degree = detail::require_column(header, "c_charge_degree");
    const int col_recid = detail::require_column(header, "two_year_recid");

    // filter columns, optional
    const int col_days_b = detail::find_column(header, "days_b_screening_arrest");
    const int col_is_recid = detail::find_column(header, "is_recid");
    const int col_score_text = detail::find_column(header, "score_text");

    Dataset ds;
    ds.covariate_dim = 6;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& cells = rows[i];
        if (cells.size() != header.size()) {
            throw std::runtime_error("row " + std::to_string(i) + " has " +
                                     std::to_string(cells.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        }

        const std::string& race = cells[col_race];
        int a;
        if (race == "African-American") {
            a = 0;
        } else if (race == "Caucasian") {
            a = 1;
        } else {
            continue;
        }

        if (col_days_b >= 0) {
            const auto v = detail::parse_real_opt(cells[col_days_b]);
            if (!v || *v > 30.0 || *v < -30.0) continue;
        }
        if (col_is_recid >= 0) {
            const auto v = detail::parse_real_opt(cells[col_is_recid]);
            if (!v || *v == -1.0) continue;
        }
        if (cells[col_degree] == "O") continue;
        if (col_score_text >= 0 && cells[col_score_text] == "N/A") continue;

        const auto decile = detail::parse_real_opt(cells[col_decile]);
        if (!decile) {
            throw std::runtime_error("non-numeric decile_score at row " + std::to_string(i));
        }
        const auto priors = detail::parse_real_opt(cells[col_priors]);
        if (!priors) {
            throw std::runtime_error("non-numeric priors_count at row " + std::to_string(i));
        }

        const auto jail_in = detail::parse_date_days(cells[col_jail_in]);
        const auto jail_out = detail::parse_date_days(cells[col_jail_out]);
        int d = 1;
        if (jail_in && jail_out && (*jail_out - *jail_in) <= 3) d = 0;

        const std::string& age_cat = cells[col_age_cat];
        double age_lt25 = 0.0, age_25_45 = 0.0, age_gt45 = 0.0;
        if (age_cat == "Less than 25") {
            age_lt25 = 1.0;
        } else if (age_cat == "25 - 45") {
            age_25_45 = 1.0;
        } else if (age_cat == "Greater than 45") {
            age_gt45 = 1.0;
        } else {
            throw std::runtime_error("unrecognized age_cat '" + age_cat + "' at row " +
                                     std::to_string(i));
        }

        Record r;
        r.a = a;
        r.s = *decile >= 5.0 ? 1 : 0;
        r.d = d;
        r.y = detail::parse_binary(cells[col_recid], "two_year_recid", i);
        r.x = {cells[col_sex] == "Male" ? 1.0 : 0.0,
               age_lt25,
               age_25_45,
               age_gt45,
               *priors,
               cells[col_degree] == "F" ? 1.0 : 0.0};
        ds.records.push_back(std::move(r));
    }

    validate_dataset(ds);
    return ds;
}

}  // namespace cfeo
