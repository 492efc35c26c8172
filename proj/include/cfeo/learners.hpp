#pragma once

// Nuisance learners. All of them regress a real-valued target on a feature
// row; classification targets are just {0,1} regressed and clamped by the
// caller. Everything is deterministic given the config.

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cfeo/util.hpp"

namespace cfeo {

enum class LearnerKind { BoostedStumps, KNearest, LogisticBasis, Oracle };

inline const char* learner_kind_name(LearnerKind k) {
    switch (k) {
        case LearnerKind::BoostedStumps: return "boosted-stumps";
        case LearnerKind::KNearest: return "knn";
        case LearnerKind::LogisticBasis: return "logistic";
        case LearnerKind::Oracle: return "oracle";
    }
    return "?";
}

// Prediction over one observation's (a, x, s).
using PredictionFn = std::function<double(int a, std::span<const double> x, int s)>;

struct LearnerConfig {
    LearnerKind kind = LearnerKind::BoostedStumps;
    // boosted stumps
    int rounds = 200;
    double shrinkage = 0.1;
    // k-nearest-neighbors
    int k_neighbors = 25;
    // logistic basis expansion degree (1 = linear, 2 adds squares)
    int basis_degree = 1;
    std::uint64_t seed = 0;
    // supplied truth for kind == Oracle
    PredictionFn oracle;
};

inline void validate_learner_config(const LearnerConfig& cfg) {
    switch (cfg.kind) {
        case LearnerKind::BoostedStumps:
            if (cfg.rounds < 1 || cfg.rounds > 100000) {
                throw std::runtime_error("boosted stumps: rounds out of range");
            }
            if (!(cfg.shrinkage > 0.0 && cfg.shrinkage <= 1.0)) {
                throw std::runtime_error("boosted stumps: shrinkage out of range");
            }
            break;
        case LearnerKind::KNearest:
            if (cfg.k_neighbors < 1) throw std::runtime_error("knn: k must be >= 1");
            break;
        case LearnerKind::LogisticBasis:
            if (cfg.basis_degree < 1 || cfg.basis_degree > 2) {
                throw std::runtime_error("logistic: basis degree must be 1 or 2");
            }
            break;
        case LearnerKind::Oracle:
            if (!cfg.oracle) throw std::runtime_error("oracle learner without a function");
            break;
    }
}

namespace detail {

struct Stump {
    int feature = -1;
    double threshold = 0.0;
    double left = 0.0;
    double right = 0.0;
};

struct BoostedStumpsModel {
    double init = 0.0;
    double shrinkage = 0.1;
    std::vector<Stump> stumps;

    double predict(std::span<const double> f) const {
        double v = init;
        for (const Stump& st : stumps) {
            v += shrinkage * (f[static_cast<std::size_t>(st.feature)] <= st.threshold
                                  ? st.left
                                  : st.right);
        }
        return v;
    }
};

// L2 boosting with depth-1 trees. Feature orderings are sorted once and
// reused across rounds; split search per round is a single prefix-sum pass.
inline BoostedStumpsModel fit_boosted_stumps(const std::vector<std::vector<double>>& X,
                                             const std::vector<double>& y,
                                             const LearnerConfig& cfg) {
    const std::size_t n = y.size();
    const std::size_t p = X.empty() ? 0 : X[0].size();
    BoostedStumpsModel model;
    model.shrinkage = cfg.shrinkage;
    model.init = mean(y);
    if (n < 2 || p == 0) return model;

    std::vector<std::vector<int>> order(p);
    for (std::size_t j = 0; j < p; ++j) {
        order[j].resize(n);
        std::iota(order[j].begin(), order[j].end(), 0);
        std::stable_sort(order[j].begin(), order[j].end(),
                         [&](int a, int b) { return X[a][j] < X[b][j]; });
    }

    std::vector<double> fitted(n, model.init);
    std::vector<double> resid(n);
    for (int round = 0; round < cfg.rounds; ++round) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] = y[i] - fitted[i];
            total += resid[i];
        }
        const double base_score = total * total / static_cast<double>(n);

        double best_gain = 1e-12;
        Stump best;
        for (std::size_t j = 0; j < p; ++j) {
            const auto& ord = order[j];
            double left_sum = 0.0;
            for (std::size_t pos = 0; pos + 1 < n; ++pos) {
                left_sum += resid[static_cast<std::size_t>(ord[pos])];
                const double v = X[ord[pos]][j];
                const double v_next = X[ord[pos + 1]][j];
                if (v == v_next) continue;
                const double nl = static_cast<double>(pos + 1);
                const double nr = static_cast<double>(n - pos - 1);
                const double right_sum = total - left_sum;
                const double score =
                    left_sum * left_sum / nl + right_sum * right_sum / nr;
                const double gain = score - base_score;
                if (gain > best_gain) {
                    best_gain = gain;
                    best.feature = static_cast<int>(j);
                    best.threshold = 0.5 * (v + v_next);
                    best.left = left_sum / nl;
                    best.right = right_sum / nr;
                }
            }
        }
        if (best.feature < 0) break;  // nothing left to split on

        for (std::size_t i = 0; i < n; ++i) {
            fitted[i] += cfg.shrinkage *
                         (X[i][static_cast<std::size_t>(best.feature)] <= best.threshold
                              ? best.left
                              : best.right);
        }
        model.stumps.push_back(best);
    }
    return model;
}

struct KnnModel {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    int k = 25;

    double predict(std::span<const double> f) const {
        const std::size_t n = y.size();
        std::vector<std::pair<double, int>> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < f.size(); ++j) {
                const double diff = X[i][j] - f[j];
                d2 += diff * diff;
            }
            dist[i] = {d2, static_cast<int>(i)};
        }
        const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
        std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(kk), dist.end());
        double s = 0.0;
        for (std::size_t i = 0; i < kk; ++i) s += y[static_cast<std::size_t>(dist[i].second)];
        return s / static_cast<double>(kk);
    }
};

inline std::vector<double> expand_basis(std::span<const double> f, int degree) {
    std::vector<double> row;
    row.reserve(1 + f.size() * static_cast<std::size_t>(degree));
    row.push_back(1.0);
    for (double v : f) row.push_back(v);
    if (degree >= 2) {
        for (double v : f) row.push_back(v * v);
    }
    return row;
}

inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const std::size_t m = b.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        if (std::fabs(a[pivot][col]) < 1e-300) {
            throw std::runtime_error("singular system in logistic fit");
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < m; ++r) {
            const double factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(m, 0.0);
    for (std::size_t r = m; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < m; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

struct LogisticModel {
    std::vector<double> coef;
    int degree = 1;

    double predict(std::span<const double> f) const {
        const auto row = expand_basis(f, degree);
        double z = 0.0;
        for (std::size_t j = 0; j < coef.size(); ++j) z += coef[j] * row[j];
        return expit(z);
    }
};

inline LogisticModel fit_logistic(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y, const LearnerConfig& cfg) {
    const std::size_t n = y.size();
    std::vector<std::vector<double>> B(n);
    for (std::size_t i = 0; i < n; ++i) B[i] = expand_basis(X[i], cfg.basis_degree);
    const std::size_t m = B.empty() ? 1 : B[0].size();

    LogisticModel model;
    model.degree = cfg.basis_degree;
    model.coef.assign(m, 0.0);
    const double ridge = 1e-6;

    for (int iter = 0; iter < 40; ++iter) {
        std::vector<std::vector<double>> H(m, std::vector<double>(m, 0.0));
        std::vector<double> g(m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double z = 0.0;
            for (std::size_t j = 0; j < m; ++j) z += model.coef[j] * B[i][j];
            const double p = expit(z);
            const double w = std::max(p * (1.0 - p), 1e-6);
            const double r = y[i] - p;
            for (std::size_t j = 0; j < m; ++j) {
                g[j] += B[i][j] * r;
                for (std::size_t k = j; k < m; ++k) H[j][k] += w * B[i][j] * B[i][k];
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            H[j][j] += ridge * static_cast<double>(n);
            for (std::size_t k = 0; k < j; ++k) H[j][k] = H[k][j];
        }
        const auto step = solve_dense(H, g);
        double max_step = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            model.coef[j] += step[j];
            max_step = std::max(max_step, std::fabs(step[j]));
        }
        if (max_step < 1e-8) break;
    }
    return model;
}

}  // namespace detail

// Trains the configured learner on (feature row -> target) pairs and returns
// a prediction closure over raw (a, x, s) inputs. `to_features` maps an
// observation into the same row layout used in training.
inline PredictionFn fit_regression_learner(
    const std::vector<std::vector<double>>& X, const std::vector<double>& y,
    const LearnerConfig& cfg) {
    validate_learner_config(cfg);
    if (X.size() != y.size() || y.empty()) {
        throw std::runtime_error("degenerate learner input");
    }

    auto to_features = [](int a, std::span<const double> x, int s) {
        std::vector<double> f;
        f.reserve(x.size() + 2);
        f.push_back(static_cast<double>(a));
        f.insert(f.end(), x.begin(), x.end());
        f.push_back(static_cast<double>(s));
        return f;
    };

    switch (cfg.kind) {
        case LearnerKind::BoostedStumps: {
            auto model = std::make_shared<detail::BoostedStumpsModel>(
                detail::fit_boosted_stumps(X, y, cfg));
            return [model, to_features](int a, std::span<const double> x, int s) {
                return model->predict(to_features(a, x, s));
            };
        }
        case LearnerKind::KNearest: {
            auto model = std::make_shared<detail::KnnModel>();
            model->X = X;
            model->y = y;
            model->k = cfg.k_neighbors;
            return [model, to_features](int a, std::span<const double> x, int s) {
                return model->predict(to_features(a, x, s));
            };
        }
        case LearnerKind::LogisticBasis: {
            auto model =
                std::make_shared<detail::LogisticModel>(detail::fit_logistic(X, y, cfg));
            return [model, to_features](int a, std::span<const double> x, int s) {
                return model->predict(to_features(a, x, s));
            };
        }
        case LearnerKind::Oracle:
            return cfg.oracle;
    }
    throw std::logic_error("unreachable learner kind");
}

}  // namespace cfeo
