#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "post/math.hpp"
#include "post/parallel.hpp"
#include "post/rng.hpp"
#include "post/stats.hpp"

namespace post {

// Power-law convolution kernel K(s) = s^-beta on [1, T].
struct PowerLawKernel {
    double beta = 0.5;
    double T = 1024.0;

    PowerLawKernel(double beta_, double T_) : beta(beta_), T(T_) {
        if (!(beta > 0.0 && beta < 1.0)) {
            throw std::invalid_argument("PowerLawKernel: beta must lie in (0, 1)");
        }
        if (!(T > 1.0) || !is_finite(T)) {
            throw std::invalid_argument("PowerLawKernel: T must exceed 1");
        }
    }

    double operator()(double s) const { return std::exp(-beta * std::log(s)); }
};

enum class NodeStrategy { random, linear, geometric };

inline const char* to_string(NodeStrategy s) {
    switch (s) {
        case NodeStrategy::random: return "random";
        case NodeStrategy::linear: return "linear";
        case NodeStrategy::geometric: return "geometric";
    }
    return "?";
}

struct NodePlacement {
    NodeStrategy strategy = NodeStrategy::geometric;
    std::vector<double> rates;
    std::uint64_t seed = 0;
};

struct IllConditionedNodes : std::runtime_error {
    IllConditionedNodes(std::size_t i_, std::size_t j_, double ri, double rj)
        : std::runtime_error("fit_weights: nodes " + std::to_string(i_) + " and " +
                             std::to_string(j_) + " nearly coincide (rates " +
                             std::to_string(ri) + ", " + std::to_string(rj) + ")"),
          i(i_), j(j_) {}
    std::size_t i;
    std::size_t j;
};

// Exponential-sum approximant g(s) = sum_k w_k exp(-r_k s) with its measured
// sup-norm error against the kernel on a log-spaced evaluation grid.
struct ExpSumApprox {
    NodePlacement nodes;
    std::vector<double> weights;
    double sup_error = 0.0;
    double condition = 0.0;  // singular-value ratio of the scaled design matrix
    bool converged = true;   // Lawson reweighting stabilized on the best iterate
    std::size_t fit_grid_size = 0;
    std::size_t eval_grid_size = 0;

    double operator()(double s) const {
        double g = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            g += weights[k] * std::exp(-nodes.rates[k] * s);
        }
        return g;
    }
};

// Node placement over the spectral window [1/T, 1]:
//   random    — i.i.d. log-uniform rates (sorted; reproducible from the seed),
//   linear    — r_k = c * k, default slope c = 1/T,
//   geometric — log-rates uniform on [ln(1/T), 0].
inline NodePlacement place_nodes(NodeStrategy strategy, std::size_t n, double T,
                                 std::optional<double> c, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("place_nodes: need N >= 1");
    if (!(T > 1.0)) throw std::invalid_argument("place_nodes: T must exceed 1");
    NodePlacement nodes;
    nodes.strategy = strategy;
    nodes.seed = seed;
    nodes.rates.resize(n);
    const double log_span = std::log(T);
    switch (strategy) {
        case NodeStrategy::random: {
            CounterRng rng(seed, 0);
            for (std::size_t k = 0; k < n; ++k) {
                nodes.rates[k] = std::exp(rng.uniform(-log_span, 0.0));
            }
            std::sort(nodes.rates.begin(), nodes.rates.end());
            break;
        }
        case NodeStrategy::linear: {
            const double slope = c.value_or(1.0 / T);
            if (!(slope > 0.0)) {
                throw std::invalid_argument("place_nodes: linear slope c must be positive");
            }
            for (std::size_t k = 0; k < n; ++k) {
                nodes.rates[k] = slope * static_cast<double>(k + 1);
            }
            break;
        }
        case NodeStrategy::geometric: {
            if (n < 2) {
                throw std::invalid_argument("place_nodes: geometric placement needs N >= 2");
            }
            for (std::size_t k = 0; k < n; ++k) {
                nodes.rates[k] = std::exp(-log_span + log_span * static_cast<double>(k) /
                                                          static_cast<double>(n - 1));
            }
            break;
        }
    }
    return nodes;
}

namespace detail {

inline std::vector<double> log_spaced_grid(double lo, double hi, std::size_t m) {
    std::vector<double> grid(m);
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (std::size_t i = 0; i < m; ++i) {
        grid[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                     static_cast<double>(m - 1));
    }
    return grid;
}

}  // namespace detail

// Fit weights for fixed nodes against an arbitrary target on [1, domain_end]:
// weighted least squares on a log-spaced grid, then Lawson reweighting
// (multiply each point weight by its residual and renormalize) to push the
// solution toward the sup-norm optimum.  The best iterate by fit-grid sup
// error is kept and the final error is measured on a 4x finer grid.  Solves
// go through a column-scaled SVD; the singular-value ratio is reported as the
// condition estimate.
template <class TargetFn>
ExpSumApprox fit_exp_sum(const NodePlacement& nodes, TargetFn&& target_fn,
                         double domain_end, std::size_t grid_size = 8192,
                         std::size_t lawson_iterations = 40) {
    const std::size_t n = nodes.rates.size();
    if (n == 0) throw std::invalid_argument("fit_weights: empty node set");
    if (grid_size < 4 * n) {
        throw std::invalid_argument("fit_weights: grid_size must be at least 4N");
    }
    if (!(domain_end > 1.0)) {
        throw std::invalid_argument("fit_weights: domain end must exceed 1");
    }
    for (double r : nodes.rates) {
        if (!(r > 0.0) || !is_finite(r)) {
            throw std::invalid_argument("fit_weights: rates must be positive and finite");
        }
    }
    {
        std::vector<std::size_t> order(n);
        for (std::size_t k = 0; k < n; ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return nodes.rates[x] < nodes.rates[y];
        });
        for (std::size_t k = 1; k < n; ++k) {
            const double lo = nodes.rates[order[k - 1]];
            const double hi = nodes.rates[order[k]];
            if ((hi - lo) / std::max(hi, lo) < 1e-10) {
                throw IllConditionedNodes(order[k - 1], order[k], lo, hi);
            }
        }
    }

    const std::vector<double> grid = detail::log_spaced_grid(1.0, domain_end, grid_size);
    const std::size_t m = grid.size();

    Eigen::MatrixXd design(m, n);
    Eigen::VectorXd target(m);
    for (std::size_t i = 0; i < m; ++i) {
        target(static_cast<Eigen::Index>(i)) = target_fn(grid[i]);
        for (std::size_t k = 0; k < n; ++k) {
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                std::exp(-nodes.rates[k] * grid[i]);
        }
    }

    std::vector<double> lawson(m, 1.0 / static_cast<double>(m));
    std::vector<double> best_weights(n, 0.0);
    double best_sup = std::numeric_limits<double>::infinity();
    double last_sup = std::numeric_limits<double>::infinity();
    double condition = 0.0;

    Eigen::MatrixXd scaled(m, n);
    Eigen::VectorXd rhs(m);
    for (std::size_t iter = 0; iter < lawson_iterations; ++iter) {
        for (std::size_t i = 0; i < m; ++i) {
            const double sqrt_w = std::sqrt(lawson[i]);
            rhs(static_cast<Eigen::Index>(i)) = sqrt_w * target(static_cast<Eigen::Index>(i));
            for (std::size_t k = 0; k < n; ++k) {
                scaled(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                    sqrt_w * design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            }
        }
        Eigen::VectorXd col_norm(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double nrm = scaled.col(static_cast<Eigen::Index>(k)).norm();
            col_norm(static_cast<Eigen::Index>(k)) = nrm > 0.0 ? nrm : 1.0;
            scaled.col(static_cast<Eigen::Index>(k)) /= col_norm(static_cast<Eigen::Index>(k));
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (iter == 0 && sv(sv.size() - 1) > 0.0) {
            condition = sv(0) / sv(sv.size() - 1);
        }
        Eigen::VectorXd solution = svd.solve(rhs);
        for (std::size_t k = 0; k < n; ++k) {
            solution(static_cast<Eigen::Index>(k)) /= col_norm(static_cast<Eigen::Index>(k));
        }

        std::vector<double> weights(n);
        for (std::size_t k = 0; k < n; ++k) weights[k] = solution(static_cast<Eigen::Index>(k));

        double sup = 0.0;
        std::vector<double> residual(m);
        for (std::size_t i = 0; i < m; ++i) {
            double g = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                g += weights[k] * design(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(k));
            }
            residual[i] = target(static_cast<Eigen::Index>(i)) - g;
            sup = std::max(sup, std::abs(residual[i]));
        }
        last_sup = sup;
        if (sup < best_sup) {
            best_sup = sup;
            best_weights = weights;
        }

        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            lawson[i] *= std::abs(residual[i]);
            total += lawson[i];
        }
        if (!(total > 0.0)) break;  // residual identically zero: exact representation
        for (std::size_t i = 0; i < m; ++i) lawson[i] /= total;
    }

    ExpSumApprox approx;
    approx.nodes = nodes;
    approx.weights = best_weights;
    approx.fit_grid_size = grid_size;
    approx.eval_grid_size = 4 * grid_size;
    approx.converged = last_sup <= best_sup * (1.0 + 1e-3);
    approx.condition = condition;
    const std::vector<double> eval_grid =
        detail::log_spaced_grid(1.0, domain_end, approx.eval_grid_size);
    double sup = 0.0;
    for (double s : eval_grid) {
        sup = std::max(sup, std::abs(target_fn(s) - approx(s)));
    }
    approx.sup_error = sup;
    return approx;
}

inline ExpSumApprox fit_weights(const NodePlacement& nodes, const PowerLawKernel& kernel,
                                std::size_t grid_size = 8192,
                                std::size_t lawson_iterations = 40) {
    return fit_exp_sum(nodes, kernel, kernel.T, grid_size, lawson_iterations);
}

struct RateCurvePoint {
    std::size_t n = 0;
    double sup_error = 0.0;  // median across seeds for the random strategy
    double q1 = 0.0;
    double q3 = 0.0;
};

struct RateExperiment {
    NodeStrategy strategy = NodeStrategy::geometric;
    double beta = 0.5;
    double T = 1024.0;
    std::vector<RateCurvePoint> points;
    // Straight-line fit of ln(error) vs N over points above the solver floor.
    std::optional<double> fit_slope;
    std::optional<double> fit_r2;
};

inline constexpr double kSolverFloor = 1e-12;
// Slope grid swept for the linear strategy; the reported error is the best.
inline const std::vector<double> kLinearSlopeFactors = {1.0, 2.0};  // times 1/T, plus 1/sqrt(T)

// Per-N sup error for one placement strategy.  Linear placements sweep the
// slope over {1/T, 2/T, 1/sqrt(T)} and keep the best; random placements
// report median and quartiles across seeds.
inline RateExperiment rate_experiment(NodeStrategy strategy, double beta, double T,
                                      const std::vector<std::size_t>& n_list,
                                      const std::vector<std::uint64_t>& seeds,
                                      std::size_t grid_size = 8192,
                                      unsigned threads = 1) {
    if (n_list.empty()) throw std::invalid_argument("rate_experiment: empty N list");
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1]) {
            throw std::invalid_argument("rate_experiment: N list must be ascending");
        }
    }
    const PowerLawKernel kernel(beta, T);

    RateExperiment exp;
    exp.strategy = strategy;
    exp.beta = beta;
    exp.T = T;
    exp.points.resize(n_list.size());

    if (strategy == NodeStrategy::random) {
        if (seeds.empty()) throw std::invalid_argument("rate_experiment: random needs seeds");
        std::vector<std::vector<double>> errors(n_list.size(),
                                                std::vector<double>(seeds.size()));
        parallel_for(n_list.size() * seeds.size(), threads, [&](std::size_t cell) {
            const std::size_t ni = cell / seeds.size();
            const std::size_t si = cell % seeds.size();
            const NodePlacement nodes =
                place_nodes(strategy, n_list[ni], T, std::nullopt, seeds[si]);
            errors[ni][si] = fit_weights(nodes, kernel, grid_size).sup_error;
        });
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            exp.points[ni].n = n_list[ni];
            exp.points[ni].sup_error = median(errors[ni]);
            exp.points[ni].q1 = quantile(errors[ni], 0.25);
            exp.points[ni].q3 = quantile(errors[ni], 0.75);
        }
        return exp;
    }

    parallel_for(n_list.size(), threads, [&](std::size_t ni) {
        const std::size_t n = n_list[ni];
        double err = 0.0;
        if (strategy == NodeStrategy::linear) {
            std::vector<double> slopes;
            for (double f : kLinearSlopeFactors) slopes.push_back(f / T);
            slopes.push_back(1.0 / std::sqrt(T));
            err = std::numeric_limits<double>::infinity();
            for (double c : slopes) {
                const NodePlacement nodes = place_nodes(strategy, n, T, c, 0);
                err = std::min(err, fit_weights(nodes, kernel, grid_size).sup_error);
            }
        } else {
            const NodePlacement nodes = place_nodes(strategy, n, T, std::nullopt, 0);
            err = fit_weights(nodes, kernel, grid_size).sup_error;
        }
        exp.points[ni].n = n;
        exp.points[ni].sup_error = err;
        exp.points[ni].q1 = err;
        exp.points[ni].q3 = err;
    });

    if (strategy == NodeStrategy::geometric) {
        std::vector<double> xs, ys;
        for (const auto& p : exp.points) {
            if (p.sup_error > kSolverFloor) {
                xs.push_back(static_cast<double>(p.n));
                ys.push_back(std::log(p.sup_error));
            }
        }
        if (xs.size() >= 3) {
            const LinearFit fit = linear_fit(xs, ys);
            exp.fit_slope = fit.slope;
            exp.fit_r2 = fit.r2;
        }
    }
    return exp;
}

struct ScaleMismatchResult {
    double t = 0.0;
    double static_error = 0.0;   // spectrum designed for [1, T], judged on [1, t]
    double adapted_error = 0.0;  // spectrum rescaled to [1, t]
    double n_eff = 0.0;          // N * ln(t) / ln(T)
};

// Compares a static geometric spectrum designed for horizon T against one
// rescaled to the actual horizon t, both fitted and measured on [1, t].
inline ScaleMismatchResult scale_mismatch_experiment(std::size_t n, double T, double t,
                                                     double beta,
                                                     std::size_t grid_size = 8192) {
    if (!(t > 1.0 && t <= T)) {
        throw std::domain_error("scale_mismatch_experiment: need 1 < t <= T");
    }
    const PowerLawKernel kernel(beta, t);
    const NodePlacement static_nodes =
        place_nodes(NodeStrategy::geometric, n, T, std::nullopt, 0);
    const NodePlacement adapted_nodes =
        place_nodes(NodeStrategy::geometric, n, t, std::nullopt, 0);
    ScaleMismatchResult out;
    out.t = t;
    out.static_error = fit_weights(static_nodes, kernel, grid_size).sup_error;
    out.adapted_error = fit_weights(adapted_nodes, kernel, grid_size).sup_error;
    out.n_eff = static_cast<double>(n) * std::log(t) / std::log(T);
    return out;
}

}  // namespace post
