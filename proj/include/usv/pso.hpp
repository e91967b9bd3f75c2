#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "usv/random.hpp"
#include "usv/svr.hpp"

namespace usv::pso {

struct SwarmConfig {
    int particle_count = 10;
    double c1 = 1.5;  // cognitive acceleration
    double c2 = 1.7;  // social acceleration
    int max_iterations = 200;
    double inertia = 0.8;
    std::array<double, 2> velocity_bounds{-10.0, 10.0};
    // log2-space boxes for (C, sigma): C in [2^-5, 2^15], sigma in [2^-15, 2^3]
    std::vector<std::array<double, 2>> position_bounds{{-5.0, 15.0}, {-15.0, 3.0}};
    std::uint64_t seed = 42;

    void validate() const {
        if (particle_count < 1) throw std::invalid_argument("swarm needs at least one particle");
        if (max_iterations < 1) throw std::invalid_argument("swarm needs at least one iteration");
        if (!(velocity_bounds[0] < velocity_bounds[1]))
            throw std::invalid_argument("velocity bounds must be a non-empty interval");
        if (position_bounds.empty())
            throw std::invalid_argument("position bounds must cover at least one dimension");
        for (const auto& b : position_bounds)
            if (!(b[0] < b[1]))
                throw std::invalid_argument("position bounds must be non-empty intervals");
    }
};

using FitnessFn = std::function<double(std::span<const double>)>;

struct SwarmState {
    std::vector<std::vector<double>> positions;
    std::vector<std::vector<double>> velocities;
    std::vector<std::vector<double>> pbest;
    std::vector<double> pbest_fitness;
    std::vector<double> gbest;
    double gbest_fitness = std::numeric_limits<double>::infinity();
    int iteration = 0;
    Rng rng{0};
};

namespace detail {

// Non-finite fitness values are treated as +inf so they can never be adopted
// as a personal or global best.
inline double guarded_fitness(const FitnessFn& fitness, std::span<const double> x) {
    const double v = fitness(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline SwarmState initialize(const SwarmConfig& cfg, const FitnessFn& fitness) {
    cfg.validate();
    const int dims = static_cast<int>(cfg.position_bounds.size());

    SwarmState st;
    st.rng = Rng::substream(cfg.seed, {fnv1a64("swarm")});
    st.positions.resize(cfg.particle_count);
    st.velocities.resize(cfg.particle_count);
    for (int i = 0; i < cfg.particle_count; ++i) {
        st.positions[i].resize(dims);
        st.velocities[i].resize(dims);
        for (int d = 0; d < dims; ++d)
            st.positions[i][d] =
                st.rng.uniform(cfg.position_bounds[d][0], cfg.position_bounds[d][1]);
        for (int d = 0; d < dims; ++d)
            st.velocities[i][d] = st.rng.uniform(cfg.velocity_bounds[0], cfg.velocity_bounds[1]);
    }

    st.pbest = st.positions;
    st.pbest_fitness.resize(cfg.particle_count);
    for (int i = 0; i < cfg.particle_count; ++i) {
        st.pbest_fitness[i] = detail::guarded_fitness(fitness, st.positions[i]);
        if (st.pbest_fitness[i] < st.gbest_fitness) {
            st.gbest_fitness = st.pbest_fitness[i];
            st.gbest = st.positions[i];
        }
    }
    if (st.gbest.empty()) st.gbest = st.positions.front();  // all evaluations non-finite
    return st;
}

// One synchronous swarm iteration: every particle moves against the previous
// global best, then bests are refreshed. Random factors are drawn per particle
// per dimension from the state's stream, so results are order-pinned.
inline SwarmState step(SwarmState st, const SwarmConfig& cfg, const FitnessFn& fitness) {
    cfg.validate();
    const int dims = static_cast<int>(cfg.position_bounds.size());

    for (int i = 0; i < cfg.particle_count; ++i) {
        for (int d = 0; d < dims; ++d) {
            const double r1 = st.rng.uniform01();
            const double r2 = st.rng.uniform01();
            double v = cfg.inertia * st.velocities[i][d] +
                       cfg.c1 * r1 * (st.pbest[i][d] - st.positions[i][d]) +
                       cfg.c2 * r2 * (st.gbest[d] - st.positions[i][d]);
            v = std::clamp(v, cfg.velocity_bounds[0], cfg.velocity_bounds[1]);
            st.velocities[i][d] = v;
            st.positions[i][d] = std::clamp(st.positions[i][d] + v, cfg.position_bounds[d][0],
                                            cfg.position_bounds[d][1]);
        }
    }
    for (int i = 0; i < cfg.particle_count; ++i) {
        const double f = detail::guarded_fitness(fitness, st.positions[i]);
        if (f < st.pbest_fitness[i]) {
            st.pbest_fitness[i] = f;
            st.pbest[i] = st.positions[i];
        }
    }
    for (int i = 0; i < cfg.particle_count; ++i) {
        if (st.pbest_fitness[i] < st.gbest_fitness) {
            st.gbest_fitness = st.pbest_fitness[i];
            st.gbest = st.pbest[i];
        }
    }
    ++st.iteration;
    return st;
}

struct OptimizeResult {
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<double> trace;  // global-best fitness after each iteration
};

inline OptimizeResult optimize(const SwarmConfig& cfg, const FitnessFn& fitness) {
    SwarmState st = initialize(cfg, fitness);
    OptimizeResult result;
    result.trace.reserve(cfg.max_iterations);
    for (int it = 0; it < cfg.max_iterations; ++it) {
        st = step(std::move(st), cfg, fitness);
        result.trace.push_back(st.gbest_fitness);
    }
    result.best_position = st.gbest;
    result.best_fitness = st.gbest_fitness;
    return result;
}

// Decodes a log2-space position into SVR hyperparameters.
inline svr::SVRHyperparams decode_position(std::span<const double> position, double tube = 0.01) {
    if (position.size() != 2)
        throw std::invalid_argument("hyperparameter position must be 2-dimensional");
    svr::SVRHyperparams hp;
    hp.penalty = std::exp2(position[0]);
    hp.kernel_width = std::exp2(position[1]);
    hp.tube = tube;
    return hp;
}

// Contiguous chronological fold blocks as [begin, end) index pairs.
inline std::vector<std::pair<int, int>> fold_blocks(int samples, int folds) {
    if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
    if (samples < folds)
        throw std::invalid_argument("cross-validation needs at least one sample per fold");
    std::vector<std::pair<int, int>> blocks;
    const int base = samples / folds;
    const int extra = samples % folds;
    int start = 0;
    for (int b = 0; b < folds; ++b) {
        const int len = base + (b < extra ? 1 : 0);
        blocks.emplace_back(start, start + len);
        start += len;
    }
    return blocks;
}

// Cross-validated SVR fitness over a fixed dataset. The squared-distance
// matrices of every fold are width-independent and computed once, so repeated
// swarm evaluations only pay for kernel rows and the dual solve; results are
// memoized by position because converged swarms revisit identical points.
class CvEvaluator {
public:
    CvEvaluator(const std::vector<std::vector<double>>& inputs, const std::vector<double>& targets,
                int folds, double tube = 0.01, svr::SVRTrainOptions options = {})
        : tube_(tube), options_(options) {
        svr::check_training_data(inputs, targets);
        const int n = static_cast<int>(inputs.size());
        const auto blocks = fold_blocks(n, folds);

        folds_.resize(blocks.size());
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            Fold& fold = folds_[b];
            std::vector<int> train_idx;
            for (int i = 0; i < n; ++i)
                if (i < blocks[b].first || i >= blocks[b].second) train_idx.push_back(i);
            fold.nt = static_cast<int>(train_idx.size());
            fold.nv = blocks[b].second - blocks[b].first;

            fold.y_train.reserve(fold.nt);
            for (int i : train_idx) fold.y_train.push_back(targets[i]);
            fold.y_val.assign(targets.begin() + blocks[b].first, targets.begin() + blocks[b].second);

            fold.d2_train.resize(static_cast<std::size_t>(fold.nt) * fold.nt);
            for (int i = 0; i < fold.nt; ++i)
                for (int j = i; j < fold.nt; ++j) {
                    const double d =
                        svr::squared_distance(inputs[train_idx[i]], inputs[train_idx[j]]);
                    fold.d2_train[static_cast<std::size_t>(i) * fold.nt + j] = d;
                    fold.d2_train[static_cast<std::size_t>(j) * fold.nt + i] = d;
                }
            fold.d2_cross.resize(static_cast<std::size_t>(fold.nt) * fold.nv);
            for (int i = 0; i < fold.nt; ++i)
                for (int v = 0; v < fold.nv; ++v)
                    fold.d2_cross[static_cast<std::size_t>(i) * fold.nv + v] =
                        svr::squared_distance(inputs[train_idx[i]],
                                              inputs[blocks[b].first + v]);
        }
    }

    double evaluate(std::span<const double> position) {
        if (position.size() != 2)
            throw std::invalid_argument("hyperparameter position must be 2-dimensional");
        const std::pair<double, double> key{position[0], position[1]};
        if (auto hit = memo_.find(key); hit != memo_.end()) return hit->second;

        const double C = std::exp2(position[0]);
        const double sigma = std::exp2(position[1]);
        const double scale = -1.0 / (2.0 * sigma * sigma);

        double total = 0.0;
        for (Fold& fold : folds_) {
            svr::detail::KernelCache kernel(fold.d2_train, fold.nt, sigma);
            svr::detail::DualSolution sol =
                svr::detail::solve_dual(kernel, fold.y_train, C, tube_, options_);

            double sq = 0.0;
            for (int v = 0; v < fold.nv; ++v) {
                double f = sol.bias;
                for (int i = 0; i < fold.nt; ++i) {
                    const double beta = sol.beta[i];
                    if (beta != 0.0)
                        f += beta *
                             std::exp(scale *
                                      fold.d2_cross[static_cast<std::size_t>(i) * fold.nv + v]);
                }
                const double e = f - fold.y_val[v];
                sq += e * e;
            }
            total += std::sqrt(sq / fold.nv);
        }
        const double fitness = total / static_cast<double>(folds_.size());
        memo_.emplace(key, fitness);
        return fitness;
    }

private:
    struct Fold {
        std::vector<double> y_train, y_val;
        std::vector<double> d2_train;  // nt x nt
        std::vector<double> d2_cross;  // nt x nv
        int nt = 0, nv = 0;
    };

    double tube_;
    svr::SVRTrainOptions options_;
    std::vector<Fold> folds_;
    std::map<std::pair<double, double>, double> memo_;
};

// Mean held-out RMSE of an SVR at the decoded position over chronological
// cross-validation blocks.
inline double cv_fitness(const std::vector<std::vector<double>>& inputs,
                         const std::vector<double>& targets, int folds,
                         std::span<const double> position, double tube = 0.01,
                         svr::SVRTrainOptions options = {}) {
    CvEvaluator evaluator(inputs, targets, folds, tube, options);
    return evaluator.evaluate(position);
}

}  // namespace usv::pso
