#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace usv::svr {

struct SVRHyperparams {
    double penalty = 16.0;      // C
    double kernel_width = 1.0;  // sigma of the Gaussian kernel
    double tube = 0.01;         // epsilon of the insensitive loss

    void validate() const {
        if (!(penalty > 0.0)) throw std::invalid_argument("SVR penalty must be positive");
        if (!(kernel_width > 0.0)) throw std::invalid_argument("kernel width must be positive");
        if (!(tube >= 0.0)) throw std::invalid_argument("tube width must be non-negative");
    }
};

struct SVRTrainOptions {
    double tolerance = 1e-3;      // maximal KKT violation accepted as converged
    int max_pair_updates = 10000; // pairwise working-set update cap
    bool record_objective = false;
};

struct SVRModel {
    std::vector<std::vector<double>> support_inputs;
    std::vector<double> dual_coeffs;   // beta per retained row; f(x) = sum beta*K + b
    std::vector<int> support_indexes;  // positions in the training set
    double bias = 0.0;
    SVRHyperparams hyperparams;
    bool converged = true;
    int pair_updates = 0;
    double final_violation = 0.0;
    std::vector<double> objective_trace;  // dual objective after each update, when recorded
};

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::domain_error("kernel inputs have mismatched dimensions: " +
                                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    double d2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        d2 += d * d;
    }
    return d2;
}

inline double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("kernel width must be positive");
    return std::exp(-squared_distance(x, y) / (2.0 * sigma * sigma));
}

namespace detail {

// Lazily materialized Gaussian kernel rows over a precomputed squared-distance
// matrix. Rows are cached because the working-set solver revisits the same
// rows many times; the distance matrix itself is width-independent and can be
// shared across solves with different sigma.
class KernelCache {
public:
    KernelCache(const std::vector<double>& d2, int l, double sigma)
        : d2_(d2), l_(l), scale_(-1.0 / (2.0 * sigma * sigma)), rows_(l) {}

    const std::vector<double>& row(int s) {
        std::vector<double>& r = rows_[s];
        if (r.empty()) {
            r.resize(l_);
            const double* d = d2_.data() + static_cast<std::size_t>(s) * l_;
            for (int j = 0; j < l_; ++j) r[j] = std::exp(scale_ * d[j]);
        }
        return r;
    }

private:
    const std::vector<double>& d2_;
    int l_;
    double scale_;
    std::vector<std::vector<double>> rows_;
};

struct DualSolution {
    std::vector<double> beta;
    double bias = 0.0;
    bool converged = true;
    int updates = 0;
    double violation = 0.0;
    std::vector<double> objective_trace;
};

// Pairwise working-set ascent on the epsilon-SVR dual. Each training sample
// carries two box-constrained multipliers (up/down); the maximal violating
// pair across both ledgers is updated until the violation drops below
// tolerance or the update cap is hit. beta = up - down per sample.
inline DualSolution solve_dual(KernelCache& kernel, std::span<const double> y, double C,
                               double tube, const SVRTrainOptions& opt) {
    const int l = static_cast<int>(y.size());
    std::vector<double> a_up(l, 0.0), a_dn(l, 0.0);
    std::vector<double> g(l, 0.0);  // (K beta)_s, maintained incrementally

    DualSolution sol;
    sol.beta.assign(l, 0.0);

    double objective = 0.0;  // dual objective (maximized); 0 at beta = 0
    constexpr double tau = 1e-12;

    enum Kind : int { up = 0, dn = 1 };
    int updates = 0;
    double violation = std::numeric_limits<double>::infinity();
    double m_val = 0.0, M_val = 0.0;

    while (true) {
        // Working-set selection: the feasible-ascent extremes over both
        // multiplier ledgers in one pass.
        m_val = -std::numeric_limits<double>::infinity();
        M_val = std::numeric_limits<double>::infinity();
        int m_s = -1, M_s = -1;
        int m_kind = up, M_kind = up;
        for (int s = 0; s < l; ++s) {
            const double u = y[s] - g[s];
            const double val_up = u - tube;  // gradient direction of the up multiplier
            const double val_dn = u + tube;  // and of the down multiplier
            if (a_up[s] < C && val_up > m_val) { m_val = val_up; m_s = s; m_kind = up; }
            if (a_dn[s] > 0.0 && val_dn > m_val) { m_val = val_dn; m_s = s; m_kind = dn; }
            if (a_up[s] > 0.0 && val_up < M_val) { M_val = val_up; M_s = s; M_kind = up; }
            if (a_dn[s] < C && val_dn < M_val) { M_val = val_dn; M_s = s; M_kind = dn; }
        }
        violation = m_val - M_val;
        if (violation <= opt.tolerance || m_s < 0 || M_s < 0) break;
        if (updates >= opt.max_pair_updates) break;

        const int si = m_s, sj = M_s;
        const std::vector<double>& Ki = kernel.row(si);
        const std::vector<double>& Kj = kernel.row(sj);
        double eta = Ki[si] + Kj[sj] - 2.0 * Ki[sj];
        if (eta < tau) eta = tau;

        // Step along the pair direction: beta_si rises by t, beta_sj falls by
        // t, clipped to whichever multiplier's box is hit first.
        double t = violation / eta;
        t = std::min(t, m_kind == up ? C - a_up[si] : a_dn[si]);
        t = std::min(t, M_kind == up ? a_up[sj] : C - a_dn[sj]);

        if (m_kind == up) a_up[si] += t; else a_dn[si] -= t;
        if (M_kind == up) a_up[sj] -= t; else a_dn[sj] += t;
        sol.beta[si] += t;
        sol.beta[sj] -= t;
        for (int s = 0; s < l; ++s) g[s] += t * (Ki[s] - Kj[s]);

        ++updates;
        if (opt.record_objective) {
            objective += violation * t - 0.5 * eta * t * t;
            sol.objective_trace.push_back(objective);
        }
    }

    sol.updates = updates;
    sol.violation = violation;
    sol.converged = violation <= opt.tolerance;

    // Bias from the free multipliers (averaged); midpoint of the violation
    // bracket when every multiplier sits at a bound.
    double sum = 0.0;
    int free_count = 0;
    for (int s = 0; s < l; ++s) {
        const double u = y[s] - g[s];
        if (a_up[s] > 0.0 && a_up[s] < C) { sum += u - tube; ++free_count; }
        if (a_dn[s] > 0.0 && a_dn[s] < C) { sum += u + tube; ++free_count; }
    }
    if (free_count > 0) sol.bias = sum / free_count;
    else if (std::isfinite(m_val) && std::isfinite(M_val)) sol.bias = 0.5 * (m_val + M_val);
    return sol;
}

}  // namespace detail

inline void check_training_data(const std::vector<std::vector<double>>& inputs,
                                const std::vector<double>& targets) {
    if (inputs.size() != targets.size())
        throw std::domain_error("inputs and targets must have the same length");
    if (inputs.size() < 2)
        throw std::domain_error("SVR training requires at least 2 samples");
    const std::size_t dim = inputs.front().size();
    if (dim == 0) throw std::domain_error("SVR inputs must be non-empty rows");
    for (const auto& row : inputs)
        if (row.size() != dim)
            throw std::domain_error("SVR input rows have inconsistent dimensions");
    for (double t : targets)
        if (!std::isfinite(t)) throw std::domain_error("SVR targets must be finite");
}

inline SVRModel train(const std::vector<std::vector<double>>& inputs,
                      const std::vector<double>& targets, const SVRHyperparams& hp,
                      const SVRTrainOptions& opt = {}) {
    hp.validate();
    check_training_data(inputs, targets);
    const int l = static_cast<int>(inputs.size());

    std::vector<double> d2(static_cast<std::size_t>(l) * l);
    for (int i = 0; i < l; ++i) {
        d2[static_cast<std::size_t>(i) * l + i] = 0.0;
        for (int j = i + 1; j < l; ++j) {
            const double d = squared_distance(inputs[i], inputs[j]);
            d2[static_cast<std::size_t>(i) * l + j] = d;
            d2[static_cast<std::size_t>(j) * l + i] = d;
        }
    }

    detail::KernelCache kernel(d2, l, hp.kernel_width);
    detail::DualSolution sol = detail::solve_dual(kernel, targets, hp.penalty, hp.tube, opt);

    SVRModel model;
    model.hyperparams = hp;
    model.bias = sol.bias;
    model.converged = sol.converged;
    model.pair_updates = sol.updates;
    model.final_violation = sol.violation;
    model.objective_trace = std::move(sol.objective_trace);
    for (int s = 0; s < l; ++s) {
        if (sol.beta[s] != 0.0) {
            model.support_inputs.push_back(inputs[s]);
            model.dual_coeffs.push_back(sol.beta[s]);
            model.support_indexes.push_back(s);
        }
    }
    return model;
}

inline double predict(const SVRModel& model, std::span<const double> x) {
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_inputs.size(); ++i)
        f += model.dual_coeffs[i] * rbf_kernel(model.support_inputs[i], x,
                                               model.hyperparams.kernel_width);
    return f;
}

// Maximal complementarity violation of the trained model over its training
// data, classifying each sample by where its dual coefficient sits in the box.
inline double kkt_report(const SVRModel& model, const std::vector<std::vector<double>>& inputs,
                         const std::vector<double>& targets) {
    check_training_data(inputs, targets);
    if (model.support_indexes.size() != model.dual_coeffs.size())
        throw std::invalid_argument("model lacks support indexes for its training set");

    std::vector<double> beta(inputs.size(), 0.0);
    for (std::size_t i = 0; i < model.support_indexes.size(); ++i) {
        const int s = model.support_indexes[i];
        if (s < 0 || s >= static_cast<int>(inputs.size()))
            throw std::invalid_argument("support index outside the training set");
        beta[s] += model.dual_coeffs[i];
    }

    const double C = model.hyperparams.penalty;
    const double eps = model.hyperparams.tube;
    const double at_bound = 1e-12 * std::max(1.0, C);
    double worst = 0.0;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        const double r = targets[s] - predict(model, inputs[s]);  // y - f
        double v;
        if (beta[s] >= C - at_bound) v = std::max(0.0, eps - r);
        else if (beta[s] > at_bound) v = std::abs(r - eps);
        else if (beta[s] >= -at_bound) v = std::max(0.0, std::abs(r) - eps);
        else if (beta[s] > -C + at_bound) v = std::abs(-r - eps);
        else v = std::max(0.0, eps + r);
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace usv::svr
