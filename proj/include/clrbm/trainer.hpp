#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clrbm/blocks.hpp"
#include "clrbm/dataset.hpp"
#include "clrbm/gradients.hpp"
#include "clrbm/model.hpp"
#include "clrbm/numeric.hpp"
#include "clrbm/objectives.hpp"
#include "clrbm/oracle.hpp"
#include "clrbm/rng.hpp"

namespace clrbm {

/// Sentinel block order requesting exact maximum-likelihood training.
inline constexpr int kMlOrder = 0;

struct TrainConfig {
    int k = 1; // block order; kMlOrder trains against the true log-likelihood
    double learning_rate = 0.1;
    std::int64_t iterations = 50000;
    std::uint64_t init_seed = 1;
    double init_scale = 0.5;
    std::int64_t record_every = 100;
    int ll_cap = kDefaultEnumCap; // true log-likelihood recorded only when n <= ll_cap
};

struct TracePoint {
    std::int64_t iteration = 0;
    double objective = 0.0;
    bool has_true_ll = false;
    double true_ll = 0.0;
    double grad_norm = 0.0;
};

struct TrainTrace {
    std::vector<TracePoint> points;
    RbmParams final_params;
};

/// Entries i.i.d. uniform on [-scale, scale], drawn in a fixed order
/// (alpha, then beta, then w row-major) so a seed pins the whole triple.
inline RbmParams init_params(int n, int m, std::uint64_t seed, double scale) {
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("init_params: scale must be finite and >= 0");
    }
    SplitMix64 rng(seed);
    RbmParams p(n, m);
    for (int i = 0; i < n; ++i) p.alpha[i] = rng.next_uniform(-scale, scale);
    for (int j = 0; j < m; ++j) p.beta[j] = rng.next_uniform(-scale, scale);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) p.weight(i, j) = rng.next_uniform(-scale, scale);
    }
    return p;
}

struct MadTriple {
    double alpha = 0.0;
    double beta = 0.0;
    double w = 0.0;
};

/// Per-group means of |a - b|.
inline MadTriple mean_absolute_deviation(const RbmParams& a, const RbmParams& b) {
    if (a.n != b.n || a.m != b.m) throw std::invalid_argument("mean_absolute_deviation: shape mismatch");
    MadTriple mad;
    for (int i = 0; i < a.n; ++i) mad.alpha += std::abs(a.alpha[i] - b.alpha[i]);
    for (int j = 0; j < a.m; ++j) mad.beta += std::abs(a.beta[j] - b.beta[j]);
    for (std::size_t t = 0; t < a.w.size(); ++t) mad.w += std::abs(a.w[t] - b.w[t]);
    mad.alpha /= a.n;
    mad.beta /= a.m;
    mad.w /= static_cast<double>(a.w.size());
    return mad;
}

/// Full-batch gradient ascent at a fixed rate: theta <- theta + rate * grad,
/// with grad the exact composite-likelihood gradient for order k (or the
/// true-log-likelihood gradient for kMlOrder). Records the objective, the
/// true log-likelihood when enumeration permits, and the gradient norm at
/// iteration 0, every record_every-th iteration and the final one.
inline TrainTrace train(const Dataset& data, int m, const TrainConfig& cfg) {
    const int n = data.n;
    if (data.num_rows < 1) throw std::invalid_argument("train: dataset is empty");
    if (m < 1) throw std::invalid_argument("train: need m >= 1");
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be > 0");
    if (cfg.iterations < 1) throw std::invalid_argument("train: iterations must be >= 1");
    if (cfg.record_every < 1) throw std::invalid_argument("train: record_every must be >= 1");
    if (cfg.k != kMlOrder && (cfg.k < 1 || cfg.k > n)) {
        throw std::invalid_argument("train: block order k must be in 1..n (or the ML sentinel)");
    }
    if (cfg.k == kMlOrder && n > cfg.ll_cap) {
        throw std::invalid_argument("train: exact ML training needs n <= ll_cap");
    }
    const bool record_true_ll = n <= cfg.ll_cap;

    BlockFamily family;
    if (cfg.k != kMlOrder) family = enumerate_family(n, cfg.k);

    RbmParams params = init_params(n, m, cfg.init_seed, cfg.init_scale);

    auto gradient_at = [&](const RbmParams& p) {
        return cfg.k == kMlOrder ? ml_gradient(p, data, cfg.ll_cap) : cl_gradient(p, data, family);
    };
    auto objective_at = [&](const RbmParams& p) {
        return cfg.k == kMlOrder ? log_likelihood_ml(p, data, cfg.ll_cap)
                                 : composite_likelihood(p, data, family);
    };

    TrainTrace trace;
    auto record = [&](std::int64_t iter, const RbmParams& p, const GradientTriple& g) {
        TracePoint pt;
        pt.iteration = iter;
        pt.objective = objective_at(p);
        if (!std::isfinite(pt.objective)) {
            throw std::runtime_error("train: objective became non-finite at iteration " + std::to_string(iter));
        }
        if (record_true_ll) {
            pt.has_true_ll = true;
            pt.true_ll = cfg.k == kMlOrder ? pt.objective : log_likelihood_ml(p, data, cfg.ll_cap);
        }
        pt.grad_norm = g.norm();
        trace.points.push_back(pt);
    };
    auto guard = [&](const RbmParams& p, std::int64_t iter) {
        for (double v : p.alpha) {
            if (!(std::abs(v) <= 1e6)) throw std::runtime_error("train: parameters diverged at iteration " + std::to_string(iter));
        }
        for (double v : p.beta) {
            if (!(std::abs(v) <= 1e6)) throw std::runtime_error("train: parameters diverged at iteration " + std::to_string(iter));
        }
        for (double v : p.w) {
            if (!(std::abs(v) <= 1e6)) throw std::runtime_error("train: parameters diverged at iteration " + std::to_string(iter));
        }
    };

    GradientTriple grad = gradient_at(params);
    record(0, params, grad);
    for (std::int64_t t = 1; t <= cfg.iterations; ++t) {
        for (int i = 0; i < n; ++i) params.alpha[i] += cfg.learning_rate * grad.d_alpha[i];
        for (int j = 0; j < m; ++j) params.beta[j] += cfg.learning_rate * grad.d_beta[j];
        for (std::size_t s = 0; s < params.w.size(); ++s) params.w[s] += cfg.learning_rate * grad.d_w[s];
        guard(params, t);
        grad = gradient_at(params);
        if (t % cfg.record_every == 0 || t == cfg.iterations) record(t, params, grad);
    }
    trace.final_params = std::move(params);
    return trace;
}

/// Trace CSV: iteration, objective, true_log_likelihood (empty when not
/// recorded), grad_norm.
inline void write_trace_csv(const TrainTrace& trace, std::ostream& os) {
    os << "iteration,objective,true_log_likelihood,grad_norm\n";
    for (const TracePoint& pt : trace.points) {
        os << pt.iteration << ',' << format_double(pt.objective) << ',';
        if (pt.has_true_ll) os << format_double(pt.true_ll);
        os << ',' << format_double(pt.grad_norm) << '\n';
    }
}

inline void write_trace_csv(const TrainTrace& trace, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open trace file for writing: " + path);
    write_trace_csv(trace, os);
    if (!os) throw std::runtime_error("failed writing trace file: " + path);
}

} // namespace clrbm
