#pragma once

// Shared helpers for the test suites: seeded random instances, independent
// reference implementations used as oracles, and finite-difference drivers.
// Nothing in here reuses the evaluation internals of the code under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "clrbm/blocks.hpp"
#include "clrbm/dataset.hpp"
#include "clrbm/gradients.hpp"
#include "clrbm/model.hpp"
#include "clrbm/rng.hpp"

namespace testsupport {

using namespace clrbm;

inline int rand_int(SplitMix64& rng, int lo, int hi) { // inclusive bounds
    return lo + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline RbmParams random_params(SplitMix64& rng, int n, int m, double scale) {
    RbmParams p(n, m);
    for (auto& v : p.alpha) v = rng.next_uniform(-scale, scale);
    for (auto& v : p.beta) v = rng.next_uniform(-scale, scale);
    for (auto& v : p.w) v = rng.next_uniform(-scale, scale);
    return p;
}

inline Dataset random_dataset(SplitMix64& rng, int n, int rows) {
    Dataset d = make_dataset(n);
    std::vector<Spin> row(static_cast<std::size_t>(n));
    for (int r = 0; r < rows; ++r) {
        for (int i = 0; i < n; ++i) row[i] = rng.next_double() < 0.5 ? Spin{-1} : Spin{1};
        d.append_row(row);
    }
    return d;
}

/// Random covering family with overlaps: a handful of random blocks plus a
/// final block mopping up any uncovered indices.
inline BlockFamily random_irregular_family(SplitMix64& rng, int n) {
    const int r = rand_int(rng, 1, 2 * n);
    std::vector<Block> blocks;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<char> covered(static_cast<std::size_t>(n), 0);
    for (int b = 0; b < r; ++b) {
        const int size = rand_int(rng, 1, n);
        // partial Fisher-Yates for `size` distinct indices
        for (int t = 0; t < size; ++t) std::swap(idx[t], idx[rand_int(rng, t, n - 1)]);
        Block c(idx.begin(), idx.begin() + size);
        std::sort(c.begin(), c.end());
        for (int i : c) covered[i] = 1;
        blocks.push_back(std::move(c));
    }
    Block rest;
    for (int i = 0; i < n; ++i) {
        if (!covered[i]) rest.push_back(i);
    }
    if (!rest.empty()) blocks.push_back(std::move(rest));
    return make_family(n, std::move(blocks));
}

/// Central finite differences of a scalar functional of the parameters.
inline GradientTriple fd_gradient(RbmParams p, const std::function<double(const RbmParams&)>& f,
                                  double step = 1e-5) {
    GradientTriple g(p.n, p.m);
    auto diff = [&](double& slot) {
        const double orig = slot;
        slot = orig + step;
        const double up = f(p);
        slot = orig - step;
        const double down = f(p);
        slot = orig;
        return (up - down) / (2.0 * step);
    };
    for (int i = 0; i < p.n; ++i) g.d_alpha[i] = diff(p.alpha[i]);
    for (int j = 0; j < p.m; ++j) g.d_beta[j] = diff(p.beta[j]);
    for (std::size_t t = 0; t < p.w.size(); ++t) g.d_w[t] = diff(p.w[t]);
    return g;
}

inline double max_abs_diff(const GradientTriple& a, const GradientTriple& b) {
    double mx = 0.0;
    for (std::size_t t = 0; t < a.d_alpha.size(); ++t) mx = std::max(mx, std::abs(a.d_alpha[t] - b.d_alpha[t]));
    for (std::size_t t = 0; t < a.d_beta.size(); ++t) mx = std::max(mx, std::abs(a.d_beta[t] - b.d_beta[t]));
    for (std::size_t t = 0; t < a.d_w.size(); ++t) mx = std::max(mx, std::abs(a.d_w[t] - b.d_w[t]));
    return mx;
}

inline double max_abs(const GradientTriple& g) {
    double mx = 0.0;
    for (double v : g.d_alpha) mx = std::max(mx, std::abs(v));
    for (double v : g.d_beta) mx = std::max(mx, std::abs(v));
    for (double v : g.d_w) mx = std::max(mx, std::abs(v));
    return mx;
}

/// Hand-derived pseudo-likelihood gradient, independent of cl_gradient.
/// For each site i and row d, with d' the row with spin i flipped and
/// p = P(x_i = d_i | rest):  contribution (1 - p) * (s(d) - s(d')) where s
/// is the sufficient statistic of each parameter.
inline GradientTriple reference_pl_gradient(const RbmParams& p, const Dataset& data) {
    GradientTriple g(p.n, p.m);
    std::vector<Spin> buf(static_cast<std::size_t>(p.n));
    std::vector<double> th_d(static_cast<std::size_t>(p.m));
    std::vector<double> th_f(static_cast<std::size_t>(p.m));
    for (int mu = 0; mu < data.num_rows; ++mu) {
        auto r = data.row(mu);
        std::copy(r.begin(), r.end(), buf.begin());
        const double e_obs = marginal_energy(p, buf);
        for (int j = 0; j < p.m; ++j) th_d[j] = tanh_term(p, buf, j);
        for (int i = 0; i < p.n; ++i) {
            buf[i] = static_cast<Spin>(-buf[i]);
            const double e_flip = marginal_energy(p, buf);
            for (int j = 0; j < p.m; ++j) th_f[j] = tanh_term(p, buf, j);
            const double p_obs = logistic(e_flip - e_obs);
            const double q = 1.0 - p_obs;
            // alpha_a statistic: x_a; only a = i differs between d and d'
            g.d_alpha[i] += q * (r[i] - (-r[i]));
            for (int j = 0; j < p.m; ++j) {
                g.d_beta[j] += q * (th_d[j] - th_f[j]);
                for (int a = 0; a < p.n; ++a) {
                    const double xa_d = r[a];
                    const double xa_f = a == i ? -xa_d : xa_d;
                    g.d_w[static_cast<std::size_t>(a) * p.m + j] += q * (xa_d * th_d[j] - xa_f * th_f[j]);
                }
            }
            buf[i] = static_cast<Spin>(-buf[i]);
        }
    }
    const double scale = 1.0 / (static_cast<double>(p.n) * data.num_rows);
    for (auto& v : g.d_alpha) v *= scale;
    for (auto& v : g.d_beta) v *= scale;
    for (auto& v : g.d_w) v *= scale;
    return g;
}

} // namespace testsupport
