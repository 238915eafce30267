#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "clrbm/blocks.hpp"
#include "clrbm/dataset.hpp"
#include "clrbm/model.hpp"
#include "clrbm/numeric.hpp"
#include "clrbm/objectives.hpp"

namespace clrbm {

/// Gradient of an objective with respect to (alpha, beta, w); same shapes
/// as the parameter triple.
struct GradientTriple {
    std::vector<double> d_alpha;
    std::vector<double> d_beta;
    std::vector<double> d_w; // row-major n*m

    GradientTriple() = default;
    GradientTriple(int n, int m)
        : d_alpha(static_cast<std::size_t>(n), 0.0),
          d_beta(static_cast<std::size_t>(m), 0.0),
          d_w(static_cast<std::size_t>(n) * static_cast<std::size_t>(m), 0.0) {}

    double squared_norm() const {
        double s = 0.0;
        for (double v : d_alpha) s += v * v;
        for (double v : d_beta) s += v * v;
        for (double v : d_w) s += v * v;
        return s;
    }
    double norm() const { return std::sqrt(squared_norm()); }
};

/// Expectation of a statistic under the clamped block conditional of one
/// data row: sum_{x_c} f(x) e^{-E^(c)(x)} / sum_{x_c} e^{-E^(c)(x)} with the
/// off-block coordinates held at the row's values.
inline double block_expectation(const RbmParams& p, std::span<const Spin> row, const Block& c,
                                const std::function<double(std::span<const Spin>)>& f) {
    check_visible_shape(p, row);
    detail::check_block(c, p.n);
    std::vector<Spin> buf(row.begin(), row.end());
    std::vector<double> logw;
    std::vector<double> fv;
    logw.reserve(std::size_t{1} << c.size());
    fv.reserve(std::size_t{1} << c.size());
    for_each_block_assignment(buf, c, [&](std::span<const Spin> x) {
        logw.push_back(-restricted_energy(p, x, c));
        fv.push_back(f(x));
    });
    double mx = logw[0];
    for (double v : logw) mx = std::max(mx, v);
    double z = 0.0, acc = 0.0;
    for (std::size_t t = 0; t < logw.size(); ++t) {
        const double w = std::exp(logw[t] - mx);
        z += w;
        acc += w * fv[t];
    }
    return acc / z;
}

namespace detail {

/// Per-row hidden activations a_j = beta_j + sum_i w_ij x_i for every row,
/// stored row-major (num_rows x m).
inline std::vector<double> row_activations(const RbmParams& p, const Dataset& data) {
    std::vector<double> act(static_cast<std::size_t>(data.num_rows) * p.m);
    for (int mu = 0; mu < data.num_rows; ++mu) {
        auto r = data.row(mu);
        double* a = act.data() + static_cast<std::size_t>(mu) * p.m;
        for (int j = 0; j < p.m; ++j) a[j] = p.beta[j];
        for (int i = 0; i < p.n; ++i) {
            const double* wrow = p.w.data() + static_cast<std::size_t>(i) * p.m;
            const double xi = r[i];
            for (int j = 0; j < p.m; ++j) a[j] += wrow[j] * xi;
        }
    }
    return act;
}

// The clamped-block weight exp(-E^(c)) factors as
//   exp(s_alpha + sum_j |a_j|) * prod_j (1 + z_j) / 2^m,   z_j = e^{-2|a_j|},
// where the product lies in [1, 2^m] and the constant 2^m cancels in every
// normalized ratio. Max-shifting the additive part alone therefore never
// overflows, one exp per unit yields both the weight factor and
// tanh(a_j) = sign(a_j)(1-z_j)/(1+z_j), and no logs are needed at all.

struct DataMoments {
    std::vector<double> x;  // n
    std::vector<double> t;  // m
    std::vector<double> xt; // n*m
};

inline DataMoments data_side_moments(const RbmParams& p, const Dataset& data,
                                     const std::vector<double>& act) {
    DataMoments mom;
    mom.x.assign(static_cast<std::size_t>(p.n), 0.0);
    mom.t.assign(static_cast<std::size_t>(p.m), 0.0);
    mom.xt.assign(static_cast<std::size_t>(p.n) * p.m, 0.0);
    std::vector<double> th(static_cast<std::size_t>(p.m));
    for (int mu = 0; mu < data.num_rows; ++mu) {
        auto r = data.row(mu);
        const double* a = act.data() + static_cast<std::size_t>(mu) * p.m;
        for (int j = 0; j < p.m; ++j) th[j] = std::tanh(a[j]);
        for (int i = 0; i < p.n; ++i) mom.x[i] += r[i];
        for (int j = 0; j < p.m; ++j) mom.t[j] += th[j];
        for (int i = 0; i < p.n; ++i) {
            double* row = mom.xt.data() + static_cast<std::size_t>(i) * p.m;
            const double xi = r[i];
            for (int j = 0; j < p.m; ++j) row[j] += xi * th[j];
        }
    }
    const double inv = 1.0 / data.num_rows;
    for (double& v : mom.x) v *= inv;
    for (double& v : mom.t) v *= inv;
    for (double& v : mom.xt) v *= inv;
    return mom;
}

} // namespace detail

/// Exact gradient of composite_likelihood. For every block and row the 2^k
/// clamped energies are computed once, walking the assignments in Gray-code
/// order so each step is an O(m) activation update, and all statistics
/// (x_i, T_j, x_i T_j) reuse them. Entries:
///   d_alpha_i = Lambda * sum_{c containing i} (<x_i>_D - <x_i>_c)
///   d_beta_j  = <T_j>_D - Lambda * sum_c <T_j>_c
///   d_w_ij    = <x_i T_j>_D - Lambda * sum_c <x_i T_j>_c
inline GradientTriple cl_gradient(const RbmParams& p, const Dataset& data, const BlockFamily& family) {
    detail::check_instance(p, data);
    detail::check_family(p, family);
    const int n = p.n, m = p.m;
    const std::vector<double> act = detail::row_activations(p, data);
    const detail::DataMoments mom = detail::data_side_moments(p, data, act);

    // model-side accumulators, summed over blocks and rows
    std::vector<double> acc_x(static_cast<std::size_t>(n), 0.0);
    std::vector<double> acc_t(static_cast<std::size_t>(m), 0.0);
    std::vector<double> acc_xt(static_cast<std::size_t>(n) * m, 0.0);
    std::vector<int> in_count(static_cast<std::size_t>(n), 0); // blocks containing i

    std::vector<double> a(static_cast<std::size_t>(m));
    std::vector<double> wbase, wfac;
    std::vector<double> tanbuf;
    std::vector<double> exp_x, exp_t, exp_xt;
    std::vector<char> in_block(static_cast<std::size_t>(n));

    for (const Block& c : family.blocks) {
        const int k = static_cast<int>(c.size());
        const std::uint64_t count = std::uint64_t{1} << k;
        wbase.resize(count);
        wfac.resize(count);
        tanbuf.resize(count * m);
        exp_x.assign(static_cast<std::size_t>(k), 0.0);
        exp_t.assign(static_cast<std::size_t>(m), 0.0);
        exp_xt.assign(static_cast<std::size_t>(k) * m, 0.0);
        std::fill(in_block.begin(), in_block.end(), 0);
        for (int i : c) {
            in_block[i] = 1;
            ++in_count[i];
        }

        for (int mu = 0; mu < data.num_rows; ++mu) {
            auto r = data.row(mu);
            // start from the row activations with all block spins forced to -1
            const double* base = act.data() + static_cast<std::size_t>(mu) * m;
            std::copy(base, base + m, a.begin());
            double s_alpha = 0.0;
            for (int b = 0; b < k; ++b) {
                const int i = c[b];
                if (r[i] > 0) {
                    const double* wrow = p.w.data() + static_cast<std::size_t>(i) * m;
                    for (int j = 0; j < m; ++j) a[j] -= 2.0 * wrow[j];
                }
                s_alpha -= p.alpha[i];
            }

            // Gray-code walk over all 2^k block assignments; state at step t
            // is gray(t) = t ^ (t >> 1), bit b set meaning spin +1 at c[b]
            for (std::uint64_t t = 0;; ++t) {
                double abs_sum = 0.0;
                double prod = 1.0;
                double* tb = tanbuf.data() + t * m;
                for (int j = 0; j < m; ++j) {
                    const double av = std::abs(a[j]);
                    const double z = std::exp(-2.0 * av);
                    const double s = (1.0 - z) / (1.0 + z);
                    tb[j] = a[j] < 0.0 ? -s : s;
                    abs_sum += av;
                    prod *= 1.0 + z;
                }
                wbase[t] = s_alpha + abs_sum;
                wfac[t] = prod;
                if (t + 1 == count) break;
                const int b = std::countr_zero(t + 1);
                const std::uint64_t g_next = (t + 1) ^ ((t + 1) >> 1);
                const double s_new = (g_next >> b) & 1 ? 1.0 : -1.0;
                const int i = c[b];
                const double* wrow = p.w.data() + static_cast<std::size_t>(i) * m;
                for (int j = 0; j < m; ++j) a[j] += 2.0 * s_new * wrow[j];
                s_alpha += 2.0 * s_new * p.alpha[i];
            }

            double mx = wbase[0];
            for (std::uint64_t t = 1; t < count; ++t) mx = std::max(mx, wbase[t]);
            double z = 0.0;
            for (std::uint64_t t = 0; t < count; ++t) {
                wfac[t] *= std::exp(wbase[t] - mx);
                z += wfac[t];
            }
            const double invz = 1.0 / z;

            std::fill(exp_x.begin(), exp_x.end(), 0.0);
            std::fill(exp_t.begin(), exp_t.end(), 0.0);
            std::fill(exp_xt.begin(), exp_xt.end(), 0.0);
            for (std::uint64_t t = 0; t < count; ++t) {
                const double q = wfac[t] * invz;
                const std::uint64_t g = t ^ (t >> 1);
                const double* tb = tanbuf.data() + t * m;
                for (int j = 0; j < m; ++j) exp_t[j] += q * tb[j];
                for (int b = 0; b < k; ++b) {
                    const double xb = (g >> b) & 1 ? 1.0 : -1.0;
                    exp_x[b] += q * xb;
                    const double qx = q * xb;
                    double* xt = exp_xt.data() + static_cast<std::size_t>(b) * m;
                    for (int j = 0; j < m; ++j) xt[j] += qx * tb[j];
                }
            }

            for (int b = 0; b < k; ++b) acc_x[c[b]] += exp_x[b];
            for (int j = 0; j < m; ++j) acc_t[j] += exp_t[j];
            for (int b = 0; b < k; ++b) {
                double* dst = acc_xt.data() + static_cast<std::size_t>(c[b]) * m;
                const double* src = exp_xt.data() + static_cast<std::size_t>(b) * m;
                for (int j = 0; j < m; ++j) dst[j] += src[j];
            }
            for (int i = 0; i < n; ++i) {
                if (in_block[i]) continue;
                double* dst = acc_xt.data() + static_cast<std::size_t>(i) * m;
                const double xi = r[i];
                for (int j = 0; j < m; ++j) dst[j] += xi * exp_t[j];
            }
        }
    }

    const double scale = family.lambda / data.num_rows;
    GradientTriple g(n, m);
    for (int i = 0; i < n; ++i) {
        g.d_alpha[i] = family.lambda * in_count[i] * mom.x[i] - scale * acc_x[i];
    }
    for (int j = 0; j < m; ++j) g.d_beta[j] = mom.t[j] - scale * acc_t[j];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            g.d_w[static_cast<std::size_t>(i) * m + j] =
                mom.xt[static_cast<std::size_t>(i) * m + j] - scale * acc_xt[static_cast<std::size_t>(i) * m + j];
        }
    }
    return g;
}

/// Exact gradient of the true log-likelihood: data moments minus full model
/// moments, the latter by a Gray-code sweep over all 2^n visible states.
/// Cost is O(2^n m) plus the data pass, so n is capped.
inline GradientTriple ml_gradient(const RbmParams& p, const Dataset& data, int enum_cap = kDefaultEnumCap) {
    detail::check_instance(p, data);
    if (p.n > enum_cap) throw std::invalid_argument("ml_gradient: 2^n enumeration exceeds cap");
    const int n = p.n, m = p.m;
    const std::vector<double> act = detail::row_activations(p, data);
    const detail::DataMoments mom = detail::data_side_moments(p, data, act);

    // sweep 1: max log-weight for the shift
    std::vector<double> a(static_cast<std::size_t>(m));
    std::vector<double> th(static_cast<std::size_t>(m));
    const std::uint64_t count = std::uint64_t{1} << n;
    auto reset_state = [&](double& s_alpha) {
        for (int j = 0; j < m; ++j) {
            double s = p.beta[j];
            for (int i = 0; i < n; ++i) s -= p.weight(i, j);
            a[j] = s;
        }
        s_alpha = 0.0;
        for (int i = 0; i < n; ++i) s_alpha -= p.alpha[i];
    };
    auto advance = [&](std::uint64_t t, double& s_alpha) {
        const int i = std::countr_zero(t + 1);
        const std::uint64_t g_next = (t + 1) ^ ((t + 1) >> 1);
        const double s_new = (g_next >> i) & 1 ? 1.0 : -1.0;
        const double* wrow = p.w.data() + static_cast<std::size_t>(i) * m;
        for (int j = 0; j < m; ++j) a[j] += 2.0 * s_new * wrow[j];
        s_alpha += 2.0 * s_new * p.alpha[i];
    };

    double s_alpha = 0.0;
    reset_state(s_alpha);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 0;; ++t) {
        double base = s_alpha;
        for (int j = 0; j < m; ++j) base += std::abs(a[j]);
        mx = std::max(mx, base);
        if (t + 1 == count) break;
        advance(t, s_alpha);
    }

    // sweep 2: accumulate shifted weights and moments
    std::vector<double> sx(static_cast<std::size_t>(n), 0.0);
    std::vector<double> st(static_cast<std::size_t>(m), 0.0);
    std::vector<double> sxt(static_cast<std::size_t>(n) * m, 0.0);
    double z = 0.0;
    reset_state(s_alpha);
    for (std::uint64_t t = 0;; ++t) {
        double base = s_alpha;
        double prod = 1.0;
        for (int j = 0; j < m; ++j) {
            const double av = std::abs(a[j]);
            const double zj = std::exp(-2.0 * av);
            const double s = (1.0 - zj) / (1.0 + zj);
            th[j] = a[j] < 0.0 ? -s : s;
            base += av;
            prod *= 1.0 + zj;
        }
        const double w = std::exp(base - mx) * prod;
        z += w;
        const std::uint64_t g = t ^ (t >> 1);
        for (int j = 0; j < m; ++j) st[j] += w * th[j];
        for (int i = 0; i < n; ++i) {
            const double xi = (g >> i) & 1 ? 1.0 : -1.0;
            sx[i] += w * xi;
            const double wx = w * xi;
            double* row = sxt.data() + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) row[j] += wx * th[j];
        }
        if (t + 1 == count) break;
        advance(t, s_alpha);
    }

    const double invz = 1.0 / z;
    GradientTriple g(n, m);
    for (int i = 0; i < n; ++i) g.d_alpha[i] = mom.x[i] - sx[i] * invz;
    for (int j = 0; j < m; ++j) g.d_beta[j] = mom.t[j] - st[j] * invz;
    for (std::size_t t = 0; t < sxt.size(); ++t) g.d_w[t] = mom.xt[t] - sxt[t] * invz;
    return g;
}

} // namespace clrbm
