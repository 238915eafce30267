#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "clrbm/blocks.hpp"
#include "clrbm/dataset.hpp"
#include "clrbm/model.hpp"
#include "clrbm/numeric.hpp"

// Brute-force ground truth for small n. Everything here evaluates full
// marginal energies through model-core only; none of the incremental
// machinery of objectives/gradients is reused, so agreement between the two
// is evidence, not tautology.

namespace clrbm {

namespace oracle_detail {

inline void check_cap(const RbmParams& p, int enum_cap) {
    if (p.n > enum_cap) throw std::invalid_argument("exact oracle: 2^n enumeration exceeds cap");
}

/// Visible state for a Gray-walk step: bit i of gray(t) set means x_i = +1.
inline void state_of(std::uint64_t t, int n, std::vector<Spin>& x) {
    const std::uint64_t g = t ^ (t >> 1);
    for (int i = 0; i < n; ++i) x[i] = (g >> i) & 1 ? Spin{1} : Spin{-1};
}

} // namespace oracle_detail

/// ln Z = ln sum_x exp(-E(x)) over all 2^n visible states. The sweep walks
/// states in Gray-code order keeping the hidden activations up to date, so
/// each step costs O(m).
inline double log_partition(const RbmParams& p, int enum_cap = kDefaultEnumCap) {
    oracle_detail::check_cap(p, enum_cap);
    const int n = p.n, m = p.m;
    std::vector<double> a(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        double s = p.beta[j];
        for (int i = 0; i < n; ++i) s -= p.weight(i, j);
        a[j] = s;
    }
    double s_alpha = 0.0;
    for (int i = 0; i < n; ++i) s_alpha -= p.alpha[i];

    const std::uint64_t count = std::uint64_t{1} << n;
    LogSumExp lse;
    for (std::uint64_t t = 0;; ++t) {
        double lw = s_alpha;
        for (int j = 0; j < m; ++j) lw += log_cosh(a[j]);
        lse.add(lw);
        if (t + 1 == count) break;
        const int i = std::countr_zero(t + 1);
        const std::uint64_t g_next = (t + 1) ^ ((t + 1) >> 1);
        const double s_new = (g_next >> i) & 1 ? 1.0 : -1.0;
        for (int j = 0; j < m; ++j) a[j] += 2.0 * s_new * p.weight(i, j);
        s_alpha += 2.0 * s_new * p.alpha[i];
    }
    return lse.value();
}

/// True log-likelihood <ln P(x)>_D = <-E(x)>_D - ln Z.
inline double log_likelihood_ml(const RbmParams& p, const Dataset& data, int enum_cap = kDefaultEnumCap) {
    oracle_detail::check_cap(p, enum_cap);
    if (data.n != p.n) throw std::invalid_argument("dataset width does not match n");
    if (data.num_rows < 1) throw std::invalid_argument("dataset is empty");
    double mean_neg_e = 0.0;
    for (int mu = 0; mu < data.num_rows; ++mu) {
        mean_neg_e += -marginal_energy(p, data.row(mu));
    }
    mean_neg_e /= data.num_rows;
    return mean_neg_e - log_partition(p, enum_cap);
}

/// ln P(x_c | x_cbar) by explicit enumeration of the 2^|c| completions of x,
/// each evaluated with the full marginal energy.
inline double conditional_log_prob(const RbmParams& p, std::span<const Spin> x, const Block& c,
                                   int enum_cap = kDefaultEnumCap) {
    oracle_detail::check_cap(p, enum_cap);
    check_visible_shape(p, x);
    detail::check_block(c, p.n);
    std::vector<Spin> buf(x.begin(), x.end());
    const int k = static_cast<int>(c.size());
    LogSumExp lse;
    for (std::uint64_t t = 0; t < (std::uint64_t{1} << k); ++t) {
        for (int b = 0; b < k; ++b) buf[c[b]] = (t >> b) & 1 ? Spin{1} : Spin{-1};
        lse.add(-marginal_energy(p, buf));
    }
    return -marginal_energy(p, x) - lse.value();
}

/// Remainder term R_F = Lambda * sum_c < ln sum_{x_c} P(x) >_D; satisfies
/// L_ML = L_F + R_F and is always <= 0.
inline double remainder(const RbmParams& p, const Dataset& data, const BlockFamily& family,
                        int enum_cap = kDefaultEnumCap) {
    oracle_detail::check_cap(p, enum_cap);
    if (family.n != p.n) throw std::invalid_argument("family built for a different n");
    if (data.n != p.n) throw std::invalid_argument("dataset width does not match n");
    if (data.num_rows < 1) throw std::invalid_argument("dataset is empty");
    const double log_z = log_partition(p, enum_cap);
    std::vector<Spin> buf(static_cast<std::size_t>(p.n));
    double total = 0.0;
    for (const Block& c : family.blocks) {
        const int k = static_cast<int>(c.size());
        double block_sum = 0.0;
        for (int mu = 0; mu < data.num_rows; ++mu) {
            auto r = data.row(mu);
            std::copy(r.begin(), r.end(), buf.begin());
            LogSumExp lse;
            for (std::uint64_t t = 0; t < (std::uint64_t{1} << k); ++t) {
                for (int b = 0; b < k; ++b) buf[c[b]] = (t >> b) & 1 ? Spin{1} : Spin{-1};
                lse.add(-marginal_energy(p, buf));
            }
            block_sum += lse.value() - log_z;
        }
        total += block_sum;
    }
    return family.lambda * total / data.num_rows;
}

/// D_k = R_{F_{k+1}} - R_{F_k}; nonnegative, which is what makes the
/// composite-likelihood chain monotone in k.
inline double remainder_difference(const RbmParams& p, const Dataset& data, int k,
                                   int enum_cap = kDefaultEnumCap) {
    if (k < 1 || k > p.n - 1) throw std::invalid_argument("remainder_difference: need 1 <= k <= n-1");
    const double r_hi = remainder(p, data, enumerate_family(p.n, k + 1), enum_cap);
    const double r_lo = remainder(p, data, enumerate_family(p.n, k), enum_cap);
    return r_hi - r_lo;
}

} // namespace clrbm
