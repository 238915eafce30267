#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "clrbm/dataset.hpp"
#include "clrbm/model.hpp"
#include "clrbm/numeric.hpp"
#include "clrbm/rng.hpp"

namespace clrbm {

/// Block Gibbs schedule. One sweep is h|x followed by x|h.
struct SamplerConfig {
    std::uint64_t seed = 1;
    std::int64_t burn_in = 10000;
    std::int64_t thinning = 100;
    int num_samples = 1;
};

namespace detail {

inline void check_sampler_config(const SamplerConfig& cfg) {
    if (cfg.burn_in < 0) throw std::invalid_argument("sampler: burn_in must be >= 0");
    if (cfg.thinning < 1) throw std::invalid_argument("sampler: thinning must be >= 1");
    if (cfg.num_samples < 1) throw std::invalid_argument("sampler: num_samples must be >= 1");
}

inline void sample_hidden_inplace(const RbmParams& p, std::span<const Spin> x, std::span<Spin> h,
                                  SplitMix64& rng) {
    for (int j = 0; j < p.m; ++j) {
        // P(h_j = +1 | x) = sigma(2 a_j)
        const double prob = logistic(2.0 * hidden_activation(p, x, j));
        h[j] = rng.next_double() < prob ? Spin{1} : Spin{-1};
    }
}

inline void sample_visible_inplace(const RbmParams& p, std::span<const Spin> h, std::span<Spin> x,
                                   SplitMix64& rng) {
    for (int i = 0; i < p.n; ++i) {
        const double prob = logistic(2.0 * visible_field(p, h, i));
        x[i] = rng.next_double() < prob ? Spin{1} : Spin{-1};
    }
}

} // namespace detail

/// Draw the hidden layer given the visible layer; units are conditionally
/// independent, each +1 with probability sigma(2 a_j).
inline HiddenState sample_hidden_given_visible(const RbmParams& p, std::span<const Spin> x, SplitMix64& rng) {
    check_visible_shape(p, x);
    HiddenState h(static_cast<std::size_t>(p.m));
    detail::sample_hidden_inplace(p, x, h, rng);
    return h;
}

/// Mirror image for the visible layer, +1 with probability sigma(2 b_i).
inline VisibleState sample_visible_given_hidden(const RbmParams& p, std::span<const Spin> h, SplitMix64& rng) {
    check_hidden_shape(p, h);
    VisibleState x(static_cast<std::size_t>(p.n));
    detail::sample_visible_inplace(p, h, x, rng);
    return x;
}

/// Single-chain block Gibbs sampling from a uniformly random visible start:
/// burn_in sweeps are discarded, then every thinning-th visible state is
/// kept until num_samples rows are collected. Deterministic given the seed.
inline Dataset generate_dataset(const RbmParams& p, const SamplerConfig& cfg) {
    detail::check_sampler_config(cfg);
    SplitMix64 rng(cfg.seed);
    VisibleState x(static_cast<std::size_t>(p.n));
    HiddenState h(static_cast<std::size_t>(p.m));
    for (int i = 0; i < p.n; ++i) x[i] = rng.next_double() < 0.5 ? Spin{-1} : Spin{1};

    auto sweep = [&]() {
        detail::sample_hidden_inplace(p, x, h, rng);
        detail::sample_visible_inplace(p, h, x, rng);
    };

    for (std::int64_t s = 0; s < cfg.burn_in; ++s) sweep();
    Dataset data = make_dataset(p.n);
    data.values.reserve(static_cast<std::size_t>(cfg.num_samples) * p.n);
    for (int kept = 0; kept < cfg.num_samples; ++kept) {
        for (std::int64_t s = 0; s < cfg.thinning; ++s) sweep();
        data.append_row(x);
    }
    return data;
}

/// Exact i.i.d. generation for small n: enumerate the marginal P(x) over all
/// 2^n states (state index t maps bit i to x_i, set bit meaning +1) and draw
/// rows by inverse CDF. Removes the Markov chain from the picture entirely.
inline Dataset generate_dataset_exact(const RbmParams& p, int num_samples, std::uint64_t seed,
                                      int enum_cap = kDefaultEnumCap) {
    if (num_samples < 1) throw std::invalid_argument("sampler: num_samples must be >= 1");
    if (p.n > enum_cap) throw std::invalid_argument("exact sampling: 2^n enumeration exceeds cap");
    const std::uint64_t count = std::uint64_t{1} << p.n;
    std::vector<Spin> x(static_cast<std::size_t>(p.n));
    std::vector<double> logw(count);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 0; t < count; ++t) {
        for (int i = 0; i < p.n; ++i) x[i] = (t >> i) & 1 ? Spin{1} : Spin{-1};
        logw[t] = -marginal_energy(p, x);
        mx = std::max(mx, logw[t]);
    }
    std::vector<double> cum(count);
    double run = 0.0;
    for (std::uint64_t t = 0; t < count; ++t) {
        run += std::exp(logw[t] - mx);
        cum[t] = run;
    }

    SplitMix64 rng(seed);
    Dataset data = make_dataset(p.n);
    data.values.reserve(static_cast<std::size_t>(num_samples) * p.n);
    for (int s = 0; s < num_samples; ++s) {
        const double u = rng.next_double() * run;
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        std::uint64_t t = it == cum.end() ? count - 1 : static_cast<std::uint64_t>(it - cum.begin());
        for (int i = 0; i < p.n; ++i) x[i] = (t >> i) & 1 ? Spin{1} : Spin{-1};
        data.append_row(x);
    }
    return data;
}

} // namespace clrbm
