#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clrbm/numeric.hpp"

namespace clrbm {

/// Default limit on 2^n full-state enumerations.
inline constexpr int kDefaultEnumCap = 20;

/// Spin value, always -1 or +1.
using Spin = std::int8_t;
using VisibleState = std::vector<Spin>;
using HiddenState = std::vector<Spin>;

/// Parameters of a binary +-1 restricted Boltzmann machine: visible biases
/// alpha (n), hidden biases beta (m) and the dense n x m connection weights,
/// stored row-major (w[i*m + j] couples visible i with hidden j).
struct RbmParams {
    int n = 0;
    int m = 0;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> w;

    RbmParams() = default;
    RbmParams(int n_, int m_) : n(n_), m(m_) {
        if (n < 1 || m < 1) throw std::invalid_argument("RbmParams: need n >= 1 and m >= 1");
        alpha.assign(static_cast<std::size_t>(n), 0.0);
        beta.assign(static_cast<std::size_t>(m), 0.0);
        w.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(m), 0.0);
    }

    double weight(int i, int j) const { return w[static_cast<std::size_t>(i) * m + j]; }
    double& weight(int i, int j) { return w[static_cast<std::size_t>(i) * m + j]; }
};

inline void check_spins(std::span<const Spin> v) {
    for (Spin s : v) {
        if (s != 1 && s != -1) throw std::invalid_argument("state entries must be -1 or +1");
    }
}

inline void check_visible_shape(const RbmParams& p, std::span<const Spin> x) {
    if (static_cast<int>(x.size()) != p.n) {
        throw std::invalid_argument("visible state length does not match n");
    }
}

inline void check_hidden_shape(const RbmParams& p, std::span<const Spin> h) {
    if (static_cast<int>(h.size()) != p.m) {
        throw std::invalid_argument("hidden state length does not match m");
    }
}

/// Input activation of hidden unit j: a_j = beta_j + sum_i w_{i,j} x_i.
inline double hidden_activation(const RbmParams& p, std::span<const Spin> x, int j) {
    double a = p.beta[j];
    for (int i = 0; i < p.n; ++i) a += p.weight(i, j) * x[i];
    return a;
}

/// Input field of visible unit i: b_i = alpha_i + sum_j w_{i,j} h_j.
inline double visible_field(const RbmParams& p, std::span<const Spin> h, int i) {
    double b = p.alpha[i];
    const double* wrow = p.w.data() + static_cast<std::size_t>(i) * p.m;
    for (int j = 0; j < p.m; ++j) b += wrow[j] * h[j];
    return b;
}

/// Unnormalized joint log-weight sum_i alpha_i x_i + sum_j beta_j h_j +
/// sum_{i,j} w_{i,j} x_i h_j.
inline double joint_log_weight(const RbmParams& p, std::span<const Spin> x, std::span<const Spin> h) {
    check_visible_shape(p, x);
    check_hidden_shape(p, h);
    double s = 0.0;
    for (int i = 0; i < p.n; ++i) s += p.alpha[i] * x[i];
    for (int j = 0; j < p.m; ++j) s += p.beta[j] * h[j];
    for (int i = 0; i < p.n; ++i) {
        const double* wrow = p.w.data() + static_cast<std::size_t>(i) * p.m;
        double t = 0.0;
        for (int j = 0; j < p.m; ++j) t += wrow[j] * h[j];
        s += t * x[i];
    }
    return s;
}

/// ln C_j(x) = ln cosh(a_j), stabilized; the log is what every caller needs.
inline double log_cosh_term(const RbmParams& p, std::span<const Spin> x, int j) {
    check_visible_shape(p, x);
    if (j < 0 || j >= p.m) throw std::invalid_argument("hidden index out of range");
    return log_cosh(hidden_activation(p, x, j));
}

/// T_j(x) = tanh(a_j), in [-1, 1].
inline double tanh_term(const RbmParams& p, std::span<const Spin> x, int j) {
    check_visible_shape(p, x);
    if (j < 0 || j >= p.m) throw std::invalid_argument("hidden index out of range");
    return std::tanh(hidden_activation(p, x, j));
}

/// Marginal energy of a visible state after summing out the hidden layer:
/// E(x) = -sum_i alpha_i x_i - sum_j ln cosh(a_j).
inline double marginal_energy(const RbmParams& p, std::span<const Spin> x) {
    check_visible_shape(p, x);
    double e = 0.0;
    for (int i = 0; i < p.n; ++i) e -= p.alpha[i] * x[i];
    for (int j = 0; j < p.m; ++j) e -= log_cosh(hidden_activation(p, x, j));
    return e;
}

/// Block-restricted energy: like marginal_energy but the alpha sum runs only
/// over the block. Equals marginal_energy when the block is all of Omega.
inline double restricted_energy(const RbmParams& p, std::span<const Spin> x, std::span<const int> block) {
    check_visible_shape(p, x);
    if (block.empty()) throw std::invalid_argument("block must be nonempty");
    double e = 0.0;
    for (int i : block) {
        if (i < 0 || i >= p.n) throw std::invalid_argument("block index out of range");
        e -= p.alpha[i] * x[i];
    }
    for (int j = 0; j < p.m; ++j) e -= log_cosh(hidden_activation(p, x, j));
    return e;
}

// --- model file format -------------------------------------------------
//
//   n <int>
//   m <int>
//   alpha <n reals>
//   beta <m reals>
//   w <m reals>        (one line per visible unit, row-major)
//
// Reals are written in shortest round-trip form, so save/load is exact.

inline void save_model(const RbmParams& p, std::ostream& os) {
    os << "n " << p.n << "\n";
    os << "m " << p.m << "\n";
    os << "alpha";
    for (double v : p.alpha) os << ' ' << format_double(v);
    os << "\n";
    os << "beta";
    for (double v : p.beta) os << ' ' << format_double(v);
    os << "\n";
    for (int i = 0; i < p.n; ++i) {
        os << "w";
        for (int j = 0; j < p.m; ++j) os << ' ' << format_double(p.weight(i, j));
        os << "\n";
    }
}

inline void save_model(const RbmParams& p, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open model file for writing: " + path);
    save_model(p, os);
    if (!os) throw std::runtime_error("failed writing model file: " + path);
}

inline RbmParams load_model(std::istream& is) {
    auto expect = [&](const char* tag) {
        std::string t;
        if (!(is >> t) || t != tag) throw std::runtime_error(std::string("model file: expected '") + tag + "'");
    };
    expect("n");
    int n = 0;
    if (!(is >> n)) throw std::runtime_error("model file: bad n");
    expect("m");
    int m = 0;
    if (!(is >> m)) throw std::runtime_error("model file: bad m");
    if (n < 1 || m < 1) throw std::runtime_error("model file: need n >= 1 and m >= 1");
    RbmParams p(n, m);
    std::string tok;
    expect("alpha");
    for (int i = 0; i < n; ++i) {
        if (!(is >> tok)) throw std::runtime_error("model file: truncated alpha");
        p.alpha[i] = parse_double(tok);
    }
    expect("beta");
    for (int j = 0; j < m; ++j) {
        if (!(is >> tok)) throw std::runtime_error("model file: truncated beta");
        p.beta[j] = parse_double(tok);
    }
    for (int i = 0; i < n; ++i) {
        expect("w");
        for (int j = 0; j < m; ++j) {
            if (!(is >> tok)) throw std::runtime_error("model file: truncated w");
            p.weight(i, j) = parse_double(tok);
        }
    }
    return p;
}

inline RbmParams load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open model file: " + path);
    return load_model(is);
}

} // namespace clrbm
