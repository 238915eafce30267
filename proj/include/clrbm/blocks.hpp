#pragma once

#include <algorithm>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clrbm/model.hpp"

namespace clrbm {

/// A block: strictly increasing 0-based visible indices.
using Block = std::vector<int>;

/// A family of blocks whose union covers {0..n-1}, with the uniform weight
/// Lambda = 1/|family| attached.
struct BlockFamily {
    int n = 0;
    std::vector<Block> blocks;
    double lambda = 0.0;
};

namespace detail {

inline void check_block(const Block& c, int n) {
    if (c.empty()) throw std::invalid_argument("block must be nonempty");
    for (std::size_t t = 0; t < c.size(); ++t) {
        if (c[t] < 0 || c[t] >= n) throw std::invalid_argument("block index out of range");
        if (t > 0 && c[t] <= c[t - 1]) {
            throw std::invalid_argument("block indices must be strictly increasing");
        }
    }
}

} // namespace detail

/// Checked construction of an arbitrary family (overlaps allowed). The
/// systematic families come from enumerate_family; this exists because the
/// upper-bound theorem holds for any covering family and the tests exercise
/// irregular ones.
inline BlockFamily make_family(int n, std::vector<Block> blocks) {
    if (n < 1) throw std::invalid_argument("family: need n >= 1");
    if (blocks.empty()) throw std::invalid_argument("family must contain at least one block");
    std::vector<char> covered(static_cast<std::size_t>(n), 0);
    for (const Block& c : blocks) {
        detail::check_block(c, n);
        for (int i : c) covered[i] = 1;
    }
    if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
        throw std::invalid_argument("family blocks must cover every visible index");
    }
    BlockFamily f;
    f.n = n;
    f.blocks = std::move(blocks);
    f.lambda = 1.0 / static_cast<double>(f.blocks.size());
    return f;
}

/// 1 / C(n,k) via multiplicative binomial evaluation; no factorials.
inline double family_weight(int n, int k) {
    if (k < 1 || k > n) throw std::invalid_argument("family_weight: need 1 <= k <= n");
    double binom = 1.0;
    for (int t = 1; t <= k; ++t) {
        binom *= static_cast<double>(n - k + t) / static_cast<double>(t);
    }
    return 1.0 / binom;
}

/// All C(n,k) size-k blocks in lexicographic order.
inline BlockFamily enumerate_family(int n, int k) {
    if (k < 1 || k > n) throw std::invalid_argument("enumerate_family: need 1 <= k <= n");
    BlockFamily f;
    f.n = n;
    Block cur(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) cur[t] = t;
    while (true) {
        f.blocks.push_back(cur);
        // advance to the next k-subset in lexicographic order
        int pos = k - 1;
        while (pos >= 0 && cur[pos] == n - k + pos) --pos;
        if (pos < 0) break;
        ++cur[pos];
        for (int t = pos + 1; t < k; ++t) cur[t] = cur[t - 1] + 1;
    }
    f.lambda = family_weight(n, k);
    return f;
}

/// Positions (into family.blocks) of all blocks containing visible index i.
inline std::vector<int> blocks_containing(const BlockFamily& f, int i) {
    if (i < 0 || i >= f.n) throw std::invalid_argument("blocks_containing: index out of range");
    std::vector<int> out;
    for (std::size_t pos = 0; pos < f.blocks.size(); ++pos) {
        const Block& c = f.blocks[pos];
        if (std::binary_search(c.begin(), c.end(), i)) out.push_back(static_cast<int>(pos));
    }
    return out;
}

/// Debug/golden-test dump: one block per line, 1-based, comma-separated.
inline std::string family_to_text(const BlockFamily& f) {
    std::ostringstream os;
    for (const Block& c : f.blocks) {
        for (std::size_t t = 0; t < c.size(); ++t) {
            if (t > 0) os << ',';
            os << c[t] + 1;
        }
        os << '\n';
    }
    return os.str();
}

/// Runs fn once for each of the 2^|block| assignments of the block
/// coordinates of buf, leaving the off-block coordinates untouched.
/// Assignment order is fixed: bit b of the step counter drives block[b],
/// bit set meaning +1. buf is restored to its original content afterwards.
template <typename Fn>
inline void for_each_block_assignment(std::span<Spin> buf, const Block& block, Fn&& fn) {
    const int k = static_cast<int>(block.size());
    std::vector<Spin> saved(static_cast<std::size_t>(k));
    for (int b = 0; b < k; ++b) saved[b] = buf[block[b]];
    const std::uint64_t count = std::uint64_t{1} << k;
    for (std::uint64_t t = 0; t < count; ++t) {
        for (int b = 0; b < k; ++b) buf[block[b]] = (t >> b) & 1 ? Spin{1} : Spin{-1};
        fn(std::span<const Spin>(buf));
    }
    for (int b = 0; b < k; ++b) buf[block[b]] = saved[b];
}

} // namespace clrbm
