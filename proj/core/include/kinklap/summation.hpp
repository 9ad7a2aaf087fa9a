//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "kinklap/parallel.hpp"

namespace kinklap {

/// Kahan compensated accumulator.
class KahanSum {
  public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Pairwise-tree sum in index order. The reduction shape depends only on the
/// length, never on thread count, so results are bitwise reproducible.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    if (xs.size() <= 8) {
        KahanSum k;
        for (double x : xs) k.add(x);
        return k.value();
    }
    std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Number of fixed-size blocks covering n items.
inline std::size_t block_count(std::size_t n, std::size_t block) {
    return n == 0 ? 0 : (n - 1) / block + 1;
}

constexpr std::size_t kSumBlock = 4096;

/// Deterministic blocked reduction of K simultaneous sums over i in [0, n):
/// `fill(i, vals)` writes the K summands for index i. Each block is summed
/// with Kahan compensation; block sums combine by a pairwise tree. The result
/// is independent of how blocks are scheduled across threads.
template <std::size_t K, class Fill>
std::array<double, K> blocked_sums(std::size_t n, Fill&& fill) {
    const std::size_t nb = block_count(n, kSumBlock);
    std::vector<std::array<double, K>> blocks(nb);
    parallel_for(nb, [&](std::size_t b) {
        std::array<KahanSum, K> acc{};
        std::size_t lo = b * kSumBlock;
        std::size_t hi = std::min(n, lo + kSumBlock);
        std::array<double, K> vals{};
        for (std::size_t i = lo; i < hi; ++i) {
            fill(i, vals);
            for (std::size_t k = 0; k < K; ++k) acc[k].add(vals[k]);
        }
        for (std::size_t k = 0; k < K; ++k) blocks[b][k] = acc[k].value();
    });
    std::array<double, K> out{};
    std::vector<double> col(nb);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t b = 0; b < nb; ++b) col[b] = blocks[b][k];
        out[k] = pairwise_sum(col);
    }
    return out;
}

}  // namespace kinklap
