#pragma once

#include "qkdnet/flow.hpp"
#include "qkdnet/postprocess.hpp"
#include "qkdnet/rng.hpp"
#include "qkdnet/routing.hpp"

#include <cstdint>
#include <vector>

namespace qkdnet {

/// Sifted raw-key bits shared by one terminal pair, histogrammed by the
/// repeater count k of the path that produced them. `errors` is populated
/// only in bit-sampling mode.
class RawKeyPool {
public:
    RawKeyPool() = default;
    explicit RawKeyPool(TerminalPair pair) : pair_(pair) {}

    [[nodiscard]] TerminalPair pair() const noexcept { return pair_; }

    [[nodiscard]] std::uint64_t count(int k) const {
        return k < static_cast<int>(counts_.size()) ? counts_[static_cast<std::size_t>(k)] : 0;
    }
    [[nodiscard]] std::uint64_t errors(int k) const {
        return k < static_cast<int>(errors_.size()) ? errors_[static_cast<std::size_t>(k)] : 0;
    }
    /// Highest noise class + 1.
    [[nodiscard]] int classes() const noexcept { return static_cast<int>(counts_.size()); }
    [[nodiscard]] std::uint64_t total() const noexcept { return total_; }
    [[nodiscard]] bool empty() const noexcept { return total_ == 0; }

    void add(int k, std::uint64_t n = 1);
    void add_error(int k, std::uint64_t n = 1);

    friend bool operator==(const RawKeyPool&, const RawKeyPool&) = default;

private:
    TerminalPair pair_{};
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> errors_;
    std::uint64_t total_ = 0;
};

/// Stage-3 sifting: with probability 1/2 the bases agree and one raw bit of
/// class k is recorded. Returns whether a bit was kept.
bool sift_and_record(RawKeyPool& pool, int k, Rng& rng);

/// Bit-sampling validation: draws whether a kept class-k bit is in error.
/// Every one of the k+1 links decoheres with probability D; a decohered
/// pair is maximally mixed and errs with probability 1/2.
bool sample_bit_error(RawKeyPool& pool, int k, double decoherence, Rng& rng);

/// Pool-averaged error rate, sum n_k Q_k / sum n_k (0 for an empty pool).
[[nodiscard]] double pooled_qber(const RawKeyPool& pool, double decoherence);

/// Secret-bit estimate without advantage distillation: segmented sums each
/// class at its own error rate; pooled uses the average error rate.
[[nodiscard]] double estimate_capacity(const RawKeyPool& pool, double decoherence, bool segmented);

/// Secret bits after the configured post-processing.
[[nodiscard]] double distill(const RawKeyPool& pool, double decoherence, const DistillationOptions& opts);

/// Terminal graph whose capacities are `amounts[p]` for `pairs[p]`.
[[nodiscard]] FlowGraph build_flow_graph(int terminal_count, const std::vector<TerminalPair>& pairs,
                                         const std::vector<double>& amounts);

/// Terminal graph of segmented capacity estimates, for the router.
[[nodiscard]] FlowGraph build_flow_graph(int terminal_count, const std::vector<RawKeyPool>& pools,
                                         double decoherence);

}  // namespace qkdnet
