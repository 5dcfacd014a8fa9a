#include "qkdnet/keyaccount.hpp"

#include "qkdnet/entanglement.hpp"

#include <stdexcept>

namespace qkdnet {

void RawKeyPool::add(int k, std::uint64_t n) {
    if (k < 0) throw std::invalid_argument("noise class must be >= 0");
    if (k >= static_cast<int>(counts_.size())) counts_.resize(static_cast<std::size_t>(k) + 1, 0);
    counts_[static_cast<std::size_t>(k)] += n;
    total_ += n;
}

void RawKeyPool::add_error(int k, std::uint64_t n) {
    if (k < 0) throw std::invalid_argument("noise class must be >= 0");
    if (k >= static_cast<int>(errors_.size())) errors_.resize(static_cast<std::size_t>(k) + 1, 0);
    errors_[static_cast<std::size_t>(k)] += n;
}

bool sift_and_record(RawKeyPool& pool, int k, Rng& rng) {
    if (!rng.bernoulli(0.5)) return false;
    pool.add(k);
    return true;
}

bool sample_bit_error(RawKeyPool& pool, int k, double decoherence, Rng& rng) {
    bool mixed = false;
    for (int link = 0; link <= k; ++link) mixed = rng.bernoulli(decoherence) || mixed;
    const bool error = mixed && rng.bernoulli(0.5);
    if (error) pool.add_error(k);
    return error;
}

double pooled_qber(const RawKeyPool& pool, double decoherence) {
    if (pool.empty()) return 0.0;
    double weighted = 0.0;
    for (int k = 0; k < pool.classes(); ++k)
        weighted += static_cast<double>(pool.count(k)) * path_qber(decoherence, k);
    return weighted / static_cast<double>(pool.total());
}

double estimate_capacity(const RawKeyPool& pool, double decoherence, bool segmented) {
    return distill(pool, decoherence, DistillationOptions{.segmenting = segmented, .cad = false});
}

double distill(const RawKeyPool& pool, double decoherence, const DistillationOptions& opts) {
    if (pool.empty()) return 0.0;
    if (!opts.segmenting)
        return static_cast<double>(pool.total()) * per_bit_rate(pooled_qber(pool, decoherence), opts);
    double secret = 0.0;
    for (int k = 0; k < pool.classes(); ++k) {
        if (pool.count(k) == 0) continue;
        secret += static_cast<double>(pool.count(k)) * per_bit_rate(path_qber(decoherence, k), opts);
    }
    return secret;
}

FlowGraph build_flow_graph(int terminal_count, const std::vector<TerminalPair>& pairs,
                           const std::vector<double>& amounts) {
    if (pairs.size() != amounts.size()) throw std::invalid_argument("build_flow_graph: size mismatch");
    FlowGraph g(terminal_count);
    for (std::size_t i = 0; i < pairs.size(); ++i) g.set_capacity(pairs[i].first, pairs[i].second, amounts[i]);
    return g;
}

FlowGraph build_flow_graph(int terminal_count, const std::vector<RawKeyPool>& pools, double decoherence) {
    FlowGraph g(terminal_count);
    for (const auto& pool : pools)
        g.set_capacity(pool.pair().first, pool.pair().second, estimate_capacity(pool, decoherence, true));
    return g;
}

}  // namespace qkdnet
