#pragma once

#include <span>
#include <utility>

namespace qkdnet {

/// h(x) in bits; h(0) = h(1) = 0. Throws std::domain_error outside [0, 1].
[[nodiscard]] double binary_entropy(double x);

/// Asymptotic E91 rate per sifted bit, max(0, 1 - 2h(Q)).
[[nodiscard]] double base_rate(double qber);

struct Segment {
    double fraction;  // share of the pool
    double qber;
};

/// Rate of a pool distilled segment by segment: sum_i p_i base_rate(Q_i).
/// Throws std::invalid_argument if fractions are negative or do not sum to 1.
[[nodiscard]] double segmented_rate(std::span<const Segment> segments);

struct CadParams {
    int block_size = 1;        // C
    int lambda_grid = 1000;    // grid points over [0, Q] before refinement
};

/// Per-surviving-bit secret rate after advantage distillation with block
/// size C, minimised over the unobserved parameter lambda in [0, Q] and
/// clamped at 0. Requires 0 <= Q; returns 0 for Q >= 0.5.
[[nodiscard]] double cad_rate(double qber, const CadParams& params);
[[nodiscard]] inline double cad_rate(double qber, int block_size) { return cad_rate(qber, CadParams{block_size}); }

/// The bound before minimisation, for a fixed lambda.
[[nodiscard]] double cad_rate_at(double qber, int block_size, double lambda);

/// Probability a C-bit block passes the parity check: Q^C + (1-Q)^C.
[[nodiscard]] double cad_block_survival(double qber, int block_size);

/// Error rate of surviving blocks: Q^C / (Q^C + (1-Q)^C).
[[nodiscard]] double cad_residual_error(double qber, int block_size);

/// Secret bits per pre-CAD sifted bit: survival / C * cad_rate.
[[nodiscard]] double cad_throughput(double qber, int block_size);

struct CadChoice {
    int block_size = 1;
    double throughput = 0.0;
};

/// Best block size in 1..max_block; ties resolve to the smallest.
[[nodiscard]] CadChoice optimize_cad(double qber, int max_block);

struct DistillationOptions {
    bool segmenting = false;
    bool cad = false;
    int cad_max = 8;

    /// Throws ConfigError when cad_max < 1.
    void validate() const;
};

/// Secret bits per sifted bit at error rate Q under the chosen options.
[[nodiscard]] double per_bit_rate(double qber, const DistillationOptions& opts);

}  // namespace qkdnet
