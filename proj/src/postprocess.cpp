#include "qkdnet/postprocess.hpp"

#include "qkdnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkdnet {

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double base_rate(double qber) {
    return std::max(0.0, 1.0 - 2.0 * binary_entropy(std::clamp(qber, 0.0, 1.0)));
}

double segmented_rate(std::span<const Segment> segments) {
    double total = 0.0;
    double rate = 0.0;
    for (const auto& s : segments) {
        if (!(s.fraction >= 0.0)) throw std::invalid_argument("segmented_rate: negative fraction");
        total += s.fraction;
        rate += s.fraction * base_rate(s.qber);
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("segmented_rate: fractions must sum to 1");
    return rate;
}

double cad_block_survival(double qber, int block_size) {
    return std::pow(qber, block_size) + std::pow(1.0 - qber, block_size);
}

double cad_residual_error(double qber, int block_size) {
    return std::pow(qber, block_size) / cad_block_survival(qber, block_size);
}

double cad_rate_at(double qber, int block_size, double lambda) {
    const double q = qber;
    const int c = block_size;
    const double alpha = cad_residual_error(q, c);
    const double beta = (1.0 - 3.0 * q + 2.0 * lambda) / (1.0 - q);
    const auto h = [](double x) { return binary_entropy(std::clamp(x, 0.0, 1.0)); };
    double r = 1.0 - h(alpha) - (1.0 - alpha) * h((1.0 - std::pow(beta, c)) / 2.0);
    // At Q = 0 the gamma term carries weight alpha = 0.
    if (q > 0.0) {
        const double gamma = std::abs(q - 2.0 * lambda) / q;
        r -= alpha * h((1.0 - std::pow(gamma, c)) / 2.0);
    }
    return r;
}

double cad_rate(double qber, const CadParams& params) {
    if (!(qber >= 0.0)) throw std::domain_error("cad_rate: negative error rate");
    if (params.block_size < 1) throw std::invalid_argument("cad_rate: block size must be >= 1");
    if (qber >= 0.5) return 0.0;
    if (qber == 0.0) return std::max(0.0, cad_rate_at(0.0, params.block_size, 0.0));

    const int grid = std::max(2, params.lambda_grid);
    const auto f = [&](double lambda) { return cad_rate_at(qber, params.block_size, lambda); };
    const double step = qber / (grid - 1);
    int best = 0;
    double best_value = f(0.0);
    for (int i = 1; i < grid; ++i) {
        const double v = f(i * step);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }

    // Golden-section refinement inside the bracketing grid cells.
    double lo = std::max(0.0, (best - 1) * step);
    double hi = std::min(qber, (best + 1) * step);
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = f(x2);
        }
    }
    best_value = std::min({best_value, f1, f2});
    return std::max(0.0, best_value);
}

double cad_throughput(double qber, int block_size) {
    if (qber >= 0.5) return 0.0;
    return cad_block_survival(qber, block_size) / block_size * cad_rate(qber, block_size);
}

CadChoice optimize_cad(double qber, int max_block) {
    if (max_block < 1) throw std::invalid_argument("optimize_cad: max block size must be >= 1");
    CadChoice best{1, cad_throughput(qber, 1)};
    for (int c = 2; c <= max_block; ++c) {
        const double v = cad_throughput(qber, c);
        if (v > best.throughput) best = {c, v};
    }
    return best;
}

void DistillationOptions::validate() const {
    if (cad_max < 1) throw ConfigError("cad_max", "must be >= 1");
}

double per_bit_rate(double qber, const DistillationOptions& opts) {
    return opts.cad ? optimize_cad(qber, opts.cad_max).throughput : base_rate(qber);
}

}  // namespace qkdnet
