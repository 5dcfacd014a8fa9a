#pragma once

#include "qkdnet/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qkdnet {

struct PairRecord {
    int first = 0;
    int second = 0;
    double secret_bits = 0.0;
    double flow = 0.0;
    double waste = 0.0;
    std::vector<std::uint64_t> sifted_by_k;  // raw-key histogram by repeater count

    friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// One completed run, flattened for output.
struct OutputRecord {
    std::string preset;
    std::string policy;
    double decoherence = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t rounds = 0;
    double key_rate = 0.0;
    double flow_value = 0.0;
    double waste_total = 0.0;
    std::uint64_t total_sifted = 0;
    std::vector<PairRecord> pairs;
    nlohmann::json config;            // effective configuration
    std::optional<double> runtime_s;  // only when timing is requested

    friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

[[nodiscard]] OutputRecord make_record(const SimResult& result, bool with_runtime = false);

void to_json(nlohmann::json& j, const PairRecord& r);
void from_json(const nlohmann::json& j, PairRecord& r);
void to_json(nlohmann::json& j, const OutputRecord& r);
void from_json(const nlohmann::json& j, OutputRecord& r);

enum class OutputFormat { Csv, Json };

/// Throws ConfigError("format") for anything but "csv" / "json".
[[nodiscard]] OutputFormat parse_format(std::string_view name);

/// Column names of the CSV output, in order.
[[nodiscard]] const std::vector<std::string>& csv_header();

void write_results(const std::vector<OutputRecord>& records, std::ostream& out, OutputFormat format);

/// Throws std::runtime_error naming `path` when it cannot be written.
void write_results(const std::vector<OutputRecord>& records, const std::filesystem::path& path, OutputFormat format);

/// Parses a JSON array written by write_results.
[[nodiscard]] std::vector<OutputRecord> read_json_records(std::string_view text);

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_number(double x);

}  // namespace qkdnet
