#include "qkdnet/records.hpp"

#include "qkdnet/config.hpp"
#include "qkdnet/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace qkdnet {

using nlohmann::json;

OutputRecord make_record(const SimResult& result, bool with_runtime) {
    const auto& cfg = result.config;
    OutputRecord r;
    r.preset = cfg.preset.name();
    r.policy = std::string(to_string(cfg.policy));
    r.decoherence = cfg.decoherence;
    r.seed = cfg.seed;
    r.rounds = cfg.rounds;
    r.key_rate = result.key_rate;
    r.flow_value = result.flow_value;
    r.waste_total = result.waste_total;
    r.total_sifted = result.total_sifted;
    for (const auto& p : result.pairs) {
        PairRecord pr{p.pair.first, p.pair.second, p.secret_bits, p.flow, p.waste, {}};
        for (int k = 0; k < p.pool.classes(); ++k) pr.sifted_by_k.push_back(p.pool.count(k));
        r.pairs.push_back(std::move(pr));
    }
    r.config = to_json(cfg);
    if (with_runtime) r.runtime_s = result.runtime_s;
    return r;
}

void to_json(json& j, const PairRecord& r) {
    j = json{{"pair", {r.first, r.second}},
             {"secret_bits", r.secret_bits},
             {"flow", r.flow},
             {"waste", r.waste},
             {"sifted_by_k", r.sifted_by_k}};
}

void from_json(const json& j, PairRecord& r) {
    r.first = j.at("pair").at(0).get<int>();
    r.second = j.at("pair").at(1).get<int>();
    j.at("secret_bits").get_to(r.secret_bits);
    j.at("flow").get_to(r.flow);
    j.at("waste").get_to(r.waste);
    j.at("sifted_by_k").get_to(r.sifted_by_k);
}

void to_json(json& j, const OutputRecord& r) {
    j = json{{"preset", r.preset},
             {"policy", r.policy},
             {"decoherence", r.decoherence},
             {"seed", r.seed},
             {"rounds", r.rounds},
             {"key_rate", r.key_rate},
             {"flow_value", r.flow_value},
             {"waste_total", r.waste_total},
             {"total_sifted", r.total_sifted},
             {"pairs", r.pairs},
             {"config", r.config}};
    if (r.runtime_s) j["runtime_s"] = *r.runtime_s;
}

void from_json(const json& j, OutputRecord& r) {
    j.at("preset").get_to(r.preset);
    j.at("policy").get_to(r.policy);
    j.at("decoherence").get_to(r.decoherence);
    j.at("seed").get_to(r.seed);
    j.at("rounds").get_to(r.rounds);
    j.at("key_rate").get_to(r.key_rate);
    j.at("flow_value").get_to(r.flow_value);
    j.at("waste_total").get_to(r.waste_total);
    j.at("total_sifted").get_to(r.total_sifted);
    j.at("pairs").get_to(r.pairs);
    r.config = j.at("config");
    if (j.contains("runtime_s")) r.runtime_s = j["runtime_s"].get<double>();
    else r.runtime_s.reset();
}

OutputFormat parse_format(std::string_view name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw ConfigError("format", "expected csv or json, got '" + std::string(name) + "'");
}

const std::vector<std::string>& csv_header() {
    static const std::vector<std::string> header{
        "preset",      "policy",       "decoherence", "seed",      "rounds",     "key_rate",
        "flow_value",  "waste_total",  "total_sifted", "pair_secret", "pair_flow", "pair_waste",
        "pair_sifted", "runtime_s",    "config"};
    return header;
}

std::string format_number(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf.data(), end);
}

namespace {

// "i-j:value;i-j:value"
template <typename F>
std::string pair_column(const OutputRecord& r, F&& value) {
    std::string out;
    for (const auto& p : r.pairs) {
        if (!out.empty()) out += ';';
        out += std::to_string(p.first) + '-' + std::to_string(p.second) + ':' + value(p);
    }
    return out;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

void write_csv(const std::vector<OutputRecord>& records, std::ostream& out) {
    const auto& header = csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : records) {
        const std::vector<std::string> row{
            r.preset,
            r.policy,
            format_number(r.decoherence),
            std::to_string(r.seed),
            std::to_string(r.rounds),
            format_number(r.key_rate),
            format_number(r.flow_value),
            format_number(r.waste_total),
            std::to_string(r.total_sifted),
            pair_column(r, [](const PairRecord& p) { return format_number(p.secret_bits); }),
            pair_column(r, [](const PairRecord& p) { return format_number(p.flow); }),
            pair_column(r, [](const PairRecord& p) { return format_number(p.waste); }),
            pair_column(r,
                        [](const PairRecord& p) {
                            std::string h;
                            for (std::size_t k = 0; k < p.sifted_by_k.size(); ++k)
                                h += (k ? "/" : "") + std::to_string(p.sifted_by_k[k]);
                            return h;
                        }),
            r.runtime_s ? format_number(*r.runtime_s) : std::string{},
            r.config.dump(),
        };
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_quote(row[i]);
        out << '\n';
    }
}

}  // namespace

void write_results(const std::vector<OutputRecord>& records, std::ostream& out, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        write_csv(records, out);
    } else {
        out << json(records).dump(2) << '\n';
    }
}

void write_results(const std::vector<OutputRecord>& records, const std::filesystem::path& path, OutputFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    write_results(records, out, format);
    out.flush();
    if (!out) throw std::runtime_error("failed writing output file " + path.string());
}

std::vector<OutputRecord> read_json_records(std::string_view text) {
    return json::parse(text).get<std::vector<OutputRecord>>();
}

}  // namespace qkdnet
