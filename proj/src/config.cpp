#include "qkdnet/config.hpp"

#include "qkdnet/errors.hpp"

#include <fstream>
#include <sstream>

namespace qkdnet {

using nlohmann::json;

namespace {

template <typename T>
T get(const json& value, const std::string& key) {
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
}

double get_number(const json& value, const std::string& key) {
    if (!value.is_number()) throw ConfigError(key, "expected a number");
    return value.get<double>();
}

std::uint64_t get_count(const json& value, const std::string& key) {
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
        throw ConfigError(key, "expected a non-negative integer");
    return value.get<std::uint64_t>();
}

template <typename T, typename F>
std::vector<T> get_list(const json& value, const std::string& key, F&& element) {
    if (!value.is_array()) return {element(value, key)};
    std::vector<T> out;
    for (const auto& v : value) out.push_back(element(v, key));
    return out;
}

Position get_position(const json& value, const std::string& key) {
    if (!value.is_array() || value.size() != 2) throw ConfigError(key, "positions are [row, col] pairs");
    return {get<int>(value[0], key), get<int>(value[1], key)};
}

}  // namespace

void apply_config(const json& doc, ExperimentConfig& cfg) {
    if (!doc.is_object()) throw ConfigError("config", "top level must be a JSON object");
    SimConfig& c = cfg.base;
    for (const auto& [key, value] : doc.items()) {
        if (key == "size") {
            c.size = get<int>(value, key);
        } else if (key == "preset") {
            c.preset = PlacementPreset::parse(get<std::string>(value, key));
        } else if (key == "trusted_nodes") {
            std::vector<Position> positions;
            if (!value.is_array()) throw ConfigError(key, "expected a list of [row, col] pairs");
            for (const auto& p : value) positions.push_back(get_position(p, key));
            c.preset = PlacementPreset::custom(std::move(positions));
        } else if (key == "link_length_km") {
            c.link_length_km = get_number(value, key);
        } else if (key == "alpha_db_per_km") {
            c.alpha_db_per_km = get_number(value, key);
        } else if (key == "link_success_prob") {
            if (value.is_null()) c.link_success_prob.reset();
            else c.link_success_prob = get_number(value, key);
        } else if (key == "link_overrides") {
            if (!value.is_array()) throw ConfigError(key, "expected a list of {u, v, length_km}");
            c.link_overrides.clear();
            for (const auto& o : value) {
                if (!o.is_object() || !o.contains("u") || !o.contains("v") || !o.contains("length_km"))
                    throw ConfigError(key, "each override needs u, v and length_km");
                c.link_overrides.push_back(
                    {get_position(o["u"], key), get_position(o["v"], key), get_number(o["length_km"], key)});
            }
        } else if (key == "decoherence") {
            cfg.decoherence_values = get_list<double>(value, key, get_number);
            if (cfg.decoherence_values.empty()) throw ConfigError(key, "needs at least one value");
            c.decoherence = cfg.decoherence_values.front();
        } else if (key == "bsm_success_prob") {
            c.bsm_success_prob = get_number(value, key);
        } else if (key == "rounds") {
            c.rounds = get_count(value, key);
        } else if (key == "policy") {
            cfg.policies = get_list<RoutingPolicy>(value, key, [](const json& v, const std::string& k) {
                return parse_policy(get<std::string>(v, k));
            });
            if (cfg.policies.empty()) throw ConfigError(key, "needs at least one policy");
            c.policy = cfg.policies.front();
        } else if (key == "sigma") {
            c.balancer.sigma = get_number(value, key);
        } else if (key == "delta") {
            c.balancer.delta = get_number(value, key);
        } else if (key == "theta") {
            c.balancer.theta = get_number(value, key);
        } else if (key == "segmenting") {
            c.distill.segmenting = get<bool>(value, key);
        } else if (key == "cad") {
            c.distill.cad = get<bool>(value, key);
        } else if (key == "cad_max") {
            c.distill.cad_max = get<int>(value, key);
        } else if (key == "seed" || key == "seeds") {
            cfg.seeds = get_list<std::uint64_t>(value, key, get_count);
            if (cfg.seeds.empty()) throw ConfigError(key, "needs at least one seed");
            c.seed = cfg.seeds.front();
        } else if (key == "priority_cadence") {
            c.priority_cadence = get_count(value, key);
        } else if (key == "sample_bits") {
            c.sample_bits = get<bool>(value, key);
        } else {
            throw ConfigError(key, "unknown config key");
        }
    }
}

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    apply_config(doc, cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

json to_json(const SimConfig& c) {
    json j;
    j["size"] = c.size;
    j["preset"] = c.preset.name();
    j["link_length_km"] = c.link_length_km;
    j["alpha_db_per_km"] = c.alpha_db_per_km;
    j["link_success_prob"] = c.link_success_prob ? json(*c.link_success_prob) : json(nullptr);
    if (!c.link_overrides.empty()) {
        json overrides = json::array();
        for (const auto& o : c.link_overrides)
            overrides.push_back({{"u", {o.u.row, o.u.col}}, {"v", {o.v.row, o.v.col}}, {"length_km", o.length_km}});
        j["link_overrides"] = overrides;
    }
    j["decoherence"] = c.decoherence;
    j["bsm_success_prob"] = c.bsm_success_prob;
    j["rounds"] = c.rounds;
    j["policy"] = std::string(to_string(c.policy));
    j["sigma"] = c.balancer.sigma;
    j["delta"] = c.balancer.delta;
    j["theta"] = c.balancer.theta;
    j["segmenting"] = c.distill.segmenting;
    j["cad"] = c.distill.cad;
    j["cad_max"] = c.distill.cad_max;
    j["seed"] = c.seed;
    j["priority_cadence"] = c.priority_cadence;
    j["sample_bits"] = c.sample_bits;
    return j;
}

}  // namespace qkdnet
