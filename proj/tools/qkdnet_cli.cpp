#include "qkdnet/config.hpp"
#include "qkdnet/errors.hpp"
#include "qkdnet/postprocess.hpp"
#include "qkdnet/records.hpp"
#include "qkdnet/sim.hpp"
#include "qkdnet/topology.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace qkdnet;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

// Command-line values; anything left unset falls back to the config file,
// then to the built-in defaults.
struct Flags {
    std::string config_path;
    std::optional<std::string> preset;
    std::vector<std::string> policies;
    std::vector<double> decoherence;
    std::optional<std::uint64_t> rounds;
    std::vector<std::uint64_t> seeds;
    std::optional<int> size;
    std::optional<double> link_length;
    std::optional<double> alpha;
    std::optional<double> link_prob;
    std::optional<double> bsm;
    std::optional<double> sigma, delta, theta;
    std::optional<std::uint64_t> cadence;
    bool segmenting = false;
    bool cad = false;
    std::optional<int> cad_max;
    bool sample_bits = false;
    std::string out;
    std::string format = "csv";
    unsigned jobs = 0;
    bool verbose = false;
    bool timing = false;
};

void add_sim_flags(CLI::App* cmd, Flags& f, bool sweep) {
    cmd->add_option("--config", f.config_path, "JSON config file (flat object, SimConfig field names)");
    cmd->add_option("--preset", f.preset, "trusted-node placement (see `presets`)");
    cmd->add_option("--size", f.size, "inner lattice size S");
    cmd->add_option("--link-length", f.link_length, "link length in km");
    cmd->add_option("--alpha", f.alpha, "fibre loss in dB/km");
    cmd->add_option("--link-prob", f.link_prob, "per-link success probability, overrides loss");
    cmd->add_option("--bsm", f.bsm, "Bell measurement success probability R");
    cmd->add_option("--rounds", f.rounds, "number of rounds N");
    cmd->add_option("--sigma", f.sigma, "surplus tolerance");
    cmd->add_option("--delta", f.delta, "near-minimum tolerance");
    cmd->add_option("--theta", f.theta, "distance filter as a fraction of dist(A,B)");
    cmd->add_option("--cadence", f.cadence, "recompute priorities every n rounds");
    cmd->add_flag("--segmenting", f.segmenting, "distil each noise class separately");
    cmd->add_flag("--cad", f.cad, "apply advantage distillation");
    cmd->add_option("--cad-max", f.cad_max, "largest CAD block size");
    cmd->add_flag("--sample-bits", f.sample_bits, "draw per-bit errors");
    cmd->add_option("--out", f.out, "write result records to this file");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--timing", f.timing, "include wall-clock runtime in the records");
    cmd->add_flag("-v,--verbose", f.verbose, "progress on stderr");
    if (sweep) {
        cmd->add_option("--policy", f.policies, "routing policies")->delimiter(',');
        cmd->add_option("--decoherence", f.decoherence, "decoherence values D")->delimiter(',');
        cmd->add_option("--seeds,--seed", f.seeds, "seeds")->delimiter(',');
        cmd->add_option("--jobs", f.jobs, "parallel runs (0 = all processors)");
    } else {
        cmd->add_option("--policy", f.policies, "static or dynamic")->expected(1);
        cmd->add_option("--decoherence", f.decoherence, "decoherence D")->expected(1);
        cmd->add_option("--seed", f.seeds, "seed")->expected(1);
    }
}

ExperimentConfig resolve(const Flags& f) {
    ExperimentConfig cfg = f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
    SimConfig& c = cfg.base;
    if (f.preset) c.preset = PlacementPreset::parse(*f.preset);
    if (f.size) c.size = *f.size;
    if (f.link_length) c.link_length_km = *f.link_length;
    if (f.alpha) c.alpha_db_per_km = *f.alpha;
    if (f.link_prob) c.link_success_prob = *f.link_prob;
    if (f.bsm) c.bsm_success_prob = *f.bsm;
    if (f.rounds) c.rounds = *f.rounds;
    if (f.sigma) c.balancer.sigma = *f.sigma;
    if (f.delta) c.balancer.delta = *f.delta;
    if (f.theta) c.balancer.theta = *f.theta;
    if (f.cadence) c.priority_cadence = *f.cadence;
    if (f.segmenting) c.distill.segmenting = true;
    if (f.cad) c.distill.cad = true;
    if (f.cad_max) c.distill.cad_max = *f.cad_max;
    if (f.sample_bits) c.sample_bits = true;
    if (!f.policies.empty()) {
        cfg.policies.clear();
        for (const auto& p : f.policies) cfg.policies.push_back(parse_policy(p));
    }
    if (!f.decoherence.empty()) cfg.decoherence_values = f.decoherence;
    if (!f.seeds.empty()) cfg.seeds = f.seeds;
    if (!cfg.policies.empty()) c.policy = cfg.policies.front();
    if (!cfg.decoherence_values.empty()) c.decoherence = cfg.decoherence_values.front();
    if (!cfg.seeds.empty()) c.seed = cfg.seeds.front();
    return cfg;
}

void emit(const std::vector<OutputRecord>& records, const Flags& f) {
    const auto format = parse_format(f.format);
    if (f.out.empty()) {
        write_results(records, std::cout, format);
    } else {
        write_results(records, std::filesystem::path(f.out), format);
    }
}

void summarize(const std::vector<OutputRecord>& records) {
    struct Acc {
        double sum = 0, sum_sq = 0;
        int n = 0;
    };
    std::map<std::pair<double, std::string>, Acc> groups;
    for (const auto& r : records) {
        auto& a = groups[{r.decoherence, r.policy}];
        a.sum += r.key_rate;
        a.sum_sq += r.key_rate * r.key_rate;
        ++a.n;
    }
    std::cerr << "D        policy   seeds  key_rate_mean  key_rate_sd\n";
    for (const auto& [key, a] : groups) {
        const double mean = a.sum / a.n;
        const double var = a.n > 1 ? std::max(0.0, (a.sum_sq - a.n * mean * mean) / (a.n - 1)) : 0.0;
        std::fprintf(stderr, "%-8g %-8s %5d  %13.6f  %11.6f\n", key.first, key.second.c_str(), a.n, mean,
                     std::sqrt(var));
    }
}

int cmd_run(const Flags& f) {
    const auto cfg = resolve(f);
    RunHooks hooks;
    if (f.verbose) {
        hooks.on_progress = [](std::uint64_t done, std::uint64_t total) {
            std::cerr << "round " << done << "/" << total << '\n';
        };
    }
    const auto result = run(cfg.base, hooks);
    const auto record = make_record(result, f.timing);
    if (!f.out.empty()) emit({record}, f);
    std::cout << "key_rate " << format_number(record.key_rate) << '\n';
    return kOk;
}

int cmd_sweep(const Flags& f) {
    auto cfg = resolve(f);
    if (cfg.decoherence_values.empty()) cfg.decoherence_values = default_decoherence_grid();
    if (cfg.policies.empty()) cfg.policies = {RoutingPolicy::Static, RoutingPolicy::Dynamic};
    if (cfg.seeds.empty()) cfg.seeds = {cfg.base.seed};
    if (f.verbose) {
        std::cerr << "sweep: " << cfg.decoherence_values.size() * cfg.policies.size() * cfg.seeds.size()
                  << " runs of " << cfg.base.rounds << " rounds\n";
    }
    const auto results = sweep(cfg.base, cfg.decoherence_values, cfg.policies, cfg.seeds, f.jobs);
    std::vector<OutputRecord> records;
    for (const auto& r : results) records.push_back(make_record(r, f.timing));
    emit(records, f);
    if (f.verbose) summarize(records);
    return kOk;
}

int cmd_rates(int cad_max, const std::vector<double>& qbers) {
    if (cad_max < 1) throw ConfigError("cad_max", "must be >= 1");
    std::cout << "Q       base";
    for (int c = 1; c <= cad_max; ++c) std::cout << "      C=" << c;
    std::cout << "   best_C  throughput\n";
    std::cout << std::fixed << std::setprecision(5);
    for (double q : qbers) {
        if (!(q >= 0.0 && q <= 0.5)) throw ConfigError("qber", "values must lie in [0, 0.5]");
        std::cout << std::setprecision(3) << q << "  " << std::setprecision(5) << base_rate(q);
        for (int c = 1; c <= cad_max; ++c) std::cout << "  " << cad_rate(q, c);
        const auto best = optimize_cad(q, cad_max);
        std::cout << "   " << std::setw(6) << best.block_size << "  " << best.throughput << '\n';
    }

    std::cout << "\nzero-rate threshold by block size\n";
    for (int c = 1; c <= cad_max; ++c) {
        double lo = 0.0, hi = 0.5;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (cad_rate(mid, c) > 0.0 ? lo : hi) = mid;
        }
        std::cout << "C=" << c << "  " << hi << '\n';
    }

    const Segment segments[] = {{0.75, 0.04}, {0.25, 0.10}};
    const double pooled_q = 0.75 * 0.04 + 0.25 * 0.10;
    std::cout << "\nsegmenting: classes (0.75, Q=0.04) + (0.25, Q=0.10)\n"
              << "  pooled Q=" << pooled_q << " rate " << base_rate(pooled_q) << '\n'
              << "  segmented rate " << segmented_rate(segments) << '\n';
    return kOk;
}

int cmd_presets(int size) {
    std::cout << "name          trusted nodes          distances (A, T..., B)\n";
    for (const auto& preset : PlacementPreset::named()) {
        const auto topo = build_topology(size, preset);
        std::string coords, hops;
        for (int t = 1; t + 1 < topo.terminal_count(); ++t) {
            const auto p = topo.terminal_position(t);
            coords += (coords.empty() ? "" : " ") + ("(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")");
        }
        for (int t = 0; t + 1 < topo.terminal_count(); ++t) {
            hops += (hops.empty() ? "" : "-") +
                    std::to_string(manhattan_distance(topo.terminal_position(t), topo.terminal_position(t + 1)));
        }
        std::cout << std::left << std::setw(14) << preset.name() << std::setw(23) << (coords.empty() ? "-" : coords)
                  << hops << '\n';
    }
    std::cout << "also: diag-a-b-c (even gaps summing to dist(A,B)), custom:r,c;r,c\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement-routing QKD network simulator"};
    app.require_subcommand(1);

    Flags run_flags, sweep_flags;
    auto* run_cmd = app.add_subcommand("run", "single simulation");
    add_sim_flags(run_cmd, run_flags, false);
    auto* sweep_cmd = app.add_subcommand("sweep", "grid of decoherence x policy x seed");
    add_sim_flags(sweep_cmd, sweep_flags, true);

    int rates_cad_max = 8;
    std::vector<double> rates_qbers;
    auto* rates_cmd = app.add_subcommand("rates", "post-processing rate tables");
    rates_cmd->add_option("--cad-max", rates_cad_max, "largest block size");
    rates_cmd->add_option("--qber", rates_qbers, "error rates to tabulate")->delimiter(',');

    int presets_size = 7;
    auto* presets_cmd = app.add_subcommand("presets", "list trusted-node placements");
    presets_cmd->add_option("--size", presets_size, "inner lattice size S");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*run_cmd) return cmd_run(run_flags);
        if (*sweep_cmd) return cmd_sweep(sweep_flags);
        if (*rates_cmd) {
            if (rates_qbers.empty())
                for (int i = 0; i <= 25; ++i) rates_qbers.push_back(i / 100.0);
            return cmd_rates(rates_cad_max, rates_qbers);
        }
        if (*presets_cmd) return cmd_presets(presets_size);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
