#include "qkdnet/sim.hpp"

#include "qkdnet/entanglement.hpp"
#include "qkdnet/errors.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace qkdnet {

namespace {

// Substream ids per round; fixed so that enabling one stage never shifts
// the draws of another.
enum Stream : std::uint64_t { kLinks = 0, kPriorities = 1, kRouting = 2, kSwapping = 3, kSifting = 4, kBits = 5 };

void check_probability(double p, const char* field) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(field, "must lie in [0, 1]");
}

void finalize(SimResult& result) {
    const auto& cfg = result.config;
    const int terminals = static_cast<int>(result.pairs.empty() ? 0 : result.pairs.back().pair.second + 1);
    FlowGraph g(terminals);
    for (auto& p : result.pairs) {
        p.secret_bits = distill(p.pool, cfg.decoherence, cfg.distill);
        g.set_capacity(p.pair.first, p.pair.second, p.secret_bits);
    }
    const auto mf = max_flow(g);
    const auto waste = wasted_key(g, mf.flows);
    for (std::size_t i = 0; i < result.pairs.size(); ++i) {
        auto& p = result.pairs[i];
        p.flow = mf.flows(p.pair.first, p.pair.second);
        p.waste = waste[i].leftover;
    }
    result.flow_value = mf.value;
    result.waste_total = total_waste(waste);
    result.key_rate = final_key_rate(mf.value, static_cast<double>(cfg.rounds));
}

}  // namespace

void SimConfig::validate() const {
    if (size < 2) throw ConfigError("size", "lattice size must be >= 2");
    if (!(link_length_km > 0.0)) throw ConfigError("link_length_km", "must be > 0");
    if (!(alpha_db_per_km >= 0.0)) throw ConfigError("alpha_db_per_km", "must be >= 0");
    if (link_success_prob) check_probability(*link_success_prob, "link_success_prob");
    check_probability(decoherence, "decoherence");
    check_probability(bsm_success_prob, "bsm_success_prob");
    if (rounds < 1) throw ConfigError("rounds", "must be >= 1");
    if (priority_cadence < 1) throw ConfigError("priority_cadence", "must be >= 1");
    balancer.validate();
    distill.validate();
    (void)build_topology(size, preset, link_length_km, link_overrides);
}

SimResult run(const SimConfig& cfg, const RunHooks& hooks) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();

    const Topology topo = build_topology(cfg.size, cfg.preset, cfg.link_length_km, cfg.link_overrides);
    const LinkModel model{cfg.alpha_db_per_km, cfg.decoherence, cfg.link_success_prob};
    const LinkSampler sampler(topo, model);
    const int terminals = topo.terminal_count();

    SimResult result;
    result.config = cfg;
    const auto pairs = all_terminal_pairs(terminals);
    std::vector<RawKeyPool> pools;
    for (const auto& p : pairs) pools.emplace_back(p);
    std::vector<std::size_t> pool_index(static_cast<std::size_t>(terminals) * terminals);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        pool_index[static_cast<std::size_t>(pairs[i].first) * terminals + pairs[i].second] = i;

    const Rng master(cfg.seed);
    PathSelector selector(topo);
    RoundLinkState state(topo.links().size());
    RoundLinkState established;
    PriorityList prio;
    std::vector<CandidatePath> paths;

    for (std::uint64_t round = 0; round < cfg.rounds; ++round) {
        Rng link_rng = master.split(round, kLinks);
        sampler.sample(state, link_rng);
        if (hooks.on_round) established = state;

        paths.clear();
        Rng route_rng = master.split(round, kRouting);
        if (cfg.policy == RoutingPolicy::Dynamic) {
            if (round % cfg.priority_cadence == 0) {
                Rng prio_rng = master.split(round, kPriorities);
                prio = compute_priorities(build_flow_graph(terminals, pools, cfg.decoherence), topo, cfg.balancer,
                                          prio_rng);
            }
            if (!prio.empty()) selector.select(state, &prio.pairs, route_rng, paths);
        }
        selector.select(state, nullptr, route_rng, paths);
        if (hooks.on_round) hooks.on_round(round, established, paths);

        Rng swap_rng = master.split(round, kSwapping);
        Rng sift_rng = master.split(round, kSifting);
        Rng bit_rng = master.split(round, kBits);
        for (const auto& path : attempt_swapping(std::move(paths), cfg.bsm_success_prob, swap_rng)) {
            auto& pool = pools[pool_index[static_cast<std::size_t>(path.endpoints.first) * terminals +
                                          path.endpoints.second]];
            if (sift_and_record(pool, path.repeaters(), sift_rng) && cfg.sample_bits)
                sample_bit_error(pool, path.repeaters(), cfg.decoherence, bit_rng);
        }
        paths = {};

        if (hooks.on_progress && hooks.progress_every && (round + 1) % hooks.progress_every == 0)
            hooks.on_progress(round + 1, cfg.rounds);
    }

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        result.total_sifted += pools[i].total();
        result.pairs.push_back(PairOutcome{pairs[i], std::move(pools[i])});
    }
    finalize(result);
    result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

SimResult redistill(const SimResult& result, const DistillationOptions& opts) {
    opts.validate();
    SimResult out = result;
    out.config.distill = opts;
    finalize(out);
    return out;
}

std::vector<SimResult> sweep(const SimConfig& base, const std::vector<double>& decoherence_values,
                             const std::vector<RoutingPolicy>& policies, const std::vector<std::uint64_t>& seeds,
                             unsigned jobs) {
    if (decoherence_values.empty()) throw ConfigError("decoherence", "sweep needs at least one value");
    if (policies.empty()) throw ConfigError("policy", "sweep needs at least one policy");
    if (seeds.empty()) throw ConfigError("seeds", "sweep needs at least one seed");

    std::vector<SimConfig> configs;
    for (double d : decoherence_values)
        for (auto policy : policies)
            for (auto seed : seeds) {
                SimConfig c = base;
                c.decoherence = d;
                c.policy = policy;
                c.seed = seed;
                configs.push_back(c);
            }

    const auto describe = [](const SimConfig& c) {
        std::ostringstream os;
        os << "run D=" << c.decoherence << " policy=" << to_string(c.policy) << " seed=" << c.seed;
        return os.str();
    };
    for (const auto& c : configs) {
        try {
            c.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(e.field(), describe(c) + ": " + e.what());
        }
    }

    std::vector<SimResult> results(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                results[i] = run(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, configs.size()));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(worker);
    }

    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error(describe(configs[i]) + ": " + e.what());
        }
    }
    return results;
}

std::vector<double> default_decoherence_grid() {
    return {0.0, 0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04};
}

}  // namespace qkdnet
