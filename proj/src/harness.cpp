#include "pcnsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "pcnsim/csv.hpp"
#include "pcnsim/seed.hpp"
#include "pcnsim/sim.hpp"

namespace pcnsim {

using nlohmann::json;

namespace {

template <typename T>
T get_number(const json& j, const char* key)
{
    if (!j.is_number()) {
        throw Error(std::string("config: '") + key + "' must be a number");
    }
    if constexpr (std::is_integral_v<T>) {
        if (!j.is_number_integer() || (std::is_unsigned_v<T> && j.get<std::int64_t>() < 0)) {
            throw Error(std::string("config: '") + key + "' must be a non-negative integer");
        }
    }
    return j.get<T>();
}

bool get_bool(const json& j, const char* key)
{
    if (!j.is_boolean()) {
        throw Error(std::string("config: '") + key + "' must be true or false");
    }
    return j.get<bool>();
}

std::string get_string(const json& j, const char* key)
{
    if (!j.is_string()) {
        throw Error(std::string("config: '") + key + "' must be a string");
    }
    return j.get<std::string>();
}

} // namespace

ScenarioConfig parse_scenario_config(const json& j)
{
    if (!j.is_object()) {
        throw Error("config: top level must be an object");
    }
    ScenarioConfig cfg;
    for (const auto& [key, v] : j.items()) {
        const char* k = key.c_str();
        if (key == "scenario") {
            cfg.name = get_string(v, k);
        } else if (key == "kind") {
            const auto s = get_string(v, k);
            if (s == "central" || s == "mcentral") {
                cfg.kind = ScenarioKind::central;
            } else if (s == "random" || s == "mrandom") {
                cfg.kind = ScenarioKind::random;
            } else if (s == "explicit" || s == "node-list" || s == "lnbig") {
                cfg.kind = ScenarioKind::explicit_list;
            } else {
                throw Error("config: unknown scenario kind '" + s + "'");
            }
        } else if (key == "m") {
            cfg.m_values.clear();
            if (v.is_array()) {
                for (const auto& x : v) {
                    cfg.m_values.push_back(get_number<std::uint32_t>(x, k));
                }
            } else {
                cfg.m_values.push_back(get_number<std::uint32_t>(v, k));
            }
        } else if (key == "node_list") {
            cfg.node_list.clear();
            if (!v.is_array()) {
                throw Error("config: 'node_list' must be an array of node ids");
            }
            for (const auto& x : v) {
                cfg.node_list.push_back(get_string(x, k));
            }
        } else if (key == "amounts_sat") {
            cfg.amounts_sat.clear();
            if (!v.is_array()) {
                throw Error("config: 'amounts_sat' must be an array");
            }
            for (const auto& x : v) {
                cfg.amounts_sat.push_back(get_number<std::int64_t>(x, k));
            }
        } else if (key == "workload") {
            const auto s = get_string(v, k);
            if (s == "per-amount") {
                cfg.workload = WorkloadMode::per_amount;
            } else if (s == "mixed") {
                cfg.workload = WorkloadMode::mixed;
            } else {
                throw Error("config: 'workload' must be per-amount or mixed");
            }
        } else if (key == "payments_per_run") {
            cfg.payments_per_run = get_number<std::uint32_t>(v, k);
        } else if (key == "repetitions") {
            cfg.repetitions = get_number<std::uint32_t>(v, k);
        } else if (key == "base_seed") {
            cfg.base_seed = get_number<std::uint64_t>(v, k);
        } else if (key == "graph_seed") {
            cfg.graph_seed = get_number<std::uint64_t>(v, k);
        } else if (key == "retry_attack") {
            cfg.retry_attack = get_bool(v, k);
        } else if (key == "shadow_ablation") {
            cfg.shadow_ablation = get_bool(v, k);
        } else if (key == "report_ablation") {
            cfg.report_ablation = get_bool(v, k);
        } else if (key == "traversal_weight_mode") {
            const auto s = get_string(v, k);
            if (s != "six" && s != "four") {
                throw Error("config: 'traversal_weight_mode' must be six or four");
            }
            cfg.four_traversals = s == "four";
        } else if (key == "scaling_mode") {
            const auto s = get_string(v, k);
            if (s != "independent" && s != "deterministic") {
                throw Error("config: 'scaling_mode' must be independent or deterministic");
            }
            cfg.scaling = s == "independent" ? ScalingMode::independent : ScalingMode::deterministic;
        } else if (key == "probe_budget") {
            cfg.probes_per_path = get_number<std::uint32_t>(v, k);
        } else if (key == "probe_max_path_length") {
            cfg.probe_max_path_length = get_number<std::uint32_t>(v, k);
        } else if (key == "retry_delay_ms") {
            cfg.retry_delay_ms = get_number<double>(v, k);
        } else if (key == "emit_timeline") {
            cfg.emit_timeline = get_bool(v, k);
        } else if (key == "latency_table") {
            cfg.latency_table_path = get_string(v, k);
        } else if (key == "final_cltv_delta") {
            cfg.routing.final_cltv_delta = get_number<std::uint32_t>(v, k);
        } else if (key == "max_total_timelock") {
            cfg.routing.max_total_timelock = get_number<std::uint32_t>(v, k);
        } else if (key == "risk_factor") {
            cfg.routing.risk_factor = get_number<double>(v, k);
        } else if (key == "synthetic") {
            if (!v.is_object()) {
                throw Error("config: 'synthetic' must be an object");
            }
            for (const auto& [sk, sv] : v.items()) {
                const char* s = sk.c_str();
                if (sk == "capacity_sat") {
                    cfg.synthetic.capacity_sat = get_number<std::int64_t>(sv, s);
                } else if (sk == "base_fee_msat") {
                    cfg.synthetic.base_fee = get_number<std::int64_t>(sv, s);
                } else if (sk == "fee_rate_ppm") {
                    cfg.synthetic.fee_rate_ppm = get_number<std::int64_t>(sv, s);
                } else if (sk == "time_lock_delta") {
                    cfg.synthetic.timelock_delta = get_number<std::uint32_t>(sv, s);
                } else if (sk == "attach_edges") {
                    cfg.synthetic.attach_edges = get_number<std::uint32_t>(sv, s);
                } else {
                    throw Error("config: unknown key 'synthetic." + sk + "'");
                }
            }
        } else {
            throw Error("config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path)
{
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw Error("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario_config(j);
}

void validate_config(const ScenarioConfig& cfg, std::size_t node_count)
{
    if (cfg.amounts_sat.empty()) {
        throw Error("config: amounts_sat must not be empty");
    }
    for (auto a : cfg.amounts_sat) {
        if (a <= 0) {
            throw Error("config: amounts must be positive");
        }
    }
    if (cfg.repetitions < 1) {
        throw Error("config: repetitions must be >= 1");
    }
    if (cfg.payments_per_run < 1) {
        throw Error("config: payments_per_run must be >= 1");
    }
    if (cfg.probes_per_path < 2) {
        throw Error("config: probe_budget must be >= 2");
    }
    if (node_count < 2) {
        throw Error("graph needs at least 2 nodes");
    }
    if (cfg.kind == ScenarioKind::explicit_list) {
        if (cfg.node_list.empty()) {
            throw Error("config: explicit scenario needs a node_list");
        }
        return;
    }
    if (cfg.m_values.empty()) {
        throw Error("config: m must list at least one value");
    }
    for (auto m : cfg.m_values) {
        if (m < 1) {
            throw Error("config: m must be >= 1");
        }
        if (m > node_count) {
            throw Error("config: m = " + std::to_string(m) + " exceeds the " + std::to_string(node_count) +
                        " graph nodes");
        }
    }
}

AdversaryConfig build_scenario(const PublicGraph& g, const ScenarioConfig& cfg, std::uint32_t m,
                               std::uint64_t seed, const std::vector<NodeIndex>* ranking)
{
    AdversaryConfig adv;
    adv.source_attack_enabled = cfg.retry_attack;
    adv.timelock_reduction_enabled = !cfg.shadow_ablation;
    switch (cfg.kind) {
    case ScenarioKind::central: {
        if (m < 1 || m > g.node_count()) {
            throw Error("scenario: m out of range");
        }
        std::vector<NodeIndex> local;
        if (ranking == nullptr) {
            local = betweenness_ranking(g);
            ranking = &local;
        }
        adv.malicious.assign(ranking->begin(), ranking->begin() + m);
        break;
    }
    case ScenarioKind::random: {
        if (m < 1 || m > g.node_count()) {
            throw Error("scenario: m out of range");
        }
        std::vector<NodeIndex> all(g.node_count());
        std::iota(all.begin(), all.end(), 0);
        std::mt19937_64 rng(mix_seed(mix_seed(seed, fnv1a("random-m")), m));
        std::shuffle(all.begin(), all.end(), rng);
        adv.malicious.assign(all.begin(), all.begin() + m);
        break;
    }
    case ScenarioKind::explicit_list: {
        std::set<NodeIndex> unique;
        for (const std::string& id : cfg.node_list) {
            auto n = g.find_node(id);
            if (!n) {
                throw Error("scenario: node list names unknown node '" + id + "'");
            }
            if (unique.insert(*n).second) {
                adv.malicious.push_back(*n);
            }
        }
        break;
    }
    }
    std::sort(adv.malicious.begin(), adv.malicious.end(),
              [&](NodeIndex a, NodeIndex b) { return g.id_rank(a) < g.id_rank(b); });
    return adv;
}

std::vector<Payment> generate_workload(std::size_t node_count, std::uint32_t count,
                                       std::span<const std::int64_t> amounts_sat, std::uint64_t seed)
{
    if (node_count < 2 || amounts_sat.empty()) {
        throw ContractViolation("workload needs two nodes and at least one amount");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<NodeIndex> pick(0, static_cast<NodeIndex>(node_count - 1));
    std::uniform_int_distribution<NodeIndex> pick_other(0, static_cast<NodeIndex>(node_count - 2));
    std::vector<Payment> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Payment p;
        p.source = pick(rng);
        const NodeIndex d = pick_other(rng);
        p.dest = d >= p.source ? d + 1 : d;
        p.amount = amounts_sat[i % amounts_sat.size()] * kMsatPerSat;
        out.push_back(p);
    }
    return out;
}

namespace {

struct Cell {
    std::string label;
    std::vector<std::int64_t> amounts;
};

std::vector<Cell> workload_cells(const ScenarioConfig& cfg)
{
    std::vector<Cell> cells;
    if (cfg.workload == WorkloadMode::mixed) {
        cells.push_back(Cell{"mixed", cfg.amounts_sat});
    } else {
        for (auto a : cfg.amounts_sat) {
            cells.push_back(Cell{std::to_string(a), {a}});
        }
    }
    return cells;
}

std::vector<std::uint32_t> m_values_of(const ScenarioConfig& cfg)
{
    if (cfg.kind == ScenarioKind::explicit_list) {
        std::set<std::string> unique(cfg.node_list.begin(), cfg.node_list.end());
        return {static_cast<std::uint32_t>(unique.size())};
    }
    return cfg.m_values;
}

void trim(std::vector<EstimationResult>& results)
{
    for (auto& r : results) {
        if (r.candidates.size() > 1) {
            r.candidates.resize(1);
        }
    }
}

void run_cell(RunRecord& rec, const FullGraph& g, const PublicGraph& pub, const ScenarioConfig& cfg,
              const AdversaryConfig& adv, const LatencyModel& model, const std::vector<Payment>& payments,
              const std::vector<std::optional<PaymentPath>>& routes, std::uint64_t engine_seed)
{
    FullGraph live = g;
    Engine engine(live, engine_seed);
    AdversaryBehavior behavior(pub, adv.source_attack_enabled);
    for (NodeIndex m : adv.malicious) {
        engine.set_behavior(m, &behavior);
    }
    ExecuteOptions opts;
    opts.max_retries = adv.source_attack_enabled ? 1 : 0;
    opts.retry_delay = static_cast<TimeNs>(std::llround(cfg.retry_delay_ms * static_cast<double>(kNsPerMs)));
    opts.record_timeline = cfg.emit_timeline;

    const std::unordered_set<NodeIndex> bad(adv.malicious.begin(), adv.malicious.end());
    for (std::size_t i = 0; i < payments.size(); ++i) {
        PaymentTruth t;
        t.payment = PaymentId{i + 1};
        t.source = payments[i].source;
        t.dest = payments[i].dest;
        if (routes[i]) {
            t.path = routes[i]->nodes();
            for (std::size_t k = 1; k + 1 < t.path.size(); ++k) {
                if (bad.contains(t.path[k])) {
                    t.observed_by.push_back(t.path[k]);
                }
            }
            PaymentOutcome outcome = engine.execute_payment(*routes[i], t.payment, opts);
            if (cfg.emit_timeline) {
                rec.timeline.insert(rec.timeline.end(), outcome.timeline.begin(), outcome.timeline.end());
            }
        }
        rec.truth.add(std::move(t));
    }

    if (!live.balances_conserved()) {
        throw Error("channel conservation violated after cell m=" + std::to_string(rec.m) + " amount=" + rec.amount);
    }
    for (ChannelIndex c = 0; c < live.channel_count(); ++c) {
        if (engine.locked(c, live.channel(c).u) != 0 || engine.locked(c, live.channel(c).v) != 0) {
            throw Error("HTLC left locked after cell m=" + std::to_string(rec.m));
        }
    }

    rec.observations = closest_observations(behavior.observations());
    auto& timing = rec.estimates[kEstimatorTiming];
    auto& spy = rec.estimates[kEstimatorFirstSpy];
    std::vector<EstimationResult>* ablation = cfg.report_ablation ? &rec.estimates[kEstimatorTimingNoTimelock] : nullptr;
    for (const Observation& obs : rec.observations) {
        spy.push_back(first_spy_estimate(obs));
        const ReachabilityQuery q = reachability_query(obs, pub, cfg.routing);
        const auto cap = reachability_subgraph(pub, q, ReachabilityKind::capacity).member;
        auto both = cap;
        const auto lock = reachability_subgraph(pub, q, ReachabilityKind::timelock);
        for (std::size_t i = 0; i < both.size(); ++i) {
            both[i] = both[i] && lock.member[i];
        }
        try {
            timing.push_back(
                estimate_endpoint(obs, pub, model, adv.timelock_reduction_enabled ? both : cap, cfg.routing));
        } catch (const NoCandidate&) {
            ++rec.estimation_failures;
        }
        if (ablation != nullptr) {
            try {
                ablation->push_back(estimate_endpoint(obs, pub, model, cap, cfg.routing));
            } catch (const NoCandidate&) {
                ++rec.estimation_failures;
            }
        }
    }

    rec.compromised_share = compromised_share(rec.truth, adv.malicious);
    for (const auto& [label, results] : rec.estimates) {
        const MetricsReport reports[] = {
            evaluate(results, rec.truth, Target::source, label),
            evaluate(results, rec.truth, Target::destination, label),
            full_deanonymization(results, results, rec.truth, label),
        };
        const char* targets[] = {"source", "destination", "full"};
        for (int k = 0; k < 3; ++k) {
            rec.metrics.push_back(MetricsRow{rec.scenario, label, targets[k], rec.m, rec.amount, rec.seed,
                                             reports[k].precision, reports[k].recall, reports[k].f1,
                                             rec.compromised_share});
        }
    }
    for (auto& [label, results] : rec.estimates) {
        trim(results);
    }
}

} // namespace

ExperimentResult run_experiment(const FullGraph& graph, const ScenarioConfig& cfg, const RegionLatencyTable& table,
                                std::ostream* log)
{
    validate_config(cfg, graph.node_count());
    ExperimentResult result;
    const PublicGraph topology = public_view(graph);
    const std::vector<NodeIndex> ranking = betweenness_ranking(topology);
    const auto cells = workload_cells(cfg);
    const auto ms = m_values_of(cfg);

    ProbeCampaignConfig campaign;
    campaign.probes_per_path = cfg.probes_per_path;
    campaign.max_path_length = cfg.probe_max_path_length;
    campaign.traversal_weight = cfg.traversal_weight();

    for (std::uint32_t rep = 0; rep < cfg.repetitions; ++rep) {
        const std::uint64_t seed = cfg.base_seed + rep;
        try {
            FullGraph g = graph;
            init_balances(g);
            assign_latencies(g, table, mix_seed(seed, fnv1a("latency")));
            const PublicGraph pub = public_view(g);

            std::vector<std::vector<Payment>> workloads;
            std::vector<std::vector<std::optional<PaymentPath>>> routes;
            for (const Cell& cell : cells) {
                workloads.push_back(generate_workload(g.node_count(), cfg.payments_per_run, cell.amounts,
                                                      mix_seed(seed, fnv1a("workload"))));
                auto& r = routes.emplace_back();
                for (const Payment& p : workloads.back()) {
                    r.push_back(find_route(pub, p, cfg.routing));
                }
            }

            std::map<NodeIndex, std::vector<EdgeLatencyEstimate>> probed;
            std::vector<RunRecord> rep_records;
            for (std::uint32_t m : ms) {
                const AdversaryConfig adv = build_scenario(pub, cfg, m, seed, &ranking);
                std::vector<EdgeLatencyEstimate> estimates;
                for (NodeIndex v : adv.malicious) {
                    auto it = probed.find(v);
                    if (it == probed.end()) {
                        it = probed
                                 .emplace(v, probe_from_vantage(g, v, campaign,
                                                                mix_seed(seed, fnv1a(pub.node_id(v).value)),
                                                                &result.probe_stats))
                                 .first;
                    }
                    estimates.insert(estimates.end(), it->second.begin(), it->second.end());
                }
                const LatencyModel model =
                    aggregate_models(estimates, pub.channel_count(), cfg.traversal_weight(), cfg.scaling);

                for (std::size_t ci = 0; ci < cells.size(); ++ci) {
                    RunRecord rec;
                    rec.scenario = cfg.name;
                    rec.seed = seed;
                    rec.m = m;
                    rec.amount = cells[ci].label;
                    rec.malicious = adv.malicious;
                    const std::uint64_t engine_seed = mix_seed(mix_seed(seed, fnv1a("engine")), (std::uint64_t{m} << 16) | ci);
                    run_cell(rec, g, pub, cfg, adv, model, workloads[ci], routes[ci], engine_seed);
                    rep_records.push_back(std::move(rec));
                }
            }
            if (log != nullptr) {
                *log << "[" << cfg.name << "] seed " << seed << ": " << rep_records.size() << " cells done\n";
            }
            for (auto& r : rep_records) {
                result.records.push_back(std::move(r));
            }
        } catch (const std::exception& e) {
            result.errors.push_back("[" + cfg.name + "] seed " + std::to_string(seed) + ": " + e.what());
            if (log != nullptr) {
                *log << result.errors.back() << "\n";
            }
        }
    }
    return result;
}

namespace {

double row_metric(const MetricsRow& r, const std::string& metric)
{
    if (metric == "precision") {
        return r.precision;
    }
    if (metric == "recall") {
        return r.recall;
    }
    if (metric == "f1") {
        return r.f1;
    }
    return r.compromised_share;
}

} // namespace

std::vector<SummaryRow> summarize(std::span<const RunRecord> records)
{
    using Key = std::tuple<std::string, std::string, std::string, std::uint32_t, std::string, std::string>;
    std::map<Key, std::vector<double>> groups;
    static const char* metrics[] = {"precision", "recall", "f1", "compromised_share"};
    for (const RunRecord& rec : records) {
        for (const MetricsRow& r : rec.metrics) {
            for (const char* metric : metrics) {
                groups[Key{r.scenario, r.estimator, r.target, r.m, r.amount, metric}].push_back(row_metric(r, metric));
            }
        }
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, values] : groups) {
        SummaryRow s;
        std::tie(s.scenario, s.estimator, s.target, s.m, s.amount, s.metric) = key;
        s.runs = values.size();
        s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<AblationDelta> ablation_deltas(std::span<const RunRecord> records)
{
    using Key = std::tuple<std::string, std::uint32_t, std::string>;
    std::map<Key, std::map<std::string, std::pair<double, double>>> means;
    for (const SummaryRow& s : summarize(records)) {
        if (s.target != "destination" || (s.metric != "precision" && s.metric != "recall")) {
            continue;
        }
        auto& slot = means[Key{s.scenario, s.m, s.amount}][s.estimator];
        (s.metric == "precision" ? slot.first : slot.second) = s.mean;
    }
    std::vector<AblationDelta> out;
    for (const auto& [key, by_est] : means) {
        auto on = by_est.find(kEstimatorTiming);
        auto off = by_est.find(kEstimatorTimingNoTimelock);
        if (on == by_est.end() || off == by_est.end()) {
            continue;
        }
        AblationDelta d;
        std::tie(d.scenario, d.m, d.amount) = key;
        d.precision_delta = on->second.first - off->second.first;
        d.recall_delta = on->second.second - off->second.second;
        out.push_back(d);
    }
    return out;
}

std::string metrics_csv(std::span<const RunRecord> records)
{
    std::ostringstream out;
    out << "scenario,estimator,target,m,amount_sat,seed,precision,recall,f1,compromised_share\n";
    for (const RunRecord& rec : records) {
        for (const MetricsRow& r : rec.metrics) {
            out << r.scenario << ',' << r.estimator << ',' << r.target << ',' << r.m << ',' << r.amount << ','
                << r.seed << ',' << format_double(r.precision) << ',' << format_double(r.recall) << ','
                << format_double(r.f1) << ',' << format_double(r.compromised_share) << '\n';
        }
    }
    return out.str();
}

std::string observations_csv(std::span<const RunRecord> records, const PublicGraph& g)
{
    std::ostringstream out;
    out << "scenario,seed,m,amount_sat,payment_id,observer,channel_id,direction,t0_ns,t1_ns,amount_msat,"
           "timelock_blocks\n";
    for (const RunRecord& rec : records) {
        for (const Observation& o : rec.observations) {
            out << rec.scenario << ',' << rec.seed << ',' << rec.m << ',' << rec.amount << ',' << o.payment.value
                << ',' << g.node_id(o.observer).value << ',' << g.channel(o.edge).id.value << ','
                << to_string(o.direction) << ',' << o.t0 << ',' << o.t1 << ',' << o.amount << ',' << o.timelock
                << '\n';
        }
    }
    return out.str();
}

std::string timeline_csv(std::span<const RunRecord> records, const PublicGraph& g)
{
    std::ostringstream out;
    out << "scenario,seed,m,amount_sat,time_ns,payment_id,from_node,to_node,channel_id,kind\n";
    for (const RunRecord& rec : records) {
        for (const TimelineEntry& t : rec.timeline) {
            out << rec.scenario << ',' << rec.seed << ',' << rec.m << ',' << rec.amount << ',' << t.time << ','
                << t.payment.value << ',' << g.node_id(t.from).value << ',' << g.node_id(t.to).value << ','
                << g.channel(t.channel).id.value << ',' << to_string(t.kind) << '\n';
        }
    }
    return out.str();
}

std::string summary_csv(std::span<const RunRecord> records)
{
    std::ostringstream out;
    out << "scenario,estimator,target,m,amount_sat,metric,mean,stddev,runs\n";
    for (const SummaryRow& s : summarize(records)) {
        out << s.scenario << ',' << s.estimator << ',' << s.target << ',' << s.m << ',' << s.amount << ','
            << s.metric << ',' << format_double(s.mean) << ',' << format_double(s.stddev) << ',' << s.runs << '\n';
    }
    return out.str();
}

void emit_results(std::span<const RunRecord> records, const PublicGraph& g, const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir + "': " + ec.message());
    }
    const std::filesystem::path base(dir);
    write_text_file((base / "metrics.csv").string(), metrics_csv(records));
    write_text_file((base / "observations.csv").string(), observations_csv(records, g));
    write_text_file((base / "summary.csv").string(), summary_csv(records));
    const bool any_timeline =
        std::any_of(records.begin(), records.end(), [](const RunRecord& r) { return !r.timeline.empty(); });
    if (any_timeline) {
        write_text_file((base / "timeline.csv").string(), timeline_csv(records, g));
    }
}

} // namespace pcnsim
