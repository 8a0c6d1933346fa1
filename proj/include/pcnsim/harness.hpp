#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcnsim/adversary.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/latency_table.hpp"
#include "pcnsim/latmodel.hpp"
#include "pcnsim/metrics.hpp"
#include "pcnsim/routing.hpp"
#include "pcnsim/synthetic.hpp"

namespace pcnsim {

enum class ScenarioKind { central, random, explicit_list };
enum class WorkloadMode { per_amount, mixed };

inline constexpr const char* kEstimatorTiming = "timing";
inline constexpr const char* kEstimatorFirstSpy = "first_spy";
inline constexpr const char* kEstimatorTimingNoTimelock = "timing_no_timelock";

struct ScenarioConfig {
    std::string name = "mcentral";
    ScenarioKind kind = ScenarioKind::central;
    std::vector<std::uint32_t> m_values{1};
    std::vector<std::string> node_list;
    std::vector<std::int64_t> amounts_sat{1, 10, 100, 1000, 10000, 100000};
    WorkloadMode workload = WorkloadMode::per_amount;
    std::uint32_t payments_per_run = 1000;
    std::uint32_t repetitions = 30;
    std::uint64_t base_seed = 1;
    /// Topology seed for synthetic graphs; defaults to base_seed.
    std::optional<std::uint64_t> graph_seed;
    bool retry_attack = true;
    /// Disable time-lock based reduction for the timing estimator.
    bool shadow_ablation = false;
    /// Also run the timing estimator without time-lock reduction and report it.
    bool report_ablation = true;
    bool four_traversals = false;
    ScalingMode scaling = ScalingMode::independent;
    std::uint32_t probes_per_path = 100;
    std::uint32_t probe_max_path_length = 3;
    double retry_delay_ms = 0.0;
    bool emit_timeline = false;
    std::optional<std::string> latency_table_path;
    RoutingParams routing;
    SyntheticDefaults synthetic;

    double traversal_weight() const { return four_traversals ? kCompactTraversalsPerHop : kTraversalsPerHop; }
    std::uint64_t topology_seed() const { return graph_seed.value_or(base_seed); }
};

/// Reads the JSON config format (see README). Unknown keys are rejected.
ScenarioConfig parse_scenario_config(const nlohmann::json& j);
ScenarioConfig load_scenario_config(const std::string& path);
/// Throws Error for m < 1, empty amounts, zero repetitions, or m > |V|.
void validate_config(const ScenarioConfig& cfg, std::size_t node_count);

/// central: top-m betweenness; random: uniform sample without replacement
/// seeded by (seed, m); explicit: the configured list.
AdversaryConfig build_scenario(const PublicGraph& g, const ScenarioConfig& cfg, std::uint32_t m,
                               std::uint64_t seed, const std::vector<NodeIndex>* ranking = nullptr);

/// Uniform source != dest pairs; amounts cycle through `amounts_sat`.
std::vector<Payment> generate_workload(std::size_t node_count, std::uint32_t count,
                                       std::span<const std::int64_t> amounts_sat, std::uint64_t seed);

struct MetricsRow {
    std::string scenario;
    std::string estimator;
    std::string target;
    std::uint32_t m = 0;
    std::string amount;
    std::uint64_t seed = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double compromised_share = 0.0;
};

/// One (scenario, seed, m, amount) cell.
struct RunRecord {
    std::string scenario;
    std::uint64_t seed = 0;
    std::uint32_t m = 0;
    std::string amount;
    std::vector<NodeIndex> malicious;
    GroundTruth truth;
    /// Closest-observer inputs, ordered by (payment, direction).
    std::vector<Observation> observations;
    /// Estimator label -> results (candidate lists trimmed to the top entry).
    std::map<std::string, std::vector<EstimationResult>> estimates;
    std::size_t estimation_failures = 0;
    double compromised_share = 0.0;
    std::vector<MetricsRow> metrics;
    std::vector<TimelineEntry> timeline;
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    /// One line per aborted repetition.
    std::vector<std::string> errors;
    ProbeCampaignStats probe_stats;
};

/// Per repetition i (seed = base_seed + i): latencies, probing campaign,
/// workload routing, simulation with malicious hooks, estimation and
/// metrics for every (m, amount) cell. A failing repetition is recorded in
/// `errors` and the others proceed. Channel conservation is checked after
/// every cell.
ExperimentResult run_experiment(const FullGraph& graph, const ScenarioConfig& cfg,
                                const RegionLatencyTable& table = RegionLatencyTable::builtin(),
                                std::ostream* log = nullptr);

struct SummaryRow {
    std::string scenario;
    std::string estimator;
    std::string target;
    std::uint32_t m = 0;
    std::string amount;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t runs = 0;
};

/// Means over seeds, long format keyed by (scenario, estimator, target, m, amount, metric).
std::vector<SummaryRow> summarize(std::span<const RunRecord> records);

struct AblationDelta {
    std::string scenario;
    std::uint32_t m = 0;
    std::string amount;
    double precision_delta = 0.0;
    double recall_delta = 0.0;
};

/// Destination-target (timing − timing_no_timelock) mean precision / recall.
std::vector<AblationDelta> ablation_deltas(std::span<const RunRecord> records);

std::string metrics_csv(std::span<const RunRecord> records);
std::string observations_csv(std::span<const RunRecord> records, const PublicGraph& g);
std::string timeline_csv(std::span<const RunRecord> records, const PublicGraph& g);
std::string summary_csv(std::span<const RunRecord> records);

/// Writes metrics.csv, observations.csv, summary.csv and (when any record
/// carries one) timeline.csv into `dir`, creating it if needed.
void emit_results(std::span<const RunRecord> records, const PublicGraph& g, const std::string& dir);

} // namespace pcnsim
