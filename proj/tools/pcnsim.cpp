#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pcnsim/csv.hpp"
#include "pcnsim/harness.hpp"
#include "pcnsim/snapshot.hpp"

using namespace pcnsim;

namespace {

struct RunArgs {
    std::string config;
    std::string snapshot;
    std::string synthetic;
    std::string out = "results";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> repetitions;
    bool four_traversals = false;
    bool no_timelock = false;
    bool no_source_attack = false;
    bool timeline = false;
    bool quiet = false;
};

int run(const RunArgs& a)
{
    ScenarioConfig cfg = a.config.empty() ? ScenarioConfig{} : load_scenario_config(a.config);
    if (a.seed) {
        cfg.base_seed = *a.seed;
    }
    if (a.repetitions) {
        cfg.repetitions = *a.repetitions;
    }
    cfg.four_traversals = cfg.four_traversals || a.four_traversals;
    cfg.shadow_ablation = cfg.shadow_ablation || a.no_timelock;
    cfg.retry_attack = cfg.retry_attack && !a.no_source_attack;
    cfg.emit_timeline = cfg.emit_timeline || a.timeline;

    FullGraph graph;
    if (!a.snapshot.empty()) {
        LoadedSnapshot loaded = load_snapshot_file(a.snapshot);
        for (const auto& r : loaded.rejected) {
            std::cerr << "snapshot: skipped " << r.record << ": " << r.reason << "\n";
        }
        graph = std::move(loaded.graph);
    } else {
        const SyntheticSpec spec = parse_synthetic_spec(a.synthetic);
        graph = generate_synthetic_graph(spec.kind, spec.nodes, cfg.topology_seed(), cfg.synthetic);
    }

    const RegionLatencyTable table = cfg.latency_table_path
                                         ? RegionLatencyTable::parse_csv(read_text_file(*cfg.latency_table_path))
                                         : RegionLatencyTable::builtin();

    std::ostream* log = a.quiet ? nullptr : &std::cerr;
    const ExperimentResult result = run_experiment(graph, cfg, table, log);
    emit_results(result.records, public_view(graph), a.out);

    if (!a.quiet) {
        std::cerr << "probes sent: " << result.probe_stats.probes_sent << ", discarded: " << result.probe_stats.probes_discarded
                  << ", clamped estimates: " << result.probe_stats.clamped_estimates << "\n";
    }
    for (const AblationDelta& d : ablation_deltas(result.records)) {
        std::printf("ablation %s m=%u amount=%s: precision %+.4f recall %+.4f\n", d.scenario.c_str(), d.m,
                    d.amount.c_str(), d.precision_delta, d.recall_delta);
    }
    std::printf("%zu cells written to %s\n", result.records.size(), a.out.c_str());
    for (const std::string& e : result.errors) {
        std::cerr << "aborted: " << e << "\n";
    }
    return result.errors.empty() ? 0 : 1;
}

int convert(const std::string& in, const std::string& out)
{
    const auto lnd = nlohmann::json::parse(read_text_file(in));
    const auto doc = convert_lnd_describegraph(lnd);
    const LoadedSnapshot check = load_snapshot(doc.dump());
    write_text_file(out, doc.dump(2) + "\n");
    std::printf("%zu nodes, %zu channels (%zu records skipped)\n", check.graph.node_count(),
                check.graph.channel_count(), check.rejected.size());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Payment channel network timing deanonymization simulator"};
    app.require_subcommand(1);

    RunArgs ra;
    CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment and write CSV results");
    run_cmd->add_option("--config", ra.config, "Scenario JSON")->check(CLI::ExistingFile);
    auto* snap = run_cmd->add_option("--snapshot", ra.snapshot, "Graph snapshot JSON")->check(CLI::ExistingFile);
    auto* synth = run_cmd->add_option("--synthetic", ra.synthetic, "Synthetic topology, e.g. scale-free:200");
    snap->excludes(synth);
    synth->excludes(snap);
    run_cmd->add_option("--out", ra.out, "Output directory");
    run_cmd->add_option("--seed", ra.seed, "Base seed (overrides config)");
    run_cmd->add_option("--repetitions", ra.repetitions, "Repetitions (overrides config)");
    run_cmd->add_flag("--t4,--paper-t4", ra.four_traversals, "Weight each hop by 4 traversals instead of 6");
    run_cmd->add_flag("--no-timelock-reduction", ra.no_timelock, "Timing estimator uses capacity reduction only");
    run_cmd->add_flag("--no-source-attack", ra.no_source_attack, "Disable the fail-and-retry source attack");
    run_cmd->add_flag("--timeline", ra.timeline, "Also write timeline.csv");
    run_cmd->add_flag("-q,--quiet", ra.quiet, "No progress output");

    std::string conv_in;
    std::string conv_out;
    CLI::App* conv_cmd = app.add_subcommand("convert", "Convert an lncli describegraph dump to a snapshot");
    conv_cmd->add_option("input", conv_in, "describegraph JSON")->required()->check(CLI::ExistingFile);
    conv_cmd->add_option("output", conv_out, "Snapshot JSON to write")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            if (ra.snapshot.empty() && ra.synthetic.empty()) {
                std::cerr << "run: one of --snapshot or --synthetic is required\n";
                return 2;
            }
            return run(ra);
        }
        return convert(conv_in, conv_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
