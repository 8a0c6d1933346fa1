#pragma once

// Brute-force reference implementations and fixture builders shared by the
// unit tests and the acceptance binary. Everything here enumerates paths
// explicitly and is only meant for graphs of a dozen nodes or so.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pcnsim/adversary.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/latmodel.hpp"
#include "pcnsim/routing.hpp"

namespace oracle {

using namespace pcnsim;

enum class Topology { tree, ring_chords, dense, grid, star_plus, line };

const char* to_string(Topology t);

struct RandomGraphOptions {
    Topology topology = Topology::dense;
    bool parallel_channels = false;
    bool random_policies = true;
    /// Share of directions that are disabled.
    double disabled_share = 0.0;
    Msat min_capacity = 100'000;
    Msat max_capacity = 10'000'000;
    double min_latency_ms = 5.0;
    double max_latency_ms = 150.0;
    /// Latency std as a fraction of the mean.
    double latency_spread = 0.2;
};

/// Connected graph with node ids "v00".."vNN" and balances split in half.
FullGraph random_graph(std::size_t n, std::uint64_t seed, const RandomGraphOptions& opt = {});

/// Path v0 - v1 - ... with uniform policies and latency.
FullGraph line_graph(std::size_t n, double latency_ms, double latency_std = 0.0, Msat capacity = 10'000'000,
                     ForwardingPolicy policy = ForwardingPolicy{1000, 10, 40, true});

/// Depth-first enumeration of every simple path starting at `from`, one
/// entry per parallel channel. The callback sees the hop list so far
/// (non-empty) and returns false to stop extending that prefix. Nodes with
/// allowed[n] == false are never entered.
template <typename G>
void for_each_simple_path(const G& g, NodeIndex from, const std::vector<bool>& allowed,
                          const std::function<bool(const std::vector<HopRef>&)>& visit)
{
    std::vector<bool> on_path(g.node_count(), false);
    std::vector<HopRef> hops;
    std::function<void(NodeIndex)> extend = [&](NodeIndex x) {
        for (ChannelIndex c : g.incident(x)) {
            const NodeIndex y = g.channel(c).other(x);
            if (on_path[y] || !allowed[y]) {
                continue;
            }
            hops.push_back(HopRef{c, x, y});
            if (visit(hops)) {
                on_path[y] = true;
                extend(y);
                on_path[y] = false;
            }
            hops.pop_back();
        }
    };
    on_path[from] = true;
    extend(from);
}

/// Weight of a hop sequence computed from scratch: the sender's own channel
/// is free, every other hop costs fee + amount * delta * risk.
struct BruteRoute {
    double weight = 0.0;
    std::vector<HopRef> hops;
};
std::optional<BruteRoute> brute_force_route(const PublicGraph& g, const Payment& p, const RoutingParams& params);
double brute_path_weight(const PublicGraph& g, const std::vector<HopRef>& hops, Msat amount,
                         const RoutingParams& params);
bool brute_path_valid(const PublicGraph& g, const std::vector<HopRef>& hops, Msat amount,
                      std::uint32_t budget, const RoutingParams& params);

/// Endpoints of all simple paths from/to the anchor that satisfy the
/// reachability rule for `kind`.
std::vector<bool> brute_force_reach(const PublicGraph& g, const FullGraph* full, const ReachabilityQuery& q,
                                    ReachabilityKind kind);

/// Betweenness by enumerating every shortest path between every pair.
std::vector<double> brute_force_betweenness(const PublicGraph& g);

/// Density of δt under the summed per-edge model, computed without the
/// library's Gaussian helpers.
double brute_log_likelihood(const LatencyModel& model, const std::vector<ChannelIndex>& edges, double dt_ms);

struct BruteEstimate {
    NodeIndex node = 0;
    double log_likelihood = 0.0;
    std::size_t paths = 0;
};

/// Argmax over every simple path that starts with e_obs, continues over the
/// cheapest usable channel between consecutive nodes and stays inside the
/// candidate set. Ties go to the smaller NodeId.
std::optional<BruteEstimate> brute_force_estimate(const Observation& obs, const PublicGraph& g,
                                                  const LatencyModel& model, const std::vector<bool>& candidates,
                                                  const RoutingParams& params = {});

/// Model holding each channel's true latency.
LatencyModel truth_model(const FullGraph& g, double traversal_weight = kTraversalsPerHop,
                         ScalingMode mode = ScalingMode::independent);

} // namespace oracle
