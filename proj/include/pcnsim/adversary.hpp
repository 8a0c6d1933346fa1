#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pcnsim/graph.hpp"
#include "pcnsim/latmodel.hpp"
#include "pcnsim/routing.hpp"
#include "pcnsim/sim.hpp"

namespace pcnsim {

/// Raised when reduction leaves nothing to rank.
class NoCandidate : public Error {
public:
    using Error::Error;
};

enum class Direction { toward_source, toward_destination };
enum class Target { source, destination };

const char* to_string(Direction d);
const char* to_string(Target t);

struct AdversaryConfig {
    std::vector<NodeIndex> malicious;
    bool source_attack_enabled = true;
    bool timelock_reduction_enabled = true;
};

/// One correlated pair of sightings at a malicious node. `edge` is the
/// channel between the observer and `neighbor`; amount and timelock belong
/// to the HTLC carried over that channel.
struct Observation {
    PaymentId payment;
    NodeIndex observer = 0;
    ChannelIndex edge = 0;
    NodeIndex neighbor = 0;
    Direction direction = Direction::toward_destination;
    TimeNs t0 = 0;
    TimeNs t1 = 0;
    Msat amount = 0;
    std::uint32_t timelock = 0;

    TimeNs delta_t() const { return t1 - t0; }
    double delta_t_ms() const { return static_cast<double>(t1 - t0) / static_cast<double>(kNsPerMs); }
};

struct RankedCandidate {
    NodeIndex node = 0;
    double log_likelihood = 0.0;
};

struct EstimationResult {
    PaymentId payment;
    Target target = Target::destination;
    /// Descending log-likelihood, ties by ascending NodeId.
    std::vector<RankedCandidate> candidates;

    NodeIndex top() const { return candidates.front().node; }
};

/// Hooks shared by all malicious nodes of one run. Destination leg: t0 when
/// update_add_htlc is forwarded, t1 when update_fulfill_htlc returns. Source
/// leg: the first malicious node to see a payment fails it (t0) and records
/// t1 when the same-path retry is committed at that node.
class AdversaryBehavior : public NodeBehavior {
public:
    AdversaryBehavior(const PublicGraph& g, bool source_attack_enabled)
        : graph_(&g), source_attack_(source_attack_enabled)
    {
    }

    bool accept_incoming(const HtlcContext& ctx) override;
    void on_add_forwarded(const HtlcContext& ctx) override;
    void on_fulfill_received(const HtlcContext& ctx) override;

    const std::vector<Observation>& observations() const { return observations_; }
    void clear();

private:
    struct Pending {
        NodeIndex node = 0;
        ChannelIndex edge = 0;
        NodeIndex neighbor = 0;
        TimeNs t0 = 0;
        Msat amount = 0;
        std::uint32_t timelock = 0;
        bool done = false;
    };

    const PublicGraph* graph_;
    bool source_attack_;
    std::unordered_set<PaymentId> seen_;
    std::unordered_map<PaymentId, Pending> source_pending_;
    std::map<std::pair<std::uint64_t, NodeIndex>, Pending> dest_pending_;
    std::vector<Observation> observations_;
};

/// Per payment and direction, the observation with the smallest δt (the
/// observer closest to that endpoint). Ordered by (payment, direction).
std::vector<Observation> closest_observations(const std::vector<Observation>& all);

/// Amount and time-lock of the HTLC entering the anchor of the observation's
/// reachability query, plus the query itself.
ReachabilityQuery reachability_query(const Observation& obs, const PublicGraph& g, const RoutingParams& params);

/// ℛ_cap ∩ ℛ_Δ anchored at the node across e_obs (ℛ_cap only when
/// timelock reduction is disabled). The observer is excluded.
std::vector<bool> reduce_anonymity_set(const Observation& obs, const PublicGraph& g, const AdversaryConfig& cfg,
                                       const RoutingParams& params = {});

/// Lowest-weight channel at `amount` between two nodes in flow direction
/// from -> to; ties by ChannelId. Disabled or too-small channels are skipped.
std::optional<ChannelIndex> cheapest_edge(const PublicGraph& g, NodeIndex from, NodeIndex to, Msat amount,
                                          const RoutingParams& params);

/// Log-density of δt (ms) under Σ T·lat(e) for the given edges, with the
/// per-edge spread floored for evaluation.
double path_log_likelihood(const LatencyModel& model, std::span<const ChannelIndex> edges, double delta_t_ms);

/// Iterative likelihood-guided expansion from the known first hop. Each
/// node keeps one best path; a neighbour is (re)queued only when its new
/// path is more likely than both the current node's and its own previous
/// best. Paths stay simple and inside the candidate set.
EstimationResult estimate_endpoint(const Observation& obs, const PublicGraph& g, const LatencyModel& model,
                                   const std::vector<bool>& candidates, const RoutingParams& params = {});
EstimationResult estimate_endpoint(const Observation& obs, const PublicGraph& g, const LatencyModel& model,
                                   const AdversaryConfig& cfg, const RoutingParams& params = {});

/// The node adjacent to the observer across e_obs.
EstimationResult first_spy_estimate(const Observation& obs);

Target target_of(Direction d);

} // namespace pcnsim
