#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pcnsim/graph.hpp"

namespace pcnsim {

struct RoutingParams {
    /// Per-block risk factor r_f of the LND weight function.
    double risk_factor = 1.5e-8;
    /// Blocks the destination requires on the final HTLC.
    std::uint32_t final_cltv_delta = 40;
    /// Upper bound on a payment's total time-lock (LND's default CLTV limit).
    std::uint32_t max_total_timelock = 2016;
};

struct Payment {
    NodeIndex source = 0;
    NodeIndex dest = 0;
    Msat amount = 0;
    /// Total time-lock budget Δmax in blocks; 0 means "bounded only by
    /// RoutingParams::max_total_timelock".
    std::uint32_t max_timelock = 0;
};

/// One hop of a route: the HTLC offered by `from` to `to` over `channel`.
struct PathHop {
    ChannelIndex channel = 0;
    NodeIndex from = 0;
    NodeIndex to = 0;
    /// Amount carried on this hop, f_i.
    Msat amount = 0;
    /// Blocks of lock time left on this hop's HTLC.
    std::uint32_t remaining_timelock = 0;
};

struct PaymentPath {
    std::vector<PathHop> hops;
    /// Δmax the sender commits to: Σ Δtl over all hops + final CLTV delta.
    std::uint32_t total_timelock = 0;
    double weight = 0.0;

    bool empty() const { return hops.empty(); }
    std::size_t length() const { return hops.size(); }
    NodeIndex source() const { return hops.front().from; }
    NodeIndex dest() const { return hops.back().to; }
    Msat amount() const { return hops.back().amount; }
    /// Nodes in path order, source first.
    std::vector<NodeIndex> nodes() const;
};

/// Channel traversal without amounts; input to the validity predicates.
struct HopRef {
    ChannelIndex channel = 0;
    NodeIndex from = 0;
    NodeIndex to = 0;
};

/// fee(a) + a * Δtl * r_f; +inf for a disabled policy.
double edge_weight(Msat amount, const ForwardingPolicy& policy, const RoutingParams& params);

/// Amounts f_0..f_l for delivering `amount` over `hops`:
/// f_l = amount, f_{i-1} = f_i + fee(e_i, f_i).
std::vector<Msat> forward_amounts(const PublicGraph& g, std::span<const HopRef> hops, Msat amount);
std::vector<Msat> forward_amounts(const FullGraph& g, std::span<const HopRef> hops, Msat amount);

/// Fills in amounts, remaining time-locks, Δmax and weight for a hop
/// sequence. Throws ContractViolation if the hops do not chain.
PaymentPath make_path(const PublicGraph& g, std::span<const HopRef> hops, Msat amount,
                      const RoutingParams& params);

std::vector<HopRef> hop_refs(const PaymentPath& path);

/// Backward (destination-first) weighted Dijkstra, LND style: the sender pays
/// no fee or lock-time penalty on its own first hop; ties broken by
/// (weight, hop count, ascending NodeId). Parallel channels compete on
/// weight. Returns a capacity- and timelock-valid path or nullopt.
std::optional<PaymentPath> find_route(const PublicGraph& g, const Payment& payment,
                                      const RoutingParams& params);

/// The remaining budget Δmax - Σ_{j<i} Δtl(e_j) covers Δtl(e_i) at every
/// hop, i.e. the path's summed time-lock deltas fit within Δmax.
bool is_timelock_valid(std::span<const HopRef> hops, std::uint32_t max_timelock, const PublicGraph& g);
bool is_timelock_valid(const PaymentPath& path, std::uint32_t max_timelock, const PublicGraph& g);

/// cap(e_i) >= f_i for all hops (fee recursion from the final amount).
bool is_capacity_valid(std::span<const HopRef> hops, Msat amount, const PublicGraph& g);
bool is_capacity_valid(const PaymentPath& path, Msat amount, const PublicGraph& g);

/// bal(e_i, u_i, v_i) >= f_i for all hops.
bool is_balance_valid(std::span<const HopRef> hops, Msat amount, const FullGraph& g);
bool is_balance_valid(const PaymentPath& path, Msat amount, const FullGraph& g);

/// Largest f >= 1 with f + policy.fee(f) <= incoming, if any.
std::optional<Msat> inverse_fee(const ForwardingPolicy& policy, Msat incoming);

enum class ReachabilityKind { capacity, balance, timelock };

enum class ReachDirection {
    /// Candidates are upstream senders: paths w -> ... -> anchor.
    toward_anchor,
    /// Candidates are downstream receivers: paths anchor -> ... -> w.
    from_anchor,
};

/// Describes the HTLC entering the anchor. For toward_anchor that is the
/// amount and remaining lock the anchor receives (for a destination anchor:
/// the payment amount and its final CLTV delta); upstream nodes add their
/// fees and deltas, and a sender is admissible while its Δmax stays within
/// `timelock_limit`. For from_anchor the anchor forwards `amount` minus its
/// fees, and each downstream hop consumes its delta from `timelock`.
struct ReachabilityQuery {
    NodeIndex anchor = 0;
    ReachDirection direction = ReachDirection::from_anchor;
    Msat amount = 0;
    std::uint32_t timelock = 0;
    std::uint32_t timelock_limit = 2016;
    /// Nodes that may not appear on a path (e.g. the observing node).
    std::vector<NodeIndex> excluded;
};

struct ReachabilitySubgraph {
    ReachabilityKind kind = ReachabilityKind::capacity;
    ReachDirection direction = ReachDirection::from_anchor;
    NodeIndex anchor = 0;
    std::vector<bool> member;

    bool contains(NodeIndex n) const { return n < member.size() && member[n]; }
    std::vector<NodeIndex> members() const;
    std::size_t size() const;
};

/// Nodes joined to the anchor by at least one valid path of the given kind.
/// Label-correcting search over the best carried amount / lock budget; walks
/// are bounded to |V|-1 edges. Exact for upstream amounts and for locks.
/// Downstream amounts track an interval per node and may over-approximate,
/// never under-approximate. The balance kind needs a FullGraph.
ReachabilitySubgraph reachability_subgraph(const PublicGraph& g, const ReachabilityQuery& q,
                                           ReachabilityKind kind);
ReachabilitySubgraph reachability_subgraph(const FullGraph& g, const ReachabilityQuery& q,
                                           ReachabilityKind kind);

} // namespace pcnsim
