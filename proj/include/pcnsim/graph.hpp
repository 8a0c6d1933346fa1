#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pcnsim/gaussian.hpp"
#include "pcnsim/types.hpp"

namespace pcnsim {

/// Public fee and time-lock parameters one endpoint advertises for
/// forwarding over a channel.
struct ForwardingPolicy {
    Msat base_fee = 0;
    std::int64_t fee_rate_ppm = 0;
    std::uint32_t timelock_delta = 0;
    bool enabled = true;

    double fee_rate() const { return static_cast<double>(fee_rate_ppm) * 1e-6; }

    /// base_fee + floor(amount * fee_rate), evaluated in integers.
    Msat fee(Msat amount) const;

    friend bool operator==(const ForwardingPolicy&, const ForwardingPolicy&) = default;
};

/// One direction of a channel: private balance plus the public policy.
struct DirectedPolicy {
    Msat balance = 0;
    ForwardingPolicy forwarding;

    friend bool operator==(const DirectedPolicy&, const DirectedPolicy&) = default;
};

struct Channel {
    ChannelId id;
    NodeIndex u = 0;
    NodeIndex v = 0;
    Msat capacity = 0;
    DirectedPolicy policy_uv;
    DirectedPolicy policy_vu;
    /// One-way traversal latency in ms.
    Gaussian latency{1.0, 0.0};

    NodeIndex other(NodeIndex n) const { return n == u ? v : u; }
    DirectedPolicy& from(NodeIndex n) { return n == u ? policy_uv : policy_vu; }
    const DirectedPolicy& from(NodeIndex n) const { return n == u ? policy_uv : policy_vu; }
};

struct Node {
    NodeId id;
    std::optional<std::string> region;
};

enum class BalanceSplit { half };

/// Private view of the network: balances and true latencies included.
/// Loopless multigraph; parallel channels are distinct by ChannelId.
class FullGraph {
public:
    NodeIndex add_node(NodeId id, std::optional<std::string> region = std::nullopt);
    /// Throws on self-loops, unknown endpoints, duplicate ids, or a capacity
    /// that does not equal the sum of the two balances.
    ChannelIndex add_channel(Channel channel);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t channel_count() const { return channels_.size(); }

    const Node& node(NodeIndex n) const { return nodes_.at(n); }
    Node& node(NodeIndex n) { return nodes_.at(n); }
    const Channel& channel(ChannelIndex c) const { return channels_.at(c); }
    Channel& channel(ChannelIndex c) { return channels_.at(c); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Channel>& channels() const { return channels_; }

    std::span<const ChannelIndex> incident(NodeIndex n) const { return adjacency_.at(n); }
    const ForwardingPolicy& forwarding(ChannelIndex c, NodeIndex from) const
    {
        return channels_.at(c).from(from).forwarding;
    }
    Msat capacity(ChannelIndex c) const { return channels_.at(c).capacity; }
    Msat balance(ChannelIndex c, NodeIndex from) const { return channels_.at(c).from(from).balance; }

    std::optional<NodeIndex> find_node(std::string_view id) const;
    std::optional<ChannelIndex> find_channel(std::string_view id) const;
    NodeIndex require_node(std::string_view id) const;

    /// True iff every channel satisfies bal_uv + bal_vu == capacity.
    bool balances_conserved() const;

private:
    std::vector<Node> nodes_;
    std::vector<Channel> channels_;
    std::vector<std::vector<ChannelIndex>> adjacency_;
    std::unordered_map<std::string, NodeIndex> node_index_;
    std::unordered_map<std::string, ChannelIndex> channel_index_;
};

struct PublicChannel {
    ChannelId id;
    NodeIndex u = 0;
    NodeIndex v = 0;
    Msat capacity = 0;
    ForwardingPolicy policy_uv;
    ForwardingPolicy policy_vu;

    NodeIndex other(NodeIndex n) const { return n == u ? v : u; }
    const ForwardingPolicy& from(NodeIndex n) const { return n == u ? policy_uv : policy_vu; }
};

/// Gossip-visible projection: capacities, fees, time-lock deltas and
/// enabled flags only. Node and channel indices match the source FullGraph.
class PublicGraph {
public:
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t channel_count() const { return channels_.size(); }

    const NodeId& node_id(NodeIndex n) const { return nodes_.at(n); }
    const PublicChannel& channel(ChannelIndex c) const { return channels_.at(c); }
    const std::vector<PublicChannel>& channels() const { return channels_; }

    std::span<const ChannelIndex> incident(NodeIndex n) const { return adjacency_.at(n); }
    const ForwardingPolicy& forwarding(ChannelIndex c, NodeIndex from) const
    {
        return channels_.at(c).from(from);
    }
    Msat capacity(ChannelIndex c) const { return channels_.at(c).capacity; }

    std::optional<NodeIndex> find_node(std::string_view id) const;
    NodeIndex require_node(std::string_view id) const;

    /// Position of the node in ascending NodeId order; used for
    /// deterministic tie-breaking without string compares.
    std::uint32_t id_rank(NodeIndex n) const { return id_rank_.at(n); }

private:
    friend PublicGraph public_view(const FullGraph& g);

    std::vector<NodeId> nodes_;
    std::vector<std::uint32_t> id_rank_;
    std::vector<PublicChannel> channels_;
    std::vector<std::vector<ChannelIndex>> adjacency_;
    std::unordered_map<std::string, NodeIndex> node_index_;
};

PublicGraph public_view(const FullGraph& g);
PublicGraph public_view(const PublicGraph& g);

/// Splits every channel's capacity between its two directions. For odd
/// capacities the endpoint with the smaller NodeId receives the extra msat.
void init_balances(FullGraph& g, BalanceSplit split = BalanceSplit::half);

/// Undirected shortest-path betweenness (unordered pairs, unit weights,
/// parallel channels collapsed). Indexed by NodeIndex.
std::vector<double> betweenness_scores(const PublicGraph& g);

/// Nodes by descending betweenness, ties by ascending NodeId.
std::vector<NodeIndex> betweenness_ranking(const PublicGraph& g);

} // namespace pcnsim
