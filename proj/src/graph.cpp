#include "pcnsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace pcnsim {

Msat ForwardingPolicy::fee(Msat amount) const
{
    // __int128 keeps amount * ppm exact for any realistic amount.
    const auto proportional =
        static_cast<Msat>((static_cast<__int128>(amount) * fee_rate_ppm) / 1'000'000);
    return base_fee + proportional;
}

NodeIndex FullGraph::add_node(NodeId id, std::optional<std::string> region)
{
    if (id.value.empty()) {
        throw Error("node id must be non-empty");
    }
    if (node_index_.contains(id.value)) {
        throw Error("duplicate node id '" + id.value + "'");
    }
    const auto index = static_cast<NodeIndex>(nodes_.size());
    node_index_.emplace(id.value, index);
    nodes_.push_back(Node{std::move(id), std::move(region)});
    adjacency_.emplace_back();
    return index;
}

ChannelIndex FullGraph::add_channel(Channel channel)
{
    if (channel.u >= nodes_.size() || channel.v >= nodes_.size()) {
        throw Error("channel '" + channel.id.value + "' references an unknown node");
    }
    if (channel.u == channel.v) {
        throw Error("channel '" + channel.id.value + "' is a self-loop");
    }
    if (channel_index_.contains(channel.id.value)) {
        throw Error("duplicate channel id '" + channel.id.value + "'");
    }
    if (channel.capacity < 0 || channel.policy_uv.balance < 0 || channel.policy_vu.balance < 0 ||
        channel.policy_uv.balance + channel.policy_vu.balance != channel.capacity) {
        throw Error("channel '" + channel.id.value + "' balances do not sum to capacity");
    }
    if (!(channel.latency.mean > 0.0) || channel.latency.std < 0.0) {
        throw Error("channel '" + channel.id.value + "' has an invalid latency");
    }
    const auto index = static_cast<ChannelIndex>(channels_.size());
    channel_index_.emplace(channel.id.value, index);
    adjacency_[channel.u].push_back(index);
    adjacency_[channel.v].push_back(index);
    channels_.push_back(std::move(channel));
    return index;
}

std::optional<NodeIndex> FullGraph::find_node(std::string_view id) const
{
    auto it = node_index_.find(std::string(id));
    if (it == node_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<ChannelIndex> FullGraph::find_channel(std::string_view id) const
{
    auto it = channel_index_.find(std::string(id));
    if (it == channel_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

NodeIndex FullGraph::require_node(std::string_view id) const
{
    if (auto n = find_node(id)) {
        return *n;
    }
    throw Error("unknown node '" + std::string(id) + "'");
}

bool FullGraph::balances_conserved() const
{
    return std::all_of(channels_.begin(), channels_.end(), [](const Channel& c) {
        return c.policy_uv.balance >= 0 && c.policy_vu.balance >= 0 &&
               c.policy_uv.balance + c.policy_vu.balance == c.capacity;
    });
}

std::optional<NodeIndex> PublicGraph::find_node(std::string_view id) const
{
    auto it = node_index_.find(std::string(id));
    if (it == node_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

NodeIndex PublicGraph::require_node(std::string_view id) const
{
    if (auto n = find_node(id)) {
        return *n;
    }
    throw Error("unknown node '" + std::string(id) + "'");
}

PublicGraph public_view(const FullGraph& g)
{
    PublicGraph view;
    view.nodes_.reserve(g.node_count());
    for (NodeIndex n = 0; n < g.node_count(); ++n) {
        view.nodes_.push_back(g.node(n).id);
        view.node_index_.emplace(g.node(n).id.value, n);
        view.adjacency_.emplace_back(g.incident(n).begin(), g.incident(n).end());
    }
    std::vector<NodeIndex> order(g.node_count());
    for (NodeIndex n = 0; n < order.size(); ++n) {
        order[n] = n;
    }
    std::sort(order.begin(), order.end(),
              [&](NodeIndex a, NodeIndex b) { return g.node(a).id < g.node(b).id; });
    view.id_rank_.resize(order.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) {
        view.id_rank_[order[r]] = r;
    }
    view.channels_.reserve(g.channel_count());
    for (const Channel& c : g.channels()) {
        view.channels_.push_back(PublicChannel{c.id, c.u, c.v, c.capacity, c.policy_uv.forwarding,
                                               c.policy_vu.forwarding});
    }
    return view;
}

PublicGraph public_view(const PublicGraph& g)
{
    return g;
}

void init_balances(FullGraph& g, BalanceSplit split)
{
    switch (split) {
    case BalanceSplit::half:
        for (ChannelIndex c = 0; c < g.channel_count(); ++c) {
            Channel& ch = g.channel(c);
            const Msat low = ch.capacity / 2;
            const Msat high = ch.capacity - low;
            const bool u_smaller = g.node(ch.u).id < g.node(ch.v).id;
            ch.policy_uv.balance = u_smaller ? high : low;
            ch.policy_vu.balance = u_smaller ? low : high;
        }
        break;
    }
}

std::vector<double> betweenness_scores(const PublicGraph& g)
{
    const std::size_t n = g.node_count();
    std::vector<std::vector<NodeIndex>> neighbors(n);
    for (NodeIndex v = 0; v < n; ++v) {
        std::set<NodeIndex> unique;
        for (ChannelIndex c : g.incident(v)) {
            unique.insert(g.channel(c).other(v));
        }
        neighbors[v].assign(unique.begin(), unique.end());
    }

    // Brandes' accumulation over ordered pairs, halved at the end.
    std::vector<double> score(n, 0.0);
    std::vector<std::vector<NodeIndex>> preds(n);
    std::vector<double> sigma(n);
    std::vector<int> dist(n);
    std::vector<double> delta(n);
    std::vector<NodeIndex> order;
    order.reserve(n);
    for (NodeIndex s = 0; s < n; ++s) {
        for (auto& p : preds) {
            p.clear();
        }
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(delta.begin(), delta.end(), 0.0);
        order.clear();

        sigma[s] = 1.0;
        dist[s] = 0;
        std::deque<NodeIndex> queue{s};
        while (!queue.empty()) {
            const NodeIndex v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (NodeIndex w : neighbors[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeIndex w = *it;
            for (NodeIndex v : preds[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) {
                score[w] += delta[w];
            }
        }
    }
    for (double& x : score) {
        x /= 2.0;
    }
    return score;
}

std::vector<NodeIndex> betweenness_ranking(const PublicGraph& g)
{
    const auto scores = betweenness_scores(g);
    // Quantize so that symmetric nodes whose float sums differ in the last
    // bits still tie and fall through to the NodeId order.
    std::vector<long long> key(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        key[i] = std::llround(scores[i] * 1e6);
    }
    std::vector<NodeIndex> ranking(g.node_count());
    for (NodeIndex i = 0; i < ranking.size(); ++i) {
        ranking[i] = i;
    }
    std::sort(ranking.begin(), ranking.end(), [&](NodeIndex a, NodeIndex b) {
        if (key[a] != key[b]) {
            return key[a] > key[b];
        }
        return g.node_id(a) < g.node_id(b);
    });
    return ranking;
}

} // namespace pcnsim
