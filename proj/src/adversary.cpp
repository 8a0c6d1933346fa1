#include "pcnsim/adversary.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

namespace pcnsim {

const char* to_string(Direction d)
{
    return d == Direction::toward_source ? "toward-source" : "toward-destination";
}

const char* to_string(Target t)
{
    return t == Target::source ? "source" : "destination";
}

Target target_of(Direction d)
{
    return d == Direction::toward_source ? Target::source : Target::destination;
}

bool AdversaryBehavior::accept_incoming(const HtlcContext& ctx)
{
    if (!source_attack_ || !ctx.payload.next_channel) {
        return true;
    }
    if (seen_.insert(ctx.payment).second) {
        source_pending_[ctx.payment] = Pending{ctx.node,           ctx.incoming_channel, ctx.previous, ctx.now,
                                               ctx.incoming_amount, ctx.incoming_timelock, false};
        return false;
    }
    auto it = source_pending_.find(ctx.payment);
    if (it != source_pending_.end() && it->second.node == ctx.node && !it->second.done) {
        Pending& p = it->second;
        p.done = true;
        observations_.push_back(Observation{ctx.payment, ctx.node, p.edge, p.neighbor, Direction::toward_source,
                                            p.t0, ctx.now, p.amount, p.timelock});
    }
    return true;
}

void AdversaryBehavior::on_add_forwarded(const HtlcContext& ctx)
{
    if (!ctx.payload.next_channel) {
        return;
    }
    const ChannelIndex out = *ctx.payload.next_channel;
    dest_pending_[{ctx.payment.value, ctx.node}] =
        Pending{ctx.node, out, graph_->channel(out).other(ctx.node), ctx.now, ctx.payload.forward_amount,
                ctx.payload.outgoing_timelock, false};
}

void AdversaryBehavior::on_fulfill_received(const HtlcContext& ctx)
{
    auto it = dest_pending_.find({ctx.payment.value, ctx.node});
    if (it == dest_pending_.end() || it->second.done) {
        return;
    }
    Pending& p = it->second;
    p.done = true;
    observations_.push_back(Observation{ctx.payment, ctx.node, p.edge, p.neighbor, Direction::toward_destination,
                                        p.t0, ctx.now, p.amount, p.timelock});
}

void AdversaryBehavior::clear()
{
    seen_.clear();
    source_pending_.clear();
    dest_pending_.clear();
    observations_.clear();
}

std::vector<Observation> closest_observations(const std::vector<Observation>& all)
{
    std::map<std::pair<std::uint64_t, int>, Observation> best;
    for (const Observation& o : all) {
        const auto key = std::make_pair(o.payment.value, static_cast<int>(o.direction));
        auto it = best.find(key);
        if (it == best.end() || o.delta_t() < it->second.delta_t() ||
            (o.delta_t() == it->second.delta_t() && o.observer < it->second.observer)) {
            best[key] = o;
        }
    }
    std::vector<Observation> out;
    out.reserve(best.size());
    for (auto& [key, o] : best) {
        out.push_back(o);
    }
    return out;
}

ReachabilityQuery reachability_query(const Observation& obs, const PublicGraph& g, const RoutingParams& params)
{
    ReachabilityQuery q;
    q.excluded = {obs.observer};
    q.timelock_limit = params.max_total_timelock;
    if (obs.direction == Direction::toward_destination) {
        q.anchor = obs.neighbor;
        q.direction = ReachDirection::from_anchor;
        q.amount = obs.amount;
        q.timelock = obs.timelock;
    } else {
        // The predecessor offered the observed HTLC, so it received the
        // observed amount plus its own fee, with its own delta on top.
        const ForwardingPolicy& p = g.forwarding(obs.edge, obs.neighbor);
        q.anchor = obs.neighbor;
        q.direction = ReachDirection::toward_anchor;
        q.amount = obs.amount + p.fee(obs.amount);
        q.timelock = obs.timelock + p.timelock_delta;
    }
    return q;
}

std::vector<bool> reduce_anonymity_set(const Observation& obs, const PublicGraph& g, const AdversaryConfig& cfg,
                                       const RoutingParams& params)
{
    const ReachabilityQuery q = reachability_query(obs, g, params);
    auto set = reachability_subgraph(g, q, ReachabilityKind::capacity).member;
    if (cfg.timelock_reduction_enabled) {
        const auto lock = reachability_subgraph(g, q, ReachabilityKind::timelock);
        for (NodeIndex i = 0; i < set.size(); ++i) {
            set[i] = set[i] && lock.member[i];
        }
    }
    return set;
}

std::optional<ChannelIndex> cheapest_edge(const PublicGraph& g, NodeIndex from, NodeIndex to, Msat amount,
                                          const RoutingParams& params)
{
    std::optional<ChannelIndex> best;
    double best_w = std::numeric_limits<double>::infinity();
    for (ChannelIndex c : g.incident(from)) {
        const PublicChannel& ch = g.channel(c);
        if (ch.other(from) != to || ch.capacity < amount) {
            continue;
        }
        const ForwardingPolicy& p = ch.from(from);
        if (!p.enabled) {
            continue;
        }
        const double w = edge_weight(amount, p, params);
        if (!best || w < best_w || (w == best_w && ch.id < g.channel(*best).id)) {
            best = c;
            best_w = w;
        }
    }
    return best;
}

double path_log_likelihood(const LatencyModel& model, std::span<const ChannelIndex> edges, double delta_t_ms)
{
    double mean = 0.0;
    double var = 0.0;
    for (ChannelIndex c : edges) {
        const Gaussian s = scale(density_ready(model.lookup(c)), model.traversal_weight(), model.mode());
        mean += s.mean;
        var += s.variance();
    }
    return log_density(Gaussian::from_variance(mean, var), delta_t_ms);
}

EstimationResult estimate_endpoint(const Observation& obs, const PublicGraph& g, const LatencyModel& model,
                                   const std::vector<bool>& candidates, const RoutingParams& params)
{
    const std::size_t n = g.node_count();
    const NodeIndex first = obs.neighbor;
    if (first >= n || first >= candidates.size() || !candidates[first] || first == obs.observer) {
        throw NoCandidate("no valid endpoint: the node across the observed channel is not a candidate");
    }
    const bool downstream = obs.direction == Direction::toward_destination;
    const double dt = obs.delta_t_ms();
    constexpr double kNone = -std::numeric_limits<double>::infinity();

    struct Label {
        double likelihood = -std::numeric_limits<double>::infinity();
        std::vector<ChannelIndex> edges;
        std::vector<NodeIndex> nodes;
        std::uint32_t version = 0;
    };
    std::vector<Label> label(n);
    Label& seed = label[first];
    seed.edges = {obs.edge};
    seed.nodes = {first};
    seed.likelihood = path_log_likelihood(model, seed.edges, dt);

    // Max-heap on likelihood; equal likelihoods pop in ascending NodeId.
    using Entry = std::tuple<double, std::int64_t, std::uint32_t, NodeIndex>;
    std::priority_queue<Entry> heap;
    auto push = [&](NodeIndex v) {
        heap.emplace(label[v].likelihood, -static_cast<std::int64_t>(g.id_rank(v)), label[v].version, v);
    };
    push(first);

    std::vector<NodeIndex> neighbours;
    while (!heap.empty()) {
        const auto [p, neg_rank, version, cur] = heap.top();
        heap.pop();
        if (version != label[cur].version) {
            continue;
        }
        const double p_cur = label[cur].likelihood;

        neighbours.clear();
        for (ChannelIndex c : g.incident(cur)) {
            neighbours.push_back(g.channel(c).other(cur));
        }
        std::sort(neighbours.begin(), neighbours.end(),
                  [&](NodeIndex a, NodeIndex b) { return g.id_rank(a) < g.id_rank(b); });
        neighbours.erase(std::unique(neighbours.begin(), neighbours.end()), neighbours.end());

        for (NodeIndex nb : neighbours) {
            if (nb == obs.observer || !candidates[nb]) {
                continue;
            }
            const auto& path_nodes = label[cur].nodes;
            if (std::find(path_nodes.begin(), path_nodes.end(), nb) != path_nodes.end()) {
                continue;
            }
            const auto e = downstream ? cheapest_edge(g, cur, nb, obs.amount, params)
                                      : cheapest_edge(g, nb, cur, obs.amount, params);
            if (!e) {
                continue;
            }
            std::vector<ChannelIndex> edges = label[cur].edges;
            edges.push_back(*e);
            const double p_n = path_log_likelihood(model, edges, dt);
            const double p_old = label[nb].likelihood;
            if (p_n <= p_cur || (p_old != kNone && p_n <= p_old)) {
                continue;
            }
            Label& ln = label[nb];
            ln.likelihood = p_n;
            ln.edges = std::move(edges);
            ln.nodes = label[cur].nodes;
            ln.nodes.push_back(nb);
            ++ln.version;
            push(nb);
        }
    }

    EstimationResult out;
    out.payment = obs.payment;
    out.target = target_of(obs.direction);
    for (NodeIndex v = 0; v < n; ++v) {
        if (label[v].likelihood != kNone) {
            out.candidates.push_back(RankedCandidate{v, label[v].likelihood});
        }
    }
    std::sort(out.candidates.begin(), out.candidates.end(), [&](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.log_likelihood != b.log_likelihood) {
            return a.log_likelihood > b.log_likelihood;
        }
        return g.id_rank(a.node) < g.id_rank(b.node);
    });
    return out;
}

EstimationResult estimate_endpoint(const Observation& obs, const PublicGraph& g, const LatencyModel& model,
                                   const AdversaryConfig& cfg, const RoutingParams& params)
{
    return estimate_endpoint(obs, g, model, reduce_anonymity_set(obs, g, cfg, params), params);
}

EstimationResult first_spy_estimate(const Observation& obs)
{
    EstimationResult out;
    out.payment = obs.payment;
    out.target = target_of(obs.direction);
    out.candidates.push_back(RankedCandidate{obs.neighbor, 0.0});
    return out;
}

} // namespace pcnsim
