#include "pcnsim/routing.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <tuple>

namespace pcnsim {

std::vector<NodeIndex> PaymentPath::nodes() const
{
    std::vector<NodeIndex> out;
    if (hops.empty()) {
        return out;
    }
    out.reserve(hops.size() + 1);
    out.push_back(hops.front().from);
    for (const PathHop& h : hops) {
        out.push_back(h.to);
    }
    return out;
}

double edge_weight(Msat amount, const ForwardingPolicy& policy, const RoutingParams& params)
{
    if (!policy.enabled) {
        return std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(policy.fee(amount)) +
           static_cast<double>(amount) * static_cast<double>(policy.timelock_delta) * params.risk_factor;
}

namespace {

template <typename G>
void check_chain(const G& g, std::span<const HopRef> hops)
{
    for (std::size_t i = 0; i < hops.size(); ++i) {
        const auto& ch = g.channel(hops[i].channel);
        const bool joins = (ch.u == hops[i].from && ch.v == hops[i].to) ||
                           (ch.v == hops[i].from && ch.u == hops[i].to);
        if (!joins) {
            throw ContractViolation("hop " + std::to_string(i) + " does not match its channel endpoints");
        }
        if (i > 0 && hops[i - 1].to != hops[i].from) {
            throw ContractViolation("hop " + std::to_string(i) + " does not continue the path");
        }
    }
}

template <typename G>
std::vector<Msat> forward_amounts_impl(const G& g, std::span<const HopRef> hops, Msat amount)
{
    check_chain(g, hops);
    std::vector<Msat> f(hops.size());
    if (hops.empty()) {
        return f;
    }
    f.back() = amount;
    for (std::size_t i = hops.size() - 1; i > 0; --i) {
        f[i - 1] = f[i] + g.forwarding(hops[i].channel, hops[i].from).fee(f[i]);
    }
    return f;
}

} // namespace

std::vector<Msat> forward_amounts(const PublicGraph& g, std::span<const HopRef> hops, Msat amount)
{
    return forward_amounts_impl(g, hops, amount);
}

std::vector<Msat> forward_amounts(const FullGraph& g, std::span<const HopRef> hops, Msat amount)
{
    return forward_amounts_impl(g, hops, amount);
}

PaymentPath make_path(const PublicGraph& g, std::span<const HopRef> hops, Msat amount,
                      const RoutingParams& params)
{
    const auto f = forward_amounts(g, hops, amount);
    PaymentPath path;
    path.hops.resize(hops.size());
    std::uint32_t remaining = params.final_cltv_delta;
    double weight = 0.0;
    for (std::size_t i = hops.size(); i-- > 0;) {
        PathHop& h = path.hops[i];
        h.channel = hops[i].channel;
        h.from = hops[i].from;
        h.to = hops[i].to;
        h.amount = f[i];
        h.remaining_timelock = remaining;
        const ForwardingPolicy& p = g.forwarding(hops[i].channel, hops[i].from);
        remaining += p.timelock_delta;
        if (i > 0) {
            weight += edge_weight(f[i], p, params);
        }
    }
    path.total_timelock = hops.empty() ? 0 : remaining;
    path.weight = weight;
    return path;
}

std::vector<HopRef> hop_refs(const PaymentPath& path)
{
    std::vector<HopRef> out;
    out.reserve(path.hops.size());
    for (const PathHop& h : path.hops) {
        out.push_back(HopRef{h.channel, h.from, h.to});
    }
    return out;
}

std::optional<PaymentPath> find_route(const PublicGraph& g, const Payment& payment,
                                      const RoutingParams& params)
{
    const std::size_t n = g.node_count();
    if (payment.source >= n || payment.dest >= n) {
        throw ContractViolation("payment endpoints are not in the graph");
    }
    if (payment.amount <= 0) {
        throw ContractViolation("payment amount must be positive");
    }
    if (payment.source == payment.dest) {
        return std::nullopt;
    }
    const std::uint32_t budget =
        payment.max_timelock > 0 ? payment.max_timelock : params.max_total_timelock;

    struct Label {
        double weight = std::numeric_limits<double>::infinity();
        std::uint32_t hops = 0;
        Msat amount = 0;              // amount the HTLC entering this node carries
        std::uint32_t timelock = 0;   // remaining lock on that HTLC
        ChannelIndex next_channel = 0;
        NodeIndex next = 0;
        bool settled = false;
    };
    std::vector<Label> label(n);
    label[payment.dest].weight = 0.0;
    label[payment.dest].amount = payment.amount;
    label[payment.dest].timelock = params.final_cltv_delta;

    using Entry = std::tuple<double, std::uint32_t, std::uint32_t, NodeIndex>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.emplace(0.0, 0u, g.id_rank(payment.dest), payment.dest);

    while (!heap.empty()) {
        const auto [w, hops, rank, v] = heap.top();
        heap.pop();
        Label& lv = label[v];
        if (lv.settled || w != lv.weight || hops != lv.hops) {
            continue;
        }
        lv.settled = true;
        if (v == payment.source) {
            break;
        }
        for (ChannelIndex c : g.incident(v)) {
            const PublicChannel& ch = g.channel(c);
            const NodeIndex u = ch.other(v);
            if (label[u].settled) {
                continue;
            }
            const ForwardingPolicy& p = ch.from(u);
            if (!p.enabled || ch.capacity < lv.amount) {
                continue;
            }
            const std::uint32_t timelock = lv.timelock + p.timelock_delta;
            if (timelock > budget) {
                continue;
            }
            double cand_w = lv.weight;
            Msat cand_amount = lv.amount;
            if (u != payment.source) {
                cand_w += edge_weight(lv.amount, p, params);
                cand_amount += p.fee(lv.amount);
            }
            const std::uint32_t cand_hops = lv.hops + 1;
            Label& lu = label[u];
            if (std::tie(cand_w, cand_hops) < std::tie(lu.weight, lu.hops)) {
                lu.weight = cand_w;
                lu.hops = cand_hops;
                lu.amount = cand_amount;
                lu.timelock = timelock;
                lu.next_channel = c;
                lu.next = v;
                heap.emplace(cand_w, cand_hops, g.id_rank(u), u);
            }
        }
    }
    if (!label[payment.source].settled) {
        return std::nullopt;
    }

    std::vector<HopRef> hops;
    for (NodeIndex u = payment.source; u != payment.dest; u = label[u].next) {
        hops.push_back(HopRef{label[u].next_channel, u, label[u].next});
    }
    PaymentPath path = make_path(g, hops, payment.amount, params);
    if (!is_capacity_valid(path, payment.amount, g) || !is_timelock_valid(path, budget, g)) {
        throw ContractViolation("find_route produced an invalid path");
    }
    return path;
}

bool is_timelock_valid(std::span<const HopRef> hops, std::uint32_t max_timelock, const PublicGraph& g)
{
    check_chain(g, hops);
    std::uint64_t used = 0;
    for (const HopRef& h : hops) {
        const std::uint64_t delta = g.forwarding(h.channel, h.from).timelock_delta;
        if (max_timelock < used || max_timelock - used < delta) {
            return false;
        }
        used += delta;
    }
    return true;
}

bool is_timelock_valid(const PaymentPath& path, std::uint32_t max_timelock, const PublicGraph& g)
{
    const auto refs = hop_refs(path);
    return is_timelock_valid(refs, max_timelock, g);
}

bool is_capacity_valid(std::span<const HopRef> hops, Msat amount, const PublicGraph& g)
{
    const auto f = forward_amounts(g, hops, amount);
    for (std::size_t i = 0; i < hops.size(); ++i) {
        if (g.capacity(hops[i].channel) < f[i]) {
            return false;
        }
    }
    return true;
}

bool is_capacity_valid(const PaymentPath& path, Msat amount, const PublicGraph& g)
{
    const auto refs = hop_refs(path);
    return is_capacity_valid(refs, amount, g);
}

bool is_balance_valid(std::span<const HopRef> hops, Msat amount, const FullGraph& g)
{
    const auto f = forward_amounts(g, hops, amount);
    for (std::size_t i = 0; i < hops.size(); ++i) {
        if (g.balance(hops[i].channel, hops[i].from) < f[i]) {
            return false;
        }
    }
    return true;
}

bool is_balance_valid(const PaymentPath& path, Msat amount, const FullGraph& g)
{
    const auto refs = hop_refs(path);
    return is_balance_valid(refs, amount, g);
}

std::optional<Msat> inverse_fee(const ForwardingPolicy& policy, Msat incoming)
{
    // f + fee(f) is non-decreasing in f, so binary search the largest f.
    Msat lo = 1;
    Msat hi = incoming;
    if (hi < 1 || lo + policy.fee(lo) > incoming) {
        return std::nullopt;
    }
    while (lo < hi) {
        const Msat mid = lo + (hi - lo + 1) / 2;
        if (mid + policy.fee(mid) <= incoming) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return lo;
}

std::vector<NodeIndex> ReachabilitySubgraph::members() const
{
    std::vector<NodeIndex> out;
    for (NodeIndex i = 0; i < member.size(); ++i) {
        if (member[i]) {
            out.push_back(i);
        }
    }
    return out;
}

std::size_t ReachabilitySubgraph::size() const
{
    return static_cast<std::size_t>(std::count(member.begin(), member.end(), true));
}

namespace {

struct NoBalances {
    Msat balance(ChannelIndex, NodeIndex) const
    {
        throw ContractViolation("balance reachability needs the full graph");
    }
};

// Downstream amounts shrink by a fee per hop. A smaller amount passes more
// capacities but may no longer cover a fee, so no single label dominates.
// Each node keeps the hull [lo, hi] of the amounts it can receive; a channel
// is usable when the hull meets the channel's admissible incoming range.
// The result is a superset of simple-path reachability.
template <typename G, typename B>
ReachabilitySubgraph reach_downstream_amount(const G& g, const B& balances, const ReachabilityQuery& q,
                                             ReachabilityKind kind, const std::vector<bool>& blocked,
                                             ReachabilitySubgraph out)
{
    const std::size_t n = g.node_count();
    constexpr Msat kUnset = -1;
    std::vector<Msat> lo(n, kUnset);
    std::vector<Msat> hi(n, kUnset);
    std::vector<std::uint32_t> depth(n, 0);
    std::vector<bool> queued(n, false);
    lo[q.anchor] = q.amount;
    hi[q.anchor] = q.amount;
    std::deque<NodeIndex> queue{q.anchor};
    queued[q.anchor] = true;
    const std::uint32_t max_depth = n > 0 ? static_cast<std::uint32_t>(n - 1) : 0;
    while (!queue.empty()) {
        const NodeIndex x = queue.front();
        queue.pop_front();
        queued[x] = false;
        if (depth[x] >= max_depth) {
            continue;
        }
        for (ChannelIndex c : g.incident(x)) {
            const auto& ch = g.channel(c);
            const NodeIndex y = ch.other(x);
            if (blocked[y] || y == q.anchor) {
                continue;
            }
            const ForwardingPolicy& p = g.forwarding(c, x);
            if (!p.enabled) {
                continue;
            }
            const Msat limit = kind == ReachabilityKind::capacity ? ch.capacity : balances.balance(c, x);
            if (limit < 1) {
                continue;
            }
            // Incoming amounts at x whose forward f satisfies 1 <= f <= limit.
            const Msat in_lo = std::max(lo[x], 1 + p.fee(1));
            const Msat in_hi = std::min(hi[x], limit + 1 + p.fee(limit + 1) - 1);
            if (in_lo > in_hi) {
                continue;
            }
            const Msat f_lo = *inverse_fee(p, in_lo);
            const Msat f_hi = *inverse_fee(p, in_hi);
            bool grew = false;
            if (lo[y] == kUnset) {
                lo[y] = f_lo;
                hi[y] = f_hi;
                grew = true;
            } else {
                if (f_lo < lo[y]) {
                    lo[y] = f_lo;
                    grew = true;
                }
                if (f_hi > hi[y]) {
                    hi[y] = f_hi;
                    grew = true;
                }
            }
            if (grew) {
                depth[y] = depth[x] + 1;
                if (!queued[y]) {
                    queued[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    for (NodeIndex i = 0; i < n; ++i) {
        out.member[i] = lo[i] != kUnset;
    }
    return out;
}

template <typename G, typename B>
ReachabilitySubgraph reach_impl(const G& g, const B& balances, const ReachabilityQuery& q,
                                ReachabilityKind kind)
{
    const std::size_t n = g.node_count();
    if (q.anchor >= n) {
        throw ContractViolation("reachability anchor is not in the graph");
    }
    std::vector<bool> blocked(n, false);
    for (NodeIndex x : q.excluded) {
        if (x == q.anchor) {
            throw ContractViolation("reachability anchor cannot be excluded");
        }
        blocked.at(x) = true;
    }

    ReachabilitySubgraph out;
    out.kind = kind;
    out.direction = q.direction;
    out.anchor = q.anchor;
    out.member.assign(n, false);

    const bool toward = q.direction == ReachDirection::toward_anchor;
    const bool lock = kind == ReachabilityKind::timelock;
    if (!toward && !lock) {
        return reach_downstream_amount(g, balances, q, kind, blocked, std::move(out));
    }
    // Labels are "how much the HTLC entering this node carries" (amount
    // kinds) or its remaining / accumulated lock (timelock kind). Smaller is
    // better except for from_anchor timelock, where more budget is better.
    const bool maximize = lock && !toward;
    constexpr std::int64_t kUnset = -1;
    std::vector<std::int64_t> label(n, kUnset);
    std::vector<std::uint32_t> depth(n, 0);
    std::vector<bool> queued(n, false);
    label[q.anchor] = lock ? static_cast<std::int64_t>(q.timelock) : q.amount;

    auto better = [&](std::int64_t cand, std::int64_t cur) {
        if (cur == kUnset) {
            return true;
        }
        return maximize ? cand > cur : cand < cur;
    };

    std::deque<NodeIndex> queue{q.anchor};
    queued[q.anchor] = true;
    const std::uint32_t max_depth = n > 0 ? static_cast<std::uint32_t>(n - 1) : 0;
    while (!queue.empty()) {
        const NodeIndex x = queue.front();
        queue.pop_front();
        queued[x] = false;
        if (depth[x] >= max_depth) {
            continue;
        }
        const std::int64_t lx = label[x];
        for (ChannelIndex c : g.incident(x)) {
            const auto& ch = g.channel(c);
            const NodeIndex y = ch.other(x);
            if (blocked[y] || y == q.anchor) {
                continue;
            }
            // toward: HTLC y -> x, offered under y's policy.
            // from:   HTLC x -> y, offered under x's policy.
            const ForwardingPolicy& p = g.forwarding(c, toward ? y : x);
            if (!p.enabled) {
                continue;
            }
            std::int64_t cand = 0;
            if (toward) {
                if (lock) {
                    cand = lx + p.timelock_delta;
                    if (cand > static_cast<std::int64_t>(q.timelock_limit)) {
                        continue;
                    }
                } else {
                    const Msat limit = kind == ReachabilityKind::capacity ? ch.capacity
                                                                          : balances.balance(c, y);
                    if (limit < lx) {
                        continue;
                    }
                    cand = lx + p.fee(lx);
                }
            } else {
                cand = lx - static_cast<std::int64_t>(p.timelock_delta);
                if (cand < 0) {
                    continue;
                }
            }
            if (better(cand, label[y])) {
                label[y] = cand;
                depth[y] = depth[x] + 1;
                if (!queued[y]) {
                    queued[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    for (NodeIndex i = 0; i < n; ++i) {
        out.member[i] = label[i] != kUnset;
    }
    return out;
}

} // namespace

ReachabilitySubgraph reachability_subgraph(const PublicGraph& g, const ReachabilityQuery& q,
                                           ReachabilityKind kind)
{
    if (kind == ReachabilityKind::balance) {
        throw ContractViolation("balance reachability needs the full graph");
    }
    return reach_impl(g, NoBalances{}, q, kind);
}

ReachabilitySubgraph reachability_subgraph(const FullGraph& g, const ReachabilityQuery& q,
                                           ReachabilityKind kind)
{
    return reach_impl(g, g, q, kind);
}

} // namespace pcnsim
