#include "pcnsim/synthetic.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "pcnsim/latency_table.hpp"

namespace pcnsim {

namespace {

std::string padded(char prefix, std::size_t value, std::size_t width)
{
    std::string digits = std::to_string(value);
    if (digits.size() < width) {
        digits.insert(0, width - digits.size(), '0');
    }
    return prefix + digits;
}

std::size_t width_for(std::size_t count)
{
    return std::max<std::size_t>(3, std::to_string(count > 0 ? count - 1 : 0).size());
}

} // namespace

const char* to_string(SyntheticKind kind)
{
    switch (kind) {
    case SyntheticKind::path:
        return "path";
    case SyntheticKind::star:
        return "star";
    case SyntheticKind::ring:
        return "ring";
    case SyntheticKind::scale_free:
        return "scale-free";
    }
    return "unknown";
}

SyntheticSpec parse_synthetic_spec(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error("synthetic graph spec must look like kind:n, got '" + std::string(text) + "'");
    }
    const std::string kind(text.substr(0, colon));
    const std::string count(text.substr(colon + 1));
    SyntheticSpec spec;
    if (kind == "path") {
        spec.kind = SyntheticKind::path;
    } else if (kind == "star") {
        spec.kind = SyntheticKind::star;
    } else if (kind == "ring") {
        spec.kind = SyntheticKind::ring;
    } else if (kind == "scale-free" || kind == "scale_free" || kind == "ba") {
        spec.kind = SyntheticKind::scale_free;
    } else {
        throw Error("unknown synthetic graph kind '" + kind + "'");
    }
    std::size_t used = 0;
    long long n = 0;
    try {
        n = std::stoll(count, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != count.size() || n < 2) {
        throw Error("synthetic graph needs an integer node count >= 2, got '" + count + "'");
    }
    spec.nodes = static_cast<std::size_t>(n);
    return spec;
}

FullGraph generate_synthetic_graph(SyntheticKind kind, std::size_t n, std::uint64_t seed,
                                   const SyntheticDefaults& defaults)
{
    if (n < 2) {
        throw ContractViolation("synthetic graphs need at least 2 nodes");
    }
    std::mt19937_64 rng(seed);
    FullGraph g;
    const std::size_t node_width = width_for(n);
    const auto& shares = builtin_region_shares();
    std::vector<double> weights;
    for (const auto& s : shares) {
        weights.push_back(s.share);
    }
    std::discrete_distribution<std::size_t> region_pick(weights.begin(), weights.end());
    for (std::size_t i = 0; i < n; ++i) {
        std::optional<std::string> region;
        if (defaults.assign_regions) {
            region = shares[region_pick(rng)].region;
        }
        g.add_node(NodeId{padded('n', i, node_width)}, region);
    }

    std::vector<std::pair<NodeIndex, NodeIndex>> links;
    switch (kind) {
    case SyntheticKind::path:
        for (NodeIndex i = 0; i + 1 < n; ++i) {
            links.emplace_back(i, i + 1);
        }
        break;
    case SyntheticKind::star:
        for (NodeIndex i = 1; i < n; ++i) {
            links.emplace_back(0, i);
        }
        break;
    case SyntheticKind::ring:
        for (NodeIndex i = 0; i + 1 < n; ++i) {
            links.emplace_back(i, i + 1);
        }
        if (n > 2) {
            links.emplace_back(static_cast<NodeIndex>(n - 1), 0);
        }
        break;
    case SyntheticKind::scale_free: {
        // Barabasi-Albert: a small clique, then degree-proportional attachment.
        const std::size_t k = std::max<std::uint32_t>(1, defaults.attach_edges);
        const std::size_t core = std::min(n, k + 1);
        std::vector<NodeIndex> endpoints;
        for (NodeIndex a = 0; a < core; ++a) {
            for (NodeIndex b = a + 1; b < core; ++b) {
                links.emplace_back(a, b);
                endpoints.push_back(a);
                endpoints.push_back(b);
            }
        }
        for (NodeIndex v = static_cast<NodeIndex>(core); v < n; ++v) {
            std::set<NodeIndex> targets;
            while (targets.size() < std::min<std::size_t>(k, v)) {
                std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
                targets.insert(endpoints[pick(rng)]);
            }
            for (NodeIndex t : targets) {
                links.emplace_back(t, v);
                endpoints.push_back(t);
                endpoints.push_back(v);
            }
        }
        break;
    }
    }

    const Msat capacity = defaults.capacity_sat * kMsatPerSat;
    const ForwardingPolicy policy{defaults.base_fee, defaults.fee_rate_ppm, defaults.timelock_delta, true};
    const std::size_t channel_width = width_for(links.size());
    for (std::size_t i = 0; i < links.size(); ++i) {
        Channel ch;
        ch.id = ChannelId{padded('c', i, channel_width)};
        ch.u = links[i].first;
        ch.v = links[i].second;
        ch.capacity = capacity;
        ch.policy_uv = DirectedPolicy{capacity - capacity / 2, policy};
        ch.policy_vu = DirectedPolicy{capacity / 2, policy};
        ch.latency = Gaussian{RegionLatencyTable::kGlobalDefault.rtt_mean_ms / 2.0,
                              RegionLatencyTable::kGlobalDefault.rtt_std_ms / 2.0};
        g.add_channel(std::move(ch));
    }
    init_balances(g);
    return g;
}

} // namespace pcnsim
