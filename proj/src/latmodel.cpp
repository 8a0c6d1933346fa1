#include "pcnsim/latmodel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "pcnsim/csv.hpp"

namespace pcnsim {

LatencyModel::LatencyModel(std::size_t channel_count, double traversal_weight, ScalingMode mode)
    : entries_(channel_count), traversal_weight_(traversal_weight), mode_(mode)
{
}

void LatencyModel::set(ChannelIndex c, ModelEntry entry)
{
    if (entry.latency.std < 0.0) {
        throw ContractViolation("latency estimate with negative std");
    }
    entries_.at(c) = entry;
}

Gaussian LatencyModel::lookup(ChannelIndex c, bool* defaulted) const
{
    const bool known = contains(c);
    if (defaulted != nullptr) {
        *defaulted = !known;
    }
    return known ? entries_[c]->latency : kFallback;
}

std::size_t LatencyModel::estimated_count() const
{
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.has_value(); }));
}

std::string LatencyModel::to_csv(const PublicGraph& g) const
{
    std::ostringstream out;
    out << "channel_id,mu_ms,sigma_ms,samples,vantage,distance\n";
    for (ChannelIndex c = 0; c < entries_.size(); ++c) {
        if (!entries_[c]) {
            continue;
        }
        const ModelEntry& e = *entries_[c];
        out << g.channel(c).id.value << ',' << format_double(e.latency.mean) << ','
            << format_double(e.latency.std) << ',' << e.samples << ',' << g.node_id(e.vantage).value << ','
            << e.distance << '\n';
    }
    return out.str();
}

LatencyModel LatencyModel::from_csv(const std::string& text, const PublicGraph& g, double traversal_weight)
{
    std::unordered_map<std::string, ChannelIndex> by_id;
    for (ChannelIndex c = 0; c < g.channel_count(); ++c) {
        by_id.emplace(g.channel(c).id.value, c);
    }
    LatencyModel model(g.channel_count(), traversal_weight);
    for (const auto& row : parse_csv_rows(text)) {
        if (!row.empty() && row[0] == "channel_id") {
            continue;
        }
        if (row.size() != 6) {
            throw Error("latency model row needs 6 fields");
        }
        auto it = by_id.find(row[0]);
        if (it == by_id.end()) {
            throw Error("latency model names unknown channel '" + row[0] + "'");
        }
        ModelEntry e;
        e.latency = Gaussian{std::stod(row[1]), std::stod(row[2])};
        e.samples = static_cast<std::size_t>(std::stoull(row[3]));
        e.vantage = g.require_node(row[4]);
        e.distance = static_cast<std::uint32_t>(std::stoul(row[5]));
        model.set(it->second, e);
    }
    return model;
}

Gaussian estimate_first_hop(std::span<const double> samples_ms, double traversal_weight)
{
    if (samples_ms.size() < 2) {
        throw InsufficientData("first-hop estimate needs at least 2 probe samples");
    }
    const double tn = traversal_weight * static_cast<double>(samples_ms.size());
    const double mean = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / tn;
    double ss = 0.0;
    for (double s : samples_ms) {
        const double r = s - traversal_weight * mean;
        ss += r * r;
    }
    return Gaussian{mean, std::sqrt(ss / tn)};
}

NextHopEstimate estimate_next_hop(std::span<const double> samples_ms, std::span<const Gaussian> prior_hops,
                                  double traversal_weight)
{
    if (samples_ms.size() < 2) {
        throw InsufficientData("next-hop estimate needs at least 2 probe samples");
    }
    const double tn = traversal_weight * static_cast<double>(samples_ms.size());
    const double path_mean = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / tn;
    double ss = 0.0;
    for (double s : samples_ms) {
        const double r = s - traversal_weight * path_mean;
        ss += r * r;
    }
    double prior_mean = 0.0;
    double prior_var = 0.0;
    for (const Gaussian& p : prior_hops) {
        prior_mean += p.mean;
        prior_var += p.variance();
    }
    NextHopEstimate out;
    double mean = path_mean - prior_mean;
    if (mean < 1.0) {
        mean = 1.0;
        out.clamped = true;
    }
    out.estimate = Gaussian::from_variance(mean, ss / tn + prior_var);
    return out;
}

LatencyModel aggregate_models(std::span<const EdgeLatencyEstimate> estimates, std::size_t channel_count,
                              double traversal_weight, ScalingMode mode)
{
    std::vector<std::vector<const EdgeLatencyEstimate*>> groups(channel_count);
    for (const EdgeLatencyEstimate& e : estimates) {
        if (e.hop_distance < 1) {
            throw ContractViolation("latency estimate with hop distance 0");
        }
        groups.at(e.channel).push_back(&e);
    }
    LatencyModel model(channel_count, traversal_weight, mode);
    for (ChannelIndex c = 0; c < channel_count; ++c) {
        auto& group = groups[c];
        if (group.empty()) {
            continue;
        }
        // Canonical order so the floating-point sums do not depend on input order.
        std::sort(group.begin(), group.end(), [](const EdgeLatencyEstimate* a, const EdgeLatencyEstimate* b) {
            return std::tie(a->hop_distance, a->estimate.mean, a->estimate.std, a->sample_count, a->vantage) <
                   std::tie(b->hop_distance, b->estimate.mean, b->estimate.std, b->sample_count, b->vantage);
        });
        double wsum = 0.0;
        double wmu = 0.0;
        std::size_t samples = 0;
        for (const auto* e : group) {
            const double w = 1.0 / static_cast<double>(e->hop_distance);
            wsum += w;
            wmu += w * e->estimate.mean;
            samples += e->sample_count;
        }
        const double mu = wmu / wsum;
        double wvar = 0.0;
        for (const auto* e : group) {
            const double w = 1.0 / static_cast<double>(e->hop_distance);
            wvar += w * (e->estimate.mean - mu) * (e->estimate.mean - mu);
        }
        ModelEntry entry;
        entry.latency = Gaussian{mu, std::sqrt(wvar / wsum)};
        entry.samples = samples;
        entry.vantage = group.front()->vantage;
        entry.distance = group.front()->hop_distance;
        model.set(c, entry);
    }
    return model;
}

Gaussian scale(const Gaussian& g, double t, ScalingMode mode)
{
    const double var = mode == ScalingMode::independent ? t * g.variance() : t * t * g.variance();
    return Gaussian::from_variance(t * g.mean, var);
}

PathDistribution path_distribution(const LatencyModel& model, std::span<const ChannelIndex> edges,
                                   std::span<const double> weights)
{
    if (edges.size() != weights.size()) {
        throw ContractViolation("path_distribution needs one weight per edge");
    }
    PathDistribution out;
    double mean = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        bool defaulted = false;
        const Gaussian s = scale(model.lookup(edges[i], &defaulted), weights[i], model.mode());
        mean += s.mean;
        var += s.variance();
        out.defaulted_edges += defaulted ? 1 : 0;
    }
    out.distribution = Gaussian::from_variance(mean, var);
    return out;
}

Gaussian density_ready(const Gaussian& g)
{
    return Gaussian{g.mean, std::max(g.std, kDensityStdFloorMs)};
}

std::optional<double> probe_path(NodeIndex adversary, const PaymentPath& path, Engine& engine, PaymentId id)
{
    if (path.empty()) {
        throw ContractViolation("probe path is empty");
    }
    if (path.source() != adversary) {
        throw ContractViolation("probe path must start at the probing node");
    }
    const ProbeResult r = engine.probe(path, id);
    if (!r.reached_target) {
        return std::nullopt;
    }
    return static_cast<double>(r.duration) / static_cast<double>(kNsPerMs);
}

std::vector<EdgeLatencyEstimate> probe_from_vantage(const FullGraph& g, NodeIndex vantage,
                                                    const ProbeCampaignConfig& cfg, std::uint64_t seed,
                                                    ProbeCampaignStats* stats)
{
    if (cfg.max_path_length < 1) {
        throw ContractViolation("probe campaign needs max_path_length >= 1");
    }
    FullGraph scratch = g;
    const PublicGraph pub = public_view(scratch);
    Engine engine(scratch, seed);
    const RoutingParams routing;
    const std::size_t n = pub.node_count();

    constexpr std::uint32_t kUnseen = ~0u;
    std::vector<std::uint32_t> depth(n, kUnseen);
    std::vector<NodeIndex> parent(n, 0);
    std::vector<ChannelIndex> parent_channel(n, 0);
    std::vector<NodeIndex> order;
    depth[vantage] = 0;
    std::deque<NodeIndex> queue{vantage};

    auto sorted_incident = [&](NodeIndex x) {
        std::vector<ChannelIndex> cs(pub.incident(x).begin(), pub.incident(x).end());
        std::sort(cs.begin(), cs.end(), [&](ChannelIndex a, ChannelIndex b) {
            const auto ra = pub.id_rank(pub.channel(a).other(x));
            const auto rb = pub.id_rank(pub.channel(b).other(x));
            return ra != rb ? ra < rb : pub.channel(a).id < pub.channel(b).id;
        });
        return cs;
    };

    while (!queue.empty()) {
        const NodeIndex x = queue.front();
        queue.pop_front();
        order.push_back(x);
        if (depth[x] + 1 >= cfg.max_path_length) {
            continue;
        }
        for (ChannelIndex c : sorted_incident(x)) {
            const NodeIndex y = pub.channel(c).other(x);
            if (depth[y] != kUnseen || !pub.forwarding(c, x).enabled) {
                continue;
            }
            depth[y] = depth[x] + 1;
            parent[y] = x;
            parent_channel[y] = c;
            queue.push_back(y);
        }
    }

    std::vector<std::optional<Gaussian>> own(pub.channel_count());
    std::vector<EdgeLatencyEstimate> out;
    std::uint64_t probe_counter = 0;
    std::vector<double> samples;
    for (NodeIndex x : order) {
        std::vector<HopRef> tree;
        for (NodeIndex w = x; w != vantage; w = parent[w]) {
            tree.push_back(HopRef{parent_channel[w], parent[w], w});
        }
        std::reverse(tree.begin(), tree.end());
        std::vector<bool> on_path(n, false);
        on_path[vantage] = true;
        std::vector<Gaussian> prior;
        bool prior_known = true;
        for (const HopRef& h : tree) {
            on_path[h.to] = true;
            if (!own[h.channel]) {
                prior_known = false;
                break;
            }
            prior.push_back(*own[h.channel]);
        }
        if (!prior_known || tree.size() + 1 > cfg.max_path_length) {
            continue;
        }
        for (ChannelIndex c : sorted_incident(x)) {
            const NodeIndex y = pub.channel(c).other(x);
            if (own[c] || on_path[y] || !pub.forwarding(c, x).enabled) {
                continue;
            }
            std::vector<HopRef> hops = tree;
            hops.push_back(HopRef{c, x, y});
            const PaymentPath path = make_path(pub, hops, cfg.probe_amount, routing);
            samples.clear();
            for (std::uint32_t i = 0; i < cfg.probes_per_path; ++i) {
                const PaymentId id{(1ull << 63) | (static_cast<std::uint64_t>(vantage) << 32) | probe_counter++};
                const auto ms = probe_path(vantage, path, engine, id);
                if (stats != nullptr) {
                    ++stats->probes_sent;
                }
                if (ms) {
                    samples.push_back(*ms);
                } else if (stats != nullptr) {
                    ++stats->probes_discarded;
                }
            }
            if (samples.size() < 2) {
                continue;
            }
            EdgeLatencyEstimate e;
            e.channel = c;
            e.vantage = vantage;
            e.hop_distance = static_cast<std::uint32_t>(hops.size());
            e.sample_count = samples.size();
            if (tree.empty()) {
                e.estimate = estimate_first_hop(samples, cfg.traversal_weight);
            } else {
                const auto next = estimate_next_hop(samples, prior, cfg.traversal_weight);
                e.estimate = next.estimate;
                e.clamped = next.clamped;
                if (next.clamped && stats != nullptr) {
                    ++stats->clamped_estimates;
                }
            }
            own[c] = e.estimate;
            out.push_back(e);
        }
    }
    return out;
}

} // namespace pcnsim
