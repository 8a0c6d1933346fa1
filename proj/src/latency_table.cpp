#include "pcnsim/latency_table.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "pcnsim/csv.hpp"

namespace pcnsim {

void RegionLatencyTable::set(const std::string& a, const std::string& b, RttEntry entry)
{
    if (!(entry.rtt_mean_ms > 0.0) || entry.rtt_std_ms < 0.0) {
        throw Error("latency entry " + a + "-" + b + " must have mean > 0 and std >= 0");
    }
    entries_[key(a, b)] = entry;
}

std::pair<std::string, std::string> RegionLatencyTable::key(std::string_view a, std::string_view b)
{
    if (b < a) {
        std::swap(a, b);
    }
    return {std::string(a), std::string(b)};
}

RttEntry RegionLatencyTable::lookup(std::string_view a, std::string_view b) const
{
    auto it = entries_.find(key(a, b));
    return it == entries_.end() ? kGlobalDefault : it->second;
}

bool RegionLatencyTable::contains(std::string_view a, std::string_view b) const
{
    return entries_.contains(key(a, b));
}

std::vector<std::string> RegionLatencyTable::regions() const
{
    std::set<std::string> out;
    for (const auto& [k, _] : entries_) {
        out.insert(k.first);
        out.insert(k.second);
    }
    return {out.begin(), out.end()};
}

RegionLatencyTable RegionLatencyTable::parse_csv(std::string_view text)
{
    RegionLatencyTable table;
    const auto rows = parse_csv_rows(text);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 4) {
            throw Error("latency table row " + std::to_string(i + 1) + ": expected 4 fields");
        }
        if (i == 0 && row[0] == "region_a") {
            continue;
        }
        try {
            table.set(row[0], row[1], RttEntry{std::stod(row[2]), std::stod(row[3])});
        } catch (const std::invalid_argument&) {
            throw Error("latency table row " + std::to_string(i + 1) + ": non-numeric value");
        }
    }
    return table;
}

std::string RegionLatencyTable::to_csv() const
{
    std::ostringstream out;
    out << "region_a,region_b,rtt_mean_ms,rtt_std_ms\n";
    for (const auto& [k, e] : entries_) {
        out << k.first << ',' << k.second << ',' << format_double(e.rtt_mean_ms) << ','
            << format_double(e.rtt_std_ms) << '\n';
    }
    return out.str();
}

namespace {

struct RegionMedian {
    const char* region;
    double median_rtt_ms;
};

// Median average RTT per peer region, read off the measurement box plots.
constexpr RegionMedian kRegionMedians[] = {
    {"AF", 290.4}, {"AS", 174.7}, {"CN", 198.1}, {"EU", 167.6},
    {"NA", 197.0}, {"OC", 279.8}, {"SA", 315.9},
};

} // namespace

RegionLatencyTable RegionLatencyTable::builtin()
{
    RegionLatencyTable table;
    for (const auto& a : kRegionMedians) {
        for (const auto& b : kRegionMedians) {
            const double mean = 0.5 * (a.median_rtt_ms + b.median_rtt_ms);
            table.set(a.region, b.region, RttEntry{mean, 0.2 * mean});
        }
    }
    return table;
}

const std::vector<RegionShare>& builtin_region_shares()
{
    static const std::vector<RegionShare> shares{
        {"EU", 0.491}, {"NA", 0.414}, {"AS", 0.047}, {"OC", 0.018},
        {"SA", 0.013}, {"CN", 0.010}, {"AF", 0.006},
    };
    return shares;
}

void assign_latencies(FullGraph& g, const RegionLatencyTable& table, std::uint64_t rng_seed)
{
    const auto regions = table.regions();
    std::mt19937_64 rng(rng_seed);
    for (NodeIndex n = 0; n < g.node_count(); ++n) {
        auto& region = g.node(n).region;
        if ((!region || region->empty()) && !regions.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, regions.size() - 1);
            region = regions[pick(rng)];
        }
    }
    for (ChannelIndex c = 0; c < g.channel_count(); ++c) {
        Channel& ch = g.channel(c);
        const auto& ru = g.node(ch.u).region;
        const auto& rv = g.node(ch.v).region;
        const RttEntry e = (ru && rv) ? table.lookup(*ru, *rv) : RegionLatencyTable::kGlobalDefault;
        ch.latency = Gaussian{e.rtt_mean_ms / 2.0, e.rtt_std_ms / 2.0};
    }
}

} // namespace pcnsim
