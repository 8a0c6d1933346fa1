#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcnsim/graph.hpp"

namespace pcnsim {

struct RttEntry {
    double rtt_mean_ms = 0.0;
    double rtt_std_ms = 0.0;
};

/// Round-trip latency distributions keyed by unordered region pair.
class RegionLatencyTable {
public:
    /// Global median of roughly 250 ms RTT, 20% spread.
    static constexpr RttEntry kGlobalDefault{250.0, 50.0};

    void set(const std::string& a, const std::string& b, RttEntry entry);
    /// Falls back to the global default for unknown pairs or regions.
    RttEntry lookup(std::string_view a, std::string_view b) const;
    bool contains(std::string_view a, std::string_view b) const;
    /// Sorted, distinct regions mentioned in the table.
    std::vector<std::string> regions() const;
    bool empty() const { return entries_.empty(); }

    /// Rows `region_a,region_b,rtt_mean_ms,rtt_std_ms`; a header row is
    /// optional.
    static RegionLatencyTable parse_csv(std::string_view text);
    std::string to_csv() const;

    /// Built-in table: pairwise means from per-region median RTTs of public
    /// Lightning peers, spread 20% of the mean.
    static RegionLatencyTable builtin();

private:
    static std::pair<std::string, std::string> key(std::string_view a, std::string_view b);

    std::map<std::pair<std::string, std::string>, RttEntry> entries_;
};

/// Peer-region shares used when synthesizing node locations.
struct RegionShare {
    std::string region;
    double share;
};
const std::vector<RegionShare>& builtin_region_shares();

/// Gives every channel a one-way Gaussian latency (half of the region-pair
/// RTT entry). Nodes without a region first get one drawn uniformly from the
/// table's regions, deterministically in `rng_seed`.
void assign_latencies(FullGraph& g, const RegionLatencyTable& table, std::uint64_t rng_seed);

} // namespace pcnsim
