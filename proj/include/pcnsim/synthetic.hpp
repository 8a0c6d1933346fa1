#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "pcnsim/graph.hpp"

namespace pcnsim {

enum class SyntheticKind { path, star, ring, scale_free };

struct SyntheticDefaults {
    Msat base_fee = 1000;
    std::int64_t fee_rate_ppm = 10;
    std::uint32_t timelock_delta = 40;
    std::int64_t capacity_sat = 2'000'000;
    /// Channels each new node opens in the preferential-attachment model.
    std::uint32_t attach_edges = 2;
    /// Draw node regions from the built-in peer-region shares.
    bool assign_regions = true;
};

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::scale_free;
    std::size_t nodes = 0;
};

/// "path:10", "star:5", "ring:8", "scale-free:200".
SyntheticSpec parse_synthetic_spec(std::string_view text);
const char* to_string(SyntheticKind kind);

/// Deterministic in (kind, n, seed). Node ids n000.., channel ids c000..;
/// the star hub is node 0. Balances are split evenly; latencies are left at
/// the global default until assign_latencies runs.
FullGraph generate_synthetic_graph(SyntheticKind kind, std::size_t n, std::uint64_t seed,
                                   const SyntheticDefaults& defaults = {});

} // namespace pcnsim
