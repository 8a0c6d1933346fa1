#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pcnsim/graph.hpp"

namespace pcnsim {

/// Raised for documents that do not follow the snapshot schema. The message
/// names the offending record, e.g. "edges[3]: capacity_sat must be ...".
class SnapshotError : public Error {
public:
    using Error::Error;
};

/// A record that was well-formed but could not be added to the graph.
struct SnapshotRejection {
    std::string record;
    std::string reason;
};

struct LoadedSnapshot {
    FullGraph graph;
    std::vector<SnapshotRejection> rejected;
};

/// Parses the snapshot schema:
///
///   { "nodes": [ {"pub_key": str, "region"?: str, "addresses"?: [...]} ],
///     "edges": [ {"channel_id": str|int, "node1_pub": str, "node2_pub": str,
///                 "capacity_sat": int,
///                 "node1_policy": {"base_fee_msat", "fee_rate_ppm",
///                                  "time_lock_delta", "disabled"} | null,
///                 "node2_policy": ... } ] }
///
/// Capacities are converted to msat. A missing/null policy yields a disabled
/// direction. Edges with unknown endpoints, self-loops or duplicate ids are
/// rejected and reported; loading continues. Balances are split per `split`.
LoadedSnapshot load_snapshot(std::string_view document, BalanceSplit split = BalanceSplit::half);
LoadedSnapshot load_snapshot_file(const std::string& path, BalanceSplit split = BalanceSplit::half);

nlohmann::json serialize_snapshot(const FullGraph& g);

/// Maps an `lncli describegraph` dump (string-encoded numbers,
/// fee_base_msat / fee_rate_milli_msat policy names) onto the snapshot schema.
/// Regions are left unset.
nlohmann::json convert_lnd_describegraph(const nlohmann::json& lnd);

} // namespace pcnsim
