#include "pcnsim/snapshot.hpp"

#include "pcnsim/csv.hpp"
#include "pcnsim/latency_table.hpp"

namespace pcnsim {

using nlohmann::json;

namespace {

std::int64_t require_int(const json& obj, const char* field, const std::string& record)
{
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_number_integer()) {
        throw SnapshotError(record + ": '" + field + "' must be an integer");
    }
    const auto v = it->get<std::int64_t>();
    if (v < 0) {
        throw SnapshotError(record + ": '" + field + "' must be non-negative");
    }
    return v;
}

std::string require_string(const json& obj, const char* field, const std::string& record)
{
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string()) {
        throw SnapshotError(record + ": '" + field + "' must be a string");
    }
    return it->get<std::string>();
}

ForwardingPolicy parse_policy(const json& edge, const char* field, const std::string& record)
{
    auto it = edge.find(field);
    if (it == edge.end() || it->is_null()) {
        return ForwardingPolicy{0, 0, 0, false};
    }
    if (!it->is_object()) {
        throw SnapshotError(record + ": '" + field + "' must be an object or null");
    }
    const std::string where = record + "." + field;
    ForwardingPolicy p;
    p.base_fee = require_int(*it, "base_fee_msat", where);
    p.fee_rate_ppm = require_int(*it, "fee_rate_ppm", where);
    p.timelock_delta = static_cast<std::uint32_t>(require_int(*it, "time_lock_delta", where));
    auto disabled = it->find("disabled");
    if (disabled == it->end() || !disabled->is_boolean()) {
        throw SnapshotError(where + ": 'disabled' must be a boolean");
    }
    p.enabled = !disabled->get<bool>();
    return p;
}

json policy_json(const ForwardingPolicy& p)
{
    return json{{"base_fee_msat", p.base_fee},
                {"fee_rate_ppm", p.fee_rate_ppm},
                {"time_lock_delta", p.timelock_delta},
                {"disabled", !p.enabled}};
}

} // namespace

LoadedSnapshot load_snapshot(std::string_view document, BalanceSplit split)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SnapshotError(std::string("snapshot is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SnapshotError("snapshot: top level must be an object");
    }
    auto nodes = doc.find("nodes");
    auto edges = doc.find("edges");
    if (nodes == doc.end() || !nodes->is_array()) {
        throw SnapshotError("snapshot: 'nodes' must be an array");
    }
    if (edges == doc.end() || !edges->is_array()) {
        throw SnapshotError("snapshot: 'edges' must be an array");
    }

    LoadedSnapshot out;
    for (std::size_t i = 0; i < nodes->size(); ++i) {
        const json& n = (*nodes)[i];
        const std::string record = "nodes[" + std::to_string(i) + "]";
        if (!n.is_object()) {
            throw SnapshotError(record + ": must be an object");
        }
        std::string key = require_string(n, "pub_key", record);
        std::optional<std::string> region;
        if (auto r = n.find("region"); r != n.end() && !r->is_null()) {
            if (!r->is_string()) {
                throw SnapshotError(record + ": 'region' must be a string");
            }
            region = r->get<std::string>();
        }
        if (key.empty() || out.graph.find_node(key)) {
            out.rejected.push_back({record, key.empty() ? "empty pub_key" : "duplicate pub_key " + key});
            continue;
        }
        out.graph.add_node(NodeId{std::move(key)}, std::move(region));
    }

    for (std::size_t i = 0; i < edges->size(); ++i) {
        const json& e = (*edges)[i];
        const std::string record = "edges[" + std::to_string(i) + "]";
        if (!e.is_object()) {
            throw SnapshotError(record + ": must be an object");
        }
        std::string id;
        if (auto c = e.find("channel_id"); c != e.end() && c->is_string()) {
            id = c->get<std::string>();
        } else if (c != e.end() && c->is_number_unsigned()) {
            id = std::to_string(c->get<std::uint64_t>());
        } else {
            throw SnapshotError(record + ": 'channel_id' must be a string or integer");
        }
        const std::string n1 = require_string(e, "node1_pub", record);
        const std::string n2 = require_string(e, "node2_pub", record);
        const Msat capacity = require_int(e, "capacity_sat", record) * kMsatPerSat;
        const ForwardingPolicy p1 = parse_policy(e, "node1_policy", record);
        const ForwardingPolicy p2 = parse_policy(e, "node2_policy", record);

        const auto u = out.graph.find_node(n1);
        const auto v = out.graph.find_node(n2);
        std::string reason;
        if (!u || !v) {
            reason = "unknown endpoint " + (!u ? n1 : n2);
        } else if (*u == *v) {
            reason = "self-loop";
        } else if (out.graph.find_channel(id)) {
            reason = "duplicate channel_id " + id;
        }
        if (!reason.empty()) {
            out.rejected.push_back({record + " (channel " + id + ")", reason});
            continue;
        }
        Channel ch;
        ch.id = ChannelId{id};
        ch.u = *u;
        ch.v = *v;
        ch.capacity = capacity;
        ch.policy_uv = DirectedPolicy{capacity - capacity / 2, p1};
        ch.policy_vu = DirectedPolicy{capacity / 2, p2};
        ch.latency = Gaussian{RegionLatencyTable::kGlobalDefault.rtt_mean_ms / 2.0,
                              RegionLatencyTable::kGlobalDefault.rtt_std_ms / 2.0};
        out.graph.add_channel(std::move(ch));
    }
    init_balances(out.graph, split);
    return out;
}

LoadedSnapshot load_snapshot_file(const std::string& path, BalanceSplit split)
{
    return load_snapshot(read_text_file(path), split);
}

json serialize_snapshot(const FullGraph& g)
{
    json nodes = json::array();
    for (const Node& n : g.nodes()) {
        json j{{"pub_key", n.id.value}};
        if (n.region) {
            j["region"] = *n.region;
        }
        nodes.push_back(std::move(j));
    }
    json edges = json::array();
    for (const Channel& c : g.channels()) {
        edges.push_back(json{{"channel_id", c.id.value},
                             {"node1_pub", g.node(c.u).id.value},
                             {"node2_pub", g.node(c.v).id.value},
                             {"capacity_sat", c.capacity / kMsatPerSat},
                             {"node1_policy", policy_json(c.policy_uv.forwarding)},
                             {"node2_policy", policy_json(c.policy_vu.forwarding)}});
    }
    return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

namespace {

std::int64_t lnd_number(const json& obj, const char* field, std::int64_t fallback)
{
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) {
        return fallback;
    }
    if (it->is_number_integer()) {
        return it->get<std::int64_t>();
    }
    if (it->is_string()) {
        try {
            return std::stoll(it->get<std::string>());
        } catch (const std::exception&) {
        }
    }
    throw SnapshotError(std::string("describegraph: field '") + field + "' is not numeric");
}

json lnd_policy(const json& p)
{
    if (p.is_null()) {
        return nullptr;
    }
    return json{{"base_fee_msat", lnd_number(p, "fee_base_msat", 0)},
                {"fee_rate_ppm", lnd_number(p, "fee_rate_milli_msat", 0)},
                {"time_lock_delta", lnd_number(p, "time_lock_delta", 0)},
                {"disabled", p.value("disabled", false)}};
}

} // namespace

json convert_lnd_describegraph(const json& lnd)
{
    json nodes = json::array();
    for (const json& n : lnd.value("nodes", json::array())) {
        json out{{"pub_key", n.at("pub_key")}};
        if (auto a = n.find("addresses"); a != n.end()) {
            out["addresses"] = *a;
        }
        nodes.push_back(std::move(out));
    }
    json edges = json::array();
    for (const json& e : lnd.value("edges", json::array())) {
        json cid = e.at("channel_id");
        edges.push_back(json{{"channel_id", cid.is_string() ? cid : json(cid.dump())},
                             {"node1_pub", e.at("node1_pub")},
                             {"node2_pub", e.at("node2_pub")},
                             {"capacity_sat", lnd_number(e, "capacity", 0)},
                             {"node1_policy", lnd_policy(e.value("node1_policy", json(nullptr)))},
                             {"node2_policy", lnd_policy(e.value("node2_policy", json(nullptr)))}});
    }
    return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

} // namespace pcnsim
