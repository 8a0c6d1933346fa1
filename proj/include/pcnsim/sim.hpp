#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "pcnsim/graph.hpp"
#include "pcnsim/routing.hpp"

namespace pcnsim {

/// Min-queue of timed actions with a monotone clock. Events pop in
/// (fire_at, sequence) order; the clock jumps to each popped fire_at.
template <typename Action>
class EventQueue {
public:
    struct Event {
        TimeNs fire_at = 0;
        std::uint64_t sequence = 0;
        Action action;
    };

    void schedule(TimeNs fire_at, Action action)
    {
        if (fire_at < now_) {
            throw ContractViolation("event scheduled in the past");
        }
        heap_.push(Event{fire_at, next_sequence_++, std::move(action)});
    }

    std::optional<Event> next_event()
    {
        if (heap_.empty()) {
            return std::nullopt;
        }
        Event e = heap_.top();
        heap_.pop();
        now_ = e.fire_at;
        return e;
    }

    TimeNs now() const { return now_; }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.fire_at != b.fire_at ? a.fire_at > b.fire_at : a.sequence > b.sequence;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    TimeNs now_ = 0;
    std::uint64_t next_sequence_ = 0;
};

enum class MessageKind {
    update_add_htlc,
    commitment_signed,
    revoke_and_ack,
    update_fulfill_htlc,
    update_fail_htlc,
};

const char* to_string(MessageKind kind);

/// What the onion reveals to one node: its own forwarding instructions.
struct HopPayload {
    Msat forward_amount = 0;
    std::uint32_t outgoing_timelock = 0;
    /// Unset at the destination.
    std::optional<ChannelIndex> next_channel;
};

/// Everything a node sees when an HTLC reaches it.
struct HtlcContext {
    PaymentId payment;
    NodeIndex node = 0;
    TimeNs now = 0;
    ChannelIndex incoming_channel = 0;
    NodeIndex previous = 0;
    Msat incoming_amount = 0;
    std::uint32_t incoming_timelock = 0;
    HopPayload payload;
};

/// Per-node policy hooks. Honest nodes use the defaults.
class NodeBehavior {
public:
    virtual ~NodeBehavior() = default;
    /// Called once the incoming HTLC is irrevocably committed. Returning
    /// false fails it back with update_fail_htlc.
    virtual bool accept_incoming(const HtlcContext&) { return true; }
    /// Called when the node sends update_add_htlc downstream.
    virtual void on_add_forwarded(const HtlcContext&) {}
    /// Called when update_fulfill_htlc arrives from downstream.
    virtual void on_fulfill_received(const HtlcContext&) {}
};

struct TimelineEntry {
    /// Arrival time of the message at `to`.
    TimeNs time = 0;
    PaymentId payment;
    NodeIndex from = 0;
    NodeIndex to = 0;
    ChannelIndex channel = 0;
    MessageKind kind = MessageKind::update_add_htlc;
};

enum class PaymentStatus { fulfilled, failed };

struct PaymentOutcome {
    PaymentId payment;
    PaymentStatus status = PaymentStatus::failed;
    /// Path position of the failing node (sender 0, destination = length).
    std::size_t failed_at_hop = 0;
    std::uint32_t attempts = 0;
    /// First update_add_htlc departure and final fulfill/fail arrival at the sender.
    TimeNs started = 0;
    TimeNs completed = 0;
    std::vector<TimelineEntry> timeline;

    bool fulfilled() const { return status == PaymentStatus::fulfilled; }
};

struct ExecuteOptions {
    /// Same-path retries after a downstream failure.
    std::uint32_t max_retries = 0;
    TimeNs retry_delay = 0;
    bool record_timeline = true;
};

struct ProbeResult {
    /// False when the probe failed before its last node; the sample is unusable.
    bool reached_target = false;
    std::size_t failed_at_hop = 0;
    /// update_add_htlc departure to final update_fail_htlc arrival.
    TimeNs duration = 0;
};

/// Gaussian draw in ms for mean + std * z, clamped below at 1 ms, in ns.
TimeNs latency_from_draw(const Gaussian& latency, double z);
/// Consumes exactly one standard-normal draw even when std == 0.
TimeNs sample_latency(const Gaussian& latency, std::mt19937_64& rng);

/// Single-threaded discrete-event engine over one FullGraph. Payments run
/// one after another on a shared clock; balances persist between them.
class Engine {
public:
    Engine(FullGraph& g, std::uint64_t seed);

    void set_behavior(NodeIndex node, NodeBehavior* behavior);
    void clear_behaviors();

    /// Runs the payment (plus any retries and trailing settlement
    /// handshakes) to completion. Throws ContractViolation for a path that
    /// does not chain over existing channels.
    PaymentOutcome execute_payment(const PaymentPath& path, PaymentId id, const ExecuteOptions& options = {});

    /// Sends an HTLC that the path's last node fails once it is committed.
    /// Behaviour hooks are not invoked.
    ProbeResult probe(const PaymentPath& path, PaymentId id);

    TimeNs now() const { return queue_.now(); }
    const FullGraph& graph() const { return graph_; }
    /// Amount currently held in in-flight HTLCs on (channel, from).
    Msat locked(ChannelIndex c, NodeIndex from) const;

private:
    enum class Stage : std::uint8_t { lock_in, fulfill, fail, settle };
    struct Delivery {
        Stage stage = Stage::lock_in;
        std::uint8_t step = 0;
        std::uint32_t hop = 0;
    };
    struct Attempt {
        const PaymentPath* path = nullptr;
        PaymentId id;
        bool probe = false;
        bool done = false;
        bool fulfilled = false;
        std::size_t failed_at = 0;
        TimeNs started = 0;
        TimeNs finished = 0;
    };

    void validate(const PaymentPath& path) const;
    bool start_attempt(TimeNs depart);
    void run();
    void send(TimeNs depart, Stage stage, std::uint8_t step, std::uint32_t hop);
    void deliver(const Delivery& d);
    void committed(std::uint32_t hop);
    void fail_from(std::uint32_t hop, std::size_t position);
    HtlcContext context_at(std::size_t position) const;
    NodeBehavior* behavior(NodeIndex n) const;
    Msat& lock_slot(ChannelIndex c, NodeIndex from);

    FullGraph& graph_;
    std::mt19937_64 rng_;
    EventQueue<Delivery> queue_;
    std::vector<NodeBehavior*> behaviors_;
    std::vector<Msat> locks_;
    Attempt attempt_;
    ExecuteOptions options_;
    std::uint32_t attempts_made_ = 0;
    std::vector<TimelineEntry>* timeline_ = nullptr;
};

} // namespace pcnsim
