#include "pcnsim/sim.hpp"

#include <algorithm>
#include <cmath>

namespace pcnsim {

const char* to_string(MessageKind kind)
{
    switch (kind) {
    case MessageKind::update_add_htlc:
        return "update_add_htlc";
    case MessageKind::commitment_signed:
        return "commitment_signed";
    case MessageKind::revoke_and_ack:
        return "revoke_and_ack";
    case MessageKind::update_fulfill_htlc:
        return "update_fulfill_htlc";
    case MessageKind::update_fail_htlc:
        return "update_fail_htlc";
    }
    return "unknown";
}

TimeNs latency_from_draw(const Gaussian& latency, double z)
{
    const double ms = std::max(1.0, latency.mean + latency.std * z);
    return static_cast<TimeNs>(std::llround(ms * static_cast<double>(kNsPerMs)));
}

TimeNs sample_latency(const Gaussian& latency, std::mt19937_64& rng)
{
    std::normal_distribution<double> standard(0.0, 1.0);
    return latency_from_draw(latency, standard(rng));
}

Engine::Engine(FullGraph& g, std::uint64_t seed)
    : graph_(g), rng_(seed), behaviors_(g.node_count(), nullptr), locks_(2 * g.channel_count(), 0)
{
}

void Engine::set_behavior(NodeIndex node, NodeBehavior* behavior)
{
    behaviors_.at(node) = behavior;
}

void Engine::clear_behaviors()
{
    std::fill(behaviors_.begin(), behaviors_.end(), nullptr);
}

NodeBehavior* Engine::behavior(NodeIndex n) const
{
    return attempt_.probe ? nullptr : behaviors_[n];
}

Msat Engine::locked(ChannelIndex c, NodeIndex from) const
{
    const Channel& ch = graph_.channel(c);
    return locks_[2 * c + (from == ch.u ? 0 : 1)];
}

Msat& Engine::lock_slot(ChannelIndex c, NodeIndex from)
{
    const Channel& ch = graph_.channel(c);
    return locks_[2 * c + (from == ch.u ? 0 : 1)];
}

void Engine::validate(const PaymentPath& path) const
{
    if (path.hops.empty()) {
        throw ContractViolation("payment path is empty");
    }
    for (std::size_t i = 0; i < path.hops.size(); ++i) {
        const PathHop& h = path.hops[i];
        if (h.channel >= graph_.channel_count()) {
            throw ContractViolation("hop " + std::to_string(i) + " names an unknown channel");
        }
        const Channel& ch = graph_.channel(h.channel);
        const bool joins = (ch.u == h.from && ch.v == h.to) || (ch.v == h.from && ch.u == h.to);
        if (!joins || (i > 0 && path.hops[i - 1].to != h.from)) {
            throw ContractViolation("hop " + std::to_string(i) + " does not chain");
        }
        if (h.amount <= 0) {
            throw ContractViolation("hop " + std::to_string(i) + " carries a non-positive amount");
        }
    }
}

void Engine::send(TimeNs depart, Stage stage, std::uint8_t step, std::uint32_t hop)
{
    const PathHop& h = attempt_.path->hops[hop];
    // Orientation of each message relative to the hop's u -> v direction.
    bool downstream = true;
    MessageKind kind = MessageKind::update_add_htlc;
    switch (stage) {
    case Stage::lock_in: {
        static constexpr MessageKind kinds[] = {MessageKind::update_add_htlc, MessageKind::commitment_signed,
                                                MessageKind::revoke_and_ack, MessageKind::commitment_signed,
                                                MessageKind::revoke_and_ack};
        static constexpr bool down[] = {true, true, false, false, true};
        kind = kinds[step];
        downstream = down[step];
        break;
    }
    case Stage::fulfill:
        kind = MessageKind::update_fulfill_htlc;
        downstream = false;
        break;
    case Stage::fail:
        kind = MessageKind::update_fail_htlc;
        downstream = false;
        break;
    case Stage::settle: {
        static constexpr MessageKind kinds[] = {MessageKind::commitment_signed, MessageKind::revoke_and_ack,
                                                MessageKind::commitment_signed, MessageKind::revoke_and_ack};
        static constexpr bool down[] = {false, true, true, false};
        kind = kinds[step];
        downstream = down[step];
        break;
    }
    }
    const TimeNs arrive = depart + sample_latency(graph_.channel(h.channel).latency, rng_);
    if (timeline_ != nullptr) {
        timeline_->push_back(TimelineEntry{arrive, attempt_.id, downstream ? h.from : h.to,
                                           downstream ? h.to : h.from, h.channel, kind});
    }
    queue_.schedule(arrive, Delivery{stage, step, hop});
}

bool Engine::start_attempt(TimeNs depart)
{
    ++attempts_made_;
    const PathHop& first = attempt_.path->hops.front();
    attempt_.done = false;
    attempt_.fulfilled = false;
    attempt_.failed_at = 0;
    attempt_.started = depart;
    if (graph_.balance(first.channel, first.from) - locked(first.channel, first.from) < first.amount) {
        attempt_.done = true;
        attempt_.finished = depart;
        return false;
    }
    lock_slot(first.channel, first.from) += first.amount;
    send(depart, Stage::lock_in, 0, 0);
    return true;
}

HtlcContext Engine::context_at(std::size_t position) const
{
    const auto& hops = attempt_.path->hops;
    const PathHop& in = hops[position - 1];
    HtlcContext ctx;
    ctx.payment = attempt_.id;
    ctx.node = in.to;
    ctx.now = queue_.now();
    ctx.incoming_channel = in.channel;
    ctx.previous = in.from;
    ctx.incoming_amount = in.amount;
    ctx.incoming_timelock = in.remaining_timelock;
    if (position < hops.size()) {
        const PathHop& out = hops[position];
        ctx.payload = HopPayload{out.amount, out.remaining_timelock, out.channel};
    } else {
        ctx.payload = HopPayload{in.amount, in.remaining_timelock, std::nullopt};
    }
    return ctx;
}

void Engine::fail_from(std::uint32_t hop, std::size_t position)
{
    attempt_.failed_at = position;
    send(queue_.now(), Stage::fail, 0, hop);
}

void Engine::committed(std::uint32_t hop)
{
    const auto& hops = attempt_.path->hops;
    const std::size_t position = hop + 1;
    const bool last = position == hops.size();
    if (attempt_.probe && last) {
        fail_from(hop, position);
        return;
    }
    const HtlcContext ctx = context_at(position);
    NodeBehavior* b = behavior(ctx.node);
    if (b != nullptr && !b->accept_incoming(ctx)) {
        fail_from(hop, position);
        return;
    }
    if (last) {
        send(queue_.now(), Stage::fulfill, 0, hop);
        return;
    }
    const PathHop& next = hops[position];
    if (graph_.balance(next.channel, next.from) - locked(next.channel, next.from) < next.amount) {
        fail_from(hop, position);
        return;
    }
    lock_slot(next.channel, next.from) += next.amount;
    send(queue_.now(), Stage::lock_in, 0, hop + 1);
    if (b != nullptr) {
        b->on_add_forwarded(ctx);
    }
}

void Engine::deliver(const Delivery& d)
{
    const PathHop& h = attempt_.path->hops[d.hop];
    switch (d.stage) {
    case Stage::lock_in:
        if (d.step < 4) {
            send(queue_.now(), Stage::lock_in, static_cast<std::uint8_t>(d.step + 1), d.hop);
        } else {
            committed(d.hop);
        }
        return;
    case Stage::settle:
        if (d.step < 3) {
            send(queue_.now(), Stage::settle, static_cast<std::uint8_t>(d.step + 1), d.hop);
        }
        return;
    case Stage::fulfill:
    case Stage::fail:
        break;
    }

    const bool fulfilled = d.stage == Stage::fulfill;
    Channel& ch = graph_.channel(h.channel);
    lock_slot(h.channel, h.from) -= h.amount;
    if (fulfilled) {
        ch.from(h.from).balance -= h.amount;
        ch.from(h.to).balance += h.amount;
    }
    send(queue_.now(), Stage::settle, 0, d.hop);

    if (d.hop > 0) {
        if (fulfilled) {
            if (NodeBehavior* b = behavior(h.from)) {
                b->on_fulfill_received(context_at(d.hop));
            }
        }
        send(queue_.now(), d.stage, 0, d.hop - 1);
        return;
    }

    attempt_.done = true;
    attempt_.fulfilled = fulfilled;
    attempt_.finished = queue_.now();
    if (!fulfilled && !attempt_.probe && attempts_made_ <= options_.max_retries) {
        start_attempt(queue_.now() + options_.retry_delay);
    }
}

void Engine::run()
{
    while (auto e = queue_.next_event()) {
        deliver(e->action);
    }
}

PaymentOutcome Engine::execute_payment(const PaymentPath& path, PaymentId id, const ExecuteOptions& options)
{
    validate(path);
    PaymentOutcome outcome;
    outcome.payment = id;
    attempt_ = Attempt{};
    attempt_.path = &path;
    attempt_.id = id;
    options_ = options;
    attempts_made_ = 0;
    timeline_ = options.record_timeline ? &outcome.timeline : nullptr;

    start_attempt(queue_.now());
    outcome.started = attempt_.started;
    run();

    outcome.status = attempt_.fulfilled ? PaymentStatus::fulfilled : PaymentStatus::failed;
    outcome.failed_at_hop = attempt_.fulfilled ? 0 : attempt_.failed_at;
    outcome.attempts = attempts_made_;
    outcome.completed = attempt_.finished;
    std::stable_sort(outcome.timeline.begin(), outcome.timeline.end(),
                     [](const TimelineEntry& a, const TimelineEntry& b) { return a.time < b.time; });
    timeline_ = nullptr;
    attempt_.path = nullptr;
    return outcome;
}

ProbeResult Engine::probe(const PaymentPath& path, PaymentId id)
{
    validate(path);
    attempt_ = Attempt{};
    attempt_.path = &path;
    attempt_.id = id;
    attempt_.probe = true;
    options_ = ExecuteOptions{};
    attempts_made_ = 0;
    timeline_ = nullptr;

    start_attempt(queue_.now());
    const TimeNs started = attempt_.started;
    run();

    ProbeResult r;
    r.failed_at_hop = attempt_.failed_at;
    r.reached_target = !attempt_.fulfilled && attempt_.failed_at == path.hops.size();
    r.duration = attempt_.finished - started;
    attempt_.path = nullptr;
    return r;
}

} // namespace pcnsim
