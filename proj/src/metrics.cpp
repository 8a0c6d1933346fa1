#include "pcnsim/metrics.hpp"

#include <algorithm>
#include <unordered_set>

namespace pcnsim {

void GroundTruth::add(PaymentTruth t)
{
    const auto key = t.payment.value;
    if (!entries_.emplace(key, std::move(t)).second) {
        throw ContractViolation("duplicate payment in ground truth");
    }
}

const PaymentTruth* GroundTruth::find(PaymentId id) const
{
    auto it = entries_.find(id.value);
    return it == entries_.end() ? nullptr : &it->second;
}

std::size_t GroundTruth::routed_count() const
{
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const auto& kv) { return kv.second.routed(); }));
}

double precision(std::size_t correct, std::size_t classified, bool* flagged)
{
    if (flagged != nullptr) {
        *flagged = classified == 0;
    }
    return classified == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(classified);
}

double recall(std::size_t correct, std::size_t total)
{
    if (total == 0) {
        throw UndefinedMetric("recall is undefined for an empty payment set");
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

double f1(double d, double r)
{
    return d + r == 0.0 ? 0.0 : 2.0 * d * r / (d + r);
}

namespace {

const PaymentTruth& require(const GroundTruth& truth, PaymentId id)
{
    const PaymentTruth* t = truth.find(id);
    if (t == nullptr || !t->routed()) {
        throw ContractViolation("estimation result for a payment outside the routed set");
    }
    return *t;
}

NodeIndex endpoint(const PaymentTruth& t, Target target)
{
    return target == Target::source ? t.source : t.dest;
}

MetricsReport finish(std::string estimator, std::size_t correct, std::size_t classified, std::size_t total)
{
    MetricsReport r;
    r.estimator = std::move(estimator);
    r.correct = correct;
    r.classified = classified;
    r.total = total;
    r.precision = precision(correct, classified, &r.no_classifications);
    r.recall = recall(correct, total);
    r.f1 = f1(r.precision, r.recall);
    return r;
}

} // namespace

MetricsReport evaluate(std::span<const EstimationResult> results, const GroundTruth& truth, Target target,
                       std::string estimator)
{
    std::size_t correct = 0;
    std::unordered_set<std::uint64_t> seen;
    for (const EstimationResult& r : results) {
        if (r.target != target || r.candidates.empty()) {
            continue;
        }
        if (!seen.insert(r.payment.value).second) {
            throw ContractViolation("payment classified twice for the same target");
        }
        correct += r.top() == endpoint(require(truth, r.payment), target) ? 1 : 0;
    }
    return finish(std::move(estimator), correct, seen.size(), truth.routed_count());
}

MetricsReport full_deanonymization(std::span<const EstimationResult> sources,
                                   std::span<const EstimationResult> destinations, const GroundTruth& truth,
                                   std::string estimator)
{
    std::map<std::uint64_t, NodeIndex> src;
    for (const EstimationResult& r : sources) {
        if (r.target == Target::source && !r.candidates.empty()) {
            src[r.payment.value] = r.top();
        }
    }
    std::size_t classified = 0;
    std::size_t correct = 0;
    for (const EstimationResult& r : destinations) {
        if (r.target != Target::destination || r.candidates.empty()) {
            continue;
        }
        auto it = src.find(r.payment.value);
        if (it == src.end()) {
            continue;
        }
        const PaymentTruth& t = require(truth, r.payment);
        ++classified;
        correct += (it->second == t.source && r.top() == t.dest) ? 1 : 0;
    }
    return finish(std::move(estimator), correct, classified, truth.routed_count());
}

double compromised_share(const GroundTruth& truth, const std::vector<NodeIndex>& malicious)
{
    const std::unordered_set<NodeIndex> bad(malicious.begin(), malicious.end());
    std::size_t routed = 0;
    std::size_t hit = 0;
    for (const auto& [id, t] : truth.entries()) {
        if (!t.routed()) {
            continue;
        }
        ++routed;
        const bool any = std::any_of(t.path.begin() + 1, t.path.end() - 1, [&](NodeIndex n) { return bad.contains(n); });
        hit += any ? 1 : 0;
    }
    return routed == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(routed);
}

} // namespace pcnsim
