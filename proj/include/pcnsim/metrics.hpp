#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pcnsim/adversary.hpp"

namespace pcnsim {

/// Raised when a metric has no defined value for its input (e.g. recall
/// over zero payments).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

struct PaymentTruth {
    PaymentId payment;
    NodeIndex source = 0;
    NodeIndex dest = 0;
    /// Routed path nodes, source first; empty when no route was found.
    std::vector<NodeIndex> path;
    std::vector<NodeIndex> observed_by;

    bool routed() const { return !path.empty(); }
};

/// The payment set X consists of all routed payments.
class GroundTruth {
public:
    void add(PaymentTruth t);
    const PaymentTruth* find(PaymentId id) const;
    std::size_t routed_count() const;
    const std::map<std::uint64_t, PaymentTruth>& entries() const { return entries_; }

private:
    std::map<std::uint64_t, PaymentTruth> entries_;
};

struct MetricsReport {
    std::string estimator;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t classified = 0;
    std::size_t correct = 0;
    std::size_t total = 0;
    /// Nothing was classified, so precision is reported as 0.
    bool no_classifications = false;
};

/// correct / classified; 0 (flagged) when nothing was classified.
double precision(std::size_t correct, std::size_t classified, bool* flagged = nullptr);
/// correct / |X|; throws UndefinedMetric for |X| = 0.
double recall(std::size_t correct, std::size_t total);
/// Harmonic mean; 0 when D + R = 0.
double f1(double d, double r);

/// Counts results whose top candidate equals the true endpoint of `target`.
/// Results for payments missing from the ground truth violate the contract.
MetricsReport evaluate(std::span<const EstimationResult> results, const GroundTruth& truth, Target target,
                       std::string estimator);

/// A payment is classified iff both legs were estimated and correct iff
/// both estimates are right.
MetricsReport full_deanonymization(std::span<const EstimationResult> sources,
                                   std::span<const EstimationResult> destinations, const GroundTruth& truth,
                                   std::string estimator);

/// Share of routed payments with at least one malicious intermediary.
double compromised_share(const GroundTruth& truth, const std::vector<NodeIndex>& malicious);

} // namespace pcnsim
