#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcnsim/gaussian.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/routing.hpp"
#include "pcnsim/sim.hpp"

namespace pcnsim {

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Per-edge message crossings folded into one probe or δt sample.
inline constexpr double kTraversalsPerHop = 6.0;
inline constexpr double kCompactTraversalsPerHop = 4.0;

/// Spread floor applied when a model Gaussian is evaluated as a density.
inline constexpr double kDensityStdFloorMs = 0.1;

enum class ScalingMode {
    /// T independent traversals: mean T·μ, variance T·σ².
    independent,
    /// One draw scaled by T: mean T·μ, variance T²·σ².
    deterministic,
};

struct EdgeLatencyEstimate {
    ChannelIndex channel = 0;
    Gaussian estimate;
    std::size_t sample_count = 0;
    NodeIndex vantage = 0;
    std::uint32_t hop_distance = 1;
    /// The raw mean came out below 1 ms and was clamped.
    bool clamped = false;
};

struct ModelEntry {
    Gaussian latency;
    std::size_t samples = 0;
    NodeIndex vantage = 0;
    std::uint32_t distance = 0;
};

/// Estimated one-way latency per channel (ms).
class LatencyModel {
public:
    LatencyModel() = default;
    explicit LatencyModel(std::size_t channel_count, double traversal_weight = kTraversalsPerHop,
                          ScalingMode mode = ScalingMode::independent);

    static constexpr Gaussian kFallback{125.0, 25.0};

    double traversal_weight() const { return traversal_weight_; }
    void set_traversal_weight(double t) { traversal_weight_ = t; }
    ScalingMode mode() const { return mode_; }
    void set_mode(ScalingMode m) { mode_ = m; }

    void set(ChannelIndex c, ModelEntry entry);
    const std::optional<ModelEntry>& entry(ChannelIndex c) const { return entries_.at(c); }
    bool contains(ChannelIndex c) const { return c < entries_.size() && entries_[c].has_value(); }
    /// The channel's Gaussian, or kFallback (and *defaulted = true).
    Gaussian lookup(ChannelIndex c, bool* defaulted = nullptr) const;
    std::size_t channel_count() const { return entries_.size(); }
    std::size_t estimated_count() const;

    /// Rows `channel_id,mu_ms,sigma_ms,samples,vantage,distance`.
    std::string to_csv(const PublicGraph& g) const;
    static LatencyModel from_csv(const std::string& text, const PublicGraph& g,
                                 double traversal_weight = kTraversalsPerHop);

private:
    std::vector<std::optional<ModelEntry>> entries_;
    double traversal_weight_ = kTraversalsPerHop;
    ScalingMode mode_ = ScalingMode::independent;
};

/// μ̂ = Σs/(T·n); σ̂ = sqrt(Σ(s − T·μ̂)²/(T·n)). Needs ≥ 2 samples.
Gaussian estimate_first_hop(std::span<const double> samples_ms, double traversal_weight);

struct NextHopEstimate {
    Gaussian estimate;
    bool clamped = false;
};

/// μ̂ = Σs/(T·n) − Σ prior means, clamped to 1 ms; σ̂² is the residual
/// term of the whole probe path plus the prior variances.
NextHopEstimate estimate_next_hop(std::span<const double> samples_ms, std::span<const Gaussian> prior_hops,
                                  double traversal_weight);

/// Reciprocal-distance weighted mean and spread per channel. Empty input
/// leaves a channel out of the model.
LatencyModel aggregate_models(std::span<const EdgeLatencyEstimate> estimates, std::size_t channel_count,
                              double traversal_weight = kTraversalsPerHop,
                              ScalingMode mode = ScalingMode::independent);

struct PathDistribution {
    Gaussian distribution;
    /// Channels that were missing from the model and used kFallback.
    std::size_t defaulted_edges = 0;
};

/// Σ T_i · lat(e_i) under the model's scaling mode.
PathDistribution path_distribution(const LatencyModel& model, std::span<const ChannelIndex> edges,
                                   std::span<const double> weights);
Gaussian scale(const Gaussian& g, double t, ScalingMode mode);

/// Std floored at kDensityStdFloorMs.
Gaussian density_ready(const Gaussian& g);

/// Round trip (ms) of one probe that the path's last node fails.
/// Returns nullopt when the probe failed earlier.
std::optional<double> probe_path(NodeIndex adversary, const PaymentPath& path, Engine& engine, PaymentId id);

struct ProbeCampaignConfig {
    std::uint32_t probes_per_path = 100;
    /// Longest probe path in hops.
    std::uint32_t max_path_length = 3;
    Msat probe_amount = 1000;
    double traversal_weight = kTraversalsPerHop;
};

struct ProbeCampaignStats {
    std::size_t probes_sent = 0;
    std::size_t probes_discarded = 0;
    std::size_t clamped_estimates = 0;
};

/// Probes every channel within max_path_length hops of the vantage along its
/// BFS tree (ties by ascending NodeId) and estimates each channel once, at
/// its smallest distance. Runs on a private copy of the graph.
std::vector<EdgeLatencyEstimate> probe_from_vantage(const FullGraph& g, NodeIndex vantage,
                                                    const ProbeCampaignConfig& cfg, std::uint64_t seed,
                                                    ProbeCampaignStats* stats = nullptr);

} // namespace pcnsim
