#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pcnsim/latmodel.hpp"

using namespace pcnsim;

TEST_CASE("Gaussian sum")
{
    const Gaussian s = Gaussian::from_variance(1.0, 4.0) + Gaussian::from_variance(2.0, 9.0);
    CHECK(s.mean == 3.0);
    CHECK(s.variance() == doctest::Approx(13.0).epsilon(1e-12));
    CHECK(log_density(Gaussian{0.0, 1.0}, 0.0) == doctest::Approx(-0.5 * std::log(2.0 * M_PI)));
}

TEST_CASE("first-hop estimate")
{
    const std::vector<double> sixty(10, 60.0);
    CHECK(estimate_first_hop(sixty, 6) == Gaussian{10.0, 0.0});
    CHECK(estimate_first_hop(std::vector<double>{40, 40}, 4) == Gaussian{10.0, 0.0});
    const Gaussian g = estimate_first_hop(std::vector<double>{50, 70}, 6);
    CHECK(g.mean == doctest::Approx(10.0));
    CHECK(g.std == doctest::Approx(std::sqrt(200.0 / 12.0)));
    CHECK(g.std == doctest::Approx(4.082).epsilon(1e-3));
    CHECK_THROWS_AS(estimate_first_hop(std::vector<double>{60}, 6), InsufficientData);
}

TEST_CASE("next-hop estimate")
{
    const std::vector<double> s(8, 120.0);
    const std::vector<Gaussian> prior{{10.0, 0.0}};
    const auto e = estimate_next_hop(s, prior, 6);
    CHECK(e.estimate == Gaussian{10.0, 0.0});
    CHECK_FALSE(e.clamped);

    const auto c = estimate_next_hop(s, std::vector<Gaussian>{{30.0, 0.0}}, 6);
    CHECK(c.clamped);
    CHECK(c.estimate.mean == 1.0);

    const std::vector<double> flat(8, 180.0);
    const auto q = estimate_next_hop(flat, std::vector<Gaussian>{{10.0, 3.0}, {10.0, 4.0}}, 6);
    CHECK(q.estimate.mean == doctest::Approx(10.0));
    CHECK(q.estimate.std == doctest::Approx(5.0));
    CHECK_THROWS_AS(estimate_next_hop(std::vector<double>{}, prior, 6), InsufficientData);
}

TEST_CASE("aggregation by reciprocal distance")
{
    auto est = [](ChannelIndex c, double mu, std::uint32_t d, NodeIndex v = 0) {
        EdgeLatencyEstimate e;
        e.channel = c;
        e.estimate = Gaussian{mu, 2.0};
        e.hop_distance = d;
        e.vantage = v;
        e.sample_count = 100;
        return e;
    };
    const std::vector<EdgeLatencyEstimate> one{est(0, 10, 1)};
    const LatencyModel m1 = aggregate_models(one, 2);
    CHECK(m1.lookup(0) == Gaussian{10.0, 0.0});
    CHECK_FALSE(m1.contains(1));
    bool defaulted = false;
    CHECK(m1.lookup(1, &defaulted) == LatencyModel::kFallback);
    CHECK(defaulted);

    const std::vector<EdgeLatencyEstimate> two{est(0, 10, 1), est(0, 16, 2)};
    const LatencyModel m2 = aggregate_models(two, 1);
    CHECK(m2.lookup(0).mean == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(m2.lookup(0).std == doctest::Approx(std::sqrt((1.0 * 4.0 + 0.5 * 16.0) / 1.5)));

    const std::vector<EdgeLatencyEstimate> same{est(0, 7, 1), est(0, 7, 3), est(0, 7, 2)};
    CHECK(aggregate_models(same, 1).lookup(0) == Gaussian{7.0, 0.0});
    CHECK_THROWS_AS(aggregate_models(std::vector<EdgeLatencyEstimate>{est(0, 1, 0)}, 1), ContractViolation);
}

TEST_CASE("aggregation does not depend on input order")
{
    std::mt19937_64 rng(8);
    std::vector<EdgeLatencyEstimate> es;
    for (int i = 0; i < 60; ++i) {
        EdgeLatencyEstimate e;
        e.channel = static_cast<ChannelIndex>(rng() % 7);
        e.estimate = Gaussian{std::uniform_real_distribution<double>(1, 100)(rng), 1.0};
        e.hop_distance = static_cast<std::uint32_t>(1 + rng() % 3);
        e.vantage = static_cast<NodeIndex>(rng() % 5);
        e.sample_count = 100;
        es.push_back(e);
    }
    const LatencyModel ref = aggregate_models(es, 7);
    for (int k = 0; k < 10; ++k) {
        std::shuffle(es.begin(), es.end(), rng);
        const LatencyModel m = aggregate_models(es, 7);
        for (ChannelIndex c = 0; c < 7; ++c) {
            CHECK(m.lookup(c) == ref.lookup(c));
        }
    }
}

TEST_CASE("path distribution")
{
    LatencyModel m(3, 6.0);
    m.set(0, ModelEntry{Gaussian::from_variance(10.0, 4.0), 1, 0, 1});
    m.set(1, ModelEntry{Gaussian{5.0, 1.0}, 1, 0, 1});
    const std::vector<ChannelIndex> e0{0};
    const auto a = path_distribution(m, e0, std::vector<double>{6.0});
    CHECK(a.distribution.mean == 60.0);
    CHECK(a.distribution.variance() == doctest::Approx(24.0));
    CHECK(path_distribution(m, e0, std::vector<double>{1.0}).distribution.variance() == doctest::Approx(4.0));

    m.set_mode(ScalingMode::deterministic);
    CHECK(path_distribution(m, e0, std::vector<double>{6.0}).distribution.variance() == doctest::Approx(144.0));
    m.set_mode(ScalingMode::independent);

    const auto d = path_distribution(m, std::vector<ChannelIndex>{0, 2}, std::vector<double>{1.0, 1.0});
    CHECK(d.defaulted_edges == 1);
    CHECK(d.distribution.mean == 10.0 + 125.0);

    // Reordering the edges gives the same distribution.
    const auto x = path_distribution(m, std::vector<ChannelIndex>{0, 1, 2}, std::vector<double>{6, 4, 2});
    const auto y = path_distribution(m, std::vector<ChannelIndex>{2, 0, 1}, std::vector<double>{2, 6, 4});
    CHECK(x.distribution.mean == doctest::Approx(y.distribution.mean).epsilon(1e-14));
    CHECK(x.distribution.std == doctest::Approx(y.distribution.std).epsilon(1e-14));
    CHECK_THROWS_AS(path_distribution(m, e0, std::vector<double>{}), ContractViolation);
}

TEST_CASE("independent scaling matches a Monte-Carlo sum of traversals")
{
    std::mt19937_64 rng(12);
    std::normal_distribution<double> edge(10.0, 2.0);
    const int n = 200'000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int t = 0; t < 6; ++t) {
            s += edge(rng);
        }
        sum += s;
        sq += s * s;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    const Gaussian g = scale(Gaussian{10.0, 2.0}, 6.0, ScalingMode::independent);
    CHECK(mean == doctest::Approx(g.mean).epsilon(0.005));
    CHECK(var == doctest::Approx(g.variance()).epsilon(0.02));
}

TEST_CASE("single probe round trip is six traversals")
{
    FullGraph g = oracle::line_graph(3, 10.0);
    Engine engine(g, 1);
    const PublicGraph pub = public_view(g);
    const std::vector<HopRef> hop{{0, 0, 1}};
    const PaymentPath p = make_path(pub, hop, 1000, {});
    for (int i = 0; i < 3; ++i) {
        const auto d = probe_path(0, p, engine, PaymentId{static_cast<std::uint64_t>(i)});
        REQUIRE(d);
        CHECK(*d == 60.0);
    }
    const std::vector<HopRef> two{{0, 0, 1}, {1, 1, 2}};
    CHECK(*probe_path(0, make_path(pub, two, 1000, {}), engine, PaymentId{5}) == 120.0);
    CHECK_THROWS_AS(probe_path(0, PaymentPath{}, engine, PaymentId{1}), ContractViolation);
    CHECK_THROWS_AS(probe_path(1, p, engine, PaymentId{1}), ContractViolation);
    CHECK(g.balances_conserved());
}

TEST_CASE("probe that fails early is discarded")
{
    FullGraph g = oracle::line_graph(3, 10.0, 0.0, 1'000'000);
    g.channel(1).policy_uv.balance = 0;
    g.channel(1).policy_vu.balance = 1'000'000;
    Engine engine(g, 1);
    const std::vector<HopRef> two{{0, 0, 1}, {1, 1, 2}};
    CHECK_FALSE(probe_path(0, make_path(public_view(g), two, 1000, {}), engine, PaymentId{1}));
}

TEST_CASE("probing recovers exact means without jitter")
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const FullGraph g = oracle::random_graph(14, seed, {.topology = static_cast<oracle::Topology>(seed % 6),
                                                            .latency_spread = 0.0});
        const auto ests = probe_from_vantage(g, 0, ProbeCampaignConfig{.probes_per_path = 5}, seed);
        CHECK_FALSE(ests.empty());
        for (const auto& e : ests) {
            CAPTURE(e.channel);
            CHECK(e.hop_distance <= 3);
            const double truth = std::round(g.channel(e.channel).latency.mean * 1e6) / 1e6;
            CHECK(e.estimate.mean == doctest::Approx(truth).epsilon(1e-9));
            CHECK(e.estimate.std == doctest::Approx(0.0));
            CHECK_FALSE(e.clamped);
        }
    }
}

TEST_CASE("probing covers every channel within reach exactly once")
{
    const FullGraph g = oracle::random_graph(12, 3, {.topology = oracle::Topology::tree});
    const PublicGraph pub = public_view(g);
    const NodeIndex v = 0;
    const auto ests = probe_from_vantage(g, v, ProbeCampaignConfig{.probes_per_path = 3}, 1);
    std::vector<int> seen(g.channel_count(), 0);
    for (const auto& e : ests) {
        ++seen[e.channel];
    }
    // In a tree every channel within two hops of the vantage's neighbours is
    // probed once at its BFS depth.
    std::vector<int> depth(g.node_count(), -1);
    depth[v] = 0;
    std::vector<NodeIndex> q{v};
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (ChannelIndex c : pub.incident(q[i])) {
            const NodeIndex y = pub.channel(c).other(q[i]);
            if (depth[y] < 0) {
                depth[y] = depth[q[i]] + 1;
                q.push_back(y);
            }
        }
    }
    for (ChannelIndex c = 0; c < g.channel_count(); ++c) {
        const int d = std::min(depth[pub.channel(c).u], depth[pub.channel(c).v]);
        CHECK(seen[c] == (d <= 2 ? 1 : 0));
    }
}

TEST_CASE("model CSV round trip")
{
    const FullGraph g = oracle::random_graph(8, 2);
    const PublicGraph pub = public_view(g);
    const LatencyModel m = oracle::truth_model(g);
    const LatencyModel back = LatencyModel::from_csv(m.to_csv(pub), pub);
    CHECK(back.estimated_count() == g.channel_count());
    for (ChannelIndex c = 0; c < g.channel_count(); ++c) {
        CHECK(back.lookup(c).mean == doctest::Approx(m.lookup(c).mean).epsilon(1e-9));
        CHECK(back.lookup(c).std == doctest::Approx(m.lookup(c).std).epsilon(1e-9));
    }
}
