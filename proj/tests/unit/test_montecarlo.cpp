#include <doctest.h>

#include <cmath>
#include <vector>

#include "rislink/analysis.hpp"
#include "rislink/error.hpp"
#include "rislink/montecarlo.hpp"

using namespace rislink;

namespace {

double q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

channel::SurfaceLink link(std::size_t n, double loss_db) {
    channel::SurfaceLink l;
    l.panel.element_count = n;
    l.k_sr = RicianSpec::from_db(10);
    l.k_rd = RicianSpec::from_db(10);
    l.pl = PathLossValue::from_db(loss_db);
    return l;
}

bool same(const std::vector<BerEstimate>& a, const std::vector<BerEstimate>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].trials != b[i].trials || a[i].errors != b[i].errors || a[i].ber != b[i].ber) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("wilson interval against statsmodels") {
    auto [l1, h1] = wilson_interval(10, 100);
    CHECK(l1 == doctest::Approx(0.05522913706067509).epsilon(1e-12));
    CHECK(h1 == doctest::Approx(0.17436566150491348).epsilon(1e-12));
    auto [l2, h2] = wilson_interval(0, 1000);
    CHECK(l2 == 0.0);
    CHECK(h2 == doctest::Approx(0.003826758485555125).epsilon(1e-12));
    auto [l3, h3] = wilson_interval(200, 1000000);
    CHECK(l3 == doctest::Approx(0.00017413828033419635).epsilon(1e-12));
    CHECK(h3 == doctest::Approx(0.0002297016271521231).epsilon(1e-12));
    auto [l4, h4] = wilson_interval(500, 500);
    CHECK(l4 == doctest::Approx(0.9923756595384479).epsilon(1e-12));
    CHECK(h4 == 1.0);
    CHECK_THROWS_AS(wilson_interval(3, 2), DomainError);
}

TEST_CASE("AWGN BPSK and QPSK match Q-function oracles") {
    TrialPlan plan;
    plan.snr_grid_db = {0.0, 4.0, 8.0};
    plan.min_errors = 1000;
    plan.max_trials = 20'000'000;
    plan.seed = 3;
    for (const auto& e : run_ber(plan)) {
        const double g = std::pow(10.0, e.snr_db / 10);
        CAPTURE(e.snr_db);
        CHECK(e.ci95_low <= q(std::sqrt(2 * g)));
        CHECK(q(std::sqrt(2 * g)) <= e.ci95_high);
        CHECK(e.ci95_low <= e.ber);
        CHECK(e.ber <= e.ci95_high);
        CHECK(e.errors <= e.trials);
    }
    plan.modulation = {ModulationFamily::PSK, 4};
    for (const auto& e : run_ber(plan)) {
        const double g = std::pow(10.0, e.snr_db / 10);
        CHECK(e.ci95_low <= q(std::sqrt(g)));
        CHECK(q(std::sqrt(g)) <= e.ci95_high);
    }
}

TEST_CASE("CI coverage over independent seeds") {
    const double truth = q(std::sqrt(2 * std::pow(10.0, 0.4)));
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        TrialPlan plan;
        plan.snr_grid_db = {4.0};
        plan.seed = 1000 + seed;
        const auto e = run_ber(plan).front();
        covered += e.ci95_low <= truth && truth <= e.ci95_high;
    }
    CHECK(covered >= 90);
}

TEST_CASE("stopping rule") {
    TrialPlan plan;
    plan.snr_grid_db = {0.0, 6.0, 30.0};
    plan.min_errors = 100;
    plan.max_trials = 200'000;
    plan.chunk_size = 5000;
    const auto r = run_ber(plan);
    CHECK(r[0].trials == 5000);
    CHECK(r[0].errors >= 100);
    CHECK(r[1].trials % 5000 == 0);
    CHECK(r[1].errors >= 100);
    CHECK(r[2].trials == 200'000);
    CHECK(r[2].errors == 0);
}

TEST_CASE("results do not depend on the worker count") {
    TrialPlan plan;
    plan.channel = channel::Simultaneous{{link(16, 120)}};
    plan.snr_grid_db = {90, 95, 100, 105};
    plan.max_trials = 100'000;
    plan.chunk_size = 3000;
    plan.seed = 77;
    plan.workers = 1;
    const auto a = run_ber(plan);
    for (int w : {2, 4, 16}) {
        plan.workers = w;
        CHECK(same(a, run_ber(plan)));
    }
    plan.stream = 1;
    plan.workers = 1;
    CHECK(!same(a, run_ber(plan)));
}

TEST_CASE("plan validation") {
    TrialPlan plan;
    plan.snr_grid_db = {1.0, 0.0};
    CHECK_THROWS_AS(run_ber(plan), DomainError);
    plan.snr_grid_db = {0.0};
    plan.min_errors = 10;
    CHECK_THROWS_AS(run_ber(plan), DomainError);
    plan.min_errors = 200;
    plan.channel = channel::Simultaneous{};
    CHECK_THROWS_AS(run_ber(plan), DomainError);
}

TEST_CASE("rate of a deterministic unit link") {
    RatePlan plan;
    plan.points = {{0.0, channel::Direct{RicianSpec{}, false, PathLossValue::from_db(0)}}};
    plan.realizations = 100;
    const auto r = run_rate(plan);
    CHECK(r[0].mean_rate == 1.0);
    CHECK(r[0].mean_snr == 1.0);
}

TEST_CASE("sampler: second moment equals the exact moment sum") {
    // E[A^2] = Var[A] + E[A]^2 holds exactly, not only under the Gaussian model
    for (std::size_t n : {1u, 8u, 64u}) {
        const ChannelModel m = channel::Simultaneous{{link(n, 0)}};
        ChannelSampler s(m);
        RandomSource r(SeededStream{5, n});
        ChannelDraw d;
        const int reps = 200000;
        double p = 0;
        for (int i = 0; i < reps; ++i) {
            s.draw(r, d);
            p += std::norm(d.gain);
        }
        const auto c = clt_moments_single(n, PathLossValue::from_db(0), RicianSpec::from_db(10));
        CAPTURE(n);
        CHECK(std::abs(p / reps / (c.variance + c.mean * c.mean) - 1) < 0.01);
    }
}

TEST_CASE("selection gain dominates every candidate on each draw") {
    const ChannelModel m = channel::SelectIndoor{{link(8, 100), link(8, 103), link(16, 106)}};
    ChannelSampler s(m);
    RandomSource r(SeededStream{6, 0});
    ChannelDraw d;
    for (int i = 0; i < 5000; ++i) {
        s.draw(r, d);
        REQUIRE(d.candidates.size() == 3);
        for (double c : d.candidates) {
            REQUIRE(std::abs(d.gain) >= c);
        }
    }
}

TEST_CASE("simultaneous surfaces: candidates are each surface alone") {
    const ChannelModel m = channel::Simultaneous{{link(8, 100), link(8, 100)}};
    ChannelSampler s(m);
    RandomSource r(SeededStream{6, 1});
    ChannelDraw d;
    for (int i = 0; i < 1000; ++i) {
        s.draw(r, d);
        REQUIRE(d.candidates.size() == 2);
        REQUIRE(std::abs(d.gain) == doctest::Approx(d.candidates[0] + d.candidates[1]).epsilon(1e-12));
    }
}

TEST_CASE("workers from the environment") {
    CHECK(default_workers() >= 1);
}
