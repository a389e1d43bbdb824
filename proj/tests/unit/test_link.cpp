#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rislink/error.hpp"
#include "rislink/link.hpp"

using namespace rislink;
using cplx = std::complex<double>;

namespace {

std::vector<ComplexCoefficient> random_hop(std::size_t n, std::uint64_t stream) {
    return sample_rician(RicianSpec{2.0}, SeededStream{99, stream}, n);
}

RisPanel panel(std::size_t n) {
    RisPanel p;
    p.element_count = n;
    return p;
}

Grid<ComplexCoefficient> random_matrix(std::size_t n, std::uint64_t stream) {
    const auto v = sample_rician(RicianSpec{1.0}, SeededStream{7, stream}, n * n);
    Grid<ComplexCoefficient> g(n, n);
    for (std::size_t i = 0; i < n * n; ++i) {
        g.flat()[i] = v[i];
    }
    return g;
}

} // namespace

TEST_CASE("unit single-element link") {
    const std::vector<ComplexCoefficient> a{{1.0, 0.3}}, b{{1.0, -1.1}};
    const auto phi = align_phases_single(a, b);
    const auto r = snr_single_ris(panel(1), a, b, PathLossValue::from_db(0), 1.0, 1.0, phi);
    CHECK(r.snr_linear == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("phase alignment wrap") {
    const std::vector<ComplexCoefficient> zero(5, {1.0, 0.0});
    for (double p : align_phases_single(zero, zero)) {
        CHECK(p == 0.0);
    }
    const std::vector<ComplexCoefficient> a{{1.0, std::numbers::pi / 2}}, b{{1.0, 3 * std::numbers::pi / 4}};
    CHECK(align_phases_single(a, b)[0] == doctest::Approx(-3 * std::numbers::pi / 4).epsilon(1e-14));
}

TEST_CASE("aligned SNR matches a brute-force complex sum") {
    const std::size_t n = 8;
    const auto a = random_hop(n, 1);
    const auto b = random_hop(n, 2);
    const auto pl = PathLossValue::from_db(90.0);
    const double p_t = 2.0, n0 = 1e-9;
    const auto phi = align_phases_single(a, b);
    const auto r = snr_single_ris(panel(n), a, b, pl, p_t, n0, phi);
    cplx field{0, 0};
    double amp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        field += std::polar(a[i].amplitude, -a[i].phase) * std::polar(b[i].amplitude, -b[i].phase) *
                 std::polar(1.0, phi[i]);
        amp += a[i].amplitude * b[i].amplitude;
    }
    const double direct = std::norm(field) * p_t / (pl.loss_linear * n0);
    CHECK(r.snr_linear == doctest::Approx(direct).epsilon(1e-12));
    CHECK(r.snr_linear == doctest::Approx(amp * amp * p_t / (pl.loss_linear * n0)).epsilon(1e-12));
    CHECK(r.composite_amplitude * r.composite_amplitude * p_t / n0 == doctest::Approx(r.snr_linear).epsilon(1e-14));
}

TEST_CASE("no phase vector beats alignment") {
    const std::size_t n = 6;
    const auto a = random_hop(n, 3);
    const auto b = random_hop(n, 4);
    const auto pl = PathLossValue::from_db(0);
    const double best = snr_single_ris(panel(n), a, b, pl, 1, 1, align_phases_single(a, b)).snr_linear;
    RandomSource r(SeededStream{1, 1});
    for (int t = 0; t < 2000; ++t) {
        std::vector<double> phi(n);
        for (auto& p : phi) {
            p = (2 * r.uniform() - 1) * std::numbers::pi;
        }
        REQUIRE(snr_single_ris(panel(n), a, b, pl, 1, 1, phi).snr_linear <= best * (1 + 1e-12));
    }
    // grid search over the second phase with the first one fixed at its aligned value
    const auto a2 = random_hop(2, 5);
    const auto b2 = random_hop(2, 6);
    const auto aligned = align_phases_single(a2, b2);
    double grid_best = 0;
    for (int k = 0; k < 3600; ++k) {
        const std::vector<double> phi{aligned[0], -std::numbers::pi + k * std::numbers::pi / 1800};
        grid_best = std::max(grid_best, snr_single_ris(panel(2), a2, b2, pl, 1, 1, phi).snr_linear);
    }
    const double opt = snr_single_ris(panel(2), a2, b2, pl, 1, 1, aligned).snr_linear;
    CHECK(grid_best <= opt * (1 + 1e-12));
    CHECK(grid_best >= opt * (1 - 1e-5));
}

TEST_CASE("length mismatch") {
    const auto a = random_hop(4, 1);
    const auto b = random_hop(3, 2);
    const std::vector<double> phi(4, 0.0);
    CHECK_THROWS_AS(snr_single_ris(panel(4), a, b, PathLossValue::from_db(0), 1, 1, phi), DomainError);
}

TEST_CASE("dual simultaneous reductions") {
    const std::size_t n = 16;
    const auto a = random_hop(n, 10);
    const auto b = random_hop(n, 11);
    const auto pl = PathLossValue::from_db(80);
    const auto p1 = panel(n);
    RisPanel absent;
    absent.element_count = 0;
    const RisHop first{&p1, a, b, pl};
    const RisHop none{&absent, {}, {}, pl};
    const auto single = snr_single_ris(p1, a, b, pl, 1, 1e-8, align_phases_single(a, b));
    CHECK(snr_dual_simultaneous(first, none, 1, 1e-8).snr_linear == doctest::Approx(single.snr_linear).epsilon(1e-12));
    const auto twice = snr_dual_simultaneous(first, first, 1, 1e-8);
    CHECK(twice.composite_amplitude == doctest::Approx(2 * single.composite_amplitude).epsilon(1e-12));
    CHECK(twice.snr_linear == doctest::Approx(4 * single.snr_linear).epsilon(1e-12));
}

TEST_CASE("double reflection") {
    const auto pl = PathLossValue::from_db(150);
    const double p_t = 1, n0 = 1e-12;
    SUBCASE("N = 1 is one product amplitude") {
        const auto h = random_matrix(1, 1);
        const auto r = snr_double_reflected({panel(1), panel(1)}, h, pl, p_t, n0, double_mode::IdealAligned{});
        CHECK(r.composite_amplitude == doctest::Approx(std::sqrt(pl.gain()) * h(0, 0).amplitude).epsilon(1e-14));
    }
    SUBCASE("ideal alignment against an elementwise sum") {
        const auto h = random_matrix(4, 2);
        double s = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                s += h(i, j).amplitude;
            }
        }
        const auto r = snr_double_reflected({panel(4), panel(4)}, h, pl, p_t, n0, double_mode::IdealAligned{});
        CHECK(r.snr_linear == doctest::Approx(s * s * pl.gain() * p_t / n0).epsilon(1e-12));
    }
    SUBCASE("rank-1 phases are exactly realizable") {
        const std::size_t n = 5;
        const std::vector<double> a{0.1, -2.0, 1.3, 3.0, -0.7}, b{2.2, -1.0, 0.0, 0.4, -3.1};
        auto h = random_matrix(n, 3);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                h(i, j).phase = wrap_phase(a[i] + b[j]);
            }
        }
        // h = beta e^{-j varphi}; e^{j(phi1 + phi2)} cancels it when phi1 + phi2 = varphi
        const auto ideal = snr_double_reflected({panel(n), panel(n)}, h, pl, p_t, n0, double_mode::IdealAligned{});
        const auto side = snr_double_reflected({panel(n), panel(n)}, h, pl, p_t, n0, double_mode::PerSidePhases{a, b});
        CHECK(side.snr_linear == doctest::Approx(ideal.snr_linear).epsilon(1e-12));
        // ascent only approaches the optimum, so run it to a tight tolerance
        const auto opt = optimize_double_phases(h, 1e-14, 100000);
        CHECK(opt.amplitude * opt.amplitude * pl.gain() * p_t / n0 ==
              doctest::Approx(ideal.snr_linear).epsilon(1e-9));
    }
    SUBCASE("coordinate ascent sits between random phases and the ideal bound") {
        const std::size_t n = 6;
        const auto h = random_matrix(n, 4);
        const auto opt = optimize_double_phases(h);
        const auto ideal = snr_double_reflected({panel(n), panel(n)}, h, pl, 1, 1, double_mode::IdealAligned{});
        const auto at_opt =
            snr_double_reflected({panel(n), panel(n)}, h, pl, 1, 1, double_mode::PerSidePhases{opt.first, opt.second});
        CHECK(at_opt.composite_amplitude == doctest::Approx(std::sqrt(pl.gain()) * opt.amplitude).epsilon(1e-12));
        CHECK(at_opt.snr_linear <= ideal.snr_linear * (1 + 1e-12));
        RandomSource r(SeededStream{5, 5});
        for (int t = 0; t < 500; ++t) {
            std::vector<double> f(n), g(n);
            for (std::size_t i = 0; i < n; ++i) {
                f[i] = (2 * r.uniform() - 1) * std::numbers::pi;
                g[i] = (2 * r.uniform() - 1) * std::numbers::pi;
            }
            const auto rnd = snr_double_reflected({panel(n), panel(n)}, h, pl, 1, 1, double_mode::PerSidePhases{f, g});
            REQUIRE(rnd.snr_linear <= at_opt.snr_linear * (1 + 1e-9));
        }
    }
    SUBCASE("non-square matrix") {
        Grid<ComplexCoefficient> h(2, 3, {1.0, 0.0});
        CHECK_THROWS_AS(snr_double_reflected({panel(2), panel(3)}, h, pl, 1, 1, double_mode::IdealAligned{}),
                        DomainError);
    }
}

TEST_CASE("selection") {
    auto real = [](double g) {
        LinkRealization r;
        r.snr_linear = g;
        return r;
    };
    const std::vector<LinkRealization> one{real(5)};
    CHECK(select_ris_indoor(one).first == 0);
    const std::vector<LinkRealization> three{real(1), real(3), real(2)};
    CHECK(select_ris_indoor(three).first == 1);
    const std::vector<LinkRealization> tie{real(3), real(3)};
    CHECK(select_ris_indoor(tie).first == 0);
    CHECK_THROWS_AS(select_ris_indoor(std::vector<LinkRealization>{}), DomainError);

    Grid<LinkRealization> g1(1, 1, real(2));
    CHECK(select_ris_outdoor(g1).first == std::pair<std::size_t, std::size_t>{0, 0});
    Grid<LinkRealization> g(2, 2, real(1));
    g(1, 0) = real(9);
    CHECK(select_ris_outdoor(g).first == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK_THROWS_AS(select_ris_outdoor(Grid<LinkRealization>{}), DomainError);
}

TEST_CASE("direct link") {
    CHECK(snr_direct({1.0, 0.4}, PathLossValue::from_db(0), 1, 1) == doctest::Approx(1.0));
    // 30 GHz Street Canyon LOS at 50 m is 97.6208 dB; 5 W over -95 dBm
    const double n0 = std::pow(10.0, -12.5);
    CHECK(snr_direct({1.0, 0.0}, PathLossValue::from_db(97.6207951854496), 5.0, n0) ==
          doctest::Approx(5.0 / (std::pow(10.0, 9.76207951854496) * n0)).epsilon(1e-12));
    const auto h = sample_rician(RicianSpec{0.0}, SeededStream{8, 8}, 1'000'000);
    double mean = 0;
    for (const auto& c : h) {
        mean += snr_direct(c, PathLossValue::from_db(30), 2.0, 0.5);
    }
    mean /= h.size();
    CHECK(std::abs(mean / (2.0 / (1000 * 0.5)) - 1.0) < 0.01);
    CHECK_THROWS_AS(snr_direct({1, 0}, PathLossValue::from_db(0), 0.0, 1), DomainError);
}

TEST_CASE("geometry") {
    ScenarioGeometry g;
    g.positions["S"] = {0, 0, 0};
    g.positions["R1"] = {3, 4, 0};
    g.positions["D"] = {3, 4, 12};
    CHECK(g.source_to_ris(0) == doctest::Approx(5.0));
    CHECK(g.ris_to_destination(0) == doctest::Approx(12.0));
    CHECK(g.source_to_destination() == doctest::Approx(13.0));
    ScenarioGeometry e;
    e.d_sr = {25};
    e.d_rd = {75};
    CHECK(e.source_to_ris(0) == 25);
    CHECK(e.ris_to_destination(0) == 75);
    CHECK(e.ris_count() == 1);
    CHECK_THROWS_AS((void)e.source_to_destination(), DomainError);
}
