#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include "rislink/error.hpp"
#include "rislink/modulation.hpp"
#include "rislink/random.hpp"

using namespace rislink;

namespace {

std::vector<ModulationScheme> all_schemes() {
    return {{ModulationFamily::PSK, 2},  {ModulationFamily::PSK, 4},  {ModulationFamily::PSK, 8},
            {ModulationFamily::PSK, 16}, {ModulationFamily::QAM, 4},  {ModulationFamily::QAM, 16},
            {ModulationFamily::QAM, 64}, {ModulationFamily::QAM, 256}};
}

} // namespace

TEST_CASE("gray code") {
    for (std::uint32_t i = 0; i < 1024; ++i) {
        REQUIRE(gray_decode(gray_encode(i)) == i);
        if (i > 0) {
            REQUIRE(std::popcount(gray_encode(i) ^ gray_encode(i - 1)) == 1);
        }
    }
}

TEST_CASE("constellations have unit average power and Gray neighbours") {
    for (const auto& s : all_schemes()) {
        CAPTURE(s.name());
        const Constellation c(s);
        double p = 0;
        for (auto z : c.points()) {
            p += std::norm(z);
        }
        CHECK(std::abs(p / c.size() - 1.0) < 1e-12);
        // nearest neighbours differ in exactly one bit
        double dmin = 1e9;
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                dmin = std::min(dmin, std::abs(c.point(i) - c.point(j)));
            }
        }
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                if (std::abs(c.point(i) - c.point(j)) < dmin * (1 + 1e-9)) {
                    REQUIRE(std::popcount(static_cast<std::uint32_t>(i ^ j)) == 1);
                }
            }
        }
    }
    CHECK(Constellation(ModulationScheme::bpsk()).point(0) == std::complex<double>(1, 0));
    CHECK(Constellation(ModulationScheme::bpsk()).point(1) == std::complex<double>(-1, 0));
}

TEST_CASE("noiseless round trip") {
    RandomSource r(SeededStream{12, 0});
    for (const auto& s : all_schemes()) {
        std::vector<std::uint8_t> bits(10000 - 10000 % s.bits_per_symbol());
        for (auto& b : bits) {
            b = static_cast<std::uint8_t>(r.bits() & 1);
        }
        CHECK(demodulate(s, modulate(s, bits)) == bits);
    }
}

TEST_CASE("detection is minimum distance") {
    RandomSource r(SeededStream{13, 0});
    for (const auto& s : all_schemes()) {
        const Constellation c(s);
        for (int t = 0; t < 3000; ++t) {
            const std::complex<double> z(2 * r.normal(), 2 * r.normal());
            std::uint32_t best = 0;
            for (std::uint32_t k = 1; k < c.size(); ++k) {
                if (std::abs(z - c.point(k)) < std::abs(z - c.point(best))) {
                    best = k;
                }
            }
            REQUIRE(std::abs(z - c.point(c.detect(z))) <= std::abs(z - c.point(best)) + 1e-12);
        }
    }
}

TEST_CASE("scheme validation") {
    CHECK_THROWS_AS((ModulationScheme{ModulationFamily::PSK, 3}.validate()), DomainError);
    CHECK_THROWS_AS((ModulationScheme{ModulationFamily::QAM, 8}.validate()), DomainError);
    CHECK(ModulationScheme{ModulationFamily::QAM, 16}.name() == "16qam");
    CHECK(ModulationScheme::bpsk().name() == "bpsk");
    const std::vector<std::uint8_t> odd{1, 0, 1};
    CHECK_THROWS_AS(modulate({ModulationFamily::PSK, 4}, odd), DomainError);
}
