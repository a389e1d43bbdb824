#include "rislink/fading.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rislink/error.hpp"
#include "rislink/special_functions.hpp"

namespace rislink {

RicianSpec RicianSpec::from_db(double k_db) {
    RicianSpec spec{std::pow(10.0, k_db / 10.0)};
    spec.validate();
    return spec;
}

void RicianSpec::validate() const {
    if (!(k_factor >= 0.0) || !std::isfinite(k_factor)) {
        throw DomainError("Rician K-factor must be finite and >= 0, got " + std::to_string(k_factor));
    }
}

double wrap_phase(double radians) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(radians + std::numbers::pi, two_pi);
    if (wrapped < 0.0) {
        wrapped += two_pi;
    }
    wrapped -= std::numbers::pi;
    // fmod rounding can land exactly on +pi
    return wrapped >= std::numbers::pi ? -std::numbers::pi : wrapped;
}

ComplexCoefficient ComplexCoefficient::from_complex(std::complex<double> h) {
    return {std::abs(h), wrap_phase(-std::arg(h))};
}

std::complex<double> ComplexCoefficient::value() const { return std::polar(amplitude, -phase); }

RicianSampler::RicianSampler(const RicianSpec& spec) {
    spec.validate();
    los_ = std::sqrt(spec.k_factor / (1.0 + spec.k_factor));
    scatter_ = std::sqrt(0.5 / (1.0 + spec.k_factor));
}

std::vector<ComplexCoefficient> sample_rician(const RicianSpec& spec, const SeededStream& stream,
                                              std::size_t count) {
    detail::require(count >= 1, "sample_rician: count must be >= 1");
    const RicianSampler sampler(spec);
    RandomSource rng(stream);
    std::vector<ComplexCoefficient> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(ComplexCoefficient::from_complex(sampler.draw(rng)));
    }
    return out;
}

double laguerre_argument(double k_factor, LaguerrePolicy policy) {
    switch (policy) {
    case LaguerrePolicy::SquaredRatio:
        return -k_factor * k_factor / (k_factor + 1.0);
    case LaguerrePolicy::StandardRician:
        return -k_factor;
    }
    return -k_factor;
}

AmplitudeMoments rician_amplitude_moments(const RicianSpec& spec, LaguerrePolicy policy) {
    spec.validate();
    const double k = spec.k_factor;
    const double mean = std::sqrt(std::numbers::pi / (4.0 * (k + 1.0))) *
                        special::laguerre_half(laguerre_argument(k, policy));
    return {mean, 1.0 - mean * mean};
}

} // namespace rislink
