#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "rislink/random.hpp"

namespace rislink {

/// Small-scale Rician fading with unit second moment. K = 0 is Rayleigh.
struct RicianSpec {
    double k_factor = 0.0; ///< linear LOS-to-scatter power ratio

    static RicianSpec from_db(double k_db);
    /// Throws DomainError unless 0 <= K < inf.
    void validate() const;
};

/// Wraps an angle to [-pi, pi).
double wrap_phase(double radians);

/// A channel coefficient in the polar form h = amplitude * exp(-j * phase).
/// The minus sign follows the usual RIS convention, so that aligning an
/// element means applying phi = theta_sr + theta_rd.
struct ComplexCoefficient {
    double amplitude = 0.0;
    double phase = 0.0; ///< radians in [-pi, pi)

    static ComplexCoefficient from_complex(std::complex<double> h);
    [[nodiscard]] std::complex<double> value() const;
};

/// Draws h = sqrt(K/(1+K)) * 1 + sqrt(1/(1+K)) * CN(0, 1).
/// The LOS term is fixed to 1; any other fixed phase is absorbed by the RIS.
class RicianSampler {
public:
    explicit RicianSampler(const RicianSpec& spec);

    std::complex<double> draw(RandomSource& rng) const {
        return {los_ + scatter_ * rng.normal(), scatter_ * rng.normal()};
    }

    double draw_amplitude(RandomSource& rng) const {
        const double re = los_ + scatter_ * rng.normal();
        const double im = scatter_ * rng.normal();
        return std::sqrt(re * re + im * im);
    }

private:
    double los_;
    double scatter_; ///< per-dimension standard deviation
};

std::vector<ComplexCoefficient> sample_rician(const RicianSpec& spec, const SeededStream& stream,
                                              std::size_t count);

/// Which argument the Laguerre term of the amplitude mean is evaluated at.
/// SquaredRatio uses -K^2/(K+1); StandardRician uses -K, the exact Rician mean.
enum class LaguerrePolicy { SquaredRatio, StandardRician };

inline constexpr LaguerrePolicy kDefaultLaguerrePolicy = LaguerrePolicy::StandardRician;

double laguerre_argument(double k_factor, LaguerrePolicy policy);

struct AmplitudeMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of |h|: mean = sqrt(pi / (4 (K+1))) L_{1/2}(arg),
/// variance = 1 - mean^2.
AmplitudeMoments rician_amplitude_moments(const RicianSpec& spec,
                                          LaguerrePolicy policy = kDefaultLaguerrePolicy);

} // namespace rislink
