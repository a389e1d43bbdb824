#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rislink/random.hpp"

namespace rislink {

namespace phase {

struct Ideal {};

/// Hardware that only realizes phases in [min_deg, max_deg], with a
/// reflection magnitude of gamma_mag_db applied to every element.
struct RangeLimited {
    double min_deg = -180.0;
    double max_deg = 180.0;
    double gamma_mag_db = 0.0;
};

/// Nearest of 2^bits uniformly spaced levels (one level at 0 rad).
struct Quantized {
    int bits = 1;
};

/// Zero-mean von Mises phase-estimation error with concentration kappa.
struct VonMisesError {
    double kappa = 0.0;
};

using Stage = std::variant<Ideal, RangeLimited, Quantized, VonMisesError>;

} // namespace phase

/// Ordered list of phase stages applied left to right, e.g. RangeLimited
/// followed by VonMisesError. An empty list behaves as Ideal.
struct PhasePolicy {
    std::vector<phase::Stage> stages;

    static PhasePolicy ideal() { return {}; }
    void validate() const;
    [[nodiscard]] std::string describe() const;
};

struct PolicyOutput {
    std::vector<double> phases;
    double gamma_mag = 1.0; ///< linear amplitude factor
};

PolicyOutput apply_policy(const PhasePolicy& policy, std::span<const double> target_phases,
                          const SeededStream& stream);

/// In-place variant for hot loops. Returns the linear amplitude factor.
double apply_policy_inplace(const PhasePolicy& policy, std::span<double> phases, RandomSource& rng);

/// Maps a phase outside [min, max] to whichever endpoint is circularly closer.
double clamp_to_range(double phase_rad, double min_rad, double max_rad);

double quantize_phase(double phase_rad, int bits);

/// Best-Fisher rejection sampler for the zero-mean von Mises law on [-pi, pi).
double draw_von_mises(double kappa, RandomSource& rng);

std::vector<double> sample_von_mises(double kappa, const SeededStream& stream, std::size_t count);

} // namespace rislink
