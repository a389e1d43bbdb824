#include "rislink/impairments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rislink/error.hpp"
#include "rislink/fading.hpp"

namespace rislink {

namespace {

constexpr double kPi = std::numbers::pi;

double deg_to_rad(double deg) { return deg * kPi / 180.0; }

double circular_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace

void PhasePolicy::validate() const {
    for (const auto& stage : stages) {
        std::visit(Overloaded{
                       [](const phase::Ideal&) {},
                       [](const phase::RangeLimited& r) {
                           if (!(r.min_deg >= -180.0 && r.max_deg <= 180.0 && r.min_deg < r.max_deg)) {
                               throw DomainError("phase range must satisfy -180 <= min < max <= 180 deg");
                           }
                           if (!std::isfinite(r.gamma_mag_db)) {
                               throw DomainError("reflection magnitude must be finite");
                           }
                       },
                       [](const phase::Quantized& q) {
                           if (q.bits < 1 || q.bits > 16) {
                               throw DomainError("phase quantization needs 1..16 bits, got " +
                                                 std::to_string(q.bits));
                           }
                       },
                       [](const phase::VonMisesError& v) {
                           if (!(v.kappa >= 0.0) || !std::isfinite(v.kappa)) {
                               throw DomainError("von Mises concentration must be finite and >= 0");
                           }
                       },
                   },
                   stage);
    }
}

std::string PhasePolicy::describe() const {
    if (stages.empty()) {
        return "ideal";
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& stage : stages) {
        if (!first) {
            os << '+';
        }
        first = false;
        std::visit(Overloaded{
                       [&](const phase::Ideal&) { os << "ideal"; },
                       [&](const phase::RangeLimited& r) {
                           os << "range(" << r.min_deg << ',' << r.max_deg << ',' << r.gamma_mag_db << "dB)";
                       },
                       [&](const phase::Quantized& q) { os << "quantized(" << q.bits << ')'; },
                       [&](const phase::VonMisesError& v) { os << "vonmises(" << v.kappa << ')'; },
                   },
                   stage);
    }
    return os.str();
}

double clamp_to_range(double phase_rad, double min_rad, double max_rad) {
    const double p = wrap_phase(phase_rad);
    if (p >= min_rad && p <= max_rad) {
        return p;
    }
    return circular_distance(p, min_rad) <= circular_distance(p, max_rad) ? min_rad : max_rad;
}

double quantize_phase(double phase_rad, int bits) {
    const double step = 2.0 * kPi / static_cast<double>(1 << bits);
    return wrap_phase(std::round(wrap_phase(phase_rad) / step) * step);
}

double draw_von_mises(double kappa, RandomSource& rng) {
    if (kappa == 0.0) {
        return -kPi + 2.0 * kPi * rng.uniform();
    }
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    for (;;) {
        const double z = std::cos(kPi * rng.uniform());
        const double f = (1.0 + r * z) / (r + z);
        const double c = kappa * (r - f);
        const double u2 = rng.uniform();
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            const double theta = std::acos(std::clamp(f, -1.0, 1.0));
            return wrap_phase(rng.uniform() < 0.5 ? -theta : theta);
        }
    }
}

std::vector<double> sample_von_mises(double kappa, const SeededStream& stream, std::size_t count) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw DomainError("von Mises concentration must be finite and >= 0");
    }
    detail::require(count >= 1, "sample_von_mises: count must be >= 1");
    RandomSource rng(stream);
    std::vector<double> out(count);
    for (auto& x : out) {
        x = draw_von_mises(kappa, rng);
    }
    return out;
}

double apply_policy_inplace(const PhasePolicy& policy, std::span<double> phases, RandomSource& rng) {
    double gamma = 1.0;
    for (const auto& stage : policy.stages) {
        std::visit(Overloaded{
                       [](const phase::Ideal&) {},
                       [&](const phase::RangeLimited& r) {
                           const double lo = deg_to_rad(r.min_deg);
                           const double hi = deg_to_rad(r.max_deg);
                           for (auto& p : phases) {
                               p = clamp_to_range(p, lo, hi);
                           }
                           gamma *= std::pow(10.0, r.gamma_mag_db / 20.0);
                       },
                       [&](const phase::Quantized& q) {
                           for (auto& p : phases) {
                               p = quantize_phase(p, q.bits);
                           }
                       },
                       [&](const phase::VonMisesError& v) {
                           for (auto& p : phases) {
                               p = wrap_phase(p + draw_von_mises(v.kappa, rng));
                           }
                       },
                   },
                   stage);
    }
    return gamma;
}

PolicyOutput apply_policy(const PhasePolicy& policy, std::span<const double> target_phases,
                          const SeededStream& stream) {
    policy.validate();
    PolicyOutput out{{target_phases.begin(), target_phases.end()}, 1.0};
    RandomSource rng(stream);
    out.gamma_mag = apply_policy_inplace(policy, out.phases, rng);
    return out;
}

} // namespace rislink
