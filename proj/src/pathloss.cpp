#include "rislink/pathloss.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "rislink/error.hpp"

namespace rislink {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

bool is_umi_3gpp(PathLossLaw law) {
    return law == PathLossLaw::Umi3gppLos || law == PathLossLaw::Umi3gppNlos;
}

bool is_street_canyon(PathLossLaw law) {
    return law == PathLossLaw::UmiStreetCanyonLos || law == PathLossLaw::UmiStreetCanyonNlos;
}

void require_distance(double d, const char* name) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        std::ostringstream os;
        os << name << " must be a positive distance in meters, got " << d;
        throw DomainError(os.str());
    }
}

} // namespace

const char* to_string(PathLossLaw law) {
    switch (law) {
    case PathLossLaw::RadarRangeRIS: return "radar_range";
    case PathLossLaw::Umi3gppLos: return "umi_3gpp_los";
    case PathLossLaw::Umi3gppNlos: return "umi_3gpp_nlos";
    case PathLossLaw::UmiStreetCanyonLos: return "umi_street_canyon_los";
    case PathLossLaw::UmiStreetCanyonNlos: return "umi_street_canyon_nlos";
    case PathLossLaw::LogDistance: return "log_distance";
    }
    return "unknown";
}

void PathLossSpec::validate() const {
    if (!(carrier_ghz > 0.0) || !std::isfinite(carrier_ghz)) {
        throw DomainError("carrier frequency must be positive, got " + std::to_string(carrier_ghz) + " GHz");
    }
    if (is_umi_3gpp(law) && (carrier_ghz < 2.0 || carrier_ghz > 6.0)) {
        std::ostringstream os;
        os << to_string(law) << " is valid for 2-6 GHz, got " << carrier_ghz << " GHz";
        throw DomainError(os.str());
    }
    if (is_street_canyon(law) && (carrier_ghz < 6.0 || carrier_ghz > 100.0)) {
        std::ostringstream os;
        os << to_string(law) << " is valid for 6-100 GHz, got " << carrier_ghz << " GHz";
        throw DomainError(os.str());
    }
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw DomainError("RIS efficiency must lie in (0, 1], got " + std::to_string(efficiency));
    }
    detail::require_positive(ris_gains.incident, "RIS incident gain");
    detail::require_positive(ris_gains.reflect, "RIS reflect gain");
    if (law == PathLossLaw::LogDistance) {
        detail::require_positive(reference.d0_m, "log-distance reference distance");
    }
}

PathLossValue PathLossValue::from_db(double db) { return {db, std::pow(10.0, db / 10.0)}; }

PathLossValue PathLossValue::from_linear(double linear) {
    detail::require_positive(linear, "linear path loss");
    return {10.0 * std::log10(linear), linear};
}

double wavelength_m(double carrier_ghz) {
    detail::require_positive(carrier_ghz, "carrier frequency");
    return kSpeedOfLight / (carrier_ghz * 1e9);
}

PathLossValue radar_range_ris_loss(const PathLossSpec& spec, double d_sr, double d_rd) {
    detail::require(spec.law == PathLossLaw::RadarRangeRIS, "radar_range_ris_loss needs the radar_range law");
    spec.validate();
    require_distance(d_sr, "d_sr");
    require_distance(d_rd, "d_rd");
    const double ratio = wavelength_m(spec.carrier_ghz) / (4.0 * std::numbers::pi);
    const double ratio2 = ratio * ratio;
    const double gain = ratio2 * ratio2 * spec.ris_gains.incident * spec.ris_gains.reflect * spec.efficiency /
                        (d_sr * d_sr * d_rd * d_rd);
    return PathLossValue::from_linear(1.0 / gain);
}

PathLossValue radar_range_double_loss(const PathLossSpec& spec, double d_sr1, double d_r1r2, double d_r2d) {
    detail::require(spec.law == PathLossLaw::RadarRangeRIS, "radar_range_double_loss needs the radar_range law");
    spec.validate();
    require_distance(d_sr1, "d_sr1");
    require_distance(d_r1r2, "d_r1r2");
    require_distance(d_r2d, "d_r2d");
    const double ratio2 = std::pow(wavelength_m(spec.carrier_ghz) / (4.0 * std::numbers::pi), 2);
    const double per_reflection = spec.ris_gains.incident * spec.ris_gains.reflect * spec.efficiency;
    const double gain = ratio2 * ratio2 * ratio2 * per_reflection * per_reflection /
                        (d_sr1 * d_sr1 * d_r1r2 * d_r1r2 * d_r2d * d_r2d);
    return PathLossValue::from_linear(1.0 / gain);
}

PathLossValue umi_loss(const PathLossSpec& spec, double d) {
    spec.validate();
    detail::require(is_umi_3gpp(spec.law) || is_street_canyon(spec.law),
                    std::string("umi_loss called with law ") + to_string(spec.law));
    require_distance(d, "distance");
    if (d < kUmiMinDistanceM || d > kUmiMaxDistanceM) {
        std::ostringstream os;
        os << to_string(spec.law) << " is valid for " << kUmiMinDistanceM << "-" << kUmiMaxDistanceM
           << " m, got " << d << " m";
        throw DomainError(os.str());
    }
    const double log_d = std::log10(d);
    const double log_f = std::log10(spec.carrier_ghz);
    double db = 0.0;
    switch (spec.law) {
    case PathLossLaw::Umi3gppLos: db = 22.0 * log_d + 28.0 + 20.0 * log_f; break;
    case PathLossLaw::Umi3gppNlos: db = 36.7 * log_d + 22.7 + 26.0 * log_f; break;
    case PathLossLaw::UmiStreetCanyonLos: db = 21.0 * log_d + 32.4 + 20.0 * log_f; break;
    case PathLossLaw::UmiStreetCanyonNlos: db = 31.7 * log_d + 32.4 + 20.0 * log_f; break;
    default: break;
    }
    return PathLossValue::from_db(db);
}

PathLossValue log_distance_loss(const PathLossSpec& spec, double d) {
    detail::require(spec.law == PathLossLaw::LogDistance, "log_distance_loss needs the log_distance law");
    spec.validate();
    require_distance(d, "distance");
    const auto& ref = spec.reference;
    return PathLossValue::from_db(ref.pl0_db + 10.0 * ref.exponent * std::log10(d / ref.d0_m));
}

PathLossValue link_loss(const PathLossSpec& spec, double d) {
    if (spec.law == PathLossLaw::LogDistance) {
        return log_distance_loss(spec, d);
    }
    return umi_loss(spec, d);
}

PathLossValue ris_total_loss(std::span<const PathLossValue> element_losses) {
    detail::require(!element_losses.empty(), "ris_total_loss: at least one element loss is required");
    double amplitude = 0.0;
    for (const auto& loss : element_losses) {
        detail::require_positive(loss.loss_linear, "element loss");
        amplitude += 1.0 / std::sqrt(loss.loss_linear);
    }
    return PathLossValue::from_linear(1.0 / (amplitude * amplitude));
}

PleFit fit_ple(std::span<const LossSample> samples, double d0, FitMode mode) {
    detail::require_positive(d0, "reference distance d0");
    if (samples.size() < 2) {
        throw NumericError("fit_ple: at least two samples are required");
    }
    std::vector<double> x;
    x.reserve(samples.size());
    for (const auto& s : samples) {
        require_distance(s.distance_m, "sample distance");
        x.push_back(10.0 * std::log10(s.distance_m / d0));
    }

    if (mode == FitMode::AnchoredAtReference) {
        const LossSample* anchor = nullptr;
        for (const auto& s : samples) {
            if (std::abs(s.distance_m - d0) <= 1e-9 * d0) {
                anchor = &s;
                break;
            }
        }
        if (anchor == nullptr) {
            throw NumericError("fit_ple: anchored fit needs a sample at d0 = " + std::to_string(d0) + " m");
        }
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            sxy += x[i] * (samples[i].loss_db - anchor->loss_db);
            sxx += x[i] * x[i];
        }
        if (sxx <= 0.0) {
            throw NumericError("fit_ple: all samples sit at the reference distance");
        }
        return {sxy / sxx, anchor->loss_db};
    }

    const double n = static_cast<double>(samples.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        mean_x += x[i];
        mean_y += samples[i].loss_db;
    }
    mean_x /= n;
    mean_y /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        sxy += (x[i] - mean_x) * (samples[i].loss_db - mean_y);
        sxx += (x[i] - mean_x) * (x[i] - mean_x);
    }
    if (!(sxx > 1e-12 * n)) {
        throw NumericError("fit_ple: samples need at least two distinct distances");
    }
    const double slope = sxy / sxx;
    return {slope, mean_y - slope * mean_x};
}

double received_power_through_element(double p_t_w, TerminalGains gains, double gamma_mag,
                                      const PathLossValue& pl_sr, const PathLossValue& pl_rd) {
    detail::require_positive(p_t_w, "transmit power");
    detail::require_positive(gains.transmit, "transmit antenna gain");
    detail::require_positive(gains.receive, "receive antenna gain");
    detail::require_positive(gamma_mag, "|Gamma|");
    detail::require_positive(pl_sr.loss_linear, "PL(d_sr)");
    detail::require_positive(pl_rd.loss_linear, "PL(d_rd)");
    return p_t_w * gains.transmit * gamma_mag * gains.receive / (pl_sr.loss_linear * pl_rd.loss_linear);
}

double coherent_received_power(std::span<const double> per_element_power_w) {
    double amplitude = 0.0;
    for (double p : per_element_power_w) {
        detail::require(p >= 0.0, "per-element power must be >= 0");
        amplitude += std::sqrt(p);
    }
    return amplitude * amplitude;
}

} // namespace rislink
