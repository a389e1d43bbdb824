#pragma once

#include <span>
#include <utility>
#include <vector>

namespace rislink {

enum class PathLossLaw {
    RadarRangeRIS,       ///< plate-scattering RIS link, loss ~ d_sr^2 d_rd^2
    Umi3gppLos,          ///< 3GPP UMi LOS, 2-6 GHz
    Umi3gppNlos,         ///< 3GPP UMi NLOS, 2-6 GHz
    UmiStreetCanyonLos,  ///< 5G UMi Street Canyon LOS, 6-100 GHz
    UmiStreetCanyonNlos, ///< 5G UMi Street Canyon NLOS, 6-100 GHz
    LogDistance,
};

const char* to_string(PathLossLaw law);

struct RisGains {
    double incident = 1.0; ///< G_e^i, linear
    double reflect = 1.0;  ///< G_e^r, linear
};

struct LogDistanceReference {
    double d0_m = 10.0;
    double pl0_db = 0.0;
    double exponent = 2.0;
};

struct PathLossSpec {
    PathLossLaw law = PathLossLaw::RadarRangeRIS;
    double carrier_ghz = 2.4;
    RisGains ris_gains{};       ///< RadarRangeRIS only
    double efficiency = 1.0;    ///< epsilon_p in (0, 1], RadarRangeRIS only
    LogDistanceReference reference{}; ///< LogDistance only

    /// Band, gain and efficiency checks; throws DomainError naming the bound.
    void validate() const;
};

/// Attenuation, stored as a positive loss. All combining happens on loss_linear.
struct PathLossValue {
    double loss_db = 0.0;
    double loss_linear = 1.0;

    static PathLossValue from_db(double db);
    static PathLossValue from_linear(double linear);

    /// Linear power gain 1 / loss_linear.
    [[nodiscard]] double gain() const { return 1.0 / loss_linear; }
};

/// Distance range over which the UMi laws are evaluated.
inline constexpr double kUmiMinDistanceM = 10.0;
inline constexpr double kUmiMaxDistanceM = 2000.0;

double wavelength_m(double carrier_ghz);

/// Radar-range (plate scattering) loss of one RIS element:
/// [ (lambda/4pi)^4 G_i G_r eps / (d_sr^2 d_rd^2) ]^-1.
PathLossValue radar_range_ris_loss(const PathLossSpec& spec, double d_sr, double d_rd);

/// Radar-range loss applied once per reflection for an S -> RIS1 -> RIS2 -> D
/// cascade: [ (lambda/4pi)^6 (G_i G_r eps)^2 / (d_1^2 d_2^2 d_3^2) ]^-1.
PathLossValue radar_range_double_loss(const PathLossSpec& spec, double d_sr1, double d_r1r2,
                                      double d_r2d);

/// Empirical UMi laws (3GPP below 6 GHz, Street Canyon above).
PathLossValue umi_loss(const PathLossSpec& spec, double d);

/// pl0 + 10 n log10(d / d0).
PathLossValue log_distance_loss(const PathLossSpec& spec, double d);

/// Dispatches the single-distance laws (UMi family, LogDistance).
PathLossValue link_loss(const PathLossSpec& spec, double d);

/// Coherent combination of aligned paths: ( sum_i loss_i^{-1/2} )^{-2}.
PathLossValue ris_total_loss(std::span<const PathLossValue> element_losses);

enum class FitMode {
    FreeIntercept,       ///< ordinary least squares for (n, pl0)
    AnchoredAtReference, ///< pl0 taken from the sample at d0, n by least squares through it
};

struct PleFit {
    double exponent = 0.0;
    double pl0_db = 0.0;
};

struct LossSample {
    double distance_m = 0.0;
    double loss_db = 0.0;
};

/// Fits loss_db = pl0 + 10 n log10(d / d0). AnchoredAtReference requires a
/// sample at exactly d0.
PleFit fit_ple(std::span<const LossSample> samples, double d0, FitMode mode = FitMode::FreeIntercept);

struct TerminalGains {
    double transmit = 1.0;
    double receive = 1.0;
};

/// p_t G_T |Gamma| G_R / (PL(d_sr) PL(d_rd)).
double received_power_through_element(double p_t_w, TerminalGains gains, double gamma_mag,
                                      const PathLossValue& pl_sr, const PathLossValue& pl_rd);

/// Aligned-phase sum over elements: (sum_i sqrt(p_i))^2.
double coherent_received_power(std::span<const double> per_element_power_w);

} // namespace rislink
