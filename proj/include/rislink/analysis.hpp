#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rislink/fading.hpp"
#include "rislink/link.hpp"
#include "rislink/pathloss.hpp"

namespace rislink {

/// Gaussian model of the composite amplitude A, so that gamma = A^2 p_t / N0
/// is non-central chi-square with one degree of freedom.
struct CltAmplitudeModel {
    double mean = 0.0;
    double variance = 0.0;
    Topology topology = Topology::SingleRis;

    void validate() const;
};

/// A = sqrt(P) sum_i alpha_i beta_i over n elements.
CltAmplitudeModel clt_moments_single(std::size_t n, const PathLossValue& pl, const RicianSpec& rician,
                                     LaguerrePolicy policy = kDefaultLaguerrePolicy);

/// Two surfaces reflecting at once. n2 = 0 means the second surface is absent.
CltAmplitudeModel clt_moments_dual(std::size_t n1, std::size_t n2, const PathLossValue& pl1,
                                   const PathLossValue& pl2, const RicianSpec& rician,
                                   LaguerrePolicy policy = kDefaultLaguerrePolicy);

/// Any number of simultaneous surfaces; entries with zero elements are skipped.
CltAmplitudeModel clt_moments_simultaneous(std::span<const std::size_t> n, std::span<const PathLossValue> pl,
                                           const RicianSpec& rician,
                                           LaguerrePolicy policy = kDefaultLaguerrePolicy);

/// A = sqrt(P) sum_ij beta_ij, n^2 single Rician amplitudes.
CltAmplitudeModel clt_moments_double(std::size_t n, const PathLossValue& pl, const RicianSpec& rician,
                                     LaguerrePolicy policy = kDefaultLaguerrePolicy);

/// E[exp(s gamma)] = exp(s rho mu^2 / (1 - 2 s rho sigma^2)) / sqrt(1 - 2 s rho sigma^2).
double mgf(const CltAmplitudeModel& model, double s, double p_t_over_n0);

struct SepRequest {
    int order = 2; ///< M of M-PSK
    std::vector<double> snr_grid_db; ///< p_t / N0
    CltAmplitudeModel model;

    void validate() const;
};

struct SepPoint {
    double snr_db = 0.0;
    double sep = 0.0;
};

/// (1/pi) int_0^{(M-1)pi/M} M_gamma(-sin^2(pi/M) / sin^2 eta) d eta.
std::vector<SepPoint> sep_mpsk(const SepRequest& req);

/// Single-point form of sep_mpsk, rho linear.
double sep_mpsk_at(int order, const CltAmplitudeModel& model, double p_t_over_n0);

/// BPSK bound from the integrand at eta = pi/2: 0.5 M_gamma(-1).
/// `topology` must match the model it was built for.
double sep_upper_bound(const CltAmplitudeModel& model, Topology topology, double p_t_over_n0);

/// log2(1 + gamma).
double achievable_rate(double snr_linear);

/// p_t / N0 in dB at which the BPSK SEP of `model` equals `target`.
double required_snr_db(const CltAmplitudeModel& model, double target, double lo_db = -100.0,
                       double hi_db = 250.0);

/// Where a decreasing curve crosses `target`, interpolating log10(y) linearly in x.
/// Throws NumericError when the curve never brackets the target.
double crossing_db(std::span<const double> x_db, std::span<const double> y, double target);

namespace quadrature {

struct Rule {
    std::vector<double> nodes;   ///< on [-1, 1], ascending
    std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights by Newton iteration on P_n.
const Rule& gauss_legendre(int points);

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
};

/// Panel-wise 64-point Gauss-Legendre. A panel is accepted when the rule on it
/// agrees with the rule on its two halves to rel_tol; otherwise it is bisected.
Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-8,
                 int max_depth = 24);

} // namespace quadrature

} // namespace rislink
