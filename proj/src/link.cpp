#include "rislink/link.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "rislink/error.hpp"

namespace rislink {

namespace {

using cplx = std::complex<double>;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_lengths(std::size_t expected, std::size_t a, std::size_t b, const char* what) {
    if (a != expected || b != expected) {
        throw DomainError(std::string(what) + ": expected " + std::to_string(expected) +
                          " coefficients per hop, got " + std::to_string(a) + " and " + std::to_string(b));
    }
}

void require_powers(double p_t, double n0) {
    detail::require_positive(p_t, "transmit power");
    detail::require_positive(n0, "noise power");
}

LinkRealization finish(std::vector<std::vector<ComplexCoefficient>> hops, double amplitude, double p_t,
                       double n0) {
    return {std::move(hops), amplitude, amplitude * amplitude * p_t / n0};
}

} // namespace

const char* to_string(Topology topology) {
    switch (topology) {
    case Topology::SingleRis: return "single_ris";
    case Topology::DualSimultaneous: return "dual_simultaneous";
    case Topology::DoubleReflected: return "double_reflected";
    case Topology::SelectionIndoor: return "selection_indoor";
    case Topology::SelectionOutdoor: return "selection_outdoor";
    case Topology::DirectOnly: return "direct_only";
    }
    return "unknown";
}

double distance(const Point3& a, const Point3& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

std::size_t ScenarioGeometry::ris_count() const {
    std::size_t from_positions = 0;
    while (positions.contains(ris_name(from_positions))) {
        ++from_positions;
    }
    return std::max({from_positions, d_sr.size(), d_rd.size()});
}

namespace {

double checked(double d, const std::string& what) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw DomainError(what + " must be a positive distance, got " + std::to_string(d));
    }
    return d;
}

std::optional<double> between(const ScenarioGeometry& g, const std::string& a, const std::string& b) {
    const auto ia = g.positions.find(a);
    const auto ib = g.positions.find(b);
    if (ia == g.positions.end() || ib == g.positions.end()) {
        return std::nullopt;
    }
    return distance(ia->second, ib->second);
}

} // namespace

double ScenarioGeometry::source_to_destination() const {
    if (auto d = between(*this, "S", "D")) {
        return checked(*d, "d_SD");
    }
    if (d_sd) {
        return checked(*d_sd, "d_SD");
    }
    throw DomainError("geometry has no S-D distance");
}

double ScenarioGeometry::source_to_ris(std::size_t k) const {
    if (auto d = between(*this, "S", ris_name(k))) {
        return checked(*d, "d_SR" + std::to_string(k + 1));
    }
    if (k < d_sr.size()) {
        return checked(d_sr[k], "d_SR" + std::to_string(k + 1));
    }
    throw DomainError("geometry has no distance from S to " + ris_name(k));
}

double ScenarioGeometry::ris_to_destination(std::size_t k) const {
    if (auto d = between(*this, ris_name(k), "D")) {
        return checked(*d, "d_R" + std::to_string(k + 1) + "D");
    }
    if (k < d_rd.size()) {
        return checked(d_rd[k], "d_R" + std::to_string(k + 1) + "D");
    }
    throw DomainError("geometry has no distance from " + ris_name(k) + " to D");
}

double ScenarioGeometry::ris_to_ris(std::size_t k, std::size_t l) const {
    const std::size_t second = near_source_count + l;
    if (auto d = between(*this, ris_name(k), ris_name(second))) {
        return checked(*d, "d_" + ris_name(k) + ris_name(second));
    }
    if (k < d_rr.size() && l < d_rr[k].size()) {
        return checked(d_rr[k][l], "d_" + ris_name(k) + ris_name(second));
    }
    throw DomainError("geometry has no distance between " + ris_name(k) + " and " + ris_name(second));
}

void RisPanel::validate() const {
    detail::require(element_count >= 1, "RIS panel needs at least one element");
    detail::require(std::isfinite(gamma_mag_db), "RIS reflection magnitude must be finite");
    phase_policy.validate();
}

double RisPanel::gamma_mag() const { return std::pow(10.0, gamma_mag_db / 20.0); }

std::vector<double> align_phases_single(std::span<const ComplexCoefficient> h_sr,
                                        std::span<const ComplexCoefficient> h_rd) {
    require_lengths(h_sr.size(), h_sr.size(), h_rd.size(), "align_phases_single");
    std::vector<double> phases(h_sr.size());
    for (std::size_t i = 0; i < h_sr.size(); ++i) {
        phases[i] = wrap_phase(h_sr[i].phase + h_rd[i].phase);
    }
    return phases;
}

LinkRealization snr_single_ris(const RisPanel& panel, std::span<const ComplexCoefficient> h_sr,
                               std::span<const ComplexCoefficient> h_rd, const PathLossValue& pl,
                               double p_t, double n0, std::span<const double> phases) {
    panel.validate();
    require_powers(p_t, n0);
    require_lengths(panel.element_count, h_sr.size(), h_rd.size(), "snr_single_ris");
    require_lengths(panel.element_count, phases.size(), phases.size(), "snr_single_ris phases");
    cplx sum{0.0, 0.0};
    for (std::size_t i = 0; i < h_sr.size(); ++i) {
        sum += h_sr[i].amplitude * h_rd[i].amplitude *
               std::polar(1.0, phases[i] - h_sr[i].phase - h_rd[i].phase);
    }
    const double amplitude = std::sqrt(pl.gain()) * panel.gamma_mag() * std::abs(sum);
    return finish({{h_sr.begin(), h_sr.end()}, {h_rd.begin(), h_rd.end()}}, amplitude, p_t, n0);
}

LinkRealization snr_simultaneous(std::span<const RisHop> hops, double p_t, double n0) {
    require_powers(p_t, n0);
    double amplitude = 0.0;
    std::vector<std::vector<ComplexCoefficient>> stored;
    for (const auto& hop : hops) {
        detail::require(hop.panel != nullptr, "snr_simultaneous: hop without a panel");
        if (hop.panel->element_count == 0 && hop.h_sr.empty() && hop.h_rd.empty()) {
            continue;
        }
        hop.panel->validate();
        require_lengths(hop.panel->element_count, hop.h_sr.size(), hop.h_rd.size(), "snr_simultaneous");
        double sum = 0.0;
        for (std::size_t i = 0; i < hop.h_sr.size(); ++i) {
            sum += hop.h_sr[i].amplitude * hop.h_rd[i].amplitude;
        }
        amplitude += std::sqrt(hop.pl.gain()) * hop.panel->gamma_mag() * sum;
        stored.emplace_back(hop.h_sr.begin(), hop.h_sr.end());
        stored.emplace_back(hop.h_rd.begin(), hop.h_rd.end());
    }
    return finish(std::move(stored), amplitude, p_t, n0);
}

LinkRealization snr_dual_simultaneous(const RisHop& first, const RisHop& second, double p_t, double n0) {
    const std::array<RisHop, 2> hops{first, second};
    return snr_simultaneous(hops, p_t, n0);
}

LinkRealization snr_double_reflected(const std::pair<RisPanel, RisPanel>& panels,
                                     const Grid<ComplexCoefficient>& h_matrix, const PathLossValue& pl,
                                     double p_t, double n0, const DoubleReflectedMode& mode) {
    panels.first.validate();
    panels.second.validate();
    require_powers(p_t, n0);
    if (h_matrix.rows() != h_matrix.cols()) {
        throw DomainError("snr_double_reflected: inter-surface matrix must be square, got " +
                          std::to_string(h_matrix.rows()) + "x" + std::to_string(h_matrix.cols()));
    }
    if (h_matrix.rows() != panels.first.element_count || h_matrix.cols() != panels.second.element_count) {
        throw DomainError("snr_double_reflected: matrix size does not match the panels");
    }
    const std::size_t n = h_matrix.rows();
    const double magnitude =
        std::visit(Overloaded{
                       [&](const double_mode::IdealAligned&) {
                           double sum = 0.0;
                           for (const auto& h : h_matrix.flat()) {
                               sum += h.amplitude;
                           }
                           return sum;
                       },
                       [&](const double_mode::PerSidePhases& p) {
                           if (p.first.size() != n || p.second.size() != n) {
                               throw DomainError("snr_double_reflected: per-side phase vectors must have N entries");
                           }
                           cplx sum{0.0, 0.0};
                           for (std::size_t i = 0; i < n; ++i) {
                               for (std::size_t j = 0; j < n; ++j) {
                                   const auto& h = h_matrix(i, j);
                                   sum += h.amplitude * std::polar(1.0, p.first[i] + p.second[j] - h.phase);
                               }
                           }
                           return std::abs(sum);
                       },
                   },
                   mode);
    const double amplitude =
        std::sqrt(pl.gain()) * panels.first.gamma_mag() * panels.second.gamma_mag() * magnitude;
    std::vector<std::vector<ComplexCoefficient>> hops{{h_matrix.flat().begin(), h_matrix.flat().end()}};
    return finish(std::move(hops), amplitude, p_t, n0);
}

DoublePhaseSolution optimize_double_phases(const Grid<ComplexCoefficient>& h_matrix, double tolerance,
                                           int max_iterations) {
    const std::size_t rows = h_matrix.rows();
    const std::size_t cols = h_matrix.cols();
    detail::require(rows > 0 && cols > 0, "optimize_double_phases: empty matrix");
    Grid<cplx> h(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            h(i, j) = h_matrix(i, j).value();
        }
    }
    DoublePhaseSolution sol{std::vector<double>(rows, 0.0), std::vector<double>(cols, 0.0), 0.0, 0};
    double previous = -1.0;
    for (int it = 1; it <= max_iterations; ++it) {
        // best phi1 for the current phi2
        for (std::size_t i = 0; i < rows; ++i) {
            cplx c{0.0, 0.0};
            for (std::size_t j = 0; j < cols; ++j) {
                c += h(i, j) * std::polar(1.0, sol.second[j]);
            }
            sol.first[i] = wrap_phase(-std::arg(c));
        }
        // best phi2 for the new phi1
        double amplitude = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            cplx d{0.0, 0.0};
            for (std::size_t i = 0; i < rows; ++i) {
                d += h(i, j) * std::polar(1.0, sol.first[i]);
            }
            sol.second[j] = wrap_phase(-std::arg(d));
            amplitude += std::abs(d);
        }
        sol.amplitude = amplitude;
        sol.iterations = it;
        if (previous > 0.0 && amplitude - previous <= tolerance * previous) {
            break;
        }
        previous = amplitude;
    }
    return sol;
}

std::pair<std::size_t, LinkRealization> select_ris_indoor(std::span<const LinkRealization> candidates) {
    detail::require(!candidates.empty(), "select_ris_indoor: no candidate surfaces");
    std::size_t best = 0;
    for (std::size_t k = 1; k < candidates.size(); ++k) {
        if (candidates[k].snr_linear > candidates[best].snr_linear) {
            best = k;
        }
    }
    return {best, candidates[best]};
}

std::pair<std::pair<std::size_t, std::size_t>, LinkRealization>
select_ris_outdoor(const Grid<LinkRealization>& pair_grid) {
    detail::require(!pair_grid.empty(), "select_ris_outdoor: empty pair grid");
    std::pair<std::size_t, std::size_t> best{0, 0};
    for (std::size_t k = 0; k < pair_grid.rows(); ++k) {
        for (std::size_t l = 0; l < pair_grid.cols(); ++l) {
            if (pair_grid(k, l).snr_linear > pair_grid(best.first, best.second).snr_linear) {
                best = {k, l};
            }
        }
    }
    return {best, pair_grid(best.first, best.second)};
}

double snr_direct(const ComplexCoefficient& link, const PathLossValue& pl, double p_t, double n0) {
    require_powers(p_t, n0);
    detail::require_positive(pl.loss_linear, "path loss");
    return link.amplitude * link.amplitude * p_t / (pl.loss_linear * n0);
}

double aligned_amplitude(std::span<const double> a, std::span<const double> b) {
    require_lengths(a.size(), a.size(), b.size(), "aligned_amplitude");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

} // namespace rislink
