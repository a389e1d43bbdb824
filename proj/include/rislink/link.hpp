#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rislink/fading.hpp"
#include "rislink/impairments.hpp"
#include "rislink/pathloss.hpp"

namespace rislink {

/// Row-major dense matrix, just enough for per-element channel grids.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> flat() const { return data_; }
    std::span<T> flat() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

enum class Topology {
    SingleRis,
    DualSimultaneous,
    DoubleReflected,
    SelectionIndoor,
    SelectionOutdoor,
    DirectOnly,
};

const char* to_string(Topology topology);

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Point3&, const Point3&) = default;
};

double distance(const Point3& a, const Point3& b);

/// Node placement for every topology. Nodes are "S", "D" and "R1".."Rk".
/// For the double-reflected and outdoor-selection topologies the first
/// `near_source_count` surfaces sit near S and the rest near D.
/// Coordinates win over explicit distances whenever both are present.
struct ScenarioGeometry {
    Topology topology = Topology::SingleRis;
    std::map<std::string, Point3> positions;

    std::optional<double> d_sd;
    std::vector<double> d_sr;               ///< per RIS
    std::vector<double> d_rd;               ///< per RIS
    std::vector<std::vector<double>> d_rr;  ///< near-S RIS k to near-D RIS l
    std::size_t near_source_count = 1;

    [[nodiscard]] std::size_t ris_count() const;
    [[nodiscard]] double source_to_destination() const;
    [[nodiscard]] double source_to_ris(std::size_t k) const;
    [[nodiscard]] double ris_to_destination(std::size_t k) const;
    /// k indexes the near-S group, l the near-D group (both 0-based).
    [[nodiscard]] double ris_to_ris(std::size_t k, std::size_t l) const;

    static std::string ris_name(std::size_t k) { return "R" + std::to_string(k + 1); }
};

struct RisPanel {
    std::size_t element_count = 1;
    PhasePolicy phase_policy{};
    double gamma_mag_db = 0.0; ///< 0 dB is a lossless reflector

    void validate() const;
    [[nodiscard]] double gamma_mag() const;
};

/// One channel draw through one or more surfaces, after phase control.
struct LinkRealization {
    std::vector<std::vector<ComplexCoefficient>> hops;
    double composite_amplitude = 0.0; ///< A, including the path gain
    double snr_linear = 0.0;          ///< gamma = A^2 p_t / N0
};

/// Phases that cancel both hop phases: phi_i = theta_i + varphi_i, wrapped.
std::vector<double> align_phases_single(std::span<const ComplexCoefficient> h_sr,
                                        std::span<const ComplexCoefficient> h_rd);

/// Instantaneous SNR for one surface with applied phases phi.
LinkRealization snr_single_ris(const RisPanel& panel, std::span<const ComplexCoefficient> h_sr,
                               std::span<const ComplexCoefficient> h_rd, const PathLossValue& pl,
                               double p_t, double n0, std::span<const double> phases);

/// One surface taking part in a simultaneous transmission.
struct RisHop {
    const RisPanel* panel = nullptr;
    std::span<const ComplexCoefficient> h_sr;
    std::span<const ComplexCoefficient> h_rd;
    PathLossValue pl{};
};

/// Maximized SNR with every surface aligned. A hop with no elements is an
/// absent surface and contributes nothing.
LinkRealization snr_simultaneous(std::span<const RisHop> hops, double p_t, double n0);

LinkRealization snr_dual_simultaneous(const RisHop& first, const RisHop& second, double p_t, double n0);

namespace double_mode {
/// phi1_i + phi2_j = varphi_ij for all pairs; only realizable for rank-1 phase
/// matrices but reproduces the closed-form analysis.
struct IdealAligned {};
/// Realizable per-surface phases.
struct PerSidePhases {
    std::vector<double> first;
    std::vector<double> second;
};
} // namespace double_mode

using DoubleReflectedMode = std::variant<double_mode::IdealAligned, double_mode::PerSidePhases>;

/// S -> RIS1 -> RIS2 -> D with deterministic unit LOS outer hops and an N x N
/// inter-surface matrix h_matrix(i, j) = beta_ij exp(-j varphi_ij).
LinkRealization snr_double_reflected(const std::pair<RisPanel, RisPanel>& panels,
                                     const Grid<ComplexCoefficient>& h_matrix, const PathLossValue& pl,
                                     double p_t, double n0, const DoubleReflectedMode& mode);

struct DoublePhaseSolution {
    std::vector<double> first;
    std::vector<double> second;
    double amplitude = 0.0; ///< |sum_ij h_ij e^{j(phi1_i + phi2_j)}|
    int iterations = 0;
};

/// Alternating coordinate ascent on (phi1, phi2) until the relative
/// improvement drops below `tolerance`.
DoublePhaseSolution optimize_double_phases(const Grid<ComplexCoefficient>& h_matrix,
                                           double tolerance = 1e-6, int max_iterations = 1000);

/// argmax over candidates, lowest index on ties.
std::pair<std::size_t, LinkRealization> select_ris_indoor(std::span<const LinkRealization> candidates);

/// argmax over the pair grid, lexicographic (k, l) on ties.
std::pair<std::pair<std::size_t, std::size_t>, LinkRealization>
select_ris_outdoor(const Grid<LinkRealization>& pair_grid);

/// gamma = |h|^2 p_t / (PL N0).
double snr_direct(const ComplexCoefficient& link, const PathLossValue& pl, double p_t, double n0);

/// sum_i a_i b_i, the aligned single-surface amplitude without path gain.
double aligned_amplitude(std::span<const double> a, std::span<const double> b);

} // namespace rislink
