#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rislink/analysis.hpp"
#include "rislink/fading.hpp"
#include "rislink/impairments.hpp"
#include "rislink/link.hpp"
#include "rislink/modulation.hpp"
#include "rislink/montecarlo.hpp"
#include "rislink/pathloss.hpp"

namespace rislink {

struct Diagnostic {
    int line = 0;   ///< 1-based, 0 when the problem is not tied to a line
    int column = 0; ///< 1-based
    std::string section;
    std::string key;
    std::string message;

    [[nodiscard]] std::string format() const;
};

/// Thrown by parse_scenario; carries every problem found, not just the first.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<Diagnostic> diagnostics);
    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

enum class ExperimentKind { Ber, Rate, Sep };

struct Sweep {
    std::string node;   ///< node whose coordinate moves, e.g. "D"
    char axis = 'x';
    double start_m = 0.0;
    double stop_m = 0.0;
    double step_m = 1.0;

    [[nodiscard]] std::vector<double> values() const;
};

struct Experiment {
    ExperimentKind kind = ExperimentKind::Ber;
    ModulationScheme modulation = ModulationScheme::bpsk();
    double snr_start_db = 0.0;
    double snr_stop_db = 10.0;
    double snr_step_db = 1.0;
    std::uint64_t min_errors = 200;
    std::uint64_t max_trials = 100'000'000;
    std::uint64_t realizations = 10'000;
    std::optional<Sweep> sweep;

    [[nodiscard]] std::vector<double> snr_grid_db() const;
};

/// Parsed, validated scenario document.
struct ScenarioFile {
    ScenarioGeometry geometry;
    std::vector<RisPanel> panels;

    double k_factor = 10.0;          ///< linear, used on every faded hop
    bool fading = true;
    double p_t_w = 1.0;
    double n0_w = 1.0;

    PathLossSpec pathloss;           ///< law for the RIS hops
    std::optional<PathLossLaw> direct_law; ///< law for S-D in direct_only scenarios
    bool realizable_phases = false;  ///< double reflection: per-side phases

    PhasePolicy policy;              ///< applied to every panel
    Experiment experiment;
};

/// Parses and validates. Throws ScenarioError listing every diagnostic.
ScenarioFile parse_scenario(std::string_view text);

/// Same, without throwing: an empty diagnostic list means success.
std::vector<Diagnostic> check_scenario(std::string_view text, ScenarioFile* out = nullptr);

/// Canonical text form: fixed section and key order, SI-style units,
/// shortest round-trip numbers. parse(serialize(s)) reproduces s exactly.
std::string serialize_scenario(const ScenarioFile& scenario);

/// 64-bit FNV-1a of the canonical form, as 16 hex digits.
std::string scenario_hash(const ScenarioFile& scenario);

std::string fnv1a_hex(std::string_view text);

/// Per-element loss of surface k (or of the pair for the double topologies).
PathLossValue ris_hop_loss(const ScenarioFile& s, const ScenarioGeometry& g, std::size_t k);
PathLossValue double_hop_loss(const ScenarioFile& s, const ScenarioGeometry& g, std::size_t k, std::size_t l);

/// Channel model of the scenario at geometry g.
ChannelModel build_channel(const ScenarioFile& s, const ScenarioGeometry& g);

TrialPlan build_trial_plan(const ScenarioFile& s, std::uint64_t seed, int workers);
RatePlan build_rate_plan(const ScenarioFile& s, std::uint64_t seed, int workers);

/// Gaussian amplitude model for the closed-form SEP, when the topology has one.
std::optional<CltAmplitudeModel> clt_model(const ScenarioFile& s, const ScenarioGeometry& g);

/// Geometries along the sweep (one entry, parameter 0, without a sweep).
std::vector<std::pair<double, ScenarioGeometry>> sweep_geometries(const ScenarioFile& s);

/// Number formatting shared with the CSV writer.
std::string format_number(double v);

} // namespace rislink
