#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rislink/analysis.hpp"
#include "rislink/montecarlo.hpp"
#include "rislink/pathloss.hpp"
#include "rislink/result_table.hpp"

namespace rislink {

struct PresetInfo {
    const char* name;
    const char* description;
};

std::span<const PresetInfo> preset_catalog();
bool is_preset(std::string_view name);

struct PresetOutput {
    std::string preset;
    std::vector<ResultTable> tables; ///< one per curve, file name = table name + ".csv"
    std::map<std::string, std::string> parameters;
};

/// Computes every table of a preset. Throws DomainError for an unknown name.
PresetOutput compute_preset(const std::string& name, std::uint64_t seed, int workers = 1);

/// compute_preset, then writes the CSVs and <name>_manifest.json into out_dir.
Manifest run_preset(const std::string& name, std::uint64_t seed, const std::filesystem::path& out_dir,
                    int workers = 1);

struct ScenarioFile;

/// Runs the experiment of a parsed scenario file. Tables are named after `name`.
std::vector<ResultTable> run_scenario(const ScenarioFile& scenario, const std::string& name, std::uint64_t seed,
                                      int workers = 1);

namespace presets {

inline constexpr double kKFactorDb = 10.0;
inline constexpr double kElementGainDbi = 5.0;
inline constexpr double kTransmitPowerW = 5.0;
inline constexpr double kNoiseDbm = -95.0;
inline constexpr double kRisHeightM = 10.0; ///< d_V, RIS offset from the S-D line

double noise_w();

/// 3GPP UMi below 6 GHz, Street Canyon above.
PathLossLaw los_law(double carrier_ghz);
PathLossLaw nlos_law(double carrier_ghz);
double umi_db(PathLossLaw law, double carrier_ghz, double d);

/// Aligned RIS path with the surface at d_H = fraction * d_SD and d_V above
/// the S-D line, each sub-hop following the LOS law.
double ris_path_db(double carrier_ghz, double d_sd, double fraction, std::size_t elements);

/// RIS path and NLOS direct path added coherently in amplitude.
double assisted_path_db(double carrier_ghz, double d_sd, double fraction, std::size_t elements);

std::vector<double> table_distance_grid(); ///< d_SD = 10:10:250 m

struct Table1Row {
    double carrier_ghz = 0.0;
    std::string channel; ///< nlos, los, ris_midway, ris_near_terminal
    PleFit fit;
};
inline constexpr double kMidwayFraction = 0.5;
inline constexpr double kNearTerminalFraction = 0.3;
std::vector<Table1Row> table1_rows();

struct Table2Row {
    double carrier_ghz = 0.0;
    std::size_t elements = 0;
    double delta_pl_db = 0.0;
    PleFit fit;
};
inline constexpr double kAssistedFraction = 0.2;
std::vector<Table2Row> table2_rows();

/// Single RIS at 2.4 GHz, d_SR = 25 m, d_RD = 75 m, BPSK.
PathLossValue fig7_loss();
ChannelModel fig7_channel(std::size_t elements);
CltAmplitudeModel fig7_model(std::size_t elements);

/// 1 dB grid from where the BPSK error rate of `models` is lo_target down to hi_target.
std::vector<double> ber_grid(std::span<const CltAmplitudeModel> models, double lo_target = 0.3,
                             double hi_target = 1e-6, double extra_high_db = 0.0);

TrialPlan fig7_plan(std::size_t elements, std::uint64_t seed, std::uint64_t max_trials, int workers);
TrialPlan fig10_plan(std::size_t elements, const PhasePolicy& policy, std::vector<double> grid,
                     std::uint64_t seed, std::uint64_t max_trials, int workers, std::string_view curve);
PhasePolicy fig10a_policy(); ///< phases in [-150, 140] deg, -1 dB magnitude
std::vector<double> fig10a_grid(std::size_t elements);
std::vector<double> fig10b_grid(std::size_t elements);
RatePlan fig10b_snr_plan(std::size_t elements, std::span<const double> kappas, std::uint64_t seed, int workers);

std::vector<double> fig9_positions_indoor();
std::vector<double> fig9_positions_outdoor();
RatePlan fig9a_plan(std::size_t elements, std::uint64_t seed, int workers);
RatePlan fig9b_plan(std::size_t elements, std::uint64_t seed, int workers);

std::uint64_t stream_id(std::string_view curve);

} // namespace presets

} // namespace rislink
