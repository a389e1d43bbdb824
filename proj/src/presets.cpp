#include "rislink/presets.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "rislink/error.hpp"
#include "rislink/scenario.hpp"

namespace rislink {

namespace presets {

namespace {

double gain_lin(double db) { return std::pow(10.0, db / 10.0); }

PathLossSpec radar_spec(double carrier_ghz) {
    PathLossSpec s;
    s.law = PathLossLaw::RadarRangeRIS;
    s.carrier_ghz = carrier_ghz;
    s.ris_gains = {gain_lin(kElementGainDbi), gain_lin(kElementGainDbi)};
    return s;
}

PathLossValue radar(double carrier_ghz, double d_sr, double d_rd) {
    return radar_range_ris_loss(radar_spec(carrier_ghz), d_sr, d_rd);
}

PathLossValue radar(double carrier_ghz, const Point3& s, const Point3& r, const Point3& d) {
    return radar(carrier_ghz, distance(s, r), distance(r, d));
}

RicianSpec k_default() { return RicianSpec::from_db(kKFactorDb); }

channel::SurfaceLink surface(std::size_t n, const PathLossValue& pl, const PhasePolicy& policy = {}) {
    channel::SurfaceLink link;
    link.panel.element_count = n;
    link.panel.phase_policy = policy;
    link.k_sr = k_default();
    link.k_rd = k_default();
    link.pl = pl;
    return link;
}

std::vector<double> range(double start, double stop, double step) {
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
}

double rho(double db) { return std::pow(10.0, db / 10.0); }

PleFit anchored_fit(const std::vector<double>& d, const std::vector<double>& loss_db) {
    std::vector<LossSample> samples;
    for (std::size_t i = 0; i < d.size(); ++i) {
        samples.push_back({d[i], loss_db[i]});
    }
    return fit_ple(samples, d.front(), FitMode::AnchoredAtReference);
}

} // namespace

double noise_w() { return std::pow(10.0, (kNoiseDbm - 30.0) / 10.0); }

PathLossLaw los_law(double carrier_ghz) {
    return carrier_ghz < 6.0 ? PathLossLaw::Umi3gppLos : PathLossLaw::UmiStreetCanyonLos;
}

PathLossLaw nlos_law(double carrier_ghz) {
    return carrier_ghz < 6.0 ? PathLossLaw::Umi3gppNlos : PathLossLaw::UmiStreetCanyonNlos;
}

double umi_db(PathLossLaw law, double carrier_ghz, double d) {
    PathLossSpec s;
    s.law = law;
    s.carrier_ghz = carrier_ghz;
    return link_loss(s, d).loss_db;
}

double ris_path_db(double carrier_ghz, double d_sd, double fraction, std::size_t elements) {
    const auto law = los_law(carrier_ghz);
    const double d_sr = std::hypot(fraction * d_sd, kRisHeightM);
    const double d_rd = std::hypot((1.0 - fraction) * d_sd, kRisHeightM);
    return umi_db(law, carrier_ghz, d_sr) + umi_db(law, carrier_ghz, d_rd) -
           20.0 * std::log10(static_cast<double>(elements));
}

double assisted_path_db(double carrier_ghz, double d_sd, double fraction, std::size_t elements) {
    const std::array<PathLossValue, 2> paths{
        PathLossValue::from_db(ris_path_db(carrier_ghz, d_sd, fraction, elements)),
        PathLossValue::from_db(umi_db(nlos_law(carrier_ghz), carrier_ghz, d_sd))};
    return ris_total_loss(paths).loss_db;
}

std::vector<double> table_distance_grid() { return range(10.0, 250.0, 10.0); }

std::vector<Table1Row> table1_rows() {
    const auto d = table_distance_grid();
    std::vector<Table1Row> rows;
    for (double f : {2.4, 28.0}) {
        auto fit_of = [&](const std::function<double(double)>& loss) {
            std::vector<double> l;
            for (double x : d) {
                l.push_back(loss(x));
            }
            return anchored_fit(d, l);
        };
        rows.push_back({f, "nlos", fit_of([&](double x) { return umi_db(nlos_law(f), f, x); })});
        rows.push_back({f, "los", fit_of([&](double x) { return umi_db(los_law(f), f, x); })});
        rows.push_back({f, "ris_midway", fit_of([&](double x) { return ris_path_db(f, x, kMidwayFraction, 1); })});
        rows.push_back(
            {f, "ris_near_terminal", fit_of([&](double x) { return ris_path_db(f, x, kNearTerminalFraction, 1); })});
    }
    return rows;
}

std::vector<Table2Row> table2_rows() {
    const auto d = table_distance_grid();
    std::vector<Table2Row> rows;
    for (double f : {2.4, 28.0}) {
        for (std::size_t n : {64u, 256u, 1024u}) {
            std::vector<double> l;
            double delta = -1e300;
            for (double x : d) {
                l.push_back(assisted_path_db(f, x, kAssistedFraction, n));
                delta = std::max(delta, umi_db(nlos_law(f), f, x) - l.back());
            }
            rows.push_back({f, n, delta, anchored_fit(d, l)});
        }
    }
    return rows;
}

PathLossValue fig7_loss() { return radar(2.4, 25.0, 75.0); }

ChannelModel fig7_channel(std::size_t elements) { return channel::Simultaneous{{surface(elements, fig7_loss())}}; }

CltAmplitudeModel fig7_model(std::size_t elements) {
    return clt_moments_single(elements, fig7_loss(), k_default());
}

std::vector<double> ber_grid(std::span<const CltAmplitudeModel> models, double lo_target, double hi_target,
                             double extra_high_db) {
    detail::require(!models.empty(), "ber_grid needs at least one model");
    double lo = 1e300;
    double hi = -1e300;
    for (const auto& m : models) {
        lo = std::min(lo, required_snr_db(m, lo_target));
        hi = std::max(hi, required_snr_db(m, hi_target));
    }
    return range(std::floor(lo), std::ceil(hi + extra_high_db), 1.0);
}

std::uint64_t stream_id(std::string_view curve) { return std::stoull(fnv1a_hex(curve), nullptr, 16); }

TrialPlan fig7_plan(std::size_t elements, std::uint64_t seed, std::uint64_t max_trials, int workers) {
    const std::array<CltAmplitudeModel, 1> m{fig7_model(elements)};
    TrialPlan plan;
    plan.channel = fig7_channel(elements);
    plan.snr_grid_db = ber_grid(m);
    plan.max_trials = max_trials;
    plan.seed = seed;
    plan.stream = stream_id("fig7_n" + std::to_string(elements));
    plan.workers = workers;
    return plan;
}

TrialPlan fig10_plan(std::size_t elements, const PhasePolicy& policy, std::vector<double> grid, std::uint64_t seed,
                     std::uint64_t max_trials, int workers, std::string_view curve) {
    TrialPlan plan;
    plan.channel = channel::Simultaneous{{surface(elements, fig7_loss(), policy)}};
    plan.snr_grid_db = std::move(grid);
    plan.max_trials = max_trials;
    plan.seed = seed;
    plan.stream = stream_id(curve);
    plan.workers = workers;
    return plan;
}

PhasePolicy fig10a_policy() { return PhasePolicy{{phase::RangeLimited{-150.0, 140.0, -1.0}}}; }

std::vector<double> fig10a_grid(std::size_t elements) {
    const std::array<CltAmplitudeModel, 1> m{fig7_model(elements)};
    return ber_grid(m, 0.3, 1e-5, 2.0);
}

std::vector<double> fig10b_grid(std::size_t elements) {
    // kappa = 1 costs about 7 dB of array gain
    const std::array<CltAmplitudeModel, 1> m{fig7_model(elements)};
    return ber_grid(m, 0.3, 1e-4, 8.0);
}

RatePlan fig10b_snr_plan(std::size_t elements, std::span<const double> kappas, std::uint64_t seed, int workers) {
    RatePlan plan;
    for (double kappa : kappas) {
        plan.points.push_back(
            {kappa, channel::Simultaneous{{surface(elements, fig7_loss(), PhasePolicy{{phase::VonMisesError{kappa}}})}}});
    }
    plan.p_t_w = kTransmitPowerW;
    plan.n0_w = noise_w();
    plan.seed = seed;
    plan.stream = stream_id("fig10b_mean_snr_n" + std::to_string(elements));
    plan.workers = workers;
    return plan;
}

std::vector<double> fig9_positions_indoor() { return range(0.0, 50.0, 5.0); }
std::vector<double> fig9_positions_outdoor() { return range(0.0, 30.0, 2.5); }

RatePlan fig9a_plan(std::size_t elements, std::uint64_t seed, int workers) {
    const Point3 s{5, 5, 0};
    const std::array<Point3, 3> ris{Point3{0, 35, 10}, Point3{20, 0, 10}, Point3{0, 15, 10}};
    RatePlan plan;
    for (double x : fig9_positions_indoor()) {
        const Point3 d{x, 40, 0};
        channel::SelectIndoor sel;
        for (const auto& r : ris) {
            sel.links.push_back(surface(elements, radar(28.0, s, r, d)));
        }
        plan.points.push_back({x, sel});
    }
    plan.p_t_w = kTransmitPowerW;
    plan.n0_w = noise_w();
    plan.seed = seed;
    plan.stream = stream_id("fig9a_n" + std::to_string(elements));
    plan.workers = workers;
    return plan;
}

RatePlan fig9b_plan(std::size_t elements, std::uint64_t seed, int workers) {
    const Point3 s{0, 0, 0};
    const std::array<Point3, 2> near_s{Point3{0, 15, 0}, Point3{20, 10, 0}};
    const std::array<Point3, 2> near_d{Point3{5, 215, 0}, Point3{25, 220, 0}};
    const auto spec = radar_spec(2.4);
    RatePlan plan;
    for (double x : fig9_positions_outdoor()) {
        const Point3 d{x, 230, 0};
        channel::SelectOutdoor sel{Grid<channel::DoubleReflected>(2, 2)};
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t l = 0; l < 2; ++l) {
                auto& pair = sel.pairs(k, l);
                pair.first.element_count = elements;
                pair.second.element_count = elements;
                pair.fading = k_default();
                pair.pl = radar_range_double_loss(spec, distance(s, near_s[k]), distance(near_s[k], near_d[l]),
                                                  distance(near_d[l], d));
            }
        }
        plan.points.push_back({x, sel});
    }
    plan.p_t_w = kTransmitPowerW;
    plan.n0_w = noise_w();
    plan.seed = seed;
    plan.stream = stream_id("fig9b_n" + std::to_string(elements));
    plan.workers = workers;
    return plan;
}

} // namespace presets

namespace {

using namespace presets;

constexpr std::array<PresetInfo, 13> kCatalog{{
    {"fig2a", "achievable rate vs d_H at 2.4 GHz: direct LOS/NLOS and single RIS"},
    {"fig2b", "achievable rate vs d_H at 28 GHz: direct LOS/NLOS and single RIS"},
    {"fig3", "RIS path loss vs d_SD, midway and near-terminal placement"},
    {"fig4", "multi-RIS SEP, exact and upper bound, indoor and outdoor"},
    {"fig5", "total path loss of the RIS-assisted channel"},
    {"table1", "path loss exponents of direct and RIS channels"},
    {"table2", "path loss reduction and exponent of RIS-assisted channels"},
    {"fig7", "single-RIS BPSK BER, Monte Carlo and analytic"},
    {"fig8", "rate of two simultaneous RISs vs one, indoor 30 GHz"},
    {"fig9a", "indoor RIS selection among three surfaces, 28 GHz"},
    {"fig9b", "outdoor RIS-pair selection, double reflection, 2.4 GHz"},
    {"fig10a", "BER with phase range and magnitude limits"},
    {"fig10b", "BER and mean SNR with von Mises phase errors"},
}};

std::string fmt_grid(const std::vector<double>& g) {
    if (g.empty()) {
        return "";
    }
    const double step = g.size() > 1 ? g[1] - g[0] : 0.0;
    return format_number(g.front()) + ":" + format_number(step) + ":" + format_number(g.back());
}

std::string carrier_label(double f) { return format_number(f) + "ghz"; }

struct Builder {
    PresetOutput& out;

    ResultTable& table(const std::string& name, std::vector<std::string> columns) {
        out.tables.emplace_back(out.preset + "_" + name, std::move(columns));
        return out.tables.back();
    }
    void param(const std::string& key, const std::string& value) { out.parameters[key] = value; }
    void param(const std::string& key, double value) { out.parameters[key] = format_number(value); }
};

void common_params(Builder& b) {
    b.param("k_factor_db", kKFactorDb);
    b.param("element_gain_dbi", kElementGainDbi);
}

void rate_params(Builder& b) {
    b.param("p_t_w", kTransmitPowerW);
    b.param("n0_dbm", kNoiseDbm);
    b.param("realizations", "10000");
}

void fig2(Builder& b, double f, std::uint64_t seed, int workers) {
    const auto d_h = range(10.0, 100.0, 10.0);
    b.param("carrier_ghz", f);
    b.param("d_h_m", fmt_grid(d_h));
    b.param("d_sd", "4 d_h (tracks the sweep)");
    b.param("d_v_m", kRisHeightM);
    b.param("ris_subhop_law", to_string(los_law(f)));
    b.param("k_factor_db", kKFactorDb);
    b.param("nlos_fading", "rayleigh");
    rate_params(b);

    auto run = [&](const std::string& name, const std::function<ChannelModel(double)>& make) {
        RatePlan plan;
        for (double x : d_h) {
            plan.points.push_back({x, make(x)});
        }
        plan.p_t_w = kTransmitPowerW;
        plan.n0_w = noise_w();
        plan.seed = seed;
        plan.stream = stream_id(b.out.preset + "_" + name);
        plan.workers = workers;
        auto& t = b.table(name, {"d_h_m", "rate_bps_hz"});
        for (const auto& e : run_rate(plan)) {
            t.add_row({e.parameter, e.mean_rate});
        }
    };
    run("nlos", [&](double x) {
        return channel::Direct{RicianSpec{0.0}, true, PathLossValue::from_db(umi_db(nlos_law(f), f, 4 * x))};
    });
    run("los", [&](double x) {
        return channel::Direct{k_default(), true, PathLossValue::from_db(umi_db(los_law(f), f, 4 * x))};
    });
    for (std::size_t n : {64u, 256u, 1024u}) {
        run("ris_n" + std::to_string(n), [&](double x) {
            const double loss = umi_db(los_law(f), f, std::hypot(x, kRisHeightM)) +
                                umi_db(los_law(f), f, std::hypot(3 * x, kRisHeightM));
            return channel::Simultaneous{{surface(n, PathLossValue::from_db(loss))}};
        });
    }
}

void fig3(Builder& b) {
    const auto d = table_distance_grid();
    b.param("d_sd_m", fmt_grid(d));
    b.param("d_v_m", kRisHeightM);
    b.param("placements", "midway 0.5, near-terminal 0.2");
    for (double f : {2.4, 28.0}) {
        const auto c = carrier_label(f);
        auto curve = [&](const std::string& name, const std::function<double(double)>& loss) {
            auto& t = b.table(c + "_" + name, {"d_sd_m", "path_loss_db"});
            for (double x : d) {
                t.add_row({x, loss(x)});
            }
        };
        curve("los", [&](double x) { return umi_db(los_law(f), f, x); });
        curve("nlos", [&](double x) { return umi_db(nlos_law(f), f, x); });
        for (std::size_t n : {64u, 256u, 1024u}) {
            const auto ns = std::to_string(n);
            curve("ris_midway_n" + ns, [&](double x) { return ris_path_db(f, x, 0.5, n); });
            curve("ris_near_n" + ns, [&](double x) { return ris_path_db(f, x, 0.2, n); });
        }
    }
}

void fig5(Builder& b) {
    const auto d = table_distance_grid();
    b.param("d_sd_m", fmt_grid(d));
    b.param("d_v_m", kRisHeightM);
    b.param("ris_fraction", kAssistedFraction);
    for (double f : {2.4, 28.0}) {
        const auto c = carrier_label(f);
        auto curve = [&](const std::string& name, const std::function<double(double)>& loss) {
            auto& t = b.table(c + "_" + name, {"d_sd_m", "path_loss_db"});
            for (double x : d) {
                t.add_row({x, loss(x)});
            }
        };
        curve("los", [&](double x) { return umi_db(los_law(f), f, x); });
        curve("nlos", [&](double x) { return umi_db(nlos_law(f), f, x); });
        for (std::size_t n : {64u, 256u, 1024u}) {
            curve("assisted_n" + std::to_string(n),
                  [&](double x) { return assisted_path_db(f, x, kAssistedFraction, n); });
        }
    }
}

void table1(Builder& b) {
    b.param("d_sd_m", fmt_grid(table_distance_grid()));
    b.param("fit", "least squares, intercept anchored at d0 = 10 m");
    b.param("midway_fraction", kMidwayFraction);
    b.param("near_terminal_fraction", kNearTerminalFraction);
    auto& t = b.table("ple", {"carrier_ghz", "channel", "ple", "pl0_db"});
    for (const auto& r : table1_rows()) {
        t.add_row({r.carrier_ghz, r.channel, r.fit.exponent, r.fit.pl0_db});
    }
}

void table2(Builder& b) {
    b.param("d_sd_m", fmt_grid(table_distance_grid()));
    b.param("fit", "least squares, intercept anchored at d0 = 10 m");
    b.param("ris_fraction", kAssistedFraction);
    b.param("delta_pl", "maximum over d_sd of nlos minus assisted loss");
    auto& t = b.table("assisted", {"carrier_ghz", "elements", "delta_pl_db", "ple", "pl0_db"});
    for (const auto& r : table2_rows()) {
        t.add_row({r.carrier_ghz, static_cast<std::int64_t>(r.elements), r.delta_pl_db, r.fit.exponent, r.fit.pl0_db});
    }
}

double los_reference_snr_db(double loss_db, double target) {
    const double x = boost::math::erfc_inv(2.0 * target);
    return loss_db + 10.0 * std::log10(x * x);
}

void fig4_scenario(Builder& b, const std::string& label, double los_loss_db,
                   const std::vector<std::pair<std::string, CltAmplitudeModel>>& curves) {
    double lo = los_reference_snr_db(los_loss_db, 0.3);
    double hi = los_reference_snr_db(los_loss_db, 1e-6);
    for (const auto& [name, m] : curves) {
        lo = std::min(lo, required_snr_db(m, 0.3));
        hi = std::max(hi, required_snr_db(m, 1e-6));
    }
    const auto grid = range(std::floor(lo), std::ceil(hi), 1.0);
    b.param(label + "_snr_grid_db", fmt_grid(grid));
    auto& ref = b.table(label + "_los_reference", {"p_t_over_n0_db", "sep"});
    for (double s : grid) {
        ref.add_row({s, 0.5 * std::erfc(std::sqrt(rho(s - los_loss_db)))});
    }
    for (const auto& [name, m] : curves) {
        auto& t = b.table(label + "_" + name, {"p_t_over_n0_db", "sep", "sep_bound"});
        for (double s : grid) {
            t.add_row({s, sep_mpsk_at(2, m, rho(s)), sep_upper_bound(m, m.topology, rho(s))});
        }
    }
}

void fig4(Builder& b) {
    common_params(b);
    b.param("modulation", "bpsk");
    b.param("indoor", "30 GHz; dual RIS d_sr/d_rd 10/40 and 15/35 m; single 20/40 m; LOS reference 50 m");
    b.param("outdoor", "2.4 GHz; double RIS 20/200/20 m; single 75/165 m; LOS reference 245 m");
    const auto k = k_default();
    std::vector<std::pair<std::string, CltAmplitudeModel>> indoor;
    std::vector<std::pair<std::string, CltAmplitudeModel>> outdoor;
    const auto spec24 = radar_spec(2.4);
    for (std::size_t n : {64u, 256u}) {
        const auto ns = std::to_string(n);
        indoor.emplace_back("dual_n" + ns, clt_moments_dual(n, n, radar(30.0, 10, 40), radar(30.0, 15, 35), k));
        indoor.emplace_back("single_n" + ns, clt_moments_single(n, radar(30.0, 20, 40), k));
        outdoor.emplace_back("double_n" + ns,
                             clt_moments_double(n, radar_range_double_loss(spec24, 20, 200, 20), k));
        outdoor.emplace_back("single_n" + ns, clt_moments_single(n, radar(2.4, 75, 165), k));
    }
    fig4_scenario(b, "indoor", umi_db(PathLossLaw::UmiStreetCanyonLos, 30.0, 50.0), indoor);
    fig4_scenario(b, "outdoor", umi_db(PathLossLaw::Umi3gppLos, 2.4, 245.0), outdoor);
}

void ber_table(Builder& b, const std::string& name, const std::vector<BerEstimate>& est,
               const CltAmplitudeModel* analytic) {
    std::vector<std::string> cols{"p_t_over_n0_db", "trials", "errors", "ber", "ci95_low", "ci95_high"};
    if (analytic) {
        cols.emplace_back("analytic_ber");
        cols.emplace_back("analytic_bound");
    }
    auto& t = b.table(name, cols);
    for (const auto& e : est) {
        std::vector<Cell> row{e.snr_db,   static_cast<std::int64_t>(e.trials), static_cast<std::int64_t>(e.errors),
                              e.ber,      e.ci95_low,                          e.ci95_high};
        if (analytic) {
            row.emplace_back(sep_mpsk_at(2, *analytic, rho(e.snr_db)));
            row.emplace_back(sep_upper_bound(*analytic, analytic->topology, rho(e.snr_db)));
        }
        t.add_row(std::move(row));
    }
}

void fig7(Builder& b, std::uint64_t seed, int workers) {
    constexpr std::uint64_t kMaxTrials = 1'000'000;
    common_params(b);
    b.param("geometry", "2.4 GHz, d_sr 25 m, d_rd 75 m");
    b.param("max_trials", "1000000");
    b.param("min_errors", "200");
    for (std::size_t n : {64u, 128u, 256u}) {
        const auto plan = fig7_plan(n, seed, kMaxTrials, workers);
        const auto model = fig7_model(n);
        b.param("snr_grid_db_n" + std::to_string(n), fmt_grid(plan.snr_grid_db));
        ber_table(b, "n" + std::to_string(n), run_ber(plan), &model);
    }
}

void fig8(Builder& b, std::uint64_t seed, int workers) {
    common_params(b);
    rate_params(b);
    b.param("carrier_ghz", 30.0);
    b.param("positions", "S (5,5,0); R1 (20,0,10); R2 (0,25,10); D (d_x,40,0)");
    const auto xs = fig9_positions_indoor();
    b.param("d_x_m", fmt_grid(xs));
    const Point3 s{5, 5, 0};
    const Point3 r1{20, 0, 10};
    const Point3 r2{0, 25, 10};
    for (std::size_t n : {64u, 256u}) {
        RatePlan plan;
        for (double x : xs) {
            const Point3 d{x, 40, 0};
            plan.points.push_back(
                {x, channel::Simultaneous{{surface(n, radar(30.0, s, r1, d)), surface(n, radar(30.0, s, r2, d))}}});
        }
        plan.p_t_w = kTransmitPowerW;
        plan.n0_w = noise_w();
        plan.seed = seed;
        plan.stream = stream_id("fig8_n" + std::to_string(n));
        plan.workers = workers;
        auto& t = b.table("n" + std::to_string(n), {"d_x_m", "rate_dual", "rate_single_ris1"});
        for (const auto& e : run_rate(plan)) {
            t.add_row({e.parameter, e.mean_rate, e.candidate_rates.at(0)});
        }
    }
}

void fig9a(Builder& b, std::uint64_t seed, int workers) {
    common_params(b);
    rate_params(b);
    b.param("carrier_ghz", 28.0);
    b.param("positions", "S (5,5,0); R1 (0,35,10); R2 (20,0,10); R3 (0,15,10); D (d_x,40,0)");
    b.param("d_x_m", fmt_grid(fig9_positions_indoor()));
    for (std::size_t n : {64u, 128u}) {
        auto& t = b.table("n" + std::to_string(n), {"d_x_m", "rate_selected", "rate_ris1", "rate_ris2", "rate_ris3"});
        for (const auto& e : run_rate(fig9a_plan(n, seed, workers))) {
            t.add_row({e.parameter, e.mean_rate, e.candidate_rates.at(0), e.candidate_rates.at(1),
                       e.candidate_rates.at(2)});
        }
    }
}

void fig9b(Builder& b, std::uint64_t seed, int workers) {
    common_params(b);
    rate_params(b);
    b.param("carrier_ghz", 2.4);
    b.param("positions", "S (0,0); R1 (0,15); R2 (20,10); R3 (5,215); R4 (25,220); D (d_x,230)");
    b.param("d_x_m", fmt_grid(fig9_positions_outdoor()));
    b.param("phases", "aligned");
    for (std::size_t n : {16u, 32u}) {
        auto& t = b.table("n" + std::to_string(n),
                          {"d_x_m", "rate_selected", "rate_r1_r3", "rate_r1_r4", "rate_r2_r3", "rate_r2_r4"});
        for (const auto& e : run_rate(fig9b_plan(n, seed, workers))) {
            t.add_row({e.parameter, e.mean_rate, e.candidate_rates.at(0), e.candidate_rates.at(1),
                       e.candidate_rates.at(2), e.candidate_rates.at(3)});
        }
    }
}

void fig10a(Builder& b, std::uint64_t seed, int workers) {
    constexpr std::uint64_t kMaxTrials = 500'000;
    common_params(b);
    b.param("geometry", "2.4 GHz, d_sr 25 m, d_rd 75 m");
    b.param("impaired_policy", fig10a_policy().describe());
    b.param("max_trials", "500000");
    for (std::size_t n : {64u, 128u}) {
        const auto ns = std::to_string(n);
        const auto grid = fig10a_grid(n);
        b.param("snr_grid_db_n" + ns, fmt_grid(grid));
        const auto model = fig7_model(n);
        ber_table(b, "ideal_n" + ns,
                  run_ber(fig10_plan(n, PhasePolicy::ideal(), grid, seed, kMaxTrials, workers, "fig10a_ideal_n" + ns)),
                  &model);
        ber_table(b, "impaired_n" + ns,
                  run_ber(fig10_plan(n, fig10a_policy(), grid, seed, kMaxTrials, workers, "fig10a_impaired_n" + ns)),
                  nullptr);
    }
}

void fig10b(Builder& b, std::uint64_t seed, int workers) {
    constexpr std::uint64_t kMaxTrials = 100'000;
    constexpr std::array<double, 4> kKappas{1.0, 5.0, 20.0, 100.0};
    constexpr std::size_t kBerElements = 64;
    common_params(b);
    b.param("geometry", "2.4 GHz, d_sr 25 m, d_rd 75 m");
    b.param("kappas", "1, 5, 20, 100");
    b.param("max_trials", "100000");
    const auto grid = fig10b_grid(kBerElements);
    b.param("snr_grid_db", fmt_grid(grid));
    const auto model = fig7_model(kBerElements);
    ber_table(b, "ideal_n64",
              run_ber(fig10_plan(kBerElements, PhasePolicy::ideal(), grid, seed, kMaxTrials, workers,
                                 "fig10b_ideal_n64")),
              &model);
    for (double kappa : kKappas) {
        const auto name = "kappa" + format_number(kappa) + "_n64";
        ber_table(b, name,
                  run_ber(fig10_plan(kBerElements, PhasePolicy{{phase::VonMisesError{kappa}}}, grid, seed, kMaxTrials,
                                     workers, "fig10b_" + name)),
                  nullptr);
    }
    rate_params(b);
    auto& t = b.table("mean_snr", {"elements", "kappa", "mean_snr_db", "rate_bps_hz"});
    for (std::size_t n : {64u, 128u}) {
        for (const auto& e : run_rate(fig10b_snr_plan(n, kKappas, seed, workers))) {
            t.add_row({static_cast<std::int64_t>(n), e.parameter, 10.0 * std::log10(e.mean_snr), e.mean_rate});
        }
    }
}

} // namespace

std::span<const PresetInfo> preset_catalog() { return kCatalog; }

bool is_preset(std::string_view name) {
    return std::any_of(kCatalog.begin(), kCatalog.end(), [&](const PresetInfo& p) { return name == p.name; });
}

PresetOutput compute_preset(const std::string& name, std::uint64_t seed, int workers) {
    if (!is_preset(name)) {
        throw DomainError("unknown preset '" + name + "'");
    }
    PresetOutput out;
    out.preset = name;
    Builder b{out};
    if (name == "fig2a") {
        fig2(b, 2.4, seed, workers);
    } else if (name == "fig2b") {
        fig2(b, 28.0, seed, workers);
    } else if (name == "fig3") {
        fig3(b);
    } else if (name == "fig4") {
        fig4(b);
    } else if (name == "fig5") {
        fig5(b);
    } else if (name == "table1") {
        table1(b);
    } else if (name == "table2") {
        table2(b);
    } else if (name == "fig7") {
        fig7(b, seed, workers);
    } else if (name == "fig8") {
        fig8(b, seed, workers);
    } else if (name == "fig9a") {
        fig9a(b, seed, workers);
    } else if (name == "fig9b") {
        fig9b(b, seed, workers);
    } else if (name == "fig10a") {
        fig10a(b, seed, workers);
    } else {
        fig10b(b, seed, workers);
    }
    return out;
}

Manifest run_preset(const std::string& name, std::uint64_t seed, const std::filesystem::path& out_dir, int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = compute_preset(name, seed, workers);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw std::runtime_error("cannot create output directory " + out_dir.string());
    }

    Manifest m;
    m.preset = name;
    m.seed = seed;
    m.parameters = out.parameters;
    std::string canonical = "preset=" + name + "\n";
    for (const auto& [k, v] : out.parameters) {
        canonical += k + "=" + v + "\n";
    }
    m.scenario_hash = fnv1a_hex(canonical);
    for (const auto& t : out.tables) {
        const auto file = t.name() + ".csv";
        write_csv(t, out_dir / file);
        m.files.push_back(file);
    }
    m.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(m, out_dir / (name + "_manifest.json"));
    return m;
}

std::vector<ResultTable> run_scenario(const ScenarioFile& s, const std::string& name, std::uint64_t seed,
                                      int workers) {
    std::vector<ResultTable> out;
    const auto& ex = s.experiment;
    const bool bpsk = ex.modulation.family == ModulationFamily::PSK && ex.modulation.order == 2;
    switch (ex.kind) {
    case ExperimentKind::Ber: {
        const auto model = bpsk ? clt_model(s, s.geometry) : std::nullopt;
        std::vector<std::string> cols{"p_t_over_n0_db", "trials", "errors", "ber", "ci95_low", "ci95_high"};
        if (model) {
            cols.emplace_back("analytic_ber");
        }
        auto& t = out.emplace_back(name, cols);
        for (const auto& e : run_ber(build_trial_plan(s, seed, workers))) {
            std::vector<Cell> row{e.snr_db, static_cast<std::int64_t>(e.trials), static_cast<std::int64_t>(e.errors),
                                  e.ber,    e.ci95_low,                          e.ci95_high};
            if (model) {
                row.emplace_back(sep_mpsk_at(2, *model, rho(e.snr_db)));
            }
            t.add_row(std::move(row));
        }
        break;
    }
    case ExperimentKind::Rate: {
        const auto est = run_rate(build_rate_plan(s, seed, workers));
        std::vector<std::string> cols{ex.sweep ? ex.sweep->node + "_" + ex.sweep->axis + "_m" : "parameter",
                                      "rate_bps_hz", "mean_snr_db"};
        const std::size_t candidates = est.empty() ? 0 : est.front().candidate_rates.size();
        for (std::size_t k = 0; k < candidates; ++k) {
            cols.push_back("rate_candidate" + std::to_string(k + 1));
        }
        auto& t = out.emplace_back(name, cols);
        for (const auto& e : est) {
            std::vector<Cell> row{e.parameter, e.mean_rate, 10.0 * std::log10(e.mean_snr)};
            for (double r : e.candidate_rates) {
                row.emplace_back(r);
            }
            t.add_row(std::move(row));
        }
        break;
    }
    case ExperimentKind::Sep: {
        if (ex.modulation.family != ModulationFamily::PSK) {
            throw DomainError("sep experiments need a PSK modulation");
        }
        std::vector<std::string> cols{"p_t_over_n0_db", "sep"};
        if (bpsk) {
            cols.emplace_back("sep_bound");
        }
        auto& t = out.emplace_back(name, cols);
        const auto model = clt_model(s, s.geometry);
        if (!model) {
            throw DomainError("no closed-form SEP for this scenario (phase impairments or direct link)");
        }
        for (double snr : ex.snr_grid_db()) {
            std::vector<Cell> row{snr, sep_mpsk_at(ex.modulation.order, *model, rho(snr))};
            if (bpsk) {
                row.emplace_back(sep_upper_bound(*model, model->topology, rho(snr)));
            }
            t.add_row(std::move(row));
        }
        break;
    }
    }
    for (auto& t : out) {
        t.metadata.seed = seed;
        t.metadata.scenario_hash = scenario_hash(s);
    }
    return out;
}

} // namespace rislink
