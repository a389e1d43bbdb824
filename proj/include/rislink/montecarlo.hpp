#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "rislink/fading.hpp"
#include "rislink/link.hpp"
#include "rislink/modulation.hpp"
#include "rislink/pathloss.hpp"
#include "rislink/random.hpp"

namespace rislink {

namespace channel {

/// Unity gain, no fading.
struct Awgn {};

/// Point-to-point link. With faded = false the coefficient is exactly 1.
struct Direct {
    RicianSpec fading{};
    bool faded = true;
    PathLossValue pl{};
};

/// One surface with fading on both hops and a common per-surface loss.
struct SurfaceLink {
    RisPanel panel{};
    RicianSpec k_sr{};
    RicianSpec k_rd{};
    PathLossValue pl{};
};

/// All surfaces reflect at once. One entry is the single-RIS case.
struct Simultaneous {
    std::vector<SurfaceLink> links;
};

/// S -> RIS1 -> RIS2 -> D with unit LOS outer hops and a Rician N x N middle hop.
struct DoubleReflected {
    RisPanel first{};
    RisPanel second{};
    RicianSpec fading{};
    PathLossValue pl{};
    /// false: closed-form alignment phi1_i + phi2_j = varphi_ij.
    /// true: realizable per-side phases from coordinate ascent.
    bool realizable_phases = false;
};

struct SelectIndoor {
    std::vector<SurfaceLink> links;
};

/// pairs(k, l): near-source surface k with near-destination surface l.
struct SelectOutdoor {
    Grid<DoubleReflected> pairs;
};

} // namespace channel

using ChannelModel = std::variant<channel::Awgn, channel::Direct, channel::Simultaneous, channel::DoubleReflected,
                                  channel::SelectIndoor, channel::SelectOutdoor>;

void validate_channel(const ChannelModel& model);
Topology topology_of(const ChannelModel& model);

/// One channel use: the composite complex gain g, so that gamma = |g|^2 p_t / N0.
/// `candidates` holds the gain of every alternative path from the same draw:
/// each surface alone for Simultaneous, every candidate for the selection models.
struct ChannelDraw {
    std::complex<double> gain{};
    std::vector<double> candidates; ///< |g_k|
};

/// Stateful sampler with scratch buffers; one per worker.
class ChannelSampler {
public:
    explicit ChannelSampler(const ChannelModel& model);
    void draw(RandomSource& rng, ChannelDraw& out);

private:
    const ChannelModel& model_;
    std::vector<std::complex<double>> h1_;
    std::vector<std::complex<double>> h2_;
    std::vector<double> phases_;
    Grid<ComplexCoefficient> matrix_;
};

struct TrialPlan {
    ChannelModel channel = channel::Awgn{};
    ModulationScheme modulation = ModulationScheme::bpsk();
    std::vector<double> snr_grid_db; ///< p_t / N0 in dB
    std::uint64_t min_errors = 200;
    std::uint64_t max_trials = 100'000'000;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;        ///< distinguishes curves sharing a seed
    std::uint64_t chunk_size = 10'000;
    int workers = 1;                 ///< never changes results

    void validate() const;
};

struct BerEstimate {
    double snr_db = 0.0;
    std::uint64_t trials = 0; ///< symbols
    std::uint64_t errors = 0; ///< bit errors
    double ber = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

/// Wilson score interval at 95% for `errors` out of `n` Bernoulli trials.
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t n);

/// Every trial draws one channel use and reuses it at each grid point with
/// independent noise and data. A grid point stops at the first chunk whose
/// cumulative error count reaches min_errors, or at max_trials.
std::vector<BerEstimate> run_ber(const TrialPlan& plan);

struct RatePoint {
    double parameter = 0.0;
    ChannelModel channel = channel::Awgn{};
};

struct RatePlan {
    std::vector<RatePoint> points;
    double p_t_w = 1.0;
    double n0_w = 1.0;
    std::uint64_t realizations = 10'000;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t chunk_size = 1'000;
    int workers = 1;

    void validate() const;
};

struct RateEstimate {
    double parameter = 0.0;
    double mean_rate = 0.0;                   ///< E[log2(1 + gamma)]
    double mean_snr = 0.0;                    ///< E[gamma]
    std::vector<double> candidate_rates;      ///< same draws, each alternative path alone
    std::vector<double> candidate_snrs;
};

std::vector<RateEstimate> run_rate(const RatePlan& plan);

/// Runs task(i) for i in [begin, end) on `workers` threads.
void parallel_for(std::size_t begin, std::size_t end, int workers, const std::function<void(std::size_t)>& task);

/// Number of workers requested through RIS_LINKSIM_WORKERS, or 1.
int default_workers();

} // namespace rislink
