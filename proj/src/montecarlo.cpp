#include "rislink/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "rislink/error.hpp"

namespace rislink {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using cplx = std::complex<double>;

bool is_ideal(const PhasePolicy& policy) {
    return std::all_of(policy.stages.begin(), policy.stages.end(),
                       [](const phase::Stage& s) { return std::holds_alternative<phase::Ideal>(s); });
}

void validate_link(const channel::SurfaceLink& link) {
    link.panel.validate();
    link.k_sr.validate();
    link.k_rd.validate();
    detail::require_positive(link.pl.loss_linear, "surface path loss");
}

void validate_double(const channel::DoubleReflected& d) {
    d.first.validate();
    d.second.validate();
    d.fading.validate();
    detail::require_positive(d.pl.loss_linear, "double-reflection path loss");
    if (!d.realizable_phases && !(is_ideal(d.first.phase_policy) && is_ideal(d.second.phase_policy))) {
        throw DomainError("double-reflected phase impairments need realizable per-side phases");
    }
}

double sum_of_products(const RicianSampler& a, const RicianSampler& b, std::size_t n, RandomSource& rng) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a.draw_amplitude(rng);
        sum += x * b.draw_amplitude(rng);
    }
    return sum;
}

std::uint64_t chunk_count(std::uint64_t total, std::uint64_t chunk) { return (total + chunk - 1) / chunk; }

} // namespace

void validate_channel(const ChannelModel& model) {
    std::visit(Overloaded{
                   [](const channel::Awgn&) {},
                   [](const channel::Direct& d) {
                       d.fading.validate();
                       detail::require_positive(d.pl.loss_linear, "direct path loss");
                   },
                   [](const channel::Simultaneous& s) {
                       detail::require(!s.links.empty(), "simultaneous channel needs at least one surface");
                       for (const auto& l : s.links) {
                           validate_link(l);
                       }
                   },
                   [](const channel::DoubleReflected& d) { validate_double(d); },
                   [](const channel::SelectIndoor& s) {
                       detail::require(!s.links.empty(), "indoor selection needs at least one candidate");
                       for (const auto& l : s.links) {
                           validate_link(l);
                       }
                   },
                   [](const channel::SelectOutdoor& s) {
                       detail::require(!s.pairs.empty(), "outdoor selection needs a non-empty pair grid");
                       for (const auto& d : s.pairs.flat()) {
                           validate_double(d);
                       }
                   },
               },
               model);
}

Topology topology_of(const ChannelModel& model) {
    return std::visit(Overloaded{
                          [](const channel::Awgn&) { return Topology::DirectOnly; },
                          [](const channel::Direct&) { return Topology::DirectOnly; },
                          [](const channel::Simultaneous& s) {
                              return s.links.size() == 1 ? Topology::SingleRis : Topology::DualSimultaneous;
                          },
                          [](const channel::DoubleReflected&) { return Topology::DoubleReflected; },
                          [](const channel::SelectIndoor&) { return Topology::SelectionIndoor; },
                          [](const channel::SelectOutdoor&) { return Topology::SelectionOutdoor; },
                      },
                      model);
}

ChannelSampler::ChannelSampler(const ChannelModel& model) : model_(model) {}

namespace {

cplx surface_gain(const channel::SurfaceLink& link, RandomSource& rng, std::vector<cplx>& h1,
                  std::vector<cplx>& h2, std::vector<double>& phases) {
    const std::size_t n = link.panel.element_count;
    const RicianSampler a(link.k_sr);
    const RicianSampler b(link.k_rd);
    const double scale = std::sqrt(link.pl.gain()) * link.panel.gamma_mag();
    if (is_ideal(link.panel.phase_policy)) {
        return scale * sum_of_products(a, b, n, rng);
    }
    h1.resize(n);
    h2.resize(n);
    phases.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        h1[i] = a.draw(rng);
        h2[i] = b.draw(rng);
        // h = |h| e^{-j theta}, so the aligning phase is theta_sr + theta_rd
        phases[i] = wrap_phase(-std::arg(h1[i]) - std::arg(h2[i]));
    }
    const double gamma = apply_policy_inplace(link.panel.phase_policy, phases, rng);
    cplx sum{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        sum += h1[i] * h2[i] * std::polar(1.0, phases[i]);
    }
    return scale * gamma * sum;
}

cplx double_gain(const channel::DoubleReflected& d, RandomSource& rng, Grid<ComplexCoefficient>& matrix,
                 std::vector<double>& phases) {
    const std::size_t n1 = d.first.element_count;
    const std::size_t n2 = d.second.element_count;
    const RicianSampler s(d.fading);
    const double scale = std::sqrt(d.pl.gain()) * d.first.gamma_mag() * d.second.gamma_mag();
    if (!d.realizable_phases) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n1 * n2; ++k) {
            sum += s.draw_amplitude(rng);
        }
        return scale * sum;
    }
    if (matrix.rows() != n1 || matrix.cols() != n2) {
        matrix = Grid<ComplexCoefficient>(n1, n2);
    }
    for (auto& h : matrix.flat()) {
        h = ComplexCoefficient::from_complex(s.draw(rng));
    }
    auto sol = optimize_double_phases(matrix);
    const double g1 = apply_policy_inplace(d.first.phase_policy, sol.first, rng);
    const double g2 = apply_policy_inplace(d.second.phase_policy, sol.second, rng);
    phases.resize(n2);
    cplx sum{0.0, 0.0};
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const auto& h = matrix(i, j);
            sum += h.amplitude * std::polar(1.0, sol.first[i] + sol.second[j] - h.phase);
        }
    }
    return scale * g1 * g2 * sum;
}

} // namespace

void ChannelSampler::draw(RandomSource& rng, ChannelDraw& out) {
    out.candidates.clear();
    std::visit(Overloaded{
                   [&](const channel::Awgn&) { out.gain = 1.0; },
                   [&](const channel::Direct& d) {
                       const cplx h = d.faded ? RicianSampler(d.fading).draw(rng) : cplx{1.0, 0.0};
                       out.gain = std::sqrt(d.pl.gain()) * h;
                   },
                   [&](const channel::Simultaneous& s) {
                       cplx total{0.0, 0.0};
                       for (const auto& link : s.links) {
                           const cplx g = surface_gain(link, rng, h1_, h2_, phases_);
                           total += g;
                           out.candidates.push_back(std::abs(g));
                       }
                       out.gain = total;
                   },
                   [&](const channel::DoubleReflected& d) { out.gain = double_gain(d, rng, matrix_, phases_); },
                   [&](const channel::SelectIndoor& s) {
                       cplx best{0.0, 0.0};
                       for (const auto& link : s.links) {
                           const cplx g = surface_gain(link, rng, h1_, h2_, phases_);
                           if (out.candidates.empty() || std::abs(g) > std::abs(best)) {
                               best = g;
                           }
                           out.candidates.push_back(std::abs(g));
                       }
                       out.gain = best;
                   },
                   [&](const channel::SelectOutdoor& s) {
                       cplx best{0.0, 0.0};
                       for (const auto& pair : s.pairs.flat()) {
                           const cplx g = double_gain(pair, rng, matrix_, phases_);
                           if (out.candidates.empty() || std::abs(g) > std::abs(best)) {
                               best = g;
                           }
                           out.candidates.push_back(std::abs(g));
                       }
                       out.gain = best;
                   },
               },
               model_);
}

void TrialPlan::validate() const {
    validate_channel(channel);
    modulation.validate();
    detail::require(!snr_grid_db.empty(), "trial plan needs a non-empty SNR grid");
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
        detail::require(std::isfinite(snr_grid_db[i]), "trial plan SNR grid must be finite");
        if (i > 0) {
            detail::require(snr_grid_db[i] > snr_grid_db[i - 1], "trial plan SNR grid must be strictly increasing");
        }
    }
    detail::require(min_errors >= 50, "min_errors must be >= 50, got " + std::to_string(min_errors));
    detail::require(max_trials >= 1, "max_trials must be >= 1");
    detail::require(chunk_size >= 1, "chunk_size must be >= 1");
    detail::require(workers >= 1, "workers must be >= 1");
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t n) {
    detail::require(errors <= n, "wilson_interval: more errors than trials");
    if (n == 0) {
        return {0.0, 1.0};
    }
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(errors) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

std::vector<BerEstimate> run_ber(const TrialPlan& plan) {
    plan.validate();
    const Constellation constellation(plan.modulation);
    const std::uint32_t mask = static_cast<std::uint32_t>(plan.modulation.order) - 1;
    const std::size_t points = plan.snr_grid_db.size();
    std::vector<double> amp(points);
    for (std::size_t j = 0; j < points; ++j) {
        amp[j] = std::pow(10.0, plan.snr_grid_db[j] / 20.0);
    }
    const SeededStream base{plan.seed, plan.stream};
    const std::uint64_t total_chunks = chunk_count(plan.max_trials, plan.chunk_size);

    auto run_chunk = [&](std::uint64_t c, std::vector<std::uint64_t>& errors) {
        const std::uint64_t first = c * plan.chunk_size;
        const std::uint64_t trials = std::min(plan.chunk_size, plan.max_trials - first);
        RandomSource rng(base.child(c));
        ChannelSampler sampler(plan.channel);
        ChannelDraw draw;
        errors.assign(points, 0);
        constexpr double noise_sd = 0.70710678118654752440;
        for (std::uint64_t t = 0; t < trials; ++t) {
            sampler.draw(rng, draw);
            const cplx g = draw.gain;
            for (std::size_t j = 0; j < points; ++j) {
                const std::uint32_t label = rng.bits() & mask;
                const cplx noise{noise_sd * rng.normal(), noise_sd * rng.normal()};
                const cplx scaled = g * amp[j];
                // perfect CSI: equalize by the known composite gain
                const cplx z = scaled == cplx{0.0, 0.0} ? noise : constellation.point(label) + noise / scaled;
                errors[j] += static_cast<std::uint64_t>(std::popcount(label ^ constellation.detect(z)));
            }
        }
        return trials;
    };

    std::vector<BerEstimate> out(points);
    std::vector<bool> done(points, false);
    for (std::size_t j = 0; j < points; ++j) {
        out[j].snr_db = plan.snr_grid_db[j];
    }
    std::size_t remaining = points;
    std::uint64_t next = 0;
    const auto batch_size = static_cast<std::uint64_t>(plan.workers);
    while (next < total_chunks && remaining > 0) {
        const std::uint64_t batch = std::min(batch_size, total_chunks - next);
        std::vector<std::vector<std::uint64_t>> errors(batch);
        std::vector<std::uint64_t> trials(batch);
        parallel_for(0, batch, plan.workers, [&](std::size_t b) { trials[b] = run_chunk(next + b, errors[b]); });
        for (std::uint64_t b = 0; b < batch && remaining > 0; ++b) {
            for (std::size_t j = 0; j < points; ++j) {
                if (done[j]) {
                    continue;
                }
                out[j].trials += trials[b];
                out[j].errors += errors[b][j];
                if (out[j].errors >= plan.min_errors) {
                    done[j] = true;
                    --remaining;
                }
            }
        }
        next += batch;
    }
    const auto k = static_cast<std::uint64_t>(plan.modulation.bits_per_symbol());
    for (auto& e : out) {
        const std::uint64_t bits = e.trials * k;
        e.ber = bits ? static_cast<double>(e.errors) / static_cast<double>(bits) : 0.0;
        std::tie(e.ci95_low, e.ci95_high) = wilson_interval(e.errors, bits);
    }
    return out;
}

void RatePlan::validate() const {
    detail::require(!points.empty(), "rate plan needs at least one point");
    for (const auto& p : points) {
        validate_channel(p.channel);
    }
    detail::require_positive(p_t_w, "transmit power");
    detail::require_positive(n0_w, "noise power");
    detail::require(realizations >= 1, "rate plan needs at least one realization");
    detail::require(chunk_size >= 1, "chunk_size must be >= 1");
    detail::require(workers >= 1, "workers must be >= 1");
}

std::vector<RateEstimate> run_rate(const RatePlan& plan) {
    plan.validate();
    const std::uint64_t chunks = chunk_count(plan.realizations, plan.chunk_size);
    const double rho = plan.p_t_w / plan.n0_w;

    struct Partial {
        double rate = 0.0;
        double snr = 0.0;
        std::vector<double> cand_rate;
        std::vector<double> cand_snr;
    };
    std::vector<Partial> partials(plan.points.size() * chunks);
    const SeededStream base{plan.seed, plan.stream};

    parallel_for(0, partials.size(), plan.workers, [&](std::size_t task) {
        const std::size_t p = task / chunks;
        const std::uint64_t c = task % chunks;
        const std::uint64_t first = c * plan.chunk_size;
        const std::uint64_t count = std::min(plan.chunk_size, plan.realizations - first);
        RandomSource rng(base.child(p).child(c));
        ChannelSampler sampler(plan.points[p].channel);
        ChannelDraw draw;
        Partial& acc = partials[task];
        for (std::uint64_t t = 0; t < count; ++t) {
            sampler.draw(rng, draw);
            const double snr = std::norm(draw.gain) * rho;
            acc.rate += std::log2(1.0 + snr);
            acc.snr += snr;
            acc.cand_rate.resize(draw.candidates.size(), 0.0);
            acc.cand_snr.resize(draw.candidates.size(), 0.0);
            for (std::size_t k = 0; k < draw.candidates.size(); ++k) {
                const double s = draw.candidates[k] * draw.candidates[k] * rho;
                acc.cand_rate[k] += std::log2(1.0 + s);
                acc.cand_snr[k] += s;
            }
        }
    });

    std::vector<RateEstimate> out;
    out.reserve(plan.points.size());
    const double n = static_cast<double>(plan.realizations);
    for (std::size_t p = 0; p < plan.points.size(); ++p) {
        RateEstimate e;
        e.parameter = plan.points[p].parameter;
        for (std::uint64_t c = 0; c < chunks; ++c) {
            const Partial& part = partials[p * chunks + c];
            e.mean_rate += part.rate;
            e.mean_snr += part.snr;
            e.candidate_rates.resize(part.cand_rate.size(), 0.0);
            e.candidate_snrs.resize(part.cand_snr.size(), 0.0);
            for (std::size_t k = 0; k < part.cand_rate.size(); ++k) {
                e.candidate_rates[k] += part.cand_rate[k];
                e.candidate_snrs[k] += part.cand_snr[k];
            }
        }
        e.mean_rate /= n;
        e.mean_snr /= n;
        for (auto& v : e.candidate_rates) {
            v /= n;
        }
        for (auto& v : e.candidate_snrs) {
            v /= n;
        }
        out.push_back(std::move(e));
    }
    return out;
}

void parallel_for(std::size_t begin, std::size_t end, int workers, const std::function<void(std::size_t)>& task) {
    if (end <= begin) {
        return;
    }
    const std::size_t count = end - begin;
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || count == 1) {
        for (std::size_t i = begin; i < end; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{begin};
    std::mutex error_lock;
    std::exception_ptr error;
    std::size_t error_index = end;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= end) {
                return;
            }
            try {
                task(i);
            } catch (...) {
                std::scoped_lock guard(error_lock);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(std::min(threads, count));
    for (std::size_t t = 0; t < std::min(threads, count); ++t) {
        pool.emplace_back(worker);
    }
    pool.clear();
    if (error) {
        std::rethrow_exception(error);
    }
}

int default_workers() {
    const char* env = std::getenv("RIS_LINKSIM_WORKERS");
    if (env == nullptr || *env == '\0') {
        return 1;
    }
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
        throw DomainError(std::string("RIS_LINKSIM_WORKERS must be an integer in 1..1024, got '") + env + "'");
    }
    return static_cast<int>(v);
}

} // namespace rislink
