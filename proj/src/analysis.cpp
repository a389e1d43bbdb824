#include "rislink/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "rislink/error.hpp"

namespace rislink {

namespace {

constexpr double kPi = std::numbers::pi;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct PerElement {
    double mean_product;  // E[alpha beta] = m^2
    double var_product;   // 1 - m^4
    double mean_single;   // m
    double var_single;    // 1 - m^2
};

PerElement per_element(const RicianSpec& rician, LaguerrePolicy policy) {
    const auto m = rician_amplitude_moments(rician, policy);
    const double m2 = m.mean * m.mean;
    return {m2, 1.0 - m2 * m2, m.mean, 1.0 - m2};
}

} // namespace

void CltAmplitudeModel::validate() const {
    if (!std::isfinite(mean) || !std::isfinite(variance) || mean < 0.0 || !(variance > 0.0)) {
        std::ostringstream os;
        os << "CLT amplitude model needs mean >= 0 and variance > 0, got (" << mean << ", " << variance << ")";
        throw DomainError(os.str());
    }
}

CltAmplitudeModel clt_moments_single(std::size_t n, const PathLossValue& pl, const RicianSpec& rician,
                                     LaguerrePolicy policy) {
    detail::require(n >= 1, "clt_moments_single: element count must be >= 1");
    detail::require_positive(pl.loss_linear, "path loss");
    const auto e = per_element(rician, policy);
    const double nn = static_cast<double>(n);
    const double p = pl.gain();
    return {nn * std::sqrt(p) * e.mean_product, nn * p * e.var_product, Topology::SingleRis};
}

CltAmplitudeModel clt_moments_simultaneous(std::span<const std::size_t> n, std::span<const PathLossValue> pl,
                                           const RicianSpec& rician, LaguerrePolicy policy) {
    detail::require(n.size() == pl.size(), "clt_moments_simultaneous: one path loss per surface");
    const auto e = per_element(rician, policy);
    double amplitude = 0.0;
    double power = 0.0;
    std::size_t active = 0;
    for (std::size_t k = 0; k < n.size(); ++k) {
        if (n[k] == 0) {
            continue;
        }
        detail::require_positive(pl[k].loss_linear, "path loss");
        const double nn = static_cast<double>(n[k]);
        amplitude += nn * std::sqrt(pl[k].gain());
        power += nn * pl[k].gain();
        ++active;
    }
    detail::require(active >= 1, "clt_moments_simultaneous: at least one surface needs elements");
    return {amplitude * e.mean_product, power * e.var_product,
            active == 1 ? Topology::SingleRis : Topology::DualSimultaneous};
}

CltAmplitudeModel clt_moments_dual(std::size_t n1, std::size_t n2, const PathLossValue& pl1,
                                   const PathLossValue& pl2, const RicianSpec& rician, LaguerrePolicy policy) {
    detail::require(n1 >= 1, "clt_moments_dual: first surface needs at least one element");
    const std::array<std::size_t, 2> n{n1, n2};
    const std::array<PathLossValue, 2> pl{pl1, pl2};
    return clt_moments_simultaneous(n, pl, rician, policy);
}

CltAmplitudeModel clt_moments_double(std::size_t n, const PathLossValue& pl, const RicianSpec& rician,
                                     LaguerrePolicy policy) {
    detail::require(n >= 2, "clt_moments_double: element count must be >= 2");
    detail::require_positive(pl.loss_linear, "path loss");
    const auto e = per_element(rician, policy);
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const double p = pl.gain();
    return {n2 * std::sqrt(p) * e.mean_single, n2 * p * e.var_single, Topology::DoubleReflected};
}

double mgf(const CltAmplitudeModel& model, double s, double p_t_over_n0) {
    model.validate();
    if (!(p_t_over_n0 >= 0.0) || !std::isfinite(s)) {
        throw DomainError("mgf: need finite s and p_t/N0 >= 0");
    }
    const double denom = 1.0 - 2.0 * s * model.variance * p_t_over_n0;
    if (!(denom > 0.0)) {
        std::ostringstream os;
        os << "mgf: 1 - 2 s VAR[A] rho = " << denom << " is not positive (s = " << s << ")";
        throw DomainError(os.str());
    }
    return std::exp(s * model.mean * model.mean * p_t_over_n0 / denom) / std::sqrt(denom);
}

void SepRequest::validate() const {
    if (order < 2 || (order & (order - 1)) != 0) {
        throw DomainError("M-PSK order must be a power of two >= 2, got " + std::to_string(order));
    }
    detail::require(!snr_grid_db.empty(), "SEP request needs a non-empty SNR grid");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i) {
        detail::require(snr_grid_db[i] > snr_grid_db[i - 1], "SEP request SNR grid must be strictly increasing");
    }
    model.validate();
}

double sep_mpsk_at(int order, const CltAmplitudeModel& model, double p_t_over_n0) {
    const double g = std::pow(std::sin(kPi / order), 2);
    const double upper = (order - 1) * kPi / order;
    auto integrand = [&](double eta) {
        const double s = std::sin(eta);
        if (s <= 0.0) {
            return 0.0;
        }
        return mgf(model, -g / (s * s), p_t_over_n0);
    };
    return quadrature::integrate(integrand, 0.0, upper).value / kPi;
}

std::vector<SepPoint> sep_mpsk(const SepRequest& req) {
    req.validate();
    std::vector<SepPoint> out;
    out.reserve(req.snr_grid_db.size());
    for (double db : req.snr_grid_db) {
        out.push_back({db, sep_mpsk_at(req.order, req.model, db_to_linear(db))});
    }
    return out;
}

double sep_upper_bound(const CltAmplitudeModel& model, Topology topology, double p_t_over_n0) {
    if (model.topology != topology) {
        throw DomainError(std::string("sep_upper_bound: model built for ") + to_string(model.topology) +
                          ", bound requested for " + to_string(topology));
    }
    return 0.5 * mgf(model, -1.0, p_t_over_n0);
}

double achievable_rate(double snr_linear) {
    if (!(snr_linear >= 0.0)) {
        throw DomainError("achievable_rate: SNR must be >= 0, got " + std::to_string(snr_linear));
    }
    return std::log2(1.0 + snr_linear);
}

double required_snr_db(const CltAmplitudeModel& model, double target, double lo_db, double hi_db) {
    detail::require(target > 0.0 && target < 0.5, "required_snr_db: target SEP must lie in (0, 0.5)");
    // the SEP underflows to 0 far above the target; keep the objective finite there
    auto f = [&](double db) {
        const double sep = std::max(sep_mpsk_at(2, model, db_to_linear(db)), std::numeric_limits<double>::min());
        return std::log(sep) - std::log(target);
    };
    const double flo = f(lo_db);
    const double fhi = f(hi_db);
    if (!(flo > 0.0 && fhi < 0.0)) {
        throw NumericError("required_snr_db: target not bracketed by the search interval");
    }
    std::uintmax_t iterations = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo_db, hi_db, flo, fhi,
                                                     boost::math::tools::eps_tolerance<double>(40), iterations);
    return 0.5 * (r.first + r.second);
}

double crossing_db(std::span<const double> x_db, std::span<const double> y, double target) {
    detail::require(x_db.size() == y.size(), "crossing_db: x and y lengths differ");
    detail::require(target > 0.0, "crossing_db: target must be positive");
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        if (y[i] >= target && y[i + 1] < target && y[i + 1] > 0.0) {
            const double l0 = std::log10(y[i]);
            const double l1 = std::log10(y[i + 1]);
            const double t = (l0 - std::log10(target)) / (l0 - l1);
            return x_db[i] + t * (x_db[i + 1] - x_db[i]);
        }
    }
    throw NumericError("crossing_db: curve never crosses the target with positive values on both sides");
}

namespace quadrature {

namespace {

Rule build_rule(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

double apply(const Rule& rule, const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

struct Adaptive {
    const std::function<double(double)>& f;
    const Rule& rule;
    double rel_tol;
    int max_depth;
    Result result{};

    void panel(double a, double b, double coarse, int depth) {
        const double m = 0.5 * (a + b);
        const double left = apply(rule, f, a, m);
        const double right = apply(rule, f, m, b);
        const double fine = left + right;
        const double diff = std::abs(fine - coarse);
        if (diff <= rel_tol * std::abs(fine) || diff <= 1e-300) {
            result.value += fine;
            result.error_estimate += diff;
            result.panels += 1;
            return;
        }
        if (depth >= max_depth) {
            std::ostringstream os;
            os.precision(17);
            os << "quadrature did not converge on [" << a << ", " << b << "] after " << depth
               << " bisections: coarse " << coarse << ", refined " << fine;
            throw NumericError(os.str());
        }
        panel(a, m, left, depth + 1);
        panel(m, b, right, depth + 1);
    }
};

} // namespace

const Rule& gauss_legendre(int points) {
    detail::require(points >= 1 && points <= 1024, "gauss_legendre: points must lie in 1..1024");
    static std::mutex lock;
    static std::map<int, Rule> cache;
    std::scoped_lock guard(lock);
    auto it = cache.find(points);
    if (it == cache.end()) {
        it = cache.emplace(points, build_rule(points)).first;
    }
    return it->second;
}

Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, int max_depth) {
    detail::require(std::isfinite(a) && std::isfinite(b) && a < b, "integrate: need finite a < b");
    const Rule& rule = gauss_legendre(64);
    Adaptive ad{f, rule, rel_tol, max_depth};
    ad.panel(a, b, apply(rule, f, a, b), 0);
    return ad.result;
}

} // namespace quadrature

} // namespace rislink
