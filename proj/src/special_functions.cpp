#include "rislink/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rislink/error.hpp"

namespace rislink::special {

namespace {

// sum_k (z^2/4)^k / (k! (k+order)!) * (z/2)^order, all terms positive
double bessel_series(double z, int order) {
    const double q = 0.25 * z * z;
    double term = order == 0 ? 1.0 : 0.5 * z;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
        sum += term;
        if (term < sum * 1e-17) {
            break;
        }
    }
    return sum;
}

// e^{-z} I_nu(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) / z^k, truncated at the smallest term
double bessel_asymptotic_scaled(double z, int order) {
    const double mu = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    double previous = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * z);
        if (std::abs(term) > previous) {
            break;
        }
        sum += term;
        previous = std::abs(term);
        if (previous < 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

double scaled(double z, int order) {
    const double az = std::abs(z);
    double value;
    if (az < kBesselAsymptoticThreshold) {
        value = bessel_series(az, order) * std::exp(-az);
    } else {
        value = bessel_asymptotic_scaled(az, order);
    }
    // I_1 is odd
    return (order == 1 && z < 0.0) ? -value : value;
}

} // namespace

double bessel_i0e(double z) { return scaled(z, 0); }
double bessel_i1e(double z) { return scaled(z, 1); }

double bessel_i0(double z) { return bessel_i0e(z) * std::exp(std::abs(z)); }
double bessel_i1(double z) { return bessel_i1e(z) * std::exp(std::abs(z)); }

double laguerre_half(double x) {
    if (!(x <= 0.0)) {
        throw DomainError("laguerre_half: argument must be <= 0, got " + std::to_string(x));
    }
    // e^{x/2} I_nu(-x/2) == e^{-z} I_nu(z) with z = -x/2 >= 0
    const double z = -0.5 * x;
    return (1.0 - x) * bessel_i0e(z) - x * bessel_i1e(z);
}

} // namespace rislink::special
