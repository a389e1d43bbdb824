#pragma once

namespace rislink::special {

/// Exponentially scaled modified Bessel functions of the first kind,
/// e^{-|z|} I_0(z) and e^{-|z|} I_1(z). Power series below |z| = 15,
/// Hankel asymptotic expansion above. Worst relative error (~1e-12) sits just
/// past the switch, where the asymptotic series is least converged.
double bessel_i0e(double z);
double bessel_i1e(double z);

/// Unscaled I_0, I_1. Overflow for |z| above ~700.
double bessel_i0(double z);
double bessel_i1(double z);

/// Branch switch point of the Bessel implementation.
inline constexpr double kBesselAsymptoticThreshold = 15.0;

/// Laguerre function of degree 1/2 for x <= 0:
///   L_{1/2}(x) = e^{x/2} [ (1 - x) I_0(-x/2) - x I_1(-x/2) ].
/// Throws DomainError for x > 0.
double laguerre_half(double x);

} // namespace rislink::special
