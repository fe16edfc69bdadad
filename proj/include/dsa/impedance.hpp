// SPDX-License-Identifier: Apache-2.0
//
// Induced-EMF impedances of z-parallel thin dipoles with sinusoidal current
// distributions, referred to the feed-point currents.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

#include "dsa/constants.hpp"
#include "dsa/error.hpp"
#include "dsa/geometry.hpp"
#include "dsa/special_functions.hpp"

namespace dsa {

namespace detail {

// Converts an impedance referred to current maxima into one referred to the
// feed currents: I(0) = I_max sin(k L / 2).
inline double feed_factor(double k, double length) {
    const double s = std::sin(0.5 * k * length);
    if (std::abs(s) < 1e-9) throw DomainError("dipole is a full-wave multiple: zero feed current");
    return s;
}

// int_lo^hi exp(sign j k z) exp(-j k R) / R dz with R = sqrt(d^2 + (z - z0)^2).
// The substitution w = k (R -/+ (z - z0)) turns the integrand into exp(-jw)/w.
inline cplx segment_integral(int sign, double z0, double lo, double hi, double d, double k) {
    const auto path = [&](double z) {
        const double s = z - z0;
        const double R = std::hypot(d, s);
        // R - s or R + s without cancellation
        if (sign > 0) return s > 0 ? k * d * d / (R + s) : k * (R - s);
        return s < 0 ? k * d * d / (R - s) : k * (R + s);
    };
    const cplx phase = std::polar(1.0, sign * k * z0);
    const double w_lo = path(lo);
    const double w_hi = path(hi);
    if (d == 0.0 && (w_lo == 0.0 || w_hi == 0.0)) {
        // collinear segment on the side where the phase is stationary: integrand is 1/|z - z0|
        const double ratio = std::abs(hi - z0) / std::abs(lo - z0);
        return phase * (lo > z0 ? std::log(ratio) : -std::log(ratio));
    }
    if (sign > 0) return phase * (exp_integral_kernel(w_lo) - exp_integral_kernel(w_hi));
    return phase * (exp_integral_kernel(w_hi) - exp_integral_kernel(w_lo));
}

}  // namespace detail

/// Input impedance of an isolated center-fed dipole. The real part is the
/// radius-free radiation resistance; the radius only enters the reactance
/// through Ci(2 k a^2 / L), which vanishes for exactly half-wave elements.
[[nodiscard]] inline cplx dipole_self_impedance(double length, double f, double wire_radius) {
    if (!(length > 0) || !(f > 0) || !(wire_radius > 0))
        throw DomainError("dipole_self_impedance: length, frequency and radius must be positive");
    using constants::euler_gamma;
    const double k = wavenumber(f);
    const double kl = k * length;
    const double si1 = sine_integral(kl), si2 = sine_integral(2 * kl);
    const double ci1 = cosine_integral(kl), ci2 = cosine_integral(2 * kl);
    const double s = std::sin(kl), c = std::cos(kl);
    const double eta = constants::eta0;
    const double rm = eta / (2 * constants::pi) *
                      (euler_gamma + std::log(kl) - ci1 + 0.5 * s * (si2 - 2 * si1) +
                       0.5 * c * (euler_gamma + std::log(kl / 2) + ci2 - 2 * ci1));
    const double xm = eta / (4 * constants::pi) *
                      (2 * si1 + c * (2 * si1 - si2) -
                       s * (2 * ci1 - ci2 - cosine_integral(2 * k * wire_radius * wire_radius / length)));
    const double sf = detail::feed_factor(k, length);
    return cplx(rm, xm) / (sf * sf);
}

/// Same, with the thin-wire radius defaulted to length / 500.
[[nodiscard]] inline cplx dipole_self_impedance(double length, double f) {
    return dipole_self_impedance(length, f, length / 500);
}

/// Mutual impedance between two z-parallel dipoles whose feed points are
/// `horizontal_separation` apart in the xy-plane and `vertical_offset` apart
/// along z. Covers side-by-side (offset 0), echelon and collinear
/// (separation 0) arrangements; symmetric in the two elements.
[[nodiscard]] inline cplx mutual_impedance_parallel(double horizontal_separation, double vertical_offset,
                                                    double length1, double length2, double f) {
    const double d = std::abs(horizontal_separation);
    const double h = vertical_offset;
    if (!(length1 > 0) || !(length2 > 0) || !(f > 0))
        throw DomainError("mutual_impedance_parallel: lengths and frequency must be positive");
    if (d == 0.0 && h == 0.0) throw DomainError("mutual_impedance_parallel: coincident elements");
    const double a = 0.5 * length1;
    const double b = 0.5 * length2;
    if (d == 0.0 && std::abs(h) <= a + b)
        throw DomainError("mutual_impedance_parallel: collinear elements overlap");

    const double k = wavenumber(f);
    // field of element 1 on the axis of element 2: two end sources and the center source
    const std::array<std::pair<double, double>, 3> sources = {{{a, 1.0}, {-a, 1.0}, {0.0, -2.0 * std::cos(k * a)}}};
    const cplx two_j(0.0, 2.0);
    cplx total = 0;
    for (const auto& [z0, weight] : sources) {
        using detail::segment_integral;
        // sin(k (b - |z - h|)) split into exponentials on each half of element 2
        const cplx lower = (std::polar(1.0, k * (b - h)) * segment_integral(+1, z0, h - b, h, d, k) -
                            std::polar(1.0, -k * (b - h)) * segment_integral(-1, z0, h - b, h, d, k)) /
                           two_j;
        const cplx upper = (std::polar(1.0, k * (b + h)) * segment_integral(-1, z0, h, h + b, d, k) -
                            std::polar(1.0, -k * (b + h)) * segment_integral(+1, z0, h, h + b, d, k)) /
                           two_j;
        total += weight * (lower + upper);
    }
    const cplx zm = cplx(0.0, constants::eta0 / (4 * constants::pi)) * total;
    return zm / (detail::feed_factor(k, length1) * detail::feed_factor(k, length2));
}

/// N x N port impedance matrix at frequency f. Symmetric by construction.
[[nodiscard]] inline Eigen::MatrixXcd assemble_impedance_matrix(const ArrayGeometry& geometry, double f) {
    const auto n = static_cast<Eigen::Index>(geometry.size());
    Eigen::MatrixXcd Z(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& ei = geometry.elements[static_cast<std::size_t>(i)];
        Z(i, i) = dipole_self_impedance(ei.length, f, geometry.wire_radius);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& ej = geometry.elements[static_cast<std::size_t>(j)];
            const Vec3 delta = ej.position - ei.position;
            Z(i, j) = mutual_impedance_parallel(std::hypot(delta.x(), delta.y()), delta.z(), ei.length, ej.length, f);
            Z(j, i) = Z(i, j);
        }
    }
    return Z;
}

}  // namespace dsa
