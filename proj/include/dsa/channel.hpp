// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "dsa/constants.hpp"
#include "dsa/geometry.hpp"
#include "dsa/impedance.hpp"

namespace dsa {

/// [cos(kL/2 cos psi) - cos(kL/2)] / sin psi for a z-dipole of length L, per
/// unit feed current; zero on the dipole axis.
[[nodiscard]] inline double dipole_pattern_factor(double k, double length, double cos_psi, double sin_psi) {
    if (sin_psi < 1e-12) return 0.0;
    const double half = 0.5 * k * length;
    return (std::cos(half * cos_psi) - std::cos(half)) / sin_psi / detail::feed_factor(k, length);
}

/// theta-polarized field (V/m) at `point` produced by 1 A at the feed of `element`.
[[nodiscard]] inline cplx element_field(const DipoleElement& element, const Vec3& point, double f) {
    const double k = wavenumber(f);
    const Vec3 r_vec = point - element.position;
    const double r = r_vec.norm();
    const double sin_psi = std::hypot(r_vec.x(), r_vec.y()) / r;
    const double cos_psi = r_vec.z() / r;
    const double pattern = dipole_pattern_factor(k, element.length, cos_psi, sin_psi);
    return cplx(0.0, constants::eta0 / (2 * constants::pi * r)) * std::polar(1.0, -k * r) * pattern;
}

/// T x N transimpedance: open-circuit probe voltage per ampere of feed current.
[[nodiscard]] inline Eigen::MatrixXcd channel_transimpedance(const ArrayGeometry& geometry, const TestPointSet& tests,
                                                            double f) {
    const auto rows = static_cast<Eigen::Index>(tests.size());
    const auto cols = static_cast<Eigen::Index>(geometry.size());
    const double scale = tests.probe_scale();
    Eigen::MatrixXcd H(rows, cols);
    for (Eigen::Index t = 0; t < rows; ++t)
        for (Eigen::Index n = 0; n < cols; ++n)
            H(t, n) = scale * element_field(geometry.elements[static_cast<std::size_t>(n)],
                                            tests.points[static_cast<std::size_t>(t)], f);
    return H;
}

/// Radiation intensity U (W/sr) in the far-field direction `direction` for
/// the feed currents `currents` (RMS phasors).
[[nodiscard]] inline double far_field_intensity(const ArrayGeometry& geometry, const Eigen::VectorXcd& currents,
                                                double f, const Vec3& direction) {
    const double k = wavenumber(f);
    const Vec3 u = direction.normalized();
    const double sin_psi = std::hypot(u.x(), u.y());
    cplx sum = 0;
    for (std::size_t n = 0; n < geometry.size(); ++n) {
        const auto& e = geometry.elements[n];
        sum += currents(static_cast<Eigen::Index>(n)) * dipole_pattern_factor(k, e.length, u.z(), sin_psi) *
               std::polar(1.0, k * u.dot(e.position));
    }
    const double field = constants::eta0 / (2 * constants::pi) * std::abs(sum);
    return field * field / constants::eta0;
}

}  // namespace dsa
