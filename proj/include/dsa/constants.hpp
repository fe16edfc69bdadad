// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <numbers>

namespace dsa {

using cplx = std::complex<double>;

namespace constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;
inline constexpr double c0 = 299792458.0;           // m/s
inline constexpr double mu0 = 1.25663706212e-6;     // H/m
inline constexpr double eps0 = 1.0 / (mu0 * c0 * c0);
inline constexpr double eta0 = mu0 * c0;            // free-space impedance, ohms

}  // namespace constants

[[nodiscard]] inline double wavelength(double f) { return constants::c0 / f; }
[[nodiscard]] inline double wavenumber(double f) { return 2.0 * constants::pi * f / constants::c0; }

}  // namespace dsa
