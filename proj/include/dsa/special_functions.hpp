// SPDX-License-Identifier: Apache-2.0
//
// Sine and cosine integrals
//
//   Si(x) = int_0^x sin(t)/t dt
//   Ci(x) = -int_x^inf cos(t)/t dt = gamma + ln x + int_0^x (cos t - 1)/t dt
//
// Small arguments use the power series; larger arguments evaluate the
// continued fraction of E1(ix) = -Ci(x) + i(Si(x) - pi/2) with the modified
// Lentz algorithm. Both branches converge to machine precision.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include "dsa/constants.hpp"
#include "dsa/error.hpp"

namespace dsa {

namespace detail {

template <typename T>
struct SiCi {
    T si;
    T ci;
};

// Requires x > 0.
template <typename T>
SiCi<T> sici_positive(T x) {
    constexpr T eps = std::numeric_limits<T>::epsilon();
    constexpr T series_limit = T(2);
    constexpr int max_terms = 200;
    const T gamma = T(constants::euler_gamma);

    if (x < series_limit) {
        // Si: sum (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
        // Ci: gamma + ln x + sum_{k>=1} (-1)^k x^(2k) / (2k (2k)!)
        T si = x;
        T ci = 0;
        T term = x;  // (-1)^k x^(2k+1)/(2k+1)!
        T cterm = 1;  // (-1)^k x^(2k)/(2k)!
        const T x2 = x * x;
        for (int k = 1; k < max_terms; ++k) {
            cterm *= -x2 / (T(2 * k - 1) * T(2 * k));
            term *= -x2 / (T(2 * k) * T(2 * k + 1));
            const T dci = cterm / T(2 * k);
            const T dsi = term / T(2 * k + 1);
            ci += dci;
            si += dsi;
            if (std::abs(dsi) < eps * std::abs(si) && std::abs(dci) < eps * (std::abs(ci) + eps)) break;
        }
        return {si, gamma + std::log(x) + ci};
    }

    using C = std::complex<T>;
    constexpr T tiny = std::numeric_limits<T>::min() / eps;
    C b(T(1), x);
    C c(T(1) / tiny, T(0));
    C d = T(1) / b;
    C h = d;
    for (int i = 1; i < max_terms; ++i) {
        const T a = -T(i) * T(i);
        b += T(2);
        d = T(1) / (a * d + b);
        c = b + a / c;
        const C del = c * d;
        h *= del;
        if (std::abs(del.real() - T(1)) + std::abs(del.imag()) < eps) break;
    }
    h *= C(std::cos(x), -std::sin(x));
    return {T(constants::pi / 2) + h.imag(), -h.real()};
}

}  // namespace detail

/// Si(x). Odd, total on the reals.
template <typename T = double>
[[nodiscard]] T sine_integral(T x) {
    if (x == T(0)) return T(0);
    const T s = detail::sici_positive(std::abs(x)).si;
    return x < T(0) ? -s : s;
}

/// Ci(x) for x > 0; throws DomainError otherwise.
template <typename T = double>
[[nodiscard]] T cosine_integral(T x) {
    if (!(x > T(0))) throw DomainError("cosine_integral: argument must be positive");
    return detail::sici_positive(x).ci;
}

/// Ci(x) - j Si(x): antiderivative of exp(-jx)/x, the kernel of every
/// closed-form induced-EMF integral.
template <typename T = double>
[[nodiscard]] std::complex<T> exp_integral_kernel(T x) {
    if (!(x > T(0))) throw DomainError("exp_integral_kernel: argument must be positive");
    const auto r = detail::sici_positive(x);
    return {r.ci, -r.si};
}

}  // namespace dsa
