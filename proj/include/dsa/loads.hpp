// SPDX-License-Identifier: Apache-2.0
//
// Varactor-loaded ports. Each load is L1 in parallel with the series branch
// (L2, C, Rv):
//
//   z = jwL1 (jwL2 + 1/(jwC) + Rv) / (jw(L1 + L2) + 1/(jwC) + Rv)
//
// with the capacitance driven by an unbounded parameter
//
//   C(theta) = Cmin + (Cmax - Cmin) (atan(theta) + pi/2) / pi.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

#include "dsa/constants.hpp"
#include "dsa/error.hpp"

namespace dsa {

struct VaractorParams {
    double Rv = 0.1;       // ohm
    double L1 = 2.5e-9;    // H
    double L2 = 0.7e-9;    // H
    double Cmin = 0.47e-12;  // F
    double Cmax = 2.35e-12;  // F

    void validate() const {
        if (!(Cmin > 0 && Cmin < Cmax)) throw DomainError("VaractorParams: require 0 < Cmin < Cmax");
        if (!(Rv >= 0)) throw DomainError("VaractorParams: Rv must be nonnegative");
        if (!(L1 > 0 && L2 > 0)) throw DomainError("VaractorParams: inductances must be positive");
    }
};

using ThetaVector = Eigen::VectorXd;

struct LoadConfig {
    VaractorParams varactor;
    double R = 75.0;  ///< RF-chain source resistance, ohm
    std::size_t num_active = 1;
    /// Active ports carry a varactor in series with R.
    bool active_varactors = true;

    void validate() const {
        varactor.validate();
        if (!(R > 0)) throw DomainError("LoadConfig: source resistance must be positive");
    }
};

[[nodiscard]] inline double capacitance_of(double theta, const VaractorParams& p) {
    return p.Cmin + (p.Cmax - p.Cmin) * (std::atan(theta) + constants::pi / 2) / constants::pi;
}

[[nodiscard]] inline double capacitance_derivative(double theta, const VaractorParams& p) {
    return (p.Cmax - p.Cmin) / (constants::pi * (1.0 + theta * theta));
}

/// Load impedance and its derivative with respect to theta.
struct VaractorValue {
    cplx z;
    cplx dz_dtheta;
};

[[nodiscard]] inline VaractorValue varactor_impedance_with_derivative(double theta, double f, const VaractorParams& p) {
    if (!(f > 0)) throw DomainError("varactor_impedance: frequency must be positive");
    const double w = 2 * constants::pi * f;
    const double C = capacitance_of(theta, p);
    const cplx jw(0.0, w);
    const cplx q = 1.0 / (jw * C);
    const cplx series = jw * p.L2 + q + p.Rv;
    const cplx den = jw * (p.L1 + p.L2) + q + p.Rv;
    if (std::abs(den) <= 1e-14 * (std::abs(q) + w * (p.L1 + p.L2)))
        throw SingularityError("varactor_impedance: lossless series resonance");
    const cplx z = jw * p.L1 * series / den;
    // dz/dq = -(w L1)^2 / den^2, dq/dC = -q / C
    const cplx dz_dq = -(w * p.L1) * (w * p.L1) / (den * den);
    return {z, dz_dq * (-q / C) * capacitance_derivative(theta, p)};
}

[[nodiscard]] inline cplx varactor_impedance(double theta, double f, const VaractorParams& p) {
    return varactor_impedance_with_derivative(theta, f, p).z;
}

/// Diagonal of Z_L(theta): varactor (when fitted) plus R on the first
/// num_active ports, varactor alone on the scatterers.
struct LoadDiagonal {
    Eigen::VectorXcd z;
    Eigen::VectorXcd dz_dtheta;
    /// Varactor part only, for loss accounting.
    Eigen::VectorXcd varactor;
};

[[nodiscard]] inline LoadDiagonal load_diagonal(const ThetaVector& theta, double f, const LoadConfig& cfg) {
    if (static_cast<std::size_t>(theta.size()) < cfg.num_active)
        throw DimensionError("assemble_load_matrix: theta shorter than the active port count");
    const Eigen::Index n = theta.size();
    LoadDiagonal out{Eigen::VectorXcd(n), Eigen::VectorXcd(n), Eigen::VectorXcd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool active = static_cast<std::size_t>(i) < cfg.num_active;
        if (active && !cfg.active_varactors) {
            out.varactor(i) = 0;
            out.dz_dtheta(i) = 0;
            out.z(i) = cfg.R;
            continue;
        }
        const auto v = varactor_impedance_with_derivative(theta(i), f, cfg.varactor);
        out.varactor(i) = v.z;
        out.dz_dtheta(i) = v.dz_dtheta;
        out.z(i) = active ? v.z + cfg.R : v.z;
    }
    return out;
}

[[nodiscard]] inline Eigen::DiagonalMatrix<cplx, Eigen::Dynamic> assemble_load_matrix(const ThetaVector& theta,
                                                                                     double f,
                                                                                     const LoadConfig& cfg) {
    return Eigen::DiagonalMatrix<cplx, Eigen::Dynamic>(load_diagonal(theta, f, cfg).z);
}

}  // namespace dsa
