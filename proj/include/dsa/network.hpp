// SPDX-License-Identifier: Apache-2.0
//
// Loaded N-port forward model: (Z_L + Z) i = v, y = H_c i, and the power and
// pattern bookkeeping built on it. Phasors are RMS, so P = |i|^2 R.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dsa/channel.hpp"
#include "dsa/constants.hpp"
#include "dsa/error.hpp"
#include "dsa/geometry.hpp"
#include "dsa/impedance.hpp"
#include "dsa/loads.hpp"

namespace dsa {

/// Per-subcarrier impedance and channel matrices for a fixed geometry.
struct NetworkModel {
    FrequencyGrid frequencies;
    ArrayGeometry geometry;
    TestPointSet tests;
    std::vector<Eigen::MatrixXcd> Z;   ///< N x N per subcarrier
    std::vector<Eigen::MatrixXcd> Hc;  ///< T x N per subcarrier

    [[nodiscard]] Eigen::Index num_elements() const { return static_cast<Eigen::Index>(geometry.size()); }
    [[nodiscard]] Eigen::Index num_tests() const { return static_cast<Eigen::Index>(tests.size()); }
    [[nodiscard]] int num_subcarriers() const { return frequencies.size(); }
};

[[nodiscard]] inline NetworkModel build_network_model(ArrayGeometry geometry, TestPointSet tests,
                                                      const FrequencyGrid& frequencies) {
    frequencies.validate();
    geometry.validate();
    tests.validate(geometry);
    NetworkModel model{frequencies, std::move(geometry), std::move(tests), {}, {}};
    for (int k = 0; k < frequencies.size(); ++k) {
        const double f = frequencies.frequency(k);
        model.Z.push_back(assemble_impedance_matrix(model.geometry, f));
        model.Hc.push_back(channel_transimpedance(model.geometry, model.tests, f));
    }
    return model;
}

/// V = sqrt(4R) [I_Na; 0]: one column per RF chain, 1 W available each.
struct DriveMatrix {
    double R = 75.0;
    Eigen::Index num_elements = 0;
    Eigen::Index num_active = 0;

    [[nodiscard]] Eigen::VectorXcd column(Eigen::Index input) const {
        if (input < 0 || input >= num_active) throw DimensionError("DriveMatrix: input index out of range");
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(num_elements);
        v(input) = std::sqrt(4.0 * R);
        return v;
    }

    [[nodiscard]] Eigen::MatrixXcd matrix() const {
        Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(num_elements, num_active);
        for (Eigen::Index n = 0; n < num_active; ++n) V(n, n) = std::sqrt(4.0 * R);
        return V;
    }

    /// Power available from the ideal sources behind R for excitation v.
    [[nodiscard]] double available_power(const Eigen::VectorXcd& v) const {
        return v.head(num_active).squaredNorm() / (4.0 * R);
    }
};

/// LU factorization of Z_L + Z, shared by every right-hand side of one
/// (theta, subcarrier) pair.
class LoadedNetwork {
public:
    static constexpr double max_condition = 1e14;

    LoadedNetwork(const Eigen::MatrixXcd& Z, const Eigen::VectorXcd& load_diagonal) {
        if (Z.rows() != Z.cols() || Z.rows() != load_diagonal.size())
            throw DimensionError("LoadedNetwork: impedance and load dimensions differ");
        Eigen::MatrixXcd M = Z;
        M.diagonal() += load_diagonal;
        lu_.compute(M);
        const double rcond = lu_.rcond();
        if (!(rcond > 1.0 / max_condition))
            throw SolverError("LoadedNetwork: loaded impedance matrix is singular to working precision",
                              rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
    }

    template <typename Rhs>
    [[nodiscard]] Eigen::MatrixXcd solve(const Eigen::MatrixBase<Rhs>& rhs) const {
        return lu_.solve(rhs);
    }

    /// Solves (Z_L + Z)^T x = rhs.
    template <typename Rhs>
    [[nodiscard]] Eigen::MatrixXcd solve_transposed(const Eigen::MatrixBase<Rhs>& rhs) const {
        return lu_.transpose().solve(rhs.eval());
    }

    [[nodiscard]] double condition_estimate() const { return 1.0 / lu_.rcond(); }

private:
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// Port currents for open-circuit voltages v.
[[nodiscard]] inline Eigen::VectorXcd solve_currents(const Eigen::MatrixXcd& Z, const Eigen::VectorXcd& load_diagonal,
                                                     const Eigen::VectorXcd& v) {
    if (v.size() != Z.rows()) throw DimensionError("solve_currents: voltage length differs from N");
    const LoadedNetwork net(Z, load_diagonal);
    Eigen::VectorXcd i = net.solve(v);
    Eigen::VectorXcd residual = Z * i + load_diagonal.cwiseProduct(i) - v;
    if (residual.norm() > 1e-10 * std::max(v.norm(), std::numeric_limits<double>::min())) {
        // one step of iterative refinement
        i -= net.solve(residual);
        residual = Z * i + load_diagonal.cwiseProduct(i) - v;
        if (residual.norm() > 1e-10 * v.norm())
            throw SolverError("solve_currents: residual above tolerance", net.condition_estimate());
    }
    return i;
}

/// H_c (Z_L + Z)^-1 V, T x Na.
[[nodiscard]] inline Eigen::MatrixXcd end_to_end_channel(const Eigen::MatrixXcd& Hc, const Eigen::MatrixXcd& Z,
                                                         const Eigen::VectorXcd& load_diagonal,
                                                         const DriveMatrix& V) {
    if (Hc.cols() != Z.rows() || V.num_elements != Z.rows())
        throw DimensionError("end_to_end_channel: inconsistent dimensions");
    const LoadedNetwork net(Z, load_diagonal);
    const Eigen::MatrixXcd currents = net.solve(V.matrix());
    return Hc * currents;
}

/// i^H Re{Z} i. Values in (-1e-9, 0) are clamped to zero.
[[nodiscard]] inline double radiated_power(const Eigen::VectorXcd& i, const Eigen::MatrixXcd& Z) {
    if (i.size() != Z.rows()) throw DimensionError("radiated_power: current length differs from N");
    const Eigen::MatrixXd R = Z.real();
    const double p = (i.real().dot(R * i.real()) + i.imag().dot(R * i.imag()));
    if (p < -1e-9) throw ModelConsistencyError("radiated_power: negative radiated power (passivity violation)");
    return std::max(p, 0.0);
}

struct PowerBudget {
    double injected = 0;     ///< Re{v^H i}, power leaving the ideal sources
    double available = 0;    ///< sum |v|^2 / 4R over active ports
    double radiated = 0;
    double load_loss = 0;    ///< dissipated in varactor Rv
    double source_loss = 0;  ///< dissipated in the RF-chain resistances
    double delivered = 0;    ///< accepted by the structure: radiated + load_loss
    double eta1 = 0;         ///< delivered / available
    double eta2 = 0;         ///< radiated / available
};

/// Real-power accounting for currents i produced by excitation v. Throws
/// ModelConsistencyError when the balance fails to close to 1e-6 W.
[[nodiscard]] inline PowerBudget power_accounting(const Eigen::VectorXcd& i, const Eigen::VectorXcd& v,
                                                  const Eigen::MatrixXcd& Z, const LoadDiagonal& loads,
                                                  const LoadConfig& cfg) {
    PowerBudget b;
    const auto na = static_cast<Eigen::Index>(cfg.num_active);
    b.injected = (v.adjoint() * i)(0).real();
    b.available = v.head(na).squaredNorm() / (4.0 * cfg.R);
    b.radiated = radiated_power(i, Z);
    b.source_loss = cfg.R * i.head(na).squaredNorm();
    b.load_loss = 0;
    for (Eigen::Index n = 0; n < i.size(); ++n) b.load_loss += loads.varactor(n).real() * std::norm(i(n));
    if (b.load_loss < 0 && b.load_loss > -1e-12) b.load_loss = 0;
    b.delivered = b.radiated + b.load_loss;
    const double imbalance = b.injected - b.source_loss - b.load_loss - b.radiated;
    if (std::abs(imbalance) > 1e-6)
        throw ModelConsistencyError("power_accounting: real-power balance off by " + std::to_string(imbalance) + " W");
    if (b.available > 0) {
        b.eta1 = b.delivered / b.available;
        b.eta2 = b.radiated / b.available;
    }
    return b;
}

struct PatternSample {
    double angle_deg = 0;
    double intensity = 0;     ///< U, W/sr
    double directivity = 0;   ///< 4 pi U / P_rad
    double gain = 0;          ///< 4 pi U / P_avail (realized)
};

struct PatternResult {
    std::vector<PatternSample> samples;
    std::size_t peak_index = 0;
    double peak_angle_deg = 0;
    double peak_gain_db = 0;
    double peak_directivity_db = 0;
    /// Highest level outside the main lobe relative to the peak, dB (<= 0).
    double sidelobe_db = 0;
};

[[nodiscard]] inline double to_db(double x) { return 10.0 * std::log10(x); }

/// Highest local level outside the main lobe around `peak`, relative to the
/// peak, for samples on a closed ring. The main lobe extends from the peak
/// while the level keeps decreasing.
[[nodiscard]] inline double sidelobe_level_db(const std::vector<double>& ring, std::size_t peak) {
    const std::size_t n = ring.size();
    if (n < 3) return -std::numeric_limits<double>::infinity();
    std::vector<bool> main(n, false);
    main[peak] = true;
    for (int dir : {+1, -1}) {
        std::size_t cur = peak;
        for (std::size_t step = 0; step + 1 < n; ++step) {
            const std::size_t next = dir > 0 ? (cur + 1) % n : (cur + n - 1) % n;
            if (ring[next] > ring[cur]) break;
            main[next] = true;
            cur = next;
        }
    }
    double side = 0;
    for (std::size_t t = 0; t < n; ++t)
        if (!main[t]) side = std::max(side, ring[t]);
    if (side <= 0) return -std::numeric_limits<double>::infinity();
    return to_db(side / ring[peak]);
}

/// Pattern over the test points from received voltages y (one excitation).
[[nodiscard]] inline PatternResult radiation_pattern(const Eigen::VectorXcd& y, const TestPointSet& tests,
                                                     double p_rad, double p_avail, const Vec3& origin = Vec3::Zero()) {
    if (static_cast<std::size_t>(y.size()) != tests.size())
        throw DimensionError("radiation_pattern: received vector length differs from T");
    if (!(p_rad > 0)) throw DomainError("radiation_pattern: zero radiated power, directivity undefined");
    PatternResult out;
    out.samples.resize(tests.size());
    std::vector<double> ring(tests.size());
    for (std::size_t t = 0; t < tests.size(); ++t) {
        const double r = (tests.points[t] - origin).norm();
        const double e = std::abs(y(static_cast<Eigen::Index>(t))) / tests.probe_scale();
        auto& s = out.samples[t];
        s.angle_deg = tests.angles_deg.empty() ? static_cast<double>(t) : tests.angles_deg[t];
        s.intensity = e * e * r * r / constants::eta0;
        s.directivity = 4 * constants::pi * s.intensity / p_rad;
        s.gain = p_avail > 0 ? 4 * constants::pi * s.intensity / p_avail : 0.0;
        ring[t] = s.intensity;
    }
    out.peak_index = static_cast<std::size_t>(std::max_element(ring.begin(), ring.end()) - ring.begin());
    const auto& peak = out.samples[out.peak_index];
    out.peak_angle_deg = peak.angle_deg;
    out.peak_directivity_db = to_db(peak.directivity);
    out.peak_gain_db = to_db(peak.gain);
    out.sidelobe_db = sidelobe_level_db(ring, out.peak_index);
    return out;
}

/// 4 pi A / lambda^2 in dB.
[[nodiscard]] inline double aperture_gain_db(double area, double lambda) {
    return to_db(4 * constants::pi * area / (lambda * lambda));
}

namespace detail {

struct Circle {
    Eigen::Vector2d c;
    double r;
    [[nodiscard]] bool contains(const Eigen::Vector2d& p) const { return (p - c).norm() <= r * (1 + 1e-12) + 1e-15; }
};

inline Circle circle_from(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return {0.5 * (a + b), 0.5 * (a - b).norm()};
}

inline Circle circle_from(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    const Eigen::Vector2d ab = b - a, ac = c - a;
    const double d = 2 * (ab.x() * ac.y() - ab.y() * ac.x());
    if (std::abs(d) < 1e-18 * (ab.squaredNorm() + ac.squaredNorm())) {
        // collinear: the widest pair spans the others
        Circle best = circle_from(a, b);
        for (const auto& cand : {circle_from(a, c), circle_from(b, c)})
            if (cand.r > best.r) best = cand;
        return best;
    }
    const Eigen::Vector2d u((ac.y() * ab.squaredNorm() - ab.y() * ac.squaredNorm()) / d,
                            (ab.x() * ac.squaredNorm() - ac.x() * ab.squaredNorm()) / d);
    return {a + u, u.norm()};
}

// Incremental minimum enclosing circle.
inline Circle min_enclosing_circle(const std::vector<Eigen::Vector2d>& pts) {
    if (pts.empty()) return {Eigen::Vector2d::Zero(), 0.0};
    Circle c{pts[0], 0.0};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (c.contains(pts[i])) continue;
        c = {pts[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (c.contains(pts[j])) continue;
            c = circle_from(pts[i], pts[j]);
            for (std::size_t k = 0; k < j; ++k)
                if (!c.contains(pts[k])) c = circle_from(pts[i], pts[j], pts[k]);
        }
    }
    return c;
}

}  // namespace detail

/// Conventional-aperture reference gain for `direction`: 4 pi A / lambda^2
/// with A the smallest disc enclosing the scatterer feed points projected on
/// the plane transverse to the direction.
[[nodiscard]] inline double aperture_baseline_gain(const ArrayGeometry& geometry, double f, const Vec3& direction) {
    const Vec3 u = direction.normalized();
    const Vec3 helper = std::abs(u.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 e1 = u.cross(helper).normalized();
    const Vec3 e2 = u.cross(e1);
    std::vector<Eigen::Vector2d> pts;
    const bool have_scatterers = geometry.num_scatterers() > 0;
    for (std::size_t n = 0; n < geometry.size(); ++n) {
        if (have_scatterers && n < geometry.num_active) continue;
        const Vec3& p = geometry.elements[n].position;
        pts.emplace_back(p.dot(e1), p.dot(e2));
    }
    const auto circle = detail::min_enclosing_circle(pts);
    return aperture_gain_db(constants::pi * circle.r * circle.r, wavelength(f));
}

}  // namespace dsa
