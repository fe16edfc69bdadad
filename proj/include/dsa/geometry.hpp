// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dsa/constants.hpp"
#include "dsa/error.hpp"

namespace dsa {

using Vec3 = Eigen::Vector3d;

/// Subcarrier k (0-based here) sits at f0 + k W / K.
struct FrequencyGrid {
    double f0 = 2.4e9;
    double bandwidth = 80e6;
    int subcarriers = 1;

    [[nodiscard]] int size() const { return subcarriers; }

    [[nodiscard]] double frequency(int k) const {
        if (k < 0 || k >= subcarriers) throw DimensionError("FrequencyGrid: subcarrier index out of range");
        return f0 + static_cast<double>(k) * bandwidth / static_cast<double>(subcarriers);
    }

    void validate() const {
        if (subcarriers < 1) throw DomainError("FrequencyGrid: subcarrier count must be positive");
        if (!(f0 > 0) || bandwidth < 0) throw DomainError("FrequencyGrid: f0 must be positive and bandwidth nonnegative");
    }
};

enum class Role { Active, Scatterer };

[[nodiscard]] inline std::string_view to_string(Role r) {
    return r == Role::Active ? "active" : "scatterer";
}

/// A z-parallel, center-fed thin dipole.
struct DipoleElement {
    Vec3 position = Vec3::Zero();
    double length = 0;
    Role role = Role::Scatterer;
};

/// Elements ordered with the active ports first.
struct ArrayGeometry {
    std::vector<DipoleElement> elements;
    std::size_t num_active = 0;
    /// Conductor radius used only by the self-reactance term.
    double wire_radius = 0;

    [[nodiscard]] std::size_t size() const { return elements.size(); }
    [[nodiscard]] std::size_t num_scatterers() const { return elements.size() - num_active; }

    /// Radius of the sphere centered at the element centroid that encloses
    /// every dipole including its arms.
    [[nodiscard]] double enclosing_radius() const {
        if (elements.empty()) return 0;
        Vec3 centroid = Vec3::Zero();
        for (const auto& e : elements) centroid += e.position;
        centroid /= static_cast<double>(elements.size());
        double r = 0;
        for (const auto& e : elements) r = std::max(r, (e.position - centroid).norm() + 0.5 * e.length);
        return r;
    }

    [[nodiscard]] Vec3 centroid() const {
        Vec3 c = Vec3::Zero();
        for (const auto& e : elements) c += e.position;
        return elements.empty() ? c : Vec3(c / static_cast<double>(elements.size()));
    }

    void validate() const {
        if (num_active < 1) throw DomainError("ArrayGeometry: at least one active element is required");
        if (num_active > elements.size()) throw DimensionError("ArrayGeometry: more active ports than elements");
        if (!(wire_radius > 0)) throw DomainError("ArrayGeometry: wire radius must be positive");
        for (std::size_t n = 0; n < elements.size(); ++n) {
            const auto& e = elements[n];
            if (!(e.length > 0)) throw DomainError("ArrayGeometry: element length must be positive");
            if ((e.role == Role::Active) != (n < num_active))
                throw DomainError("ArrayGeometry: active elements must precede scatterers");
            for (std::size_t m = 0; m < n; ++m) {
                if ((elements[m].position - e.position).norm() == 0.0)
                    throw DomainError("ArrayGeometry: two elements share a position");
            }
        }
    }
};

/// Probe positions in the radiative region plus the probe gain (linear).
struct TestPointSet {
    std::vector<Vec3> points;
    double receive_gain = 1.0;
    /// Angle label per point in degrees; empty for arbitrary sets.
    std::vector<double> angles_deg;

    [[nodiscard]] std::size_t size() const { return points.size(); }

    /// Real factor applied to open-circuit probe voltages (1 m effective length times sqrt(Gr)).
    [[nodiscard]] double probe_scale() const { return std::sqrt(receive_gain); }

    void validate(const ArrayGeometry& geometry) const {
        if (points.empty()) throw DomainError("TestPointSet: at least one test point is required");
        if (!(receive_gain > 0)) throw DomainError("TestPointSet: receive gain must be positive");
        if (!angles_deg.empty() && angles_deg.size() != points.size())
            throw DimensionError("TestPointSet: angle labels do not match point count");
        const Vec3 c = geometry.centroid();
        const double r = geometry.enclosing_radius();
        for (const auto& p : points) {
            if ((p - c).norm() <= r) throw DomainError("TestPointSet: test point inside the array's enclosing sphere");
        }
    }
};

enum class TestPlane {
    XY,  ///< p_t = d [sin phi, cos phi, 0], the plane transverse to the dipoles
    XZ,  ///< p_t = d [sin phi, 0, cos phi]
};

/// Ring of T probes at phi_t = 2 pi t / T, t = 1..T.
[[nodiscard]] inline TestPointSet make_test_ring(int count, double distance, double receive_gain = 1.0,
                                                 TestPlane plane = TestPlane::XY) {
    if (count < 1) throw DomainError("make_test_ring: count must be positive");
    if (!(distance > 0)) throw DomainError("make_test_ring: distance must be positive");
    TestPointSet tests;
    tests.receive_gain = receive_gain;
    tests.points.reserve(static_cast<std::size_t>(count));
    for (int t = 1; t <= count; ++t) {
        const double phi = 2.0 * constants::pi * t / count;
        const double s = std::sin(phi), c = std::cos(phi);
        tests.points.push_back(plane == TestPlane::XY ? Vec3(distance * s, distance * c, 0.0)
                                                      : Vec3(distance * s, 0.0, distance * c));
        tests.angles_deg.push_back(std::fmod(360.0 * t / count, 360.0));
    }
    return tests;
}

enum class ActivePlacement {
    Center,  ///< one element at the origin, or Na on a circle of radius ring_step/2
};

struct DiskParams {
    int rings = 7;
    double ring_step = 0;      ///< m
    double arc_spacing = 0;    ///< m
    int layers = 1;
    double layer_spacing = 0;  ///< m, along z
    int num_active = 1;
    ActivePlacement placement = ActivePlacement::Center;
    double element_length = 0; ///< m
    double wire_radius = 0;    ///< m
};

/// Default disk at carrier f0: rings of step lambda0/4, arc spacing
/// lambda0/4, half-wave elements.
[[nodiscard]] inline DiskParams default_disk(double f0, int rings = 7, int num_active = 1) {
    const double lambda0 = wavelength(f0);
    DiskParams p;
    p.rings = rings;
    p.ring_step = lambda0 / 4;
    p.arc_spacing = lambda0 / 4;
    p.layer_spacing = 0.75 * lambda0;
    p.num_active = num_active;
    p.element_length = lambda0 / 2;
    p.wire_radius = lambda0 / 1000;
    return p;
}

/// Scatterers on concentric rings in planes of constant z (transverse to the
/// dipoles); ring l has radius l * ring_step and floor(2 pi r_l / arc_spacing)
/// uniformly spaced elements. Extra layers are stacked along z. Active
/// elements go to the center of layer 0.
[[nodiscard]] inline ArrayGeometry build_disk_geometry(const DiskParams& p) {
    if (p.rings < 1 || !(p.ring_step > 0) || !(p.arc_spacing > 0) || p.layers < 1)
        throw DomainError("build_disk_geometry: rings, ring_step, arc_spacing and layers must be positive");
    if (p.layers > 1 && !(p.layer_spacing > p.element_length))
        throw DomainError("build_disk_geometry: layer spacing must exceed the element length");
    if (p.num_active < 1) throw DomainError("build_disk_geometry: at least one active element is required");
    if (!(p.element_length > 0) || !(p.wire_radius > 0))
        throw DomainError("build_disk_geometry: element length and wire radius must be positive");

    ArrayGeometry g;
    g.wire_radius = p.wire_radius;
    g.num_active = static_cast<std::size_t>(p.num_active);

    if (p.num_active == 1) {
        g.elements.push_back({Vec3::Zero(), p.element_length, Role::Active});
    } else {
        const double r = 0.5 * p.ring_step;
        for (int j = 0; j < p.num_active; ++j) {
            const double phi = 2.0 * constants::pi * j / p.num_active;
            g.elements.push_back({Vec3(r * std::cos(phi), r * std::sin(phi), 0.0), p.element_length, Role::Active});
        }
    }

    std::size_t scatterers = 0;
    for (int layer = 0; layer < p.layers; ++layer) {
        const double z = layer * p.layer_spacing;
        for (int l = 1; l <= p.rings; ++l) {
            const double radius = l * p.ring_step;
            const auto count = static_cast<int>(std::floor(2.0 * constants::pi * radius / p.arc_spacing));
            for (int j = 0; j < count; ++j) {
                const double phi = 2.0 * constants::pi * j / count;
                g.elements.push_back({Vec3(radius * std::cos(phi), radius * std::sin(phi), z), p.element_length,
                                      Role::Scatterer});
                ++scatterers;
            }
        }
    }
    if (scatterers == 0) throw DomainError("build_disk_geometry: parameters yield no scatterers");
    g.validate();
    return g;
}

}  // namespace dsa
