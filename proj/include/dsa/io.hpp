// SPDX-License-Identifier: Apache-2.0
//
// File formats: geometry / theta / report as JSON, patterns and traces as CSV.
#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dsa/error.hpp"
#include "dsa/geometry.hpp"
#include "dsa/synth.hpp"

namespace dsa::io {

using nlohmann::json;

inline constexpr const char* pattern_csv_header = "angle_deg,input,subcarrier,gain_db,directivity_db,U_normalized";
inline constexpr const char* trace_csv_header = "iteration,objective,grad_norm,step_norm";

// %.17g keeps doubles round-trippable; the C locale guarantees '.' decimals.
inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double finite_db(double db) { return std::isfinite(db) ? db : -300.0; }

// ---- geometry ----

[[nodiscard]] inline json geometry_to_json(const ArrayGeometry& g) {
    json elements = json::array();
    for (const auto& e : g.elements)
        elements.push_back({{"x", e.position.x()},
                            {"y", e.position.y()},
                            {"z", e.position.z()},
                            {"length", e.length},
                            {"role", std::string(to_string(e.role))}});
    return {{"elements", std::move(elements)},
            {"Na", g.num_active},
            {"Ns", g.num_scatterers()},
            {"wire_radius", g.wire_radius}};
}

[[nodiscard]] inline ArrayGeometry geometry_from_json(const json& j) {
    try {
        ArrayGeometry g;
        for (const auto& e : j.at("elements")) {
            const std::string role = e.at("role").get<std::string>();
            if (role != "active" && role != "scatterer") throw ConfigError("geometry: unknown role '" + role + "'");
            g.elements.push_back({Vec3(e.at("x").get<double>(), e.at("y").get<double>(), e.at("z").get<double>()),
                                  e.at("length").get<double>(), role == "active" ? Role::Active : Role::Scatterer});
        }
        g.num_active = j.at("Na").get<std::size_t>();
        if (j.at("Ns").get<std::size_t>() != g.num_scatterers())
            throw ConfigError("geometry: Ns does not match the element list");
        // radius defaults to the half-wave convention length / 500
        g.wire_radius = j.contains("wire_radius") ? j.at("wire_radius").get<double>()
                                                  : (g.elements.empty() ? 0.0 : g.elements.front().length / 500);
        g.validate();
        return g;
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("geometry: ") + ex.what());
    }
}

// ---- theta ----

struct ThetaFile {
    ThetaVector theta;
    std::string fingerprint;
    bool converged = true;
    double final_objective = 0;
};

[[nodiscard]] inline json theta_to_json(const ThetaFile& t) {
    return {{"theta", std::vector<double>(t.theta.data(), t.theta.data() + t.theta.size())},
            {"fingerprint", t.fingerprint},
            {"converged", t.converged},
            {"final_objective", t.final_objective}};
}

[[nodiscard]] inline ThetaFile theta_from_json(const json& j) {
    try {
        ThetaFile t;
        const json& arr = j.is_array() ? j : j.at("theta");
        const auto values = arr.get<std::vector<double>>();
        t.theta = Eigen::Map<const ThetaVector>(values.data(), static_cast<Eigen::Index>(values.size()));
        if (j.is_object()) {
            t.fingerprint = j.value("fingerprint", std::string{});
            t.converged = j.value("converged", true);
            t.final_objective = j.value("final_objective", 0.0);
        }
        for (Eigen::Index i = 0; i < t.theta.size(); ++i)
            if (!std::isfinite(t.theta(i))) throw ConfigError("theta: non-finite entry");
        return t;
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("theta: ") + ex.what());
    }
}

// ---- report ----

[[nodiscard]] inline json report_to_json(const DesignReport& r, bool converged) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr = {{"input", row.input + 1},
                   {"subcarrier", row.subcarrier + 1},
                   {"frequency_hz", row.frequency},
                   {"peak_gain_db", finite_db(row.pattern.peak_gain_db)},
                   {"peak_directivity_db", finite_db(row.pattern.peak_directivity_db)},
                   {"peak_angle_deg", row.pattern.peak_angle_deg},
                   {"sidelobe_db", finite_db(row.pattern.sidelobe_db)},
                   {"eta1", row.power.eta1},
                   {"eta2", row.power.eta2},
                   {"p_rad_w", row.power.radiated},
                   {"p_load_loss_w", row.power.load_loss},
                   {"p_source_loss_w", row.power.source_loss},
                   {"p_delivered_w", row.power.delivered},
                   {"aperture_baseline_db", row.aperture_baseline_db}};
        jr["target_angle_deg"] = row.target_angle_deg ? json(*row.target_angle_deg) : json(nullptr);
        rows.push_back(std::move(jr));
    }
    json alpha = json::array();
    for (const auto& a : r.alpha) alpha.push_back({a.real(), a.imag()});
    return {{"rows", std::move(rows)},
            {"objective", r.objective},
            {"alpha", std::move(alpha)},
            {"converged", converged},
            {"warning", converged ? json(nullptr) : json("synthesis stopped on a line-search failure")}};
}

// ---- CSV ----

[[nodiscard]] inline std::string pattern_csv(const DesignReport& r) {
    std::ostringstream os;
    os << pattern_csv_header << '\n';
    for (const auto& row : r.rows) {
        const double peak = row.pattern.samples.at(row.pattern.peak_index).intensity;
        for (const auto& s : row.pattern.samples) {
            os << format_number(s.angle_deg) << ',' << row.input + 1 << ',' << row.subcarrier + 1 << ','
               << format_number(finite_db(to_db(s.gain))) << ',' << format_number(finite_db(to_db(s.directivity)))
               << ',' << format_number(peak > 0 ? s.intensity / peak : 0.0) << '\n';
        }
    }
    return os.str();
}

[[nodiscard]] inline std::string trace_csv(const OptimizationTrace& trace) {
    std::ostringstream os;
    os << trace_csv_header << '\n';
    for (const auto& e : trace.entries)
        os << e.iteration << ',' << format_number(e.objective) << ',' << format_number(e.grad_norm) << ','
           << format_number(e.step_norm) << '\n';
    return os.str();
}

// ---- files ----

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path + "'");
}

[[nodiscard]] inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace dsa::io
