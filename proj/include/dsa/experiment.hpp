// SPDX-License-Identifier: Apache-2.0
//
// Config-driven experiment runner behind the `dsa` command line tool.
#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dsa/error.hpp"
#include "dsa/geometry.hpp"
#include "dsa/io.hpp"
#include "dsa/loads.hpp"
#include "dsa/network.hpp"
#include "dsa/synth.hpp"

namespace dsa {

struct TestRingParams {
    int count = 108;
    double distance = 100.0;
    double gain_db = 0.0;
    TestPlane plane = TestPlane::XY;
};

struct ExperimentConfig {
    std::string name;
    FrequencyGrid frequencies;
    DiskParams disk;
    LoadConfig loads;
    TestRingParams tests;
    std::vector<SteeringAssignment> assignments;
    OptimizerConfig optimizer;
    AlphaPolicy alpha;
    Eta1Mode eta1_mode = Eta1Mode::AcceptedPower;
    std::string output_dir = "out";
    /// Canonical dump of the model-defining sections.
    std::string fingerprint;
};

/// Command-line overrides applied after parsing.
struct RunOverrides {
    std::optional<int> max_iterations;
    std::optional<int> starts;
    std::optional<std::string> output_dir;
};

namespace detail {

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Reads typed, optional fields and reports failures with their key path.
class ConfigReader {
public:
    explicit ConfigReader(const nlohmann::json& root) : root_(root) {}

    template <typename T>
    T get(const nlohmann::json& obj, const std::string& path, const char* key, T fallback) const {
        if (!obj.is_object() || !obj.contains(key)) return fallback;
        try {
            return obj.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("wrong type", join(path, key));
        }
    }

    const nlohmann::json& section(const char* key) const {
        static const nlohmann::json empty = nlohmann::json::object();
        if (!root_.contains(key)) return empty;
        if (!root_.at(key).is_object() && !root_.at(key).is_array()) throw ConfigError("wrong type", key);
        return root_.at(key);
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

private:
    const nlohmann::json& root_;
};

// 1-based line of the last component of a dotted key path inside `text`, or 0.
inline int locate_key_line(const std::string& text, const std::string& path) {
    std::size_t pos = 0;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        const auto bracket = part.find('[');
        const std::string key = part.substr(0, bracket);
        const auto found = text.find("\"" + key + "\"", pos);
        if (found == std::string::npos) break;
        pos = found;
    }
    if (pos == 0) return 0;
    int line = 1;
    for (std::size_t i = 0; i < pos; ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace detail

/// Parses and validates a config document. `source` names the file in messages.
[[nodiscard]] inline ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source) {
    using nlohmann::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ConfigError(source + ": " + ex.what());
    }
    try {
        if (!root.is_object()) throw ConfigError("top level must be an object");
        detail::ConfigReader rd(root);
        ExperimentConfig cfg;
        cfg.name = rd.get<std::string>(root, "", "name", "experiment");
        cfg.output_dir = rd.get<std::string>(root, "", "output_dir", "out/" + cfg.name);

        const json& fq = rd.section("frequency");
        cfg.frequencies.f0 = rd.get<double>(fq, "frequency", "f0", 2.4e9);
        cfg.frequencies.bandwidth = rd.get<double>(fq, "frequency", "bandwidth", 80e6);
        cfg.frequencies.subcarriers = rd.get<int>(fq, "frequency", "subcarriers", 1);
        if (cfg.frequencies.subcarriers < 1) throw ConfigError("must be >= 1", "frequency.subcarriers");
        if (!(cfg.frequencies.f0 > 0)) throw ConfigError("must be positive", "frequency.f0");
        if (cfg.frequencies.bandwidth < 0) throw ConfigError("must be nonnegative", "frequency.bandwidth");

        const json& gq = rd.section("geometry");
        const DiskParams d0 = default_disk(cfg.frequencies.f0);
        auto& disk = cfg.disk;
        disk.rings = rd.get<int>(gq, "geometry", "rings", d0.rings);
        disk.ring_step = rd.get<double>(gq, "geometry", "ring_step", d0.ring_step);
        disk.arc_spacing = rd.get<double>(gq, "geometry", "arc_spacing", d0.arc_spacing);
        disk.layers = rd.get<int>(gq, "geometry", "layers", d0.layers);
        disk.layer_spacing = rd.get<double>(gq, "geometry", "layer_spacing", d0.layer_spacing);
        disk.num_active = rd.get<int>(gq, "geometry", "active_elements", 1);
        disk.element_length = rd.get<double>(gq, "geometry", "element_length", d0.element_length);
        disk.wire_radius = rd.get<double>(gq, "geometry", "wire_radius", d0.wire_radius);
        const auto placement = rd.get<std::string>(gq, "geometry", "active_placement", "center");
        if (placement != "center") throw ConfigError("unknown placement '" + placement + "'", "geometry.active_placement");
        if (disk.rings < 1) throw ConfigError("must be >= 1", "geometry.rings");
        if (disk.layers < 1) throw ConfigError("must be >= 1", "geometry.layers");
        if (disk.num_active < 1) throw ConfigError("must be >= 1", "geometry.active_elements");

        const json& lq = rd.section("loads");
        auto& loads = cfg.loads;
        loads.R = rd.get<double>(lq, "loads", "R", 75.0);
        loads.varactor.Rv = rd.get<double>(lq, "loads", "Rv", loads.varactor.Rv);
        loads.varactor.L1 = rd.get<double>(lq, "loads", "L1", loads.varactor.L1);
        loads.varactor.L2 = rd.get<double>(lq, "loads", "L2", loads.varactor.L2);
        loads.varactor.Cmin = rd.get<double>(lq, "loads", "Cmin", loads.varactor.Cmin);
        loads.varactor.Cmax = rd.get<double>(lq, "loads", "Cmax", loads.varactor.Cmax);
        loads.active_varactors = rd.get<bool>(lq, "loads", "active_varactors", true);
        loads.num_active = static_cast<std::size_t>(disk.num_active);
        if (!(loads.R > 0)) throw ConfigError("must be positive", "loads.R");
        try {
            loads.varactor.validate();
        } catch (const DomainError& ex) {
            throw ConfigError(ex.what(), "loads");
        }

        const json& tq = rd.section("test_points");
        cfg.tests.count = rd.get<int>(tq, "test_points", "count", 108);
        cfg.tests.distance = rd.get<double>(tq, "test_points", "distance", 100.0);
        cfg.tests.gain_db = rd.get<double>(tq, "test_points", "gain_db", 0.0);
        const auto plane = rd.get<std::string>(tq, "test_points", "plane", "xy");
        if (plane == "xy")
            cfg.tests.plane = TestPlane::XY;
        else if (plane == "xz")
            cfg.tests.plane = TestPlane::XZ;
        else
            throw ConfigError("expected \"xy\" or \"xz\"", "test_points.plane");
        if (cfg.tests.count < 1) throw ConfigError("must be >= 1", "test_points.count");
        if (!(cfg.tests.distance > 0)) throw ConfigError("must be positive", "test_points.distance");

        static const json no_targets = json::array();
        const json& aq = root.contains("targets") ? rd.section("targets") : no_targets;
        if (!aq.is_array()) throw ConfigError("must be an array", "targets");
        for (std::size_t i = 0; i < aq.size(); ++i) {
            const std::string path = "targets[" + std::to_string(i) + "]";
            SteeringAssignment a;
            a.input = rd.get<int>(aq[i], path, "input", 0) - 1;
            a.subcarrier = rd.get<int>(aq[i], path, "subcarrier", 1) - 1;
            if (!aq[i].is_object() || !aq[i].contains("angle_deg"))
                throw ConfigError("angle_deg is required", path + ".angle_deg");
            a.angle_deg = rd.get<double>(aq[i], path, "angle_deg", 0.0);
            if (a.input < 0 || a.input >= disk.num_active)
                throw ConfigError("input must be in 1..active_elements", path + ".input");
            if (a.subcarrier < 0 || a.subcarrier >= cfg.frequencies.subcarriers)
                throw ConfigError("subcarrier must be in 1..subcarriers", path + ".subcarrier");
            for (const auto& b : cfg.assignments)
                if (b.input == a.input && b.subcarrier == a.subcarrier)
                    throw ConfigError("duplicate (input, subcarrier) assignment", path);
            cfg.assignments.push_back(a);
        }

        const json& oq = rd.section("optimizer");
        auto& opt = cfg.optimizer;
        opt.max_iterations = rd.get<int>(oq, "optimizer", "max_iterations", 5000);
        opt.gradient_tolerance = rd.get<double>(oq, "optimizer", "gradient_tolerance", 1e-8);
        opt.memory = rd.get<int>(oq, "optimizer", "memory", 20);
        opt.starts = rd.get<int>(oq, "optimizer", "starts", 1);
        opt.init_range = rd.get<double>(oq, "optimizer", "init_range", 3.0);
        opt.seed = rd.get<std::uint64_t>(root, "", "seed", 1);
        const auto init = rd.get<std::string>(oq, "optimizer", "init", "uniform");
        if (init == "uniform")
            opt.init = InitPolicy::Uniform;
        else if (init == "zeros")
            opt.init = InitPolicy::Zeros;
        else
            throw ConfigError("expected \"uniform\" or \"zeros\"", "optimizer.init");
        if (oq.contains("alpha")) {
            const json& al = oq.at("alpha");
            if (al.is_string() && al.get<std::string>() == "optimal") {
                cfg.alpha.optimal = true;
            } else if (al.is_number()) {
                cfg.alpha = {false, cplx(al.get<double>(), 0.0)};
            } else if (al.is_array() && al.size() == 2 && al[0].is_number() && al[1].is_number()) {
                cfg.alpha = {false, cplx(al[0].get<double>(), al[1].get<double>())};
            } else {
                throw ConfigError("expected \"optimal\", a number or [re, im]", "optimizer.alpha");
            }
        }
        try {
            opt.validate();
        } catch (const ConfigError& ex) {
            throw ConfigError(ex.what(), "optimizer");
        }

        const auto eta1 = rd.get<std::string>(rd.section("efficiency"), "efficiency", "eta1_mode", "accepted");
        if (eta1 == "accepted")
            cfg.eta1_mode = Eta1Mode::AcceptedPower;
        else if (eta1 == "lossless")
            cfg.eta1_mode = Eta1Mode::LosslessResimulation;
        else
            throw ConfigError("expected \"accepted\" or \"lossless\"", "efficiency.eta1_mode");

        json model_part = {{"frequency", root.value("frequency", json::object())},
                           {"geometry", root.value("geometry", json::object())},
                           {"loads", root.value("loads", json::object())},
                           {"test_points", root.value("test_points", json::object())},
                           {"targets", root.value("targets", json::array())},
                           {"alpha", oq.value("alpha", json("optimal"))}};
        cfg.fingerprint = detail::fnv1a_hex(model_part.dump());
        return cfg;
    } catch (const ConfigError& ex) {
        const int line = ex.key_path().empty() ? 0 : detail::locate_key_line(text, ex.key_path());
        std::string where = source;
        if (line > 0) where += ":" + std::to_string(line);
        if (!ex.key_path().empty()) where += ": " + ex.key_path();
        throw ConfigError(where + ": " + ex.what(), ex.key_path());
    }
}

[[nodiscard]] inline ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment_config(io::read_text(path), path);
}

inline void apply_overrides(ExperimentConfig& cfg, const RunOverrides& o) {
    if (o.max_iterations) {
        if (*o.max_iterations < 0) throw ConfigError("--iterations must be nonnegative");
        cfg.optimizer.max_iterations = *o.max_iterations;
    }
    if (o.starts) {
        if (*o.starts < 1) throw ConfigError("--starts must be >= 1");
        cfg.optimizer.starts = *o.starts;
    }
    if (o.output_dir) cfg.output_dir = *o.output_dir;
}

/// Geometry, probes and per-subcarrier matrices for a config.
struct Scenario {
    NetworkModel model;
    TargetSpec target;
};

[[nodiscard]] inline ArrayGeometry build_geometry(const ExperimentConfig& cfg) { return build_disk_geometry(cfg.disk); }

[[nodiscard]] inline Scenario build_scenario(const ExperimentConfig& cfg) {
    ArrayGeometry geometry = build_geometry(cfg);
    TestPointSet tests = make_test_ring(cfg.tests.count, cfg.tests.distance, std::pow(10.0, cfg.tests.gain_db / 10.0),
                                        cfg.tests.plane);
    Scenario sc{build_network_model(std::move(geometry), std::move(tests), cfg.frequencies), {}};
    sc.target = build_steering_targets(sc.model.tests, cfg.disk.num_active, cfg.frequencies.subcarriers,
                                       cfg.assignments);
    return sc;
}

/// Table-style summary: one row per (input, subcarrier).
[[nodiscard]] inline std::string format_report_table(const DesignReport& r) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %9s %9s %7s %7s %9s %9s\n", "configuration", "gain_dB", "dir_dB", "eta1",
                  "eta2", "peak_deg", "target");
    os << line;
    for (const auto& row : r.rows) {
        const std::string label = "input " + std::to_string(row.input + 1) + ", sc " + std::to_string(row.subcarrier + 1);
        const std::string target = row.target_angle_deg ? io::format_number(*row.target_angle_deg) : "-";
        std::snprintf(line, sizeof line, "%-22s %9.2f %9.2f %7.3f %7.3f %9.1f %9s\n", label.c_str(),
                      row.pattern.peak_gain_db, row.pattern.peak_directivity_db, row.power.eta1, row.power.eta2,
                      row.pattern.peak_angle_deg, target.c_str());
        os << line;
    }
    return os.str();
}

struct ExperimentOutputs {
    DesignReport report;
    nlohmann::json report_json;
    SynthesisResult synthesis;
    std::filesystem::path directory;
};

[[nodiscard]] inline std::filesystem::path prepare_output_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec || !std::filesystem::is_directory(p)) throw Error("output directory '" + dir + "' is not writable");
    return p;
}

/// Synthesizes theta for the config and writes geometry.json, theta.json,
/// trace.csv, pattern.csv and report.json to the output directory.
[[nodiscard]] inline ExperimentOutputs run_experiment(const ExperimentConfig& cfg) {
    const auto dir = prepare_output_dir(cfg.output_dir);
    Scenario sc = build_scenario(cfg);
    const SynthesisProblem prob(sc.model, cfg.loads, sc.target, cfg.alpha);

    ExperimentOutputs out;
    out.directory = dir;
    out.synthesis = synthesize(prob, cfg.optimizer);
    out.report = evaluate_design(out.synthesis.theta_hat, prob, cfg.eta1_mode);
    out.report_json = io::report_to_json(out.report, out.synthesis.converged);

    io::ThetaFile tf{out.synthesis.theta_hat, cfg.fingerprint, out.synthesis.converged,
                     out.synthesis.trace.final_objective};
    io::write_json((dir / "geometry.json").string(), io::geometry_to_json(sc.model.geometry));
    io::write_json((dir / "theta.json").string(), io::theta_to_json(tf));
    io::write_text((dir / "trace.csv").string(), io::trace_csv(out.synthesis.trace));
    io::write_text((dir / "pattern.csv").string(), io::pattern_csv(out.report));
    io::write_json((dir / "report.json").string(), out.report_json);
    return out;
}

/// Recomputes the report and patterns for a stored theta without synthesis.
[[nodiscard]] inline ExperimentOutputs evaluate_only(const ExperimentConfig& cfg, const io::ThetaFile& tf) {
    const auto dir = prepare_output_dir(cfg.output_dir);
    Scenario sc = build_scenario(cfg);
    if (tf.theta.size() != sc.model.num_elements())
        throw DimensionError("theta has " + std::to_string(tf.theta.size()) + " entries but the geometry has " +
                             std::to_string(sc.model.num_elements()) + " elements");
    const SynthesisProblem prob(sc.model, cfg.loads, sc.target, cfg.alpha);
    ExperimentOutputs out;
    out.directory = dir;
    out.report = evaluate_design(tf.theta, prob, cfg.eta1_mode);
    out.report_json = io::report_to_json(out.report, tf.converged);
    io::write_text((dir / "pattern.csv").string(), io::pattern_csv(out.report));
    io::write_json((dir / "report.json").string(), out.report_json);
    return out;
}

}  // namespace dsa
