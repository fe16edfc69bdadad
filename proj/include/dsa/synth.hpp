// SPDX-License-Identifier: Apache-2.0
//
// Load-configuration synthesis. For targets H_opt^(k) the objective is
//
//   J(theta) = sum_k || alpha_k A_k(theta) - H_opt^(k) ||_F^2,
//   A_k(theta) = H_c^(k) (Z_L^(k)(theta) + Z^(k))^-1 V,
//
// where alpha_k is by default the least-squares scale <A_k, H_opt^(k)> / ||A_k||^2.
// Because alpha_k is optimal its own variation drops out of dJ/dtheta, and the
// gradient only needs the forward currents I = M^-1 V and one adjoint solve
// W = M^-T H_c^T conj(residual) per subcarrier:
//
//   dJ/dtheta_n = -2 Re{ alpha_k z'_n sum_j I_nj W_nj }.
#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dsa/error.hpp"
#include "dsa/lbfgs.hpp"
#include "dsa/loads.hpp"
#include "dsa/network.hpp"

namespace dsa {

struct SteeringAssignment {
    int input = 0;       ///< 0-based RF chain
    int subcarrier = 0;  ///< 0-based
    double angle_deg = 0;
    std::size_t test_index = 0;  ///< filled by build_steering_targets
};

struct TargetSpec {
    std::vector<Eigen::MatrixXcd> H;  ///< T x Na per subcarrier
    /// participates(j, k): column j of subcarrier k enters the objective
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> participates;
    std::vector<SteeringAssignment> assignments;

    [[nodiscard]] bool empty() const { return !participates.any(); }

    [[nodiscard]] std::optional<SteeringAssignment> assignment_for(int input, int subcarrier) const {
        for (const auto& a : assignments)
            if (a.input == input && a.subcarrier == subcarrier) return a;
        return std::nullopt;
    }
};

/// Index of the test point whose angle label is closest (circularly) to `angle_deg`.
[[nodiscard]] inline std::size_t nearest_test_index(const TestPointSet& tests, double angle_deg) {
    if (tests.angles_deg.empty()) throw ConfigError("test points carry no angle labels");
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < tests.angles_deg.size(); ++t) {
        double e = std::fmod(std::abs(tests.angles_deg[t] - angle_deg), 360.0);
        e = std::min(e, 360.0 - e);
        if (e < best_err - 1e-12) {
            best_err = e;
            best = t;
        }
    }
    return best;
}

/// One-hot targets: H_opt^(k)(t_i, i) = 1 for each (input i, subcarrier k, angle).
[[nodiscard]] inline TargetSpec build_steering_targets(const TestPointSet& tests, int num_active, int subcarriers,
                                                       std::vector<SteeringAssignment> assignments) {
    TargetSpec spec;
    const auto T = static_cast<Eigen::Index>(tests.size());
    spec.H.assign(static_cast<std::size_t>(subcarriers), Eigen::MatrixXcd::Zero(T, num_active));
    spec.participates = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(num_active, subcarriers, false);
    for (auto& a : assignments) {
        if (a.input < 0 || a.input >= num_active || a.subcarrier < 0 || a.subcarrier >= subcarriers)
            throw ConfigError("steering assignment (input " + std::to_string(a.input + 1) + ", subcarrier " +
                              std::to_string(a.subcarrier + 1) + ") out of range");
        if (spec.participates(a.input, a.subcarrier))
            throw ConfigError("duplicate steering assignment for input " + std::to_string(a.input + 1) +
                              ", subcarrier " + std::to_string(a.subcarrier + 1));
        a.test_index = nearest_test_index(tests, a.angle_deg);
        spec.participates(a.input, a.subcarrier) = true;
        spec.H[static_cast<std::size_t>(a.subcarrier)](static_cast<Eigen::Index>(a.test_index), a.input) = 1.0;
    }
    spec.assignments = std::move(assignments);
    return spec;
}

/// Per-subcarrier normalization: closed-form least squares, or one fixed constant.
struct AlphaPolicy {
    bool optimal = true;
    cplx fixed_value = 1.0;
};

/// Everything the objective needs besides theta.
struct SynthesisProblem {
    const NetworkModel* model = nullptr;
    LoadConfig loads;
    DriveMatrix drive;
    TargetSpec target;
    AlphaPolicy alpha;

    SynthesisProblem() = default;
    SynthesisProblem(const NetworkModel& m, LoadConfig l, TargetSpec t, AlphaPolicy a = {})
        : model(&m), loads(std::move(l)), target(std::move(t)), alpha(a) {
        drive = DriveMatrix{loads.R, m.num_elements(), static_cast<Eigen::Index>(loads.num_active)};
        validate();
    }

    void validate() const {
        if (model == nullptr) throw ConfigError("SynthesisProblem: no network model");
        loads.validate();
        if (static_cast<std::size_t>(model->num_elements()) < loads.num_active || loads.num_active < 1)
            throw DimensionError("SynthesisProblem: active port count inconsistent with geometry");
        if (model->geometry.num_active != loads.num_active)
            throw DimensionError("SynthesisProblem: geometry and load config disagree on active ports");
        if (static_cast<int>(target.H.size()) != model->num_subcarriers())
            throw DimensionError("SynthesisProblem: target subcarrier count differs from the model");
        for (const auto& h : target.H)
            if (h.rows() != model->num_tests() || h.cols() != drive.num_active)
                throw DimensionError("SynthesisProblem: target matrix must be T x Na");
    }
};

/// Objective value, optionally with gradient and the per-subcarrier alphas.
struct ObjectiveEvaluation {
    double value = 0;
    Eigen::VectorXd gradient;
    std::vector<cplx> alpha;
};

[[nodiscard]] inline ObjectiveEvaluation evaluate_objective(const ThetaVector& theta, const SynthesisProblem& prob,
                                                            bool with_gradient) {
    const NetworkModel& model = *prob.model;
    const Eigen::Index N = model.num_elements();
    if (theta.size() != N) throw DimensionError("objective: theta length differs from N");
    ObjectiveEvaluation out;
    if (with_gradient) out.gradient = Eigen::VectorXd::Zero(N);
    const Eigen::MatrixXcd V = prob.drive.matrix();

    for (int k = 0; k < model.num_subcarriers(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const auto mask = prob.target.participates.col(k);
        if (!mask.any()) {
            out.alpha.emplace_back(0.0);
            continue;
        }
        const LoadDiagonal loads = load_diagonal(theta, model.frequencies.frequency(k), prob.loads);
        const LoadedNetwork net(model.Z[ks], loads.z);
        const Eigen::MatrixXcd I = net.solve(V);
        Eigen::MatrixXcd A = model.Hc[ks] * I;
        const Eigen::MatrixXcd& H = prob.target.H[ks];
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (!mask(j)) A.col(j).setZero();

        cplx alpha = prob.alpha.fixed_value;
        if (prob.alpha.optimal) {
            const double a2 = A.squaredNorm();
            if (!(a2 > 0)) throw DomainError("objective: end-to-end channel is identically zero");
            alpha = A.conjugate().cwiseProduct(H).sum() / a2;
        }
        out.alpha.push_back(alpha);

        Eigen::MatrixXcd residual = alpha * A - H;
        for (Eigen::Index j = 0; j < residual.cols(); ++j)
            if (!mask(j)) residual.col(j).setZero();
        out.value += residual.squaredNorm();

        if (with_gradient) {
            const Eigen::MatrixXcd W = net.solve_transposed(model.Hc[ks].transpose() * residual.conjugate());
            for (Eigen::Index n = 0; n < N; ++n) {
                const cplx s = I.row(n).cwiseProduct(W.row(n)).sum();
                out.gradient(n) += -2.0 * (alpha * loads.dz_dtheta(n) * s).real();
            }
        }
    }
    return out;
}

[[nodiscard]] inline double objective(const ThetaVector& theta, const SynthesisProblem& prob) {
    return evaluate_objective(theta, prob, false).value;
}

[[nodiscard]] inline Eigen::VectorXd objective_gradient(const ThetaVector& theta, const SynthesisProblem& prob) {
    return evaluate_objective(theta, prob, true).gradient;
}

enum class InitPolicy { Uniform, Zeros };

struct OptimizerConfig {
    int max_iterations = 5000;
    double gradient_tolerance = 1e-8;
    int memory = 20;
    InitPolicy init = InitPolicy::Uniform;
    double init_range = 3.0;  ///< theta ~ U[-init_range, init_range]
    int starts = 1;
    std::uint64_t seed = 1;

    void validate() const {
        if (max_iterations < 0) throw ConfigError("optimizer: max_iterations must be nonnegative");
        if (!(gradient_tolerance > 0)) throw ConfigError("optimizer: gradient tolerance must be positive");
        if (memory < 1) throw ConfigError("optimizer: memory depth must be positive");
        if (starts < 1) throw ConfigError("optimizer: at least one start is required");
    }
};

struct OptimizationTrace {
    std::vector<TraceEntry> entries;
    ThetaVector theta_hat;
    double final_objective = 0;
    double initial_objective = 0;
    LbfgsStatus status = LbfgsStatus::MaxIterations;
    std::uint64_t seed = 0;
    double wall_seconds = 0;
    int evaluations = 0;
};

struct SynthesisResult {
    ThetaVector theta_hat;
    OptimizationTrace trace;                ///< of the winning start
    std::vector<OptimizationTrace> starts;  ///< every start, in order
    /// True when the winning start ended on the gradient tolerance or used its
    /// whole budget; false after a line-search failure.
    bool converged = true;
};

[[nodiscard]] inline ThetaVector initial_theta(Eigen::Index n, const OptimizerConfig& cfg, std::uint64_t seed) {
    if (cfg.init == InitPolicy::Zeros) return ThetaVector::Zero(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-cfg.init_range, cfg.init_range);
    ThetaVector theta(n);
    for (Eigen::Index i = 0; i < n; ++i) theta(i) = dist(rng);
    return theta;
}

/// Runs one quasi-Newton descent from `theta0`.
[[nodiscard]] inline OptimizationTrace run_descent(const SynthesisProblem& prob, const ThetaVector& theta0,
                                                   const OptimizerConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        try {
            auto e = evaluate_objective(x, prob, true);
            g = std::move(e.gradient);
            return e.value;
        } catch (const SolverError&) {
            g.setZero(x.size());
            return std::numeric_limits<double>::infinity();
        }
    };
    LbfgsOptions opt;
    opt.max_iterations = cfg.max_iterations;
    opt.gradient_tolerance = cfg.gradient_tolerance;
    opt.memory = cfg.memory;
    auto res = minimize_lbfgs(fg, theta0, opt);

    OptimizationTrace trace;
    trace.entries = std::move(res.trace);
    trace.theta_hat = std::move(res.x);
    trace.final_objective = res.objective;
    trace.initial_objective = trace.entries.front().objective;
    trace.status = res.status;
    trace.evaluations = res.evaluations;
    trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

/// Multi-start synthesis; start s uses seed cfg.seed + s. Returns the best
/// theta encountered across starts.
[[nodiscard]] inline SynthesisResult synthesize(const SynthesisProblem& prob, const OptimizerConfig& cfg) {
    cfg.validate();
    prob.validate();
    if (prob.target.empty()) throw ConfigError("synthesize: target has no participating (input, subcarrier) pair");
    SynthesisResult out;
    for (int s = 0; s < cfg.starts; ++s) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
        auto trace = run_descent(prob, initial_theta(prob.model->num_elements(), cfg, seed), cfg);
        trace.seed = seed;
        out.starts.push_back(std::move(trace));
    }
    std::size_t best = 0;
    for (std::size_t s = 1; s < out.starts.size(); ++s)
        if (out.starts[s].final_objective < out.starts[best].final_objective) best = s;
    out.trace = out.starts[best];
    out.theta_hat = out.trace.theta_hat;
    out.converged = out.trace.status != LbfgsStatus::LineSearchFailed &&
                    out.trace.status != LbfgsStatus::NonFiniteObjective;
    return out;
}

enum class Eta1Mode {
    AcceptedPower,         ///< (P_rad + P_load_loss) / P_avail at the actual currents
    LosslessResimulation,  ///< P_rad / P_avail re-solved with Rv = 0
};

struct DesignRow {
    int input = 0;       ///< 0-based
    int subcarrier = 0;  ///< 0-based
    double frequency = 0;
    std::optional<double> target_angle_deg;
    PowerBudget power;
    PatternResult pattern;
    double aperture_baseline_db = 0;
};

struct DesignReport {
    std::vector<DesignRow> rows;  ///< Na x K, input-major
    double objective = 0;
    std::vector<cplx> alpha;
};

[[nodiscard]] inline DesignReport evaluate_design(const ThetaVector& theta, const SynthesisProblem& prob,
                                                  Eta1Mode eta1_mode = Eta1Mode::AcceptedPower) {
    prob.validate();
    const NetworkModel& model = *prob.model;
    if (theta.size() != model.num_elements()) throw DimensionError("evaluate_design: theta length differs from N");
    DesignReport report;
    if (!prob.target.empty()) {
        const auto e = evaluate_objective(theta, prob, false);
        report.objective = e.value;
        report.alpha = e.alpha;
    }
    LoadConfig lossless = prob.loads;
    lossless.varactor.Rv = 0;
    const Vec3 origin = Vec3::Zero();

    for (Eigen::Index j = 0; j < prob.drive.num_active; ++j) {
        for (int k = 0; k < model.num_subcarriers(); ++k) {
            const auto ks = static_cast<std::size_t>(k);
            const double f = model.frequencies.frequency(k);
            const LoadDiagonal loads = load_diagonal(theta, f, prob.loads);
            const Eigen::VectorXcd v = prob.drive.column(j);
            const Eigen::VectorXcd i = solve_currents(model.Z[ks], loads.z, v);
            DesignRow row;
            row.input = static_cast<int>(j);
            row.subcarrier = k;
            row.frequency = f;
            if (auto a = prob.target.assignment_for(row.input, k)) row.target_angle_deg = a->angle_deg;
            row.power = power_accounting(i, v, model.Z[ks], loads, prob.loads);
            if (eta1_mode == Eta1Mode::LosslessResimulation) {
                const LoadDiagonal ll = load_diagonal(theta, f, lossless);
                const Eigen::VectorXcd il = solve_currents(model.Z[ks], ll.z, v);
                row.power.eta1 = radiated_power(il, model.Z[ks]) / row.power.available;
            }
            const Eigen::VectorXcd y = model.Hc[ks] * i;
            row.pattern = radiation_pattern(y, model.tests, row.power.radiated, row.power.available, origin);
            const Vec3 dir = model.tests.points[row.pattern.peak_index] - origin;
            row.aperture_baseline_db = aperture_baseline_gain(model.geometry, f, dir);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace dsa
