// SPDX-License-Identifier: Apache-2.0
//
// Limited-memory BFGS with backtracking (Armijo) line search.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace dsa {

struct LbfgsOptions {
    int max_iterations = 5000;
    double gradient_tolerance = 1e-8;
    int memory = 20;
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 40;
};

enum class LbfgsStatus { GradientTolerance, MaxIterations, LineSearchFailed, NonFiniteObjective };

struct TraceEntry {
    int iteration = 0;
    double objective = 0;
    double grad_norm = 0;
    double step_norm = 0;
};

struct LbfgsResult {
    Eigen::VectorXd x;
    double objective = 0;
    LbfgsStatus status = LbfgsStatus::MaxIterations;
    int evaluations = 0;
    std::vector<TraceEntry> trace;  ///< entry 0 is the starting point

    [[nodiscard]] bool converged() const { return status == LbfgsStatus::GradientTolerance; }
};

/// `fg(x, grad)` returns f(x) and writes the gradient. Every accepted step
/// satisfies sufficient decrease, so the objective in the trace never rises.
template <typename ObjectiveFn>
[[nodiscard]] LbfgsResult minimize_lbfgs(ObjectiveFn&& fg, Eigen::VectorXd x0, const LbfgsOptions& opt) {
    LbfgsResult res;
    const Eigen::Index n = x0.size();
    Eigen::VectorXd g(n);
    double f = fg(x0, g);
    res.evaluations = 1;
    res.x = std::move(x0);
    res.objective = f;
    res.trace.push_back({0, f, g.norm(), 0.0});
    if (!std::isfinite(f)) {
        res.status = LbfgsStatus::NonFiniteObjective;
        return res;
    }

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;
    Eigen::VectorXd x_new(n), g_new(n), d(n);
    std::vector<double> alpha_buf;

    for (int iter = 1; iter <= opt.max_iterations; ++iter) {
        if (g.norm() <= opt.gradient_tolerance) {
            res.status = LbfgsStatus::GradientTolerance;
            return res;
        }

        // two-loop recursion
        d = -g;
        const std::size_t m = s_hist.size();
        alpha_buf.assign(m, 0.0);
        for (std::size_t i = m; i-- > 0;) {
            alpha_buf[i] = rho_hist[i] * s_hist[i].dot(d);
            d -= alpha_buf[i] * y_hist[i];
        }
        if (m > 0) {
            d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        } else {
            d *= std::min(1.0, 1.0 / g.norm());
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(d);
            d += (alpha_buf[i] - beta) * s_hist[i];
        }

        double slope = g.dot(d);
        if (!(slope < 0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = -g * std::min(1.0, 1.0 / g.norm());
            slope = g.dot(d);
        }

        bool accepted = false;
        double f_new = f;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            double step = 1.0;
            for (int b = 0; b <= opt.max_backtracks; ++b) {
                x_new = res.x + step * d;
                f_new = fg(x_new, g_new);
                ++res.evaluations;
                if (std::isfinite(f_new) && f_new <= f + opt.armijo * step * slope) {
                    accepted = true;
                    break;
                }
                step *= opt.backtrack;
            }
            if (!accepted && !s_hist.empty()) {
                // retry along steepest descent with a fresh memory
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                d = -g * std::min(1.0, 1.0 / g.norm());
                slope = g.dot(d);
            } else if (!accepted) {
                break;
            }
        }
        if (!accepted) {
            res.status = LbfgsStatus::LineSearchFailed;
            return res;
        }

        Eigen::VectorXd s = x_new - res.x;
        Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm() && sy > 0) {
            if (static_cast<int>(s_hist.size()) == opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
            rho_hist.push_back(1.0 / sy);
            s_hist.push_back(s);
            y_hist.push_back(std::move(y));
        }
        const double step_norm = s.norm();
        res.x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        res.objective = f;
        res.trace.push_back({iter, f, g.norm(), step_norm});
    }
    res.status = g.norm() <= opt.gradient_tolerance ? LbfgsStatus::GradientTolerance : LbfgsStatus::MaxIterations;
    return res;
}

}  // namespace dsa
