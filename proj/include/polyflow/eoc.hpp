#pragma once

// Experimental order of convergence: errors in the height max-norm at grid
// times shared with an exact solution or a fine reference run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "polyflow/error.hpp"
#include "polyflow/stepper.hpp"

namespace polyflow {

using ExactSolution = std::function<std::vector<double>(double t)>;

struct EocRow {
    double tau = 0.0;
    double error = 0.0;
    std::optional<double> order;  // against the previous row
};

template <NormalVelocityLaw Law>
struct EocProblem {
    Polygon initial;
    Law law;
    double t_end = 0.0;
    SolverConfig config;  // its `tau` and `schedule` are overridden per run
};

/// Closed-form solution of the curvature flow from a polygon with equal
/// heights h0: every edge is eta_j h long, so kappa_j = 1/h and
/// h(t) = sqrt(h0^2 - 2t).
inline ExactSolution self_similar_pcf(const Polygon& p0) {
    const double h0 = p0.h(0);
    for (double h : p0.heights()) {
        if (std::abs(h - h0) > 1e-12 * std::max(1.0, std::abs(h0))) {
            throw Error(Errc::ReferenceUnavailable, "self-similar solution needs equal heights");
        }
    }
    const std::size_t n = p0.size();
    return [h0, n](double t) { return std::vector<double>(n, std::sqrt(h0 * h0 - 2.0 * t)); };
}

inline double trajectory_error(const Trajectory& run, const ExactSolution& exact) {
    if (run.termination != Termination::Completed) return std::numeric_limits<double>::infinity();
    double err = 0.0;
    for (const auto& rec : run.records) {
        const auto h = exact(rec.t);
        for (std::size_t j = 0; j < h.size(); ++j) err = std::max(err, std::abs(rec.h[j] - h[j]));
    }
    return err;
}

/// Compares only at times present in both runs; no interpolation in time.
inline double trajectory_error(const Trajectory& run, const Trajectory& reference) {
    if (run.termination != Termination::Completed) return std::numeric_limits<double>::infinity();
    const auto& ref = reference.records;
    double err = 0.0;
    std::size_t k = 0;
    for (const auto& rec : run.records) {
        const double tol = 1e-9 * std::max(1.0, std::abs(rec.t));
        while (k < ref.size() && ref[k].t < rec.t - tol) ++k;
        if (k == ref.size()) break;
        if (std::abs(ref[k].t - rec.t) > tol) continue;
        for (std::size_t j = 0; j < rec.h.size(); ++j) err = std::max(err, std::abs(rec.h[j] - ref[k].h[j]));
    }
    return err;
}

inline std::vector<EocRow> eoc_table(std::span<const double> taus, std::span<const double> errors) {
    std::vector<EocRow> rows(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        rows[i].tau = taus[i];
        rows[i].error = errors[i];
        if (i > 0 && errors[i] > 0.0 && errors[i - 1] > 0.0 && std::isfinite(errors[i]) &&
            std::isfinite(errors[i - 1])) {
            rows[i].order = std::log(errors[i - 1] / errors[i]) / std::log(taus[i - 1] / taus[i]);
        }
    }
    return rows;
}

namespace detail {

template <NormalVelocityLaw Law>
std::vector<Trajectory> run_sweep(const EocProblem<Law>& problem, std::span<const double> taus) {
    std::vector<std::future<Trajectory>> jobs;
    jobs.reserve(taus.size());
    for (double tau : taus) {
        jobs.push_back(std::async(std::launch::async, [&problem, tau] {
            SolverConfig cfg = problem.config;
            cfg.tau = tau;
            cfg.schedule.clear();
            return run(problem.initial, problem.law, cfg, problem.t_end);
        }));
    }
    std::vector<Trajectory> out;
    out.reserve(taus.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace detail

template <NormalVelocityLaw Law>
std::vector<EocRow> eoc_study(const EocProblem<Law>& problem, std::span<const double> taus,
                              const ExactSolution& exact) {
    const auto runs = detail::run_sweep(problem, taus);
    std::vector<double> errors;
    for (const auto& r : runs) errors.push_back(trajectory_error(r, exact));
    return eoc_table(taus, errors);
}

/// Reference-run variant. The reference uses `reference_scheme` at tau_ref,
/// which must be at most min(taus) / 8.
template <NormalVelocityLaw Law>
std::vector<EocRow> eoc_study(const EocProblem<Law>& problem, std::span<const double> taus, double tau_ref,
                              Scheme reference_scheme = Scheme::ImplicitMidpoint) {
    if (taus.empty()) throw Error(Errc::Config, "empty step list");
    const double finest = *std::min_element(taus.begin(), taus.end());
    if (!(tau_ref > 0.0) || tau_ref > finest / 8.0) {
        throw Error(Errc::ReferenceUnavailable, "reference step must be at most min(tau) / 8");
    }
    SolverConfig ref_cfg = problem.config;
    ref_cfg.scheme = reference_scheme;
    ref_cfg.tau = tau_ref;
    ref_cfg.schedule.clear();
    const Trajectory reference = run(problem.initial, problem.law, ref_cfg, problem.t_end);
    if (reference.termination != Termination::Completed) {
        throw Error(Errc::ReferenceUnavailable, "reference run ended early: " + to_string(reference.termination));
    }
    const auto runs = detail::run_sweep(problem, taus);
    std::vector<double> errors;
    for (const auto& r : runs) errors.push_back(trajectory_error(r, reference));
    return eoc_table(taus, errors);
}

}  // namespace polyflow
