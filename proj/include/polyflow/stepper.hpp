#pragma once

// Time stepping for h' = F(polygon, t): the explicit Euler scheme and the
// implicit midpoint scheme solved by fixed-point iteration of
//   Lambda(S) = h^m + tau F((S + Gamma^m) / 2, t_m + tau / 2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyflow/error.hpp"
#include "polyflow/flows.hpp"
#include "polyflow/geometry.hpp"

namespace polyflow {

enum class Scheme { Euler, ImplicitMidpoint };

enum class Termination { Completed, EdgeCollapse, SimplicityLost, FpDivergence, StepBudgetExhausted };

inline std::string to_string(Scheme s) { return s == Scheme::Euler ? "euler" : "midpoint"; }

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "completed";
        case Termination::EdgeCollapse: return "edge_collapse";
        case Termination::SimplicityLost: return "simplicity_lost";
        case Termination::FpDivergence: return "fp_divergence";
        case Termination::StepBudgetExhausted: return "step_budget_exhausted";
    }
    return "completed";
}

/// Failure of a single step, tagged with the termination it would cause.
class StepError : public Error {
public:
    StepError(Errc code, Termination reason, const std::string& what) : Error(code, what), reason_(reason) {}
    Termination reason() const noexcept { return reason_; }

private:
    Termination reason_;
};

struct SolverConfig {
    Scheme scheme = Scheme::ImplicitMidpoint;
    double tau = 1e-3;
    // Explicit steps tau_0, tau_1, ...; overrides `tau` when non-empty. The
    // last entry repeats once the list is exhausted.
    std::vector<double> schedule;
    double lambda = 0.5;
    double fp_tolerance = 1e-13;
    int fp_max_iterations = 100;
    double min_edge = 1e-8;
    int max_step_halvings = 10;
    bool euler_predictor = false;
    std::size_t max_steps = 10'000'000;

    void check() const {
        if (!(lambda > 0.0 && lambda < 1.0)) throw Error(Errc::Config, "lambda must lie in (0, 1)");
        if (!(fp_tolerance > 0.0)) throw Error(Errc::Config, "fp_tolerance must be positive");
        if (fp_max_iterations < 1) throw Error(Errc::Config, "fp_max_iterations must be >= 1");
        if (max_step_halvings < 0) throw Error(Errc::Config, "max_step_halvings must be >= 0");
        if (!(min_edge >= 0.0)) throw Error(Errc::Config, "min_edge must be >= 0");
        if (schedule.empty() && !(tau > 0.0)) throw Error(Errc::Config, "tau must be positive");
        for (double s : schedule) {
            if (!(s > 0.0)) throw Error(Errc::Config, "every scheduled step must be positive");
        }
    }
};

struct StepRecord {
    double t = 0.0;
    std::vector<double> h;
    double area = 0.0;
    double length = 0.0;
    double min_edge = 0.0;
    std::vector<double> speeds;  // (h^{m+1} - h^m) / tau_m of the step that produced this record
    double cas_residual = 0.0;   // |Omega^{m+1}| - |Omega^m| - mu tau_m; NaN without a declared mu
    double trapezoid_defect = 0.0;
    int fp_iters = 0;
    int halvings = 0;
    double fp_error_bound = 0.0;
};

struct Trajectory {
    ClassPtr cls;
    std::vector<StepRecord> records;
    Termination termination = Termination::Completed;
    std::string message;

    Polygon polygon(std::size_t i) const { return Polygon(cls, records.at(i).h); }
    Polygon final_polygon() const { return polygon(records.size() - 1); }
};

// ---------------------------------------------------------------------------

struct AreaRate {
    double lhs = 0.0;  // (|Omega(q)| - |Omega(p)|) / tau
    double rhs = 0.0;  // sum of trapezoids (|Gamma_j(p)| + |Gamma_j(q)|) / 2 * (h_j(q) - h_j(p)) / tau
};

inline AreaRate discrete_area_rate(const Polygon& p, const Polygon& q, double tau) {
    require_same_class(p, q);
    const auto lp = edge_lengths(p);
    const auto lq = edge_lengths(q);
    AreaRate r;
    r.lhs = (area(q) - area(p)) / tau;
    for (std::size_t j = 0; j < p.size(); ++j) r.rhs += 0.5 * (lp[j] + lq[j]) * (q.h(j) - p.h(j));
    r.rhs /= tau;
    return r;
}

namespace detail {

inline void require_valid(const Polygon& q, double min_edge, Errc code, const char* what) {
    const auto report = validate(q, min_edge);
    if (!report.edges_positive) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3e", report.min_edge);
        throw StepError(code, Termination::EdgeCollapse, std::string(what) + ": shortest edge " + buf);
    }
    if (!report.simple) throw StepError(code, Termination::SimplicityLost, std::string(what) + " self-intersects");
}

template <NormalVelocityLaw Law>
std::vector<double> evaluate_at(const Law& law, const Polygon& p, double t, Errc code) {
    try {
        return law.evaluate(p, t);
    } catch (const StepError&) {
        throw;
    } catch (const Error& e) {
        const Termination reason = e.code() == Errc::EdgeCollapse ? Termination::EdgeCollapse
                                                                   : Termination::SimplicityLost;
        throw StepError(code, reason, e.what());
    }
}

}  // namespace detail

/// h^{m+1} = h^m + tau F(Gamma^m, t_m).
template <NormalVelocityLaw Law>
Polygon euler_step(const Polygon& p, double t, double tau, const Law& law, double min_edge = 0.0) {
    const auto v = detail::evaluate_at(law, p, t, Errc::ResultInvalid);
    std::vector<double> h(p.heights());
    for (std::size_t j = 0; j < h.size(); ++j) h[j] += tau * v[j];
    Polygon q(p.class_ptr(), std::move(h));
    detail::require_valid(q, min_edge, Errc::ResultInvalid, "Euler result");
    return q;
}

/// One application of the midpoint map with the anchor Gamma^m held fixed.
template <NormalVelocityLaw Law>
Polygon lambda_map(const Polygon& candidate, const Polygon& anchor, double t_mid, double tau, const Law& law) {
    const Polygon mid = interpolate(candidate, anchor, 0.5);
    detail::require_valid(mid, 0.0, Errc::MidpointInvalid, "midpoint polygon");
    const auto v = detail::evaluate_at(law, mid, t_mid, Errc::MidpointInvalid);
    std::vector<double> h(anchor.heights());
    for (std::size_t j = 0; j < h.size(); ++j) h[j] += tau * v[j];
    return Polygon(anchor.class_ptr(), std::move(h));
}

struct MidpointResult {
    Polygon polygon;
    int iterations = 0;
    double last_increment = 0.0;
    double error_bound = 0.0;  // lambda / (1 - lambda) * last increment
};

template <NormalVelocityLaw Law>
MidpointResult midpoint_step(const Polygon& p, double t, double tau, const Law& law, const SolverConfig& cfg) {
    const double t_mid = t + 0.5 * tau;
    Polygon sigma = cfg.euler_predictor ? euler_step(p, t, tau, law) : p;
    double previous = std::numeric_limits<double>::infinity();
    int increases = 0;
    for (int nu = 1; nu <= cfg.fp_max_iterations; ++nu) {
        Polygon next = lambda_map(sigma, p, t_mid, tau, law);
        const double d = distance(next, sigma);
        sigma = std::move(next);
        if (d <= cfg.fp_tolerance) {
            return {std::move(sigma), nu, d, cfg.lambda / (1.0 - cfg.lambda) * d};
        }
        increases = d > previous ? increases + 1 : 0;
        if (increases >= 3) {
            throw StepError(Errc::FixedPointDivergence, Termination::FpDivergence,
                            "successive distances grew three times in a row at iteration " + std::to_string(nu));
        }
        previous = d;
    }
    throw StepError(Errc::FixedPointDivergence, Termination::FpDivergence,
                    "no convergence within " + std::to_string(cfg.fp_max_iterations) + " iterations");
}

// ---------------------------------------------------------------------------

namespace detail {

inline StepRecord make_record(const Polygon& q, double t) {
    StepRecord r;
    r.t = t;
    r.h = q.heights();
    r.area = area(q);
    r.length = total_length(q);
    const auto len = edge_lengths(q);
    r.min_edge = *std::min_element(len.begin(), len.end());
    return r;
}

// Near extinction the midpoint equation loses its admissible root and the
// fixed-point iteration stalls. An explicit step of the nominal size that
// drives an edge through zero identifies that case.
template <NormalVelocityLaw Law>
bool collapses_within(const Polygon& p, double t, double tau, const Law& law) {
    try {
        const auto v = law.evaluate(p, t);
        std::vector<double> h(p.heights());
        for (std::size_t j = 0; j < h.size(); ++j) h[j] += tau * v[j];
        return !validate(Polygon(p.class_ptr(), std::move(h))).edges_positive;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace detail

/// Advances p0 to t_end. A failing step is retried with half the step size up
/// to `max_step_halvings` times before the run terminates.
template <NormalVelocityLaw Law>
Trajectory run(const Polygon& p0, const Law& law, const SolverConfig& cfg, double t_end) {
    cfg.check();
    if (!(t_end > 0.0)) throw Error(Errc::Config, "t_end must be positive");
    if (!validate(p0, cfg.min_edge).valid()) throw Error(Errc::InvalidPolygon, "initial polygon is not valid");

    Trajectory traj;
    traj.cls = p0.class_ptr();
    {
        // no step has produced the initial record
        StepRecord first = detail::make_record(p0, 0.0);
        first.cas_residual = std::numeric_limits<double>::quiet_NaN();
        first.trapezoid_defect = std::numeric_limits<double>::quiet_NaN();
        traj.records.push_back(std::move(first));
    }
    const std::optional<double> mu = law.declared_mu(p0.cls());

    Polygon current = p0;
    double t = 0.0;
    std::size_t scheduled = 0;
    double schedule_sum = 0.0;

    while (t < t_end) {
        // Grid times are products or cumulative sums so that runs with
        // commensurate steps land on identical t values.
        double nominal;
        if (cfg.schedule.empty()) {
            nominal = static_cast<double>(scheduled + 1) * cfg.tau;
        } else {
            const std::size_t i = std::min(scheduled, cfg.schedule.size() - 1);
            nominal = schedule_sum + cfg.schedule[i];
        }
        const double step_scale = nominal - t;
        const double target = (nominal >= t_end - 1e-9 * step_scale) ? t_end : nominal;

        int halvings = 0;
        double tau_try = target - t;
        while (t < target) {
            if (traj.records.size() > cfg.max_steps) {
                traj.termination = Termination::StepBudgetExhausted;
                traj.message = "step budget of " + std::to_string(cfg.max_steps) + " exhausted";
                return traj;
            }
            const bool last = tau_try >= target - t;
            const double tau = last ? target - t : tau_try;
            try {
                Polygon next = current;
                int iters = 0;
                double bound = 0.0;
                if (cfg.scheme == Scheme::Euler) {
                    next = euler_step(current, t, tau, law, cfg.min_edge);
                } else {
                    auto res = midpoint_step(current, t, tau, law, cfg);
                    detail::require_valid(res.polygon, cfg.min_edge, Errc::ResultInvalid, "midpoint result");
                    next = std::move(res.polygon);
                    iters = res.iterations;
                    bound = res.error_bound;
                }
                const double t_next = last ? target : t + tau;
                StepRecord rec = detail::make_record(next, t_next);
                rec.speeds.resize(next.size());
                for (std::size_t j = 0; j < next.size(); ++j) rec.speeds[j] = (next.h(j) - current.h(j)) / tau;
                const StepRecord& prev = traj.records.back();
                rec.cas_residual = mu ? rec.area - prev.area - *mu * tau : std::numeric_limits<double>::quiet_NaN();
                const AreaRate rate = discrete_area_rate(current, next, tau);
                rec.trapezoid_defect = rate.lhs - rate.rhs;
                rec.fp_iters = iters;
                rec.halvings = halvings;
                rec.fp_error_bound = bound;
                traj.records.push_back(std::move(rec));
                current = std::move(next);
                t = t_next;
            } catch (const StepError& e) {
                if (halvings >= cfg.max_step_halvings) {
                    traj.termination = e.reason();
                    traj.message = e.what();
                    if (e.reason() == Termination::FpDivergence &&
                        detail::collapses_within(current, t, step_scale, law)) {
                        traj.termination = Termination::EdgeCollapse;
                        traj.message += "; an edge collapses before t = " + std::to_string(target);
                    }
                    return traj;
                }
                ++halvings;
                tau_try = 0.5 * tau;
            }
        }
        ++scheduled;
        if (!cfg.schedule.empty()) schedule_sum = nominal;
    }
    traj.termination = Termination::Completed;
    return traj;
}

}  // namespace polyflow
