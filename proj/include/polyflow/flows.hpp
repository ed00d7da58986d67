#pragma once

// Normal-velocity laws V_j = F_j(polygon, t) and the built-in vector fields
// used by the advected flow.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "polyflow/error.hpp"
#include "polyflow/geometry.hpp"
#include "polyflow/quadrature.hpp"

namespace polyflow {

/// Anything that maps (polygon, t) to N edge speeds and may declare the
/// constant area speed it guarantees on a given class.
template <class L>
concept NormalVelocityLaw = requires(const L& law, const Polygon& p, double t, const PolygonClass& c) {
    { law.evaluate(p, t) } -> std::convertible_to<std::vector<double>>;
    { law.declared_mu(c) } -> std::convertible_to<std::optional<double>>;
};

// ---------------------------------------------------------------------------
// Vector fields

/// A planar field the caller asserts to be divergence free away from its
/// singular points.
struct VectorField {
    std::string name;
    std::function<Vec2(Vec2)> eval;
    std::vector<Vec2> singular_points;

    Vec2 operator()(Vec2 x) const { return eval(x); }

    /// u = strength * (x - pole) / |x - pole|^2
    static VectorField point_source(Vec2 pole, double strength = 1.0) {
        return {"point_source",
                [pole, strength](Vec2 x) {
                    const Vec2 r = x - pole;
                    return (strength / dot(r, r)) * r;
                },
                {pole}};
    }

    /// u = omega * (-(y - c_y), x - c_x)
    static VectorField rotation(double omega, Vec2 center = {}) {
        return {"rotation",
                [omega, center](Vec2 x) {
                    return Vec2{-omega * (x.y - center.y), omega * (x.x - center.x)};
                },
                {}};
    }

    static VectorField uniform(Vec2 u) {
        return {"uniform", [u](Vec2) { return u; }, {}};
    }
};

/// Net outward flux of u through the singular set, from a periodic trapezoid
/// rule on a small circle around each singular point.
inline double singular_flux(const VectorField& u, std::size_t samples = 512) {
    double mu = 0.0;
    const auto& pts = u.singular_points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double r = 1e-3;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (k != i) r = std::min(r, 0.25 * norm(pts[k] - pts[i]));
        }
        double sum = 0.0;
        for (std::size_t m = 0; m < samples; ++m) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(samples);
            const Vec2 e{std::cos(a), std::sin(a)};
            sum += dot(u(pts[i] + r * e), e);
        }
        mu += sum * r * 2.0 * std::numbers::pi / static_cast<double>(samples);
    }
    return mu;
}

// ---------------------------------------------------------------------------
// Curvature flows

/// F_j = -kappa_j.
inline std::vector<double> eval_pcf(const Polygon& p) {
    auto v = curvatures(p);
    for (double& x : v) x = -x;
    return v;
}

/// F_j = <kappa> - kappa_j with <kappa> = sum eta / |Gamma|.
inline std::vector<double> eval_ap_pcf(const Polygon& p) {
    const auto kappa = curvatures(p);
    const auto len = edge_lengths(p);
    double perimeter = 0.0;
    for (double l : len) perimeter += l;
    const double mean = p.cls().eta_sum() / perimeter;
    std::vector<double> v(kappa.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = mean - kappa[j];
    return v;
}

// ---------------------------------------------------------------------------
// Advected flow

inline constexpr double kSingularGuard = 1e-9;

/// Mean of u . n_j over edge j by Gauss-Legendre on the segment.
inline double edge_average_flux(const Polygon& p, std::size_t j, const VectorField& u,
                                const GaussLegendre& rule) {
    const PolygonClass& cls = p.cls();
    const auto w = vertices(p);
    const Vec2 a = w[cls.prev(j)];
    const Vec2 b = w[j];
    for (const Vec2& s : u.singular_points) {
        if (point_segment_distance(s, a, b) <= kSingularGuard) {
            throw Error(Errc::SingularFieldOnEdge,
                        "singular point of '" + u.name + "' lies on edge " + std::to_string(j));
        }
    }
    const Vec2 mid = 0.5 * (a + b);
    const Vec2 half = 0.5 * (b - a);
    Vec2 mean{};
    for (std::size_t k = 0; k < rule.size(); ++k) mean = mean + (0.5 * rule.weights[k]) * u(mid + rule.nodes[k] * half);
    return dot(mean, cls.normal(j));
}

inline double edge_average_flux(const Polygon& p, std::size_t j, const VectorField& u, std::size_t order) {
    return edge_average_flux(p, j, u, GaussLegendre(order));
}

inline std::vector<double> eval_advected(const Polygon& p, const VectorField& u, const GaussLegendre& rule) {
    const auto w = vertices(p);
    for (const Vec2& s : u.singular_points) {
        if (winding_number(w, s) == 0) {
            throw Error(Errc::GeometryViolation,
                        "singular point of '" + u.name + "' is outside the polygon");
        }
    }
    std::vector<double> v(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) v[j] = edge_average_flux(p, j, u, rule);
    return v;
}

inline std::vector<double> eval_advected(const Polygon& p, const VectorField& u, std::size_t order) {
    return eval_advected(p, u, GaussLegendre(order));
}

// ---------------------------------------------------------------------------
// Type-erased law

enum class FlowKind { PCF, AP_PCF, Advected, Custom };

inline std::string to_string(FlowKind k) {
    switch (k) {
        case FlowKind::PCF: return "pcf";
        case FlowKind::AP_PCF: return "ap_pcf";
        case FlowKind::Advected: return "advected";
        case FlowKind::Custom: return "custom";
    }
    return "custom";
}

class VelocityLaw {
public:
    using Eval = std::function<std::vector<double>(const Polygon&, double)>;

    static constexpr std::size_t kDefaultQuadratureOrder = 4;

    static VelocityLaw pcf() {
        VelocityLaw law(FlowKind::PCF, "pcf", [](const Polygon& p, double) { return eval_pcf(p); });
        // mu = -2 sum tan(phi_j / 2) depends only on the class.
        law.mu_ = [](const PolygonClass& cls) -> std::optional<double> { return -cls.eta_sum(); };
        return law;
    }

    static VelocityLaw ap_pcf() {
        VelocityLaw law(FlowKind::AP_PCF, "ap_pcf", [](const Polygon& p, double) { return eval_ap_pcf(p); });
        law.mu_ = [](const PolygonClass&) -> std::optional<double> { return 0.0; };
        return law;
    }

    /// When `mu` is empty it is computed once from the flux around the
    /// field's singular points.
    static VelocityLaw advected(VectorField u, std::size_t order = kDefaultQuadratureOrder,
                                std::optional<double> mu = std::nullopt) {
        auto field = std::make_shared<const VectorField>(std::move(u));
        auto rule = std::make_shared<const GaussLegendre>(order);
        VelocityLaw law(FlowKind::Advected, "advected",
                        [field, rule](const Polygon& p, double) { return eval_advected(p, *field, *rule); });
        const double m = mu ? *mu : singular_flux(*field);
        law.mu_ = [m](const PolygonClass&) -> std::optional<double> { return m; };
        law.field_ = field;
        law.order_ = order;
        return law;
    }

    static VelocityLaw custom(std::string name, Eval eval, std::optional<double> mu = std::nullopt) {
        VelocityLaw law(FlowKind::Custom, std::move(name), std::move(eval));
        if (mu) law.mu_ = [m = *mu](const PolygonClass&) -> std::optional<double> { return m; };
        return law;
    }

    FlowKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    const VectorField* field() const noexcept { return field_.get(); }
    std::size_t quadrature_order() const noexcept { return order_; }

    std::vector<double> evaluate(const Polygon& p, double t) const {
        auto v = eval_(p, t);
        if (v.size() != p.size()) {
            throw Error(Errc::InvalidPolygon, "law '" + name_ + "' returned " + std::to_string(v.size()) +
                                                  " speeds for " + std::to_string(p.size()) + " edges");
        }
        return v;
    }

    std::optional<double> declared_mu(const PolygonClass& cls) const {
        if (!mu_) return std::nullopt;
        return mu_(cls);
    }

private:
    VelocityLaw(FlowKind kind, std::string name, Eval eval)
        : kind_(kind), name_(std::move(name)), eval_(std::move(eval)) {}

    FlowKind kind_;
    std::string name_;
    Eval eval_;
    std::function<std::optional<double>(const PolygonClass&)> mu_;
    std::shared_ptr<const VectorField> field_;
    std::size_t order_ = 0;
};

static_assert(NormalVelocityLaw<VelocityLaw>);

// ---------------------------------------------------------------------------
// Diagnostics

/// sum_j |Gamma_j| F_j(p, t) - mu.
template <NormalVelocityLaw Law>
double cas_residual(const Law& law, const Polygon& p, double t) {
    const auto mu = law.declared_mu(p.cls());
    if (!mu) throw Error(Errc::NoDeclaredMu, "law declares no constant area speed");
    const auto v = law.evaluate(p, t);
    const auto len = edge_lengths(p);
    double sum = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) sum += len[j] * v[j];
    return sum - *mu;
}

/// Empirical lower bound on the local Lipschitz constant of the law in the
/// height max-norm, from `samples` random pairs inside the ball B(p, radius).
/// Half of the pair offsets are sign vectors, which realise the max-norm
/// operator norm of a linearised law.
template <NormalVelocityLaw Law>
double lipschitz_probe(const Law& law, const Polygon& p, double t, double radius, std::size_t samples,
                       std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    const std::size_t n = p.size();

    auto checked = [&](std::vector<double> h) {
        Polygon q(p.class_ptr(), std::move(h));
        if (!validate(q).valid()) throw Error(Errc::InvalidBall, "sampled polygon left the admissible set");
        return q;
    };

    double best = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> h0(p.heights()), h1(n);
        const bool signs = coin(rng);
        for (std::size_t j = 0; j < n; ++j) {
            h0[j] += 0.5 * radius * unit(rng);
            const double step = signs ? (coin(rng) ? 1.0 : -1.0) : unit(rng);
            h1[j] = h0[j] + 0.5 * radius * step;
        }
        const Polygon q0 = checked(std::move(h0));
        const Polygon q1 = checked(std::move(h1));
        const double d = distance(q0, q1);
        if (d == 0.0) continue;
        const auto f0 = law.evaluate(q0, t);
        const auto f1 = law.evaluate(q1, t);
        double df = 0.0;
        for (std::size_t j = 0; j < n; ++j) df = std::max(df, std::abs(f0[j] - f1[j]));
        best = std::max(best, df / d);
    }
    return best;
}

}  // namespace polyflow
