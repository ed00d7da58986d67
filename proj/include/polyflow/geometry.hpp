#pragma once

// Polygons with a fixed cyclic sequence of outward edge normals.
//
// A class fixes N outward unit normals n_j. A member of the class is the
// height vector h with h_j = w_j . n_j, where w_j is the vertex at the end of
// edge j. Edge j runs from w_{j-1} to w_j; every index is periodic mod N.
// The vertex w_j closes edge j and opens edge j+1, so its outer angle phi_j
// is the signed turn from t_j to t_{j+1}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polyflow/error.hpp"

namespace polyflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

class PolygonClass;
using ClassPtr = std::shared_ptr<const PolygonClass>;

class PolygonClass {
public:
    // Turns within this much of 0 or +-pi are rejected.
    static constexpr double kAngleTolerance = 1e-12;
    static constexpr double kClosureTolerance = 1e-9;

    static ClassPtr from_normals(std::vector<double> angles) {
        const std::size_t n = angles.size();
        if (n < 3) throw Error(Errc::DegenerateClass, "a polygon class needs at least 3 normals");

        std::vector<Vec2> normals(n), tangents(n);
        for (std::size_t j = 0; j < n; ++j) {
            normals[j] = {std::cos(angles[j]), std::sin(angles[j])};
            tangents[j] = {-normals[j].y, normals[j].x};
        }

        std::vector<double> phi(n);
        double turn = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Vec2 t0 = tangents[j];
            const Vec2 t1 = tangents[(j + 1) % n];
            phi[j] = std::atan2(cross(t0, t1), dot(t0, t1));
            if (std::abs(phi[j]) <= kAngleTolerance ||
                std::numbers::pi - std::abs(phi[j]) <= kAngleTolerance) {
                throw Error(Errc::DegenerateClass,
                            "normals " + std::to_string(j) + " and " + std::to_string((j + 1) % n) +
                                " are equal or antipodal");
            }
            turn += phi[j];
        }
        if (std::abs(turn - 2.0 * std::numbers::pi) > kClosureTolerance) {
            throw Error(Errc::NotClosed,
                        "outer angles sum to " + std::to_string(turn) + ", expected 2*pi");
        }

        std::shared_ptr<PolygonClass> cls(new PolygonClass());
        cls->angles_ = std::move(angles);
        cls->normals_ = std::move(normals);
        cls->tangents_ = std::move(tangents);
        cls->phi_ = std::move(phi);
        cls->derive_coefficients();
        return cls;
    }

    std::size_t size() const noexcept { return angles_.size(); }

    std::size_t prev(std::size_t j) const noexcept { return j == 0 ? size() - 1 : j - 1; }
    std::size_t next(std::size_t j) const noexcept { return j + 1 == size() ? 0 : j + 1; }

    const std::vector<double>& normal_angles() const noexcept { return angles_; }
    const std::vector<double>& outer_angles() const noexcept { return phi_; }
    const std::vector<double>& a() const noexcept { return a_; }
    const std::vector<double>& b() const noexcept { return b_; }
    const std::vector<double>& eta() const noexcept { return eta_; }
    double c_star() const noexcept { return c_star_; }

    Vec2 normal(std::size_t j) const noexcept { return normals_[j]; }
    Vec2 tangent(std::size_t j) const noexcept { return tangents_[j]; }

    /// Sum of eta_j, which equals 2 * sum tan(phi_j / 2).
    double eta_sum() const noexcept { return eta_sum_; }

    bool same_as(const PolygonClass& other, double tol = 1e-12) const noexcept {
        if (this == &other) return true;
        if (size() != other.size()) return false;
        for (std::size_t j = 0; j < size(); ++j) {
            if (norm(normals_[j] - other.normals_[j]) > tol) return false;
        }
        return true;
    }

private:
    PolygonClass() = default;

    void derive_coefficients() {
        const std::size_t n = size();
        a_.resize(n);
        b_.resize(n);
        eta_.resize(n);
        for (std::size_t j = 0; j < n; ++j) a_[j] = 1.0 / std::sin(phi_[j]);
        for (std::size_t j = 0; j < n; ++j) {
            const double pm = phi_[prev(j)];
            const double pj = phi_[j];
            b_[j] = -std::cos(pm) / std::sin(pm) - std::cos(pj) / std::sin(pj);
            eta_[j] = std::tan(pj / 2.0) + std::tan(pm / 2.0);
        }
        c_star_ = 0.0;
        eta_sum_ = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            c_star_ = std::max(c_star_, std::abs(a_[prev(j)]) + std::abs(b_[j]) + std::abs(a_[j]));
            eta_sum_ += eta_[j];
        }
    }

    std::vector<double> angles_;
    std::vector<Vec2> normals_;
    std::vector<Vec2> tangents_;
    std::vector<double> phi_;
    std::vector<double> a_, b_, eta_;
    double c_star_ = 0.0;
    double eta_sum_ = 0.0;
};

inline ClassPtr class_from_normals(std::vector<double> angles) {
    return PolygonClass::from_normals(std::move(angles));
}

/// A member of a polygon class, identified by its height vector.
class Polygon {
public:
    Polygon(ClassPtr cls, std::vector<double> heights) : cls_(std::move(cls)), h_(std::move(heights)) {
        if (!cls_) throw Error(Errc::InvalidPolygon, "polygon without a class");
        if (h_.size() != cls_->size()) {
            throw Error(Errc::InvalidPolygon, "expected " + std::to_string(cls_->size()) +
                                                  " heights, got " + std::to_string(h_.size()));
        }
    }

    const PolygonClass& cls() const noexcept { return *cls_; }
    const ClassPtr& class_ptr() const noexcept { return cls_; }
    std::size_t size() const noexcept { return h_.size(); }

    const std::vector<double>& heights() const noexcept { return h_; }
    double h(std::size_t j) const noexcept { return h_[j]; }

private:
    ClassPtr cls_;
    std::vector<double> h_;
};

inline bool same_class(const Polygon& p, const Polygon& q) noexcept {
    return p.class_ptr() == q.class_ptr() || p.cls().same_as(q.cls());
}

inline void require_same_class(const Polygon& p, const Polygon& q) {
    if (!same_class(p, q)) throw Error(Errc::ClassMismatch, "polygons belong to different classes");
}

// ---------------------------------------------------------------------------
// Measures

/// Vertex w_j is the intersection of the support lines of edges j and j+1.
inline std::vector<Vec2> vertices(const Polygon& p) {
    const PolygonClass& cls = p.cls();
    std::vector<Vec2> w(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const std::size_t k = cls.next(j);
        const Vec2 n0 = cls.normal(j);
        const Vec2 n1 = cls.normal(k);
        const double det = cross(n0, n1);  // sin(phi_j)
        w[j] = {(p.h(j) * n1.y - p.h(k) * n0.y) / det, (n0.x * p.h(k) - n1.x * p.h(j)) / det};
    }
    return w;
}

/// |Gamma_j| = a_{j-1} h_{j-1} + b_j h_j + a_j h_{j+1}. Values may be non-positive
/// for height vectors outside the class.
inline std::vector<double> edge_lengths(const Polygon& p) {
    const PolygonClass& cls = p.cls();
    const auto& a = cls.a();
    const auto& b = cls.b();
    std::vector<double> len(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const std::size_t jm = cls.prev(j);
        len[j] = a[jm] * p.h(jm) + b[j] * p.h(j) + a[j] * p.h(cls.next(j));
    }
    return len;
}

/// Sum of eta_j h_j; linear in h.
inline double total_length(const Polygon& p) {
    const auto& eta = p.cls().eta();
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) sum += eta[j] * p.h(j);
    return sum;
}

inline double area(const Polygon& p) {
    const auto len = edge_lengths(p);
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) sum += len[j] * p.h(j);
    return 0.5 * sum;
}

inline std::vector<double> curvatures(const Polygon& p, double collapse_threshold = 0.0) {
    const auto len = edge_lengths(p);
    const auto& eta = p.cls().eta();
    std::vector<double> kappa(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (!(len[j] > collapse_threshold)) {
            throw Error(Errc::EdgeCollapse, "edge " + std::to_string(j) + " has length " +
                                                std::to_string(len[j]));
        }
        kappa[j] = eta[j] / len[j];
    }
    return kappa;
}

inline double distance(const Polygon& p, const Polygon& q) {
    require_same_class(p, q);
    double d = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) d = std::max(d, std::abs(p.h(j) - q.h(j)));
    return d;
}

/// Height-wise convex combination (1 - theta) p0 + theta p1. The result is not
/// validated; it can leave the set of simple polygons.
inline Polygon interpolate(const Polygon& p0, const Polygon& p1, double theta) {
    require_same_class(p0, p1);
    std::vector<double> h(p0.size());
    for (std::size_t j = 0; j < h.size(); ++j) h[j] = (1.0 - theta) * p0.h(j) + theta * p1.h(j);
    return Polygon(p0.class_ptr(), std::move(h));
}

/// Rigid translation by c shifts each height by c . n_j.
inline Polygon translate(const Polygon& p, Vec2 c) {
    std::vector<double> h(p.heights());
    for (std::size_t j = 0; j < h.size(); ++j) h[j] += dot(c, p.cls().normal(j));
    return Polygon(p.class_ptr(), std::move(h));
}

inline Polygon scale(const Polygon& p, double s) {
    std::vector<double> h(p.heights());
    for (double& v : h) v *= s;
    return Polygon(p.class_ptr(), std::move(h));
}

// ---------------------------------------------------------------------------
// Vertex-list geometry

inline double shoelace_area(std::span<const Vec2> w) {
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) sum += cross(w[i], w[(i + 1) % w.size()]);
    return 0.5 * sum;
}

namespace detail {

inline int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(Vec2 a, Vec2 b, Vec2 c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
           c.y <= std::max(a.y, b.y);
}

}  // namespace detail

/// Closed-segment intersection test; touching endpoints count.
inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    using detail::on_segment;
    using detail::orientation;
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

/// O(N^2) pairwise test over non-adjacent edges. Edge i runs w[i-1] -> w[i].
inline bool is_simple(std::span<const Vec2> w) {
    const std::size_t n = w.size();
    if (n < 3) return false;
    auto start = [&](std::size_t i) { return w[(i + n - 1) % n]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 2; k < n; ++k) {
            if (i == 0 && k == n - 1) continue;  // adjacent through the wraparound
            if (segments_intersect(start(i), w[i], start(k), w[k])) return false;
        }
    }
    return true;
}

/// Winding number of the closed vertex loop around q (0 when outside).
inline int winding_number(std::span<const Vec2> w, Vec2 q) {
    int wn = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Vec2 a = w[i];
        const Vec2 b = w[(i + 1) % w.size()];
        if (a.y <= q.y) {
            if (b.y > q.y && cross(b - a, q - a) > 0.0) ++wn;
        } else if (b.y <= q.y && cross(b - a, q - a) < 0.0) {
            --wn;
        }
    }
    return wn;
}

inline double point_segment_distance(Vec2 q, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double s = len2 > 0.0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
    return norm(q - (a + s * ab));
}

// ---------------------------------------------------------------------------
// Ingestion and validity

/// Builds the class and the height vector of a simple counterclockwise polygon.
/// Vertex i of the input becomes w_i, so vertices() reproduces the list without
/// index rotation.
inline Polygon class_and_heights_from_vertices(std::span<const Vec2> w) {
    const std::size_t n = w.size();
    if (n < 3) throw Error(Errc::DegenerateClass, "need at least 3 vertices");

    double extent = 0.0;
    for (const Vec2& v : w) extent = std::max({extent, std::abs(v.x), std::abs(v.y)});
    const double zero_edge = 1e-12 * std::max(extent, 1.0);

    std::vector<double> angles(n), heights(n);
    std::vector<Vec2> normals(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2 e = w[j] - w[(j + n - 1) % n];
        const double len = norm(e);
        if (len <= zero_edge) throw Error(Errc::ZeroEdge, "edge " + std::to_string(j) + " has zero length");
        const Vec2 t = (1.0 / len) * e;
        normals[j] = {t.y, -t.x};
        angles[j] = std::atan2(normals[j].y, normals[j].x);
    }
    if (!is_simple(w)) throw Error(Errc::NonSimple, "vertex list self-intersects");
    if (!(shoelace_area(w) > 0.0)) throw Error(Errc::NotCCW, "vertex list is not counterclockwise");

    ClassPtr cls = PolygonClass::from_normals(angles);
    for (std::size_t j = 0; j < n; ++j) heights[j] = dot(w[j], cls->normal(j));
    return Polygon(std::move(cls), std::move(heights));
}

struct ValidityReport {
    double min_edge = 0.0;         // sigma: the shortest reconstructed edge
    bool edges_positive = false;   // every edge longer than the threshold
    bool simple = false;
    double rho_lower_bound = 0.0;  // sigma / C^*, a lower bound on the distance to the invalid set

    bool valid() const noexcept { return edges_positive && simple; }
};

inline ValidityReport validate(const Polygon& p, double min_edge = 0.0) {
    ValidityReport r;
    const auto len = edge_lengths(p);
    r.min_edge = *std::min_element(len.begin(), len.end());
    r.edges_positive = r.min_edge > min_edge;
    const auto w = vertices(p);
    bool finite = true;
    for (const Vec2& v : w) finite = finite && std::isfinite(v.x) && std::isfinite(v.y);
    r.simple = finite && is_simple(w);
    r.rho_lower_bound = r.edges_positive ? r.min_edge / p.cls().c_star() : 0.0;
    return r;
}

}  // namespace polyflow
