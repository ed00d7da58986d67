#pragma once

// File formats: polygon JSON (vertex lists or class + heights), trajectory
// JSON-lines, CSV tables.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "polyflow/eoc.hpp"
#include "polyflow/error.hpp"
#include "polyflow/geometry.hpp"
#include "polyflow/stepper.hpp"

namespace polyflow {

using json = nlohmann::json;

/// Shortest decimal that round-trips; always uses '.'.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::vector<Vec2> vertices_from_json(const json& j) {
    if (!j.is_array()) throw Error(Errc::Config, "vertex list must be a JSON array of [x, y] pairs");
    std::vector<Vec2> w;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& v = j[i];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw Error(Errc::Config, "vertex " + std::to_string(i) + " is not an [x, y] pair");
        }
        w.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    return w;
}

inline json vertices_to_json(std::span<const Vec2> w) {
    json j = json::array();
    for (const Vec2& v : w) j.push_back({v.x, v.y});
    return j;
}

inline std::vector<double> numbers_from_json(const json& j, const std::string& key) {
    if (!j.is_array()) throw Error(Errc::Config, "key '" + key + "': expected an array of numbers");
    std::vector<double> out;
    for (const json& v : j) {
        if (!v.is_number()) throw Error(Errc::Config, "key '" + key + "': expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

/// { "normal_angles": [...], "heights": [...] }
inline json polygon_to_json(const Polygon& p) {
    return json{{"normal_angles", p.cls().normal_angles()}, {"heights", p.heights()}};
}

/// Accepts either a vertex array or a class + heights object.
inline Polygon polygon_from_json(const json& j) {
    if (j.is_array()) {
        const auto w = vertices_from_json(j);
        return class_and_heights_from_vertices(w);
    }
    if (!j.is_object() || !j.contains("normal_angles") || !j.contains("heights")) {
        throw Error(Errc::Config, "polygon must be a vertex array or an object with normal_angles and heights");
    }
    auto angles = numbers_from_json(j.at("normal_angles"), "normal_angles");
    auto heights = numbers_from_json(j.at("heights"), "heights");
    return Polygon(class_from_normals(std::move(angles)), std::move(heights));
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IOFailure, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::Config, path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Trajectory JSON-lines

namespace detail {

inline json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double from_nullable(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

inline json record_to_json(const StepRecord& r) {
    return json{{"t", r.t},
                {"h", r.h},
                {"area", r.area},
                {"length", r.length},
                {"min_edge", r.min_edge},
                {"cas_residual", detail::nullable(r.cas_residual)},
                {"fp_iters", r.fp_iters},
                {"halvings", r.halvings},
                {"speeds", r.speeds},
                {"trapezoid_defect", detail::nullable(r.trapezoid_defect)},
                {"fp_error_bound", r.fp_error_bound}};
}

inline StepRecord record_from_json(const json& j) {
    StepRecord r;
    r.t = j.at("t").get<double>();
    r.h = j.at("h").get<std::vector<double>>();
    r.area = j.at("area").get<double>();
    r.length = j.at("length").get<double>();
    r.min_edge = j.at("min_edge").get<double>();
    r.cas_residual = detail::from_nullable(j.at("cas_residual"));
    r.fp_iters = j.at("fp_iters").get<int>();
    r.halvings = j.at("halvings").get<int>();
    if (j.contains("speeds")) r.speeds = j.at("speeds").get<std::vector<double>>();
    if (j.contains("trapezoid_defect")) r.trapezoid_defect = detail::from_nullable(j.at("trapezoid_defect"));
    if (j.contains("fp_error_bound")) r.fp_error_bound = j.at("fp_error_bound").get<double>();
    return r;
}

inline Termination termination_from_string(const std::string& s) {
    for (Termination t : {Termination::Completed, Termination::EdgeCollapse, Termination::SimplicityLost,
                          Termination::FpDivergence, Termination::StepBudgetExhausted}) {
        if (to_string(t) == s) return t;
    }
    throw Error(Errc::Config, "unknown termination reason '" + s + "'");
}

/// One record per line; the final line also carries "termination".
inline void write_trajectory_jsonl(std::ostream& out, const Trajectory& traj) {
    for (std::size_t i = 0; i < traj.records.size(); ++i) {
        json j = record_to_json(traj.records[i]);
        if (i + 1 == traj.records.size()) {
            j["termination"] = to_string(traj.termination);
            if (!traj.message.empty()) j["message"] = traj.message;
        }
        out << j.dump() << '\n';
    }
}

inline Trajectory read_trajectory_jsonl(std::istream& in, ClassPtr cls) {
    Trajectory traj;
    traj.cls = std::move(cls);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        StepRecord r = record_from_json(j);
        if (!traj.records.empty() && !(r.t > traj.records.back().t)) {
            throw Error(Errc::Config, "trajectory times are not strictly increasing");
        }
        if (r.h.size() != traj.cls->size()) throw Error(Errc::ClassMismatch, "record size does not match class");
        traj.records.push_back(std::move(r));
        if (j.contains("termination")) {
            traj.termination = termination_from_string(j.at("termination").get<std::string>());
            if (j.contains("message")) traj.message = j.at("message").get<std::string>();
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_summary_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,area,length,min_edge,cas_residual\n";
    for (const auto& r : traj.records) {
        out << format_double(r.t) << ',' << format_double(r.area) << ',' << format_double(r.length) << ','
            << format_double(r.min_edge) << ',' << (std::isfinite(r.cas_residual) ? format_double(r.cas_residual) : "")
            << '\n';
    }
}

inline void write_eoc_csv(std::ostream& out, std::span<const EocRow> rows) {
    out << "tau,error,order\n";
    for (const auto& r : rows) {
        out << format_double(r.tau) << ',' << format_double(r.error) << ','
            << (r.order ? format_double(*r.order) : "") << '\n';
    }
}

}  // namespace polyflow
