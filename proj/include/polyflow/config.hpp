#pragma once

// Run configuration: one JSON document describing the initial polygon, the
// flow, the solver and the outputs. Unknown keys are rejected by name.

#include <array>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyflow/error.hpp"
#include "polyflow/flows.hpp"
#include "polyflow/io.hpp"
#include "polyflow/stepper.hpp"

namespace polyflow {

struct InitialSpec {
    // Exactly one source is set.
    std::optional<std::vector<Vec2>> vertices;
    std::optional<std::vector<double>> normal_angles;
    std::optional<std::vector<double>> heights;
    std::optional<std::string> file;  // either polygon format, relative to the config
};

struct FieldSpec {
    std::string name = "point_source";
    Vec2 pole{};
    double strength = 1.0;
    double omega = 1.0;
    Vec2 center{};
    Vec2 u{};
};

struct FlowSpec {
    FlowKind kind = FlowKind::PCF;
    std::optional<FieldSpec> field;
    std::size_t quadrature_order = VelocityLaw::kDefaultQuadratureOrder;
    std::optional<double> mu;
};

struct OutputSpec {
    std::string dir = "out";
    std::string trajectory = "trajectory.jsonl";
    std::string summary = "summary.csv";
    std::string eoc = "eoc.csv";
    std::string svg_prefix = "snapshot";
    std::size_t snapshot_every = 10;
    std::optional<std::array<double, 4>> viewport;  // xmin, ymin, xmax, ymax; default from the initial polygon
};

struct ConvergeSpec {
    std::vector<double> taus;
    std::optional<double> reference_tau;
    Scheme reference_scheme = Scheme::ImplicitMidpoint;
    std::optional<std::string> exact;  // "self_similar_pcf"
};

struct RunConfig {
    InitialSpec initial;
    FlowSpec flow;
    SolverConfig solver;
    double t_end = 0.0;
    OutputSpec output;
    std::optional<ConvergeSpec> converge;
    std::filesystem::path base_dir;  // directory of the config file; not serialized
};

namespace detail {

inline std::string join_key(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

inline void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw Error(Errc::Config, "unknown key '" + join_key(prefix, it.key()) + "'");
    }
}

inline const json& require_object(const json& j, const std::string& key) {
    if (!j.is_object()) throw Error(Errc::Config, "key '" + key + "': expected an object");
    return j;
}

inline double get_number(const json& obj, const std::string& prefix, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw Error(Errc::Config, "key '" + join_key(prefix, key) + "': expected a number");
    return v.get<double>();
}

inline double get_positive(const json& obj, const std::string& prefix, const char* key, double fallback) {
    const double v = get_number(obj, prefix, key, fallback);
    if (!(v > 0.0)) throw Error(Errc::Config, "key '" + join_key(prefix, key) + "': must be positive");
    return v;
}

inline long long get_integer(const json& obj, const std::string& prefix, const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw Error(Errc::Config, "key '" + join_key(prefix, key) + "': expected an integer");
    return v.get<long long>();
}

inline std::string get_string(const json& obj, const std::string& prefix, const char* key, std::string fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw Error(Errc::Config, "key '" + join_key(prefix, key) + "': expected a string");
    return v.get<std::string>();
}

inline Vec2 get_vec2(const json& obj, const std::string& prefix, const char* key, Vec2 fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw Error(Errc::Config, "key '" + join_key(prefix, key) + "': expected [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

inline Scheme scheme_from_string(const std::string& s, const std::string& key) {
    if (s == "midpoint" || s == "implicit_midpoint") return Scheme::ImplicitMidpoint;
    if (s == "euler") return Scheme::Euler;
    throw Error(Errc::Config, "key '" + key + "': unknown scheme '" + s + "'");
}

inline FieldSpec parse_field(const json& j) {
    require_object(j, "field");
    reject_unknown(j, "field", {"name", "params"});
    FieldSpec f;
    f.name = get_string(j, "field", "name", "point_source");
    const json params = j.contains("params") ? j.at("params") : json::object();
    require_object(params, "field.params");
    const std::string pre = "field.params";
    if (f.name == "point_source") {
        reject_unknown(params, pre, {"pole", "strength"});
        f.pole = get_vec2(params, pre, "pole", {});
        f.strength = get_number(params, pre, "strength", 1.0);
    } else if (f.name == "rotation") {
        reject_unknown(params, pre, {"omega", "center"});
        f.omega = get_number(params, pre, "omega", 1.0);
        f.center = get_vec2(params, pre, "center", {});
    } else if (f.name == "uniform") {
        reject_unknown(params, pre, {"ux", "uy"});
        f.u = {get_number(params, pre, "ux", 0.0), get_number(params, pre, "uy", 0.0)};
    } else {
        throw Error(Errc::Config, "key 'field.name': unknown field '" + f.name + "'");
    }
    return f;
}

inline json field_to_json(const FieldSpec& f) {
    json params;
    if (f.name == "point_source") {
        params = {{"pole", {f.pole.x, f.pole.y}}, {"strength", f.strength}};
    } else if (f.name == "rotation") {
        params = {{"omega", f.omega}, {"center", {f.center.x, f.center.y}}};
    } else {
        params = {{"ux", f.u.x}, {"uy", f.u.y}};
    }
    return {{"name", f.name}, {"params", params}};
}

}  // namespace detail

inline RunConfig parse_config(const json& j, const std::filesystem::path& base_dir = {}) {
    using namespace detail;
    require_object(j, "<root>");
    reject_unknown(j, "", {"initial", "flow", "field", "quadrature_order", "mu", "scheme", "tau", "schedule", "t_end",
                           "solver", "output", "converge"});
    RunConfig cfg;
    cfg.base_dir = base_dir;

    // initial polygon
    if (!j.contains("initial")) throw Error(Errc::Config, "missing key 'initial'");
    const json& init = require_object(j.at("initial"), "initial");
    reject_unknown(init, "initial", {"vertices", "normal_angles", "heights", "file"});
    const bool has_vertices = init.contains("vertices");
    const bool has_heights = init.contains("normal_angles") || init.contains("heights");
    const bool has_file = init.contains("file");
    if (has_vertices + has_heights + has_file != 1) {
        throw Error(Errc::Config, "key 'initial': give exactly one of vertices, normal_angles+heights, file");
    }
    if (has_vertices) {
        cfg.initial.vertices = vertices_from_json(init.at("vertices"));
    } else if (has_heights) {
        if (!init.contains("normal_angles") || !init.contains("heights")) {
            throw Error(Errc::Config, "key 'initial': normal_angles and heights go together");
        }
        cfg.initial.normal_angles = numbers_from_json(init.at("normal_angles"), "initial.normal_angles");
        cfg.initial.heights = numbers_from_json(init.at("heights"), "initial.heights");
    } else {
        const std::string file = get_string(init, "initial", "file", "");
        if (!std::filesystem::exists(base_dir / file)) {
            throw Error(Errc::Config, "key 'initial.file': no such file '" + file + "'");
        }
        cfg.initial.file = file;
    }

    // flow
    const std::string flow = get_string(j, "", "flow", "pcf");
    if (flow == "pcf") {
        cfg.flow.kind = FlowKind::PCF;
    } else if (flow == "ap_pcf") {
        cfg.flow.kind = FlowKind::AP_PCF;
    } else if (flow == "advected") {
        cfg.flow.kind = FlowKind::Advected;
    } else {
        throw Error(Errc::Config, "key 'flow': unknown flow '" + flow + "'");
    }
    if (j.contains("field")) cfg.flow.field = parse_field(j.at("field"));
    if (cfg.flow.kind == FlowKind::Advected && !cfg.flow.field) {
        throw Error(Errc::Config, "key 'field': required for the advected flow");
    }
    const long long order = get_integer(j, "", "quadrature_order", VelocityLaw::kDefaultQuadratureOrder);
    if (order < 1) throw Error(Errc::Config, "key 'quadrature_order': must be >= 1");
    cfg.flow.quadrature_order = static_cast<std::size_t>(order);
    if (j.contains("mu")) cfg.flow.mu = get_number(j, "", "mu", 0.0);

    // time stepping
    cfg.solver.scheme = scheme_from_string(get_string(j, "", "scheme", "midpoint"), "scheme");
    if (j.contains("schedule")) {
        if (j.contains("tau")) throw Error(Errc::Config, "key 'schedule': tau and schedule are mutually exclusive");
        cfg.solver.schedule = numbers_from_json(j.at("schedule"), "schedule");
        if (cfg.solver.schedule.empty()) throw Error(Errc::Config, "key 'schedule': must not be empty");
    } else {
        cfg.solver.tau = get_positive(j, "", "tau", 1e-3);
    }
    if (!j.contains("t_end")) throw Error(Errc::Config, "missing key 't_end'");
    cfg.t_end = get_positive(j, "", "t_end", 0.0);

    if (j.contains("solver")) {
        const json& s = require_object(j.at("solver"), "solver");
        reject_unknown(s, "solver", {"lambda", "fp_tolerance", "fp_max_iterations", "min_edge", "max_step_halvings",
                                     "euler_predictor", "max_steps"});
        cfg.solver.lambda = get_number(s, "solver", "lambda", cfg.solver.lambda);
        cfg.solver.fp_tolerance = get_number(s, "solver", "fp_tolerance", cfg.solver.fp_tolerance);
        cfg.solver.fp_max_iterations =
            static_cast<int>(get_integer(s, "solver", "fp_max_iterations", cfg.solver.fp_max_iterations));
        cfg.solver.min_edge = get_number(s, "solver", "min_edge", cfg.solver.min_edge);
        cfg.solver.max_step_halvings =
            static_cast<int>(get_integer(s, "solver", "max_step_halvings", cfg.solver.max_step_halvings));
        if (s.contains("euler_predictor")) {
            if (!s.at("euler_predictor").is_boolean()) {
                throw Error(Errc::Config, "key 'solver.euler_predictor': expected a boolean");
            }
            cfg.solver.euler_predictor = s.at("euler_predictor").get<bool>();
        }
        const long long max_steps = get_integer(s, "solver", "max_steps", static_cast<long long>(cfg.solver.max_steps));
        if (max_steps < 1) throw Error(Errc::Config, "key 'solver.max_steps': must be >= 1");
        cfg.solver.max_steps = static_cast<std::size_t>(max_steps);
    }
    try {
        cfg.solver.check();
    } catch (const Error& e) {
        throw Error(Errc::Config, std::string("key 'solver': ") + e.what());
    }

    if (j.contains("output")) {
        const json& o = require_object(j.at("output"), "output");
        reject_unknown(o, "output", {"dir", "trajectory", "summary", "eoc", "svg_prefix", "snapshot_every", "viewport"});
        cfg.output.dir = get_string(o, "output", "dir", cfg.output.dir);
        cfg.output.trajectory = get_string(o, "output", "trajectory", cfg.output.trajectory);
        cfg.output.summary = get_string(o, "output", "summary", cfg.output.summary);
        cfg.output.eoc = get_string(o, "output", "eoc", cfg.output.eoc);
        cfg.output.svg_prefix = get_string(o, "output", "svg_prefix", cfg.output.svg_prefix);
        const long long every = get_integer(o, "output", "snapshot_every", 10);
        if (every < 1) throw Error(Errc::Config, "key 'output.snapshot_every': must be >= 1");
        cfg.output.snapshot_every = static_cast<std::size_t>(every);
        if (o.contains("viewport")) {
            const auto v = numbers_from_json(o.at("viewport"), "output.viewport");
            if (v.size() != 4 || !(v[2] > v[0]) || !(v[3] > v[1])) {
                throw Error(Errc::Config, "key 'output.viewport': expected [xmin, ymin, xmax, ymax]");
            }
            cfg.output.viewport = std::array<double, 4>{v[0], v[1], v[2], v[3]};
        }
    }

    if (j.contains("converge")) {
        const json& c = require_object(j.at("converge"), "converge");
        reject_unknown(c, "converge", {"taus", "reference_tau", "reference_scheme", "exact"});
        ConvergeSpec spec;
        if (!c.contains("taus")) throw Error(Errc::Config, "missing key 'converge.taus'");
        spec.taus = numbers_from_json(c.at("taus"), "converge.taus");
        if (spec.taus.empty()) throw Error(Errc::Config, "key 'converge.taus': must not be empty");
        for (double t : spec.taus) {
            if (!(t > 0.0)) throw Error(Errc::Config, "key 'converge.taus': steps must be positive");
        }
        if (c.contains("reference_tau")) spec.reference_tau = get_positive(c, "converge", "reference_tau", 1.0);
        spec.reference_scheme =
            scheme_from_string(get_string(c, "converge", "reference_scheme", "midpoint"), "converge.reference_scheme");
        if (c.contains("exact")) {
            spec.exact = get_string(c, "converge", "exact", "");
            if (*spec.exact != "self_similar_pcf") {
                throw Error(Errc::Config, "key 'converge.exact': unknown closed form '" + *spec.exact + "'");
            }
        }
        if (spec.reference_tau.has_value() == spec.exact.has_value()) {
            throw Error(Errc::Config, "key 'converge': give exactly one of reference_tau, exact");
        }
        cfg.converge = std::move(spec);
    }
    return cfg;
}

/// Normalized form: every default spelled out.
inline json to_json(const RunConfig& cfg) {
    json j;
    json init = json::object();
    if (cfg.initial.vertices) init["vertices"] = vertices_to_json(*cfg.initial.vertices);
    if (cfg.initial.normal_angles) {
        init["normal_angles"] = *cfg.initial.normal_angles;
        init["heights"] = *cfg.initial.heights;
    }
    if (cfg.initial.file) init["file"] = *cfg.initial.file;
    j["initial"] = init;
    j["flow"] = to_string(cfg.flow.kind);
    if (cfg.flow.field) j["field"] = detail::field_to_json(*cfg.flow.field);
    j["quadrature_order"] = cfg.flow.quadrature_order;
    if (cfg.flow.mu) j["mu"] = *cfg.flow.mu;
    j["scheme"] = to_string(cfg.solver.scheme);
    if (cfg.solver.schedule.empty()) {
        j["tau"] = cfg.solver.tau;
    } else {
        j["schedule"] = cfg.solver.schedule;
    }
    j["t_end"] = cfg.t_end;
    j["solver"] = {{"lambda", cfg.solver.lambda},
                   {"fp_tolerance", cfg.solver.fp_tolerance},
                   {"fp_max_iterations", cfg.solver.fp_max_iterations},
                   {"min_edge", cfg.solver.min_edge},
                   {"max_step_halvings", cfg.solver.max_step_halvings},
                   {"euler_predictor", cfg.solver.euler_predictor},
                   {"max_steps", cfg.solver.max_steps}};
    json out = {{"dir", cfg.output.dir},
                {"trajectory", cfg.output.trajectory},
                {"summary", cfg.output.summary},
                {"eoc", cfg.output.eoc},
                {"svg_prefix", cfg.output.svg_prefix},
                {"snapshot_every", cfg.output.snapshot_every}};
    if (cfg.output.viewport) out["viewport"] = *cfg.output.viewport;
    j["output"] = out;
    if (cfg.converge) {
        json c = {{"taus", cfg.converge->taus}, {"reference_scheme", to_string(cfg.converge->reference_scheme)}};
        if (cfg.converge->reference_tau) c["reference_tau"] = *cfg.converge->reference_tau;
        if (cfg.converge->exact) c["exact"] = *cfg.converge->exact;
        j["converge"] = c;
    }
    return j;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Config, "cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::Config, path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

inline Polygon build_initial(const RunConfig& cfg) {
    if (cfg.initial.vertices) return class_and_heights_from_vertices(*cfg.initial.vertices);
    if (cfg.initial.normal_angles) {
        return Polygon(class_from_normals(*cfg.initial.normal_angles), *cfg.initial.heights);
    }
    return polygon_from_json(read_json_file((cfg.base_dir / *cfg.initial.file).string()));
}

inline VectorField build_field(const FieldSpec& f) {
    if (f.name == "point_source") return VectorField::point_source(f.pole, f.strength);
    if (f.name == "rotation") return VectorField::rotation(f.omega, f.center);
    return VectorField::uniform(f.u);
}

inline VelocityLaw build_law(const RunConfig& cfg) {
    switch (cfg.flow.kind) {
        case FlowKind::PCF: return VelocityLaw::pcf();
        case FlowKind::AP_PCF: return VelocityLaw::ap_pcf();
        case FlowKind::Advected:
            return VelocityLaw::advected(build_field(*cfg.flow.field), cfg.flow.quadrature_order, cfg.flow.mu);
        case FlowKind::Custom: break;
    }
    throw Error(Errc::Config, "key 'flow': custom laws cannot be configured from JSON");
}

}  // namespace polyflow
