#pragma once

// Subcommands behind the `polyflow` executable. Each returns the process exit
// code: 0 completed, 2 stopped early by a geometric or solver event, 3 bad
// configuration.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "polyflow/config.hpp"
#include "polyflow/eoc.hpp"
#include "polyflow/flows.hpp"
#include "polyflow/io.hpp"
#include "polyflow/stepper.hpp"
#include "polyflow/svg.hpp"

namespace polyflow::cli {

inline constexpr int kExitCompleted = 0;
inline constexpr int kExitTerminated = 2;
inline constexpr int kExitConfig = 3;

struct Options {
    std::optional<std::filesystem::path> out_dir;
    bool quiet = false;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::filesystem::path output_dir(const RunConfig& cfg, const Options& opts) {
    if (opts.out_dir) return *opts.out_dir;
    const std::filesystem::path dir(cfg.output.dir);
    return dir.is_absolute() ? dir : cfg.base_dir / dir;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IOFailure, "cannot write " + path.string());
    return out;
}

inline std::string snapshot_name(const std::string& prefix, std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_%06zu.svg", index);
    return prefix + buf;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

template <class T>
void print_row(std::ostream& out, const char* label, const std::vector<T>& v) {
    out << label << ':';
    for (const T& x : v) out << ' ' << format_double(x);
    out << '\n';
}

}  // namespace detail

inline int cmd_run(const std::filesystem::path& config_path, const Options& opts, std::ostream& out,
                   std::ostream& err) {
    return detail::guarded(err, [&] {
        const RunConfig cfg = load_config(config_path);
        const Polygon p0 = build_initial(cfg);
        const VelocityLaw law = build_law(cfg);
        const auto dir = detail::output_dir(cfg, opts);
        std::filesystem::create_directories(dir);

        const Trajectory traj = run(p0, law, cfg.solver, cfg.t_end);

        {
            auto f = detail::open_output(dir / cfg.output.trajectory);
            write_trajectory_jsonl(f, traj);
        }
        {
            auto f = detail::open_output(dir / cfg.output.summary);
            write_summary_csv(f, traj);
        }
        const Viewport view = cfg.output.viewport
                                  ? Viewport{(*cfg.output.viewport)[0], (*cfg.output.viewport)[1],
                                             (*cfg.output.viewport)[2], (*cfg.output.viewport)[3]}
                                  : Viewport::around(p0);
        std::size_t frames = 0;
        for (std::size_t i = 0; i < traj.records.size(); ++i) {
            if (i % cfg.output.snapshot_every != 0 && i + 1 != traj.records.size()) continue;
            const auto& r = traj.records[i];
            render_svg(traj.polygon(i), view, dir / detail::snapshot_name(cfg.output.svg_prefix, i),
                       Caption{r.t, r.area, r.length});
            ++frames;
        }

        const auto& last = traj.records.back();
        if (!opts.quiet) {
            out << "steps: " << traj.records.size() - 1 << '\n';
            out << "t: " << format_double(last.t) << '\n';
            out << "area: " << format_double(last.area) << '\n';
            out << "snapshots: " << frames << '\n';
            out << "output: " << dir.string() << '\n';
        }
        out << "termination: " << to_string(traj.termination) << '\n';
        if (traj.termination != Termination::Completed) {
            if (!opts.quiet) out << "reason: " << traj.message << '\n';
            return kExitTerminated;
        }
        return kExitCompleted;
    });
}

inline int cmd_converge(const std::filesystem::path& config_path, const Options& opts, std::ostream& out,
                        std::ostream& err) {
    return detail::guarded(err, [&] {
        const RunConfig cfg = load_config(config_path);
        if (!cfg.converge) throw Error(Errc::Config, "missing key 'converge'");
        const ConvergeSpec& spec = *cfg.converge;
        const Polygon p0 = build_initial(cfg);
        const EocProblem<VelocityLaw> problem{p0, build_law(cfg), cfg.t_end, cfg.solver};

        std::vector<EocRow> rows;
        if (spec.exact) {
            if (cfg.flow.kind != FlowKind::PCF) {
                throw Error(Errc::Config, "key 'converge.exact': self_similar_pcf requires flow 'pcf'");
            }
            rows = eoc_study(problem, spec.taus, self_similar_pcf(p0));
        } else {
            rows = eoc_study(problem, spec.taus, *spec.reference_tau, spec.reference_scheme);
        }

        const auto dir = detail::output_dir(cfg, opts);
        std::filesystem::create_directories(dir);
        {
            auto f = detail::open_output(dir / cfg.output.eoc);
            write_eoc_csv(f, rows);
        }
        if (!opts.quiet) out << "tau error order\n";
        for (const auto& r : rows) {
            if (!opts.quiet) out << format_double(r.tau) << ' ' << format_double(r.error) << ' ';
            out << (r.order ? format_double(*r.order) : "-") << '\n';
        }
        return kExitCompleted;
    });
}

inline int cmd_info(const std::filesystem::path& config_path, const Options& opts, std::ostream& out,
                    std::ostream& err) {
    return detail::guarded(err, [&] {
        const RunConfig cfg = load_config(config_path);
        const Polygon p0 = build_initial(cfg);
        const VelocityLaw law = build_law(cfg);
        const PolygonClass& cls = p0.cls();

        out << "edges: " << cls.size() << '\n';
        detail::print_row(out, "normal_angles", cls.normal_angles());
        detail::print_row(out, "outer_angles", cls.outer_angles());
        detail::print_row(out, "a", cls.a());
        detail::print_row(out, "b", cls.b());
        detail::print_row(out, "eta", cls.eta());
        out << "C*: " << format_double(cls.c_star()) << '\n';
        const auto mu = law.declared_mu(cls);
        out << "flow: " << to_string(law.kind()) << '\n';
        out << "mu: " << (mu ? format_double(*mu) : "none") << '\n';
        if (opts.quiet) return kExitCompleted;

        detail::print_row(out, "heights", p0.heights());
        detail::print_row(out, "edge_lengths", edge_lengths(p0));
        out << "area: " << format_double(area(p0)) << '\n';
        out << "length: " << format_double(total_length(p0)) << '\n';
        const auto report = validate(p0, cfg.solver.min_edge);
        out << "valid: " << (report.valid() ? "yes" : "no") << '\n';
        out << "sigma: " << format_double(report.min_edge) << '\n';
        out << "rho_lower_bound: " << format_double(report.rho_lower_bound) << '\n';
        if (report.valid()) {
            try {
                const double radius = 0.5 * report.rho_lower_bound;
                const double lip = lipschitz_probe(law, p0, 0.0, radius, 400, opts.seed);
                out << "lipschitz_probe: " << format_double(lip) << '\n';
                if (lip > 0.0) out << "tau_contraction_max: " << format_double(2.0 * cfg.solver.lambda / lip) << '\n';
            } catch (const Error& e) {
                out << "lipschitz_probe: unavailable (" << e.what() << ")\n";
            }
        }
        return kExitCompleted;
    });
}

}  // namespace polyflow::cli
