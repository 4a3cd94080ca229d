#pragma once

// Subcommands behind the dnlfront executable. Every run writes into its own directory:
// meta.txt (resolved config, hash, version), summary.txt and the CSV artifacts.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dnlfront/acceptance.hpp"
#include "dnlfront/analysis.hpp"
#include "dnlfront/config.hpp"
#include "dnlfront/csv.hpp"
#include "dnlfront/model.hpp"
#include "dnlfront/pde.hpp"
#include "dnlfront/waves.hpp"

namespace dnlfront::cli {

inline constexpr const char* version = "1.0.0";

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// config to library objects

inline Params params_of(const RunConfig& c) { return validate_params(c.model.m, c.model.p, c.model.N); }

inline ReactionSpec reaction_of(const RunConfig& c) {
    if (c.model.reaction == "custom") throw ParseError("custom reactions cannot be built from a config file");
    return make_reaction(reaction_kind_from_string(c.model.reaction), {c.model.a, c.model.k, c.model.q}, params_of(c));
}

inline CriticalOptions critical_options_of(const RunConfig& c) {
    CriticalOptions o;
    o.eps_hi = c.wave.eps_hi;
    o.eps_schedule = c.wave.eps_schedule;
    o.eps_floor = c.wave.eps_floor;
    o.margin = c.wave.margin;
    o.shoot.rtol = c.wave.rtol;
    return o;
}

/// --out, then DNLFRONT_OUT, then [output] dir.
inline fs::path output_root(const RunConfig& c, const std::optional<std::string>& out) {
    if (out && !out->empty()) return *out;
    if (const char* env = std::getenv("DNLFRONT_OUT"); env && *env) return env;
    return c.output_dir;
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("io", "cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw Error("io", "write failed for " + path.string());
}

inline void write_meta(const fs::path& dir, const RunConfig& c, const std::string& command) {
    std::ostringstream s;
    s << "tool = dnlfront " << version << "\n";
    s << "command = " << command << "\n";
    s << "config_hash = " << config_hash(c) << "\n\n";
    s << serialize_config(c);
    write_text(dir / "meta.txt", s.str());
}

inline std::string num(double v) { return csv::format(v); }

// ---------------------------------------------------------------------------
// wave, speed-curve

inline std::string cmd_wave(const RunConfig& c, const fs::path& dir) {
    Params P = params_of(c);
    ReactionSpec h = reaction_of(c);
    CriticalOptions o = critical_options_of(c);
    CriticalSpeed cs = critical_speed(P, h, c.wave.gamma, c.wave.tol, o);
    PhaseTrajectory tr = critical_trajectory(P, h, c.wave.gamma, cs, o);
    ProfileGrid grid;
    grid.dxi = c.wave.dxi;
    WaveProfile w = wave_profile_from(tr, h, grid);
    w.c = cs.c;
    csv::write(dir / "profile.csv", {"xi", "U", "V", "Vp"}, {w.xi, w.U, w.V, w.Vp});
    csv::write(dir / "trajectory.csv", {"U", "phi"}, {tr.U, tr.phi});
    std::ostringstream s;
    s << "c = " << num(cs.c) << "\nbracket = " << num(cs.lo) << " " << num(cs.hi) << "\nshots = " << cs.shots << "\n";
    s << "L = " << num(w.L()) << "\n";
    try {
        PressureView pv = pressure_view(w, h);
        s << "V'(0-) = " << num(pv.Vp0) << " (predicted " << num(pv.predicted_Vp0) << ")\n";
        s << "V''(0-) = " << num(pv.Vpp0) << " (predicted " << num(pv.predicted_Vpp) << ")\n";
    } catch (const Error& e) {
        s << "pressure view unavailable: " << e.code() << " " << e.what() << "\n";
    }
    try {
        EndpointFit ef = endpoint_fit(tr, P, h);
        s << "slope at 0 = " << num(ef.slope0) << "\nC near 1 = " << num(ef.C1) << " (predicted " << num(ef.predicted_C)
          << ")\nmu near 1 = " << num(ef.mu1) << " (predicted " << num(ef.predicted_mu) << ")\n";
    } catch (const Error& e) {
        s << "endpoint fit unavailable: " << e.code() << " " << e.what() << "\n";
    }
    return s.str();
}

inline std::string cmd_speed_curve(const RunConfig& c, const fs::path& dir) {
    Params P = params_of(c);
    ReactionSpec h = reaction_of(c);
    SpeedCurve sc = speed_curve(P, h, c.wave.gamma_grid, c.wave.tol, critical_options_of(c));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < sc.gammas.size(); ++i)
        rows.push_back({num(sc.gammas[i]), num(sc.c_values[i]), num(sc.cprime_fd[i]), num(sc.cprime_formula[i]),
                        sc.ok[i] ? "1" : "0", sc.note[i]});
    csv::write_rows(dir / "speed_curve.csv", {"gamma", "c", "cprime_fd", "cprime_formula", "ok", "note"}, rows);
    std::ostringstream s;
    s << "c_sharp = " << num(sc.c_sharp) << "\none-sided c'(0) = " << num(sc.cprime0_onesided)
      << "\ngamma cap = " << num(sc.gamma_cap) << "\n";
    for (std::size_t i = 0; i < sc.gammas.size(); ++i)
        if (!sc.ok[i]) s << "gap at gamma = " << num(sc.gammas[i]) << ": " << sc.note[i] << "\n";
    return s.str();
}

// ---------------------------------------------------------------------------
// simulate, analyze

/// Leftmost and rightmost points the datum occupies.
inline std::pair<double, double> datum_extent(const DatumSpec& d, const SubwaveProfile* sw) {
    switch (d.kind) {
        case DatumKind::Kanel: return {d.center - d.width, d.center + d.width};
        case DatumKind::Plateau: return {0.0, d.rho + (sw ? sw->b : 0.0)};
        case DatumKind::ClassA: return {d.left - d.ramp_left, d.right + d.ramp_right};
        case DatumKind::ExactWave: return {d.x0, d.x0};
        default: return {0.0, 0.0};
    }
}

struct Simulation {
    SimulationRun run;
    std::optional<WaveProfile> wave;  // critical wave at gamma = 0, when it was needed
};

inline Simulation simulate(const RunConfig& c) {
    Params P = params_of(c);
    ReactionSpec h = reaction_of(c);
    Geometry g = geometry_from_string(c.sim.geometry);
    DatumSpec d = c.sim.spec;
    d.kind = datum_kind_from_string(c.sim.datum);
    Simulation out;
    std::optional<SubwaveProfile> sw;
    if (d.kind == DatumKind::Plateau) sw = subwave_profile(P, h, 0.0, d.c, d.eta);
    if (d.kind == DatumKind::ExactWave) {
        CriticalOptions o = critical_options_of(c);
        CriticalSpeed cs = critical_speed(P, h, 0.0, c.wave.tol, o);
        out.wave = wave_profile_from(critical_trajectory(P, h, 0.0, cs, o), h);
        out.wave->c = cs.c;
    }
    double R = c.sim.R, x_min = c.sim.x_min;
    if (!(R > 0.0)) {
        // reach of the fastest admissible front plus room around the datum
        double reach = 1.2 * upper_bound_speed(P, h, 0.0).coarse * c.sim.T + 10.0;
        auto [a, b] = datum_extent(d, sw ? &*sw : nullptr);
        if (g == Geometry::Radial) {
            R = b + reach;
        } else {
            x_min = a - reach;
            R = b + reach - x_min;
        }
    }
    RadialField f = init_datum(d, P, make_field(g, P.N, R, c.sim.dr, x_min), sw ? &*sw : nullptr,
                               out.wave ? &*out.wave : nullptr);
    Sampling s;
    s.dt_sample = c.sim.dt_sample;
    s.snapshot_times = c.sim.snapshot_times;
    s.domain_guard = c.sim.domain_guard;
    out.run = run(std::move(f), P, h, c.sim.T, s, c.sim.cfl);
    return out;
}

inline void write_run(const SimulationRun& r, const fs::path& dir) {
    if (r.eta_left.size() == r.times.size())
        csv::write(dir / "front.csv", {"t", "eta", "eta_left", "u_center", "sup_u"},
                   {r.times, r.eta, r.eta_left, r.u_center, r.sup_u});
    else
        csv::write(dir / "front.csv", {"t", "eta", "u_center", "sup_u"}, {r.times, r.eta, r.u_center, r.sup_u});
    csv::write(dir / "fluxmax.csv", {"t", "flux_max"}, {r.times, r.flux_max});
    for (const auto& snap : r.snapshots) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%.6g.csv", snap.t);
        csv::write(dir / name, {"r", "u"}, {snap.r, snap.u});
    }
}

inline std::string run_summary(const SimulationRun& r) {
    std::ostringstream s;
    s << "geometry = " << to_string(r.geometry) << "\nN = " << r.params.N << "\nR = " << num(r.R) << "\ndr = " << num(r.dr)
      << "\nT = " << num(r.T) << "\nt_end = " << num(r.t_end) << "\nsteps = " << r.steps
      << "\ndomain_full = " << (r.domain_full ? "yes" : "no") << "\nfinal sup u = " << num(r.final_field.sup()) << "\n";
    if (!r.eta.empty()) s << "final eta = " << num(r.eta.back()) << "\n";
    if (r.domain_full) s << "WARNING domain-full front passed the domain guard at t = " << num(r.t_end) << "\n";
    return s.str();
}

inline std::string cmd_simulate(const RunConfig& c, const fs::path& dir) {
    Simulation sim = simulate(c);
    write_run(sim.run, dir);
    return run_summary(sim.run);
}

/// Reruns the configured simulation, then fits, audits and classifies it.
inline std::string cmd_analyze(const RunConfig& c, const fs::path& dir) {
    Simulation sim = simulate(c);
    const SimulationRun& r = sim.run;
    write_run(r, dir);
    Params P = params_of(c);
    ReactionSpec h = reaction_of(c);
    std::ostringstream s;
    s << run_summary(r);
    std::vector<std::vector<std::string>> audit;
    audit.push_back({"config_hash", config_hash(c)});

    CriticalOptions o = critical_options_of(c);
    CriticalSpeed cs = critical_speed(P, h, 0.0, c.wave.tol, o);
    audit.push_back({"c0", num(cs.c)});

    std::optional<FrontFit> fit;
    try {
        fit = fit_front(r.times, r.eta, c.analyze.window_fraction);
        csv::write(dir / "frontfit.csv",
                   {"c_hat", "B_hat", "r0_hat", "t_min", "t_max", "samples", "residual_rms", "orthogonality"},
                   {{fit->c_hat}, {fit->B_hat}, {fit->r0_hat}, {fit->t_min}, {fit->t_max},
                    {static_cast<double>(fit->samples)}, {fit->residual_rms}, {fit->orthogonality}});
        s << "front fit: c_hat = " << num(fit->c_hat) << " B_hat = " << num(fit->B_hat) << " r0_hat = " << num(fit->r0_hat)
          << "\n";
        if (P.N > 1) s << "B_hat/(N-1) = " << num(fit->B_hat / (P.N - 1)) << "\n";
    } catch (const RankError& e) {
        s << "front fit unavailable: " << e.what() << "\n";
    }

    if (!r.snapshots.empty() && r.geometry == Geometry::Radial) {
        if (!sim.wave) {
            sim.wave = wave_profile_from(critical_trajectory(P, h, 0.0, cs, o), h);
            sim.wave->c = cs.c;
        }
        ConvergenceReport rep = moving_frame_error(r, *sim.wave, ShiftRule::MeasuredEta);
        std::vector<double> fitted(rep.times.size(), std::numeric_limits<double>::quiet_NaN());
        if (fit) {
            ConvergenceReport rf = moving_frame_error(r, *sim.wave, ShiftRule::FittedFront, fit);
            fitted = rf.sup_error;
        }
        csv::write(dir / "convergence.csv", {"t", "shift", "sup_error", "sup_error_fitted"},
                   {rep.times, rep.shift, rep.sup_error, fitted});
        if (!rep.sup_error.empty()) s << "moving-frame sup error at last snapshot = " << num(rep.sup_error.back()) << "\n";
    }

    FluxAudit fa = flux_bound_audit(r, c.analyze.tau);
    audit.push_back({"flux_max_after_tau", num(fa.max_flux_after_tau)});
    audit.push_back({"flux_max_last_tenth", num(fa.max_last)});
    audit.push_back({"flux_max_before", num(fa.max_before)});
    audit.push_back({"flux_trend", to_string(fa.trend)});
    s << "flux audit: " << to_string(fa.trend) << " (max " << num(fa.max_flux_after_tau) << ")\n";

    OutcomeThresholds th;
    th.spread_level = c.analyze.spread_level;
    th.vanish_level = c.analyze.vanish_level;
    th.probe_fraction = c.analyze.probe_fraction;
    Outcome oc = classify_outcome(r, cs.c, th);
    audit.push_back({"outcome", to_string(oc)});
    s << "outcome = " << to_string(oc) << "\n";
    csv::write_rows(dir / "audit.csv", {"quantity", "value"}, audit);
    return s.str();
}

// ---------------------------------------------------------------------------
// dispatch

struct Invocation {
    std::string command;
    std::string config_path;
    std::optional<std::string> out;
    int jobs = 1;
    std::string criteria;  // verify only: comma-separated ids, empty for all
};

/// Runs one non-sweep command into dir. Returns the summary text.
inline std::string execute_into(const std::string& command, const RunConfig& c, const fs::path& dir) {
    fs::create_directories(dir);
    write_meta(dir, c, command);
    std::string summary;
    if (command == "wave")
        summary = cmd_wave(c, dir);
    else if (command == "speed-curve")
        summary = cmd_speed_curve(c, dir);
    else if (command == "simulate")
        summary = cmd_simulate(c, dir);
    else if (command == "analyze")
        summary = cmd_analyze(c, dir);
    else
        throw UsageError("unknown command '" + command + "'");
    write_text(dir / "summary.txt", summary);
    return summary;
}

/// Cross product of the sweep axes, one directory per point, points spread over jobs threads.
inline int cmd_sweep(const RunConfig& c, const fs::path& root, int jobs, std::ostream& out, std::ostream& err) {
    const auto& axes = c.sweep.axes;
    std::size_t total = 1;
    for (const auto& [name, values] : axes) total *= values.size();
    std::vector<RunConfig> points(total, c);
    std::vector<std::vector<std::string>> labels(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t k = i;
        for (std::size_t a = axes.size(); a-- > 0;) {
            const auto& [name, values] = axes[a];
            const std::string& v = values[k % values.size()];
            k /= values.size();
            apply_override(points[i], name, v);
            labels[i].insert(labels[i].begin(), v);
        }
        points[i].sweep.axes.clear();
        validate_config(points[i]);
    }
    fs::create_directories(root);
    write_meta(root, c, "sweep");
    std::vector<std::string> status(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < total;) {
            char name[32];
            std::snprintf(name, sizeof name, "point_%03zu", i);
            try {
                execute_into(c.sweep.command, points[i], root / name);
                status[i] = "ok";
            } catch (const Error& e) {
                status[i] = "ERROR " + e.code() + " " + e.what();
            } catch (const std::exception& e) {
                status[i] = std::string("ERROR internal ") + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
    for (int j = 0; j < n; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<std::string> header{"point", "config_hash"};
    for (const auto& [name, values] : axes) header.push_back(name);
    header.push_back("status");
    std::vector<std::vector<std::string>> rows;
    int failed = 0;
    for (std::size_t i = 0; i < total; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu", i);
        std::vector<std::string> row{name, config_hash(points[i])};
        row.insert(row.end(), labels[i].begin(), labels[i].end());
        std::string st = status[i];
        std::replace(st.begin(), st.end(), ',', ';');
        row.push_back(st);
        rows.push_back(row);
        if (status[i] != "ok") {
            ++failed;
            err << name << ": " << status[i] << "\n";
        }
    }
    csv::write_rows(root / "sweep.csv", header, rows);
    out << total << " points, " << failed << " failed, artifacts in " << root.string() << "\n";
    return failed ? 1 : 0;
}

inline int cmd_verify(const std::string& criteria, std::ostream& out) {
    std::set<int> only;
    std::stringstream ss(criteria);
    for (std::string tok; std::getline(ss, tok, ',');) {
        tok = config_detail::trim(tok);
        if (tok.empty()) continue;
        int id = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
        if (ec != std::errc() || p != tok.data() + tok.size() || id < 1 || id > 13)
            throw UsageError("criteria must be ids between 1 and 13");
        only.insert(id);
    }
    auto results = acceptance::run_all(out, only);
    bool all = std::all_of(results.begin(), results.end(), [](const acceptance::Result& r) { return r.pass; });
    out << (all ? "ALL PASS" : "SOME FAILED") << "\n";
    return all ? 0 : 1;
}

inline bool is_input_error(const Error& e) {
    static const std::set<std::string> codes = {"parse", "unknown-key", "missing-section", "usage"};
    return codes.count(e.code()) > 0;
}

/// Loads the config and runs the command. Exit 0 success, 1 computational failure, 2 usage error.
inline int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    try {
        if (inv.command != "verify" || !inv.config_path.empty()) c = parse_config(inv.config_path);
        if (inv.jobs < 1) throw UsageError("--jobs must be at least 1");
    } catch (const Error& e) {
        err << "ERROR " << e.code() << " " << e.what() << "\n";
        return 2;
    }
    try {
        if (inv.command == "verify") return cmd_verify(inv.criteria, out);
        fs::path root = output_root(c, inv.out);
        if (inv.command == "sweep") return cmd_sweep(c, root, inv.jobs, out, err);
        out << execute_into(inv.command, c, root);
        return 0;
    } catch (const Error& e) {
        err << "ERROR " << e.code() << " " << e.what() << "\n";
        return is_input_error(e) ? 2 : 1;
    } catch (const std::exception& e) {
        err << "ERROR internal " << e.what() << "\n";
        return 1;
    }
}

/// Command-line front end.
inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Fronts of doubly nonlinear reaction-diffusion equations"};
    app.set_version_flag("--version", std::string(version));
    Invocation inv;
    std::string out_dir;
    std::vector<std::pair<std::string, std::string>> commands = {
        {"wave", "critical speed, profile and phase trajectory"},
        {"speed-curve", "critical speed over the gamma grid"},
        {"simulate", "run the PDE from the configured datum"},
        {"analyze", "simulate, then fit the front, audit the flux and classify the outcome"},
        {"sweep", "cross product of config overrides, one directory per point"},
        {"verify", "run the acceptance suite"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", inv.config_path, "run configuration file")->required(name != "verify");
        sub->add_option("--out", out_dir, "output root (overrides DNLFRONT_OUT and [output] dir)");
        sub->add_option("--jobs", inv.jobs, "worker threads for sweeps");
        if (name == "verify") sub->add_option("--criteria", inv.criteria, "comma-separated criterion ids");
        sub->callback([&inv, name = name] { inv.command = name; });
    }
    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "ERROR usage " << e.what() << "\n";
        return 2;
    }
    if (!out_dir.empty()) inv.out = out_dir;
    return execute(inv, out, err);
}

}  // namespace dnlfront::cli
