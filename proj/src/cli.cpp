#include "hubbard/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hubbard/analysis.hpp"
#include "hubbard/config.hpp"
#include "hubbard/io.hpp"
#include "hubbard/stationary.hpp"

namespace hubbard {

using nlohmann::json;
namespace fs = std::filesystem;

Command command_from_string(const std::string& name) {
    if (name == "simulate") return Command::simulate;
    if (name == "stationary") return Command::stationary;
    if (name == "manifold") return Command::manifold;
    if (name == "analyze") return Command::analyze;
    if (name == "sweep") return Command::sweep;
    throw ConfigError("unknown command '" + name + "'");
}

std::string to_string(Command command) {
    switch (command) {
        case Command::simulate: return "simulate";
        case Command::stationary: return "stationary";
        case Command::manifold: return "manifold";
        case Command::analyze: return "analyze";
        case Command::sweep: return "sweep";
    }
    return "unknown";
}

namespace {

JobConfig load(const JobSpec& job) {
    if (job.config_path.empty()) throw ConfigError("a config file is required (-c)");
    JobConfig c = parse_config(job.config_path, job.overrides);
    if (!job.output_dir.empty()) c.output_dir = job.output_dir;
    c.run.threads = job.threads == 0 ? 1 : job.threads;
    return c;
}

std::string out_path(const JobConfig& c, const std::string& name) { return (fs::path(c.output_dir) / name).string(); }

struct Initial {
    WignerState state;
    std::size_t step = 0;
    std::string input_hash;  // of the snapshot file, empty for the built-in state
};

Initial make_initial(const JobConfig& c) {
    Initial init;
    if (c.initial.kind == "snapshot") {
        std::ifstream in(c.initial.path, std::ios::binary);
        if (!in) throw IoError("cannot read snapshot '" + c.initial.path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        init.input_hash = git_blob_hash(buf.str());
        Snapshot snap = read_snapshot(c.initial.path);
        if (snap.state.size() != c.run.n) {
            throw ConfigError("snapshot has " + std::to_string(snap.state.size()) + " grid points, config n = " +
                              std::to_string(c.run.n));
        }
        init.step = c.initial.step.value_or(snap.step.value_or(0));
        init.state = std::move(snap.state);
    } else {
        init.state = initial_state(c.run.n);
    }
    init.state.time = static_cast<double>(init.step) * c.run.dt;
    if (c.run.reduced_mode) {
        // The reduced equation lives on states diagonal in the conserved-spin basis;
        // work in that basis throughout.
        const SpinEigen eig = spin_eigenbasis(conserved_spin(init.state));
        WignerState rotated(init.state.size(), init.state.time);
        for (std::size_t j = 0; j < init.state.size(); ++j) {
            const Herm2 local = eig.basis.to_basis(init.state[j]);
            rotated[j] = {local.uu, local.dd, 0.0, 0.0};
        }
        init.state = std::move(rotated);
    }
    return init;
}

json basis_json(const SpinBasis& b) {
    json arr = json::array();
    for (const Spinor& v : b.vectors) {
        for (const auto& z : v) arr.push_back({z.real(), z.imag()});
    }
    return arr;
}

json drift_json(const DriftReport& d) {
    json j{{"spin", d.spin}, {"energy", d.energy}};
    if (!d.g.empty()) j["g"] = d.g;
    return j;
}

std::string snapshot_name(std::size_t step) {
    std::ostringstream s;
    s << "snapshots/step_" << std::setw(8) << std::setfill('0') << step << ".csv";
    return s.str();
}

int simulate(const JobConfig& c, std::ostream& log) {
    const std::string hash = config_hash(c);
    const Initial init = make_initial(c);
    const CollisionEngine engine(c.run.model, c.run.n, c.run.epsilon, c.run.threads);
    log << "simulate " << c.run.model.describe() << " n=" << c.run.n << " eps=" << c.run.epsilon << " dt=" << c.run.dt
        << " t_end=" << c.run.t_end << " samples=" << engine.samples().size() << '\n';

    fs::create_directories(c.output_dir);
    ObservablesWriter writer(out_path(c, "observables.csv"), hash);
    RunHooks hooks;
    hooks.on_record = [&](const Record& r) { writer.write(r); };
    hooks.on_snapshot = [&](std::size_t step, const WignerState& s) {
        write_snapshot(out_path(c, snapshot_name(step)), s, step, hash);
    };
    const RunResult result = run(c.run, init.state, engine, hooks, init.step);

    const ManifoldDiagnostics& md = engine.manifold_diagnostics();
    json manifest{{"config", config_to_json(c)},
                  {"config_hash", hash},
                  {"input_hash", init.input_hash},
                  {"first_step", init.step},
                  {"records", result.records.size()},
                  {"final_time", result.final_state.time},
                  {"drift", drift_json(result.drift)},
                  {"manifold", {{"samples", engine.samples().size()},
                                {"gamma2_samples", engine.gamma2().size()},
                                {"nu_out_of_range", md.nu_out_of_range},
                                {"cubic_anomalies", md.cubic_anomalies},
                                {"max_omega_bar_residual", md.max_omega_bar_residual}}}};
    write_json(out_path(c, "run.json"), manifest);
    log << "wrote " << result.records.size() << " records to " << out_path(c, "observables.csv") << '\n';
    return kExitOk;
}

int stationary(const JobConfig& c, std::ostream& log) {
    const std::string hash = config_hash(c);
    const Initial init = make_initial(c);
    const SpinEigen eig = spin_eigenbasis(conserved_spin(init.state));
    json fit{{"config_hash", hash}, {"n_up", eig.n_up}, {"n_dn", eig.n_dn}, {"degenerate_basis", eig.degenerate}};
    WignerState st;
    if (c.run.model.kind == DispersionKind::nearest) {
        const NonThermalParams p = nonthermal_fit(init.state);
        st = nonthermal_state(p);
        fit["kind"] = "nonthermal";
        fit["a_up"] = p.a_up;
        fit["a_dn"] = p.a_dn;
        fit["f"] = p.f;
        fit["basis"] = basis_json(p.basis);
        fit["iterations"] = p.iterations;
        fit["residual"] = p.residual;
    } else {
        const ThermalParams p = thermal_fit(init.state, c.run.model);
        st = thermal_state(p, c.run.model, c.run.n);
        fit["kind"] = "thermal";
        fit["beta"] = p.beta;
        fit["mu_up"] = p.mu_up;
        fit["mu_dn"] = p.mu_dn;
        fit["infinite_temperature"] = p.infinite_temperature;
        fit["basis"] = basis_json(p.basis);
        fit["iterations"] = p.iterations;
        fit["residual"] = p.residual;
    }
    fit["entropy"] = entropy(st);
    fit["energy"] = conserved_energy(init.state, c.run.model);
    fs::create_directories(c.output_dir);
    write_json(out_path(c, "fit.json"), fit);
    write_snapshot(out_path(c, "stationary_state.csv"), st, 0, hash);
    log << "stationary " << fit["kind"].get<std::string>() << " fit, S = " << format_double(fit["entropy"].get<double>())
        << '\n';
    return kExitOk;
}

int manifold(const JobConfig& c, std::ostream& log) {
    const std::string hash = config_hash(c);
    std::optional<WignerState> state;
    if (!c.manifold.state.empty()) state = read_snapshot(c.manifold.state).state;
    if (state && state->size() != c.run.n) throw ConfigError("manifold.state grid size differs from n");
    const auto records = export_manifold(c.run.model, c.run.n, c.run.epsilon, state ? &*state : nullptr);
    const auto slice = manifold_slice(c.run.model, c.manifold.k1, c.manifold.resolution);
    write_manifold(out_path(c, "manifold.csv"), records, hash);
    write_slice(out_path(c, "slice.csv"), slice, hash);
    log << "manifold: " << records.size() << " samples, " << slice.size() << " slice points\n";
    return kExitOk;
}

json fit_json(const DecayFit& f) {
    return {{"kappa", f.kappa}, {"window", {f.t_lo, f.t_hi}}, {"residual", f.residual}, {"points", f.points}};
}

json analyze_to_json(const JobConfig& c) {
    const std::string obs = c.analysis.observables.empty() ? out_path(c, "observables.csv") : c.analysis.observables;
    const std::string fit_path = c.analysis.fit.empty() ? out_path(c, "fit.json") : c.analysis.fit;
    const std::vector<Record> records = read_observables(obs);
    const json fit = read_json(fit_path);
    if (!fit.contains("entropy") || !fit["entropy"].is_number()) throw IoError("fit file lacks an entropy value");
    const double s_inf = fit["entropy"].get<double>();

    json report{{"config_hash", config_hash(c)}, {"s_inf", s_inf}, {"records", records.size()}};
    const TimescaleReport ts =
        timescale_report(records, s_inf, c.analysis.initial_fraction, c.analysis.asymptotic_fraction);
    report["kappa_initial"] = ts.initial.kappa;
    report["kappa_asymptotic"] = ts.asymptotic.kappa;
    report["window"] = {{"initial", fit_json(ts.initial)}, {"asymptotic", fit_json(ts.asymptotic)}};
    if (c.analysis.window) {
        const DecayFit custom = decay_fit(records, s_inf, c.analysis.window->first, c.analysis.window->second);
        report["window"]["custom"] = fit_json(custom);
        report["kappa_window"] = custom.kappa;
    }

    // Drift of the recorded conserved quantities relative to the first record.
    const Record& first = records.front();
    double spin = 0.0, energy = 0.0;
    const double spin_scale = std::sqrt(hs_norm2(first.spin));
    for (const Record& r : records) {
        const Herm2 d = r.spin - first.spin;
        spin = std::max({spin, std::abs(d.uu), std::abs(d.dd), std::abs(d.re), std::abs(d.im)});
        energy = std::max(energy, std::abs(r.energy - first.energy));
    }
    report["drifts"] = {{"spin", spin_scale > 0 ? spin / spin_scale : spin},
                        {"energy", first.energy != 0.0 ? energy / std::abs(first.energy) : energy}};
    return report;
}

int analyze(const JobConfig& c, std::ostream& log) {
    const json report = analyze_to_json(c);
    write_json(out_path(c, "report.json"), report);
    log << "kappa_initial = " << format_double(report["kappa_initial"].get<double>())
        << ", kappa_asymptotic = " << format_double(report["kappa_asymptotic"].get<double>()) << '\n';
    return kExitOk;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char ch : s) out.push_back(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ? ch : '_');
    return out;
}

int sweep(const JobConfig& c, std::ostream& log) {
    if (c.sweep.key.empty() || c.sweep.values.empty()) throw ConfigError("sweep needs sweep.key and sweep.values");
    fs::create_directories(c.output_dir);
    std::ofstream table = [&] {
        std::ofstream t(out_path(c, "sweep.csv"), std::ios::binary);
        if (!t) throw IoError("cannot write " + out_path(c, "sweep.csv"));
        return t;
    }();
    table << "# config_hash=" << config_hash(c) << '\n'
          << "value,kappa_initial,kappa_asymptotic,inv_kappa_initial,inv_kappa_asymptotic,s_inf\n";
    const json base = config_to_json(c);
    for (std::size_t i = 0; i < c.sweep.values.size(); ++i) {
        const json& v = c.sweep.values[i];
        json doc = base;
        doc.erase("sweep");
        apply_override(doc, c.sweep.key + "=" + v.dump());
        const std::string tag = std::to_string(i) + "_" + sanitize(c.sweep.key + "=" + v.dump());
        doc["output_dir"] = out_path(c, tag);
        doc["analysis"]["observables"] = "";
        doc["analysis"]["fit"] = "";
        JobConfig sub = config_from_json(doc);
        sub.run.threads = c.run.threads;
        log << "sweep point " << tag << '\n';
        simulate(sub, log);
        stationary(sub, log);
        const json report = analyze_to_json(sub);
        write_json(out_path(sub, "report.json"), report);
        const double ki = report["kappa_initial"].get<double>();
        const double ka = report["kappa_asymptotic"].get<double>();
        table << (v.is_number() ? format_double(v.get<double>()) : v.dump()) << ',' << format_double(ki) << ','
              << format_double(ka) << ',' << format_double(1.0 / ki) << ',' << format_double(1.0 / ka) << ','
              << format_double(report["s_inf"].get<double>()) << '\n';
        table.flush();
    }
    if (!table) throw IoError("write failed for sweep.csv");
    return kExitOk;
}

}  // namespace

int cmd_simulate(const JobSpec& job, std::ostream& log) { return simulate(load(job), log); }
int cmd_stationary(const JobSpec& job, std::ostream& log) { return stationary(load(job), log); }
int cmd_manifold(const JobSpec& job, std::ostream& log) { return manifold(load(job), log); }
int cmd_analyze(const JobSpec& job, std::ostream& log) { return analyze(load(job), log); }
int cmd_sweep(const JobSpec& job, std::ostream& log) { return sweep(load(job), log); }

int run_job(const JobSpec& job, std::ostream& log, std::ostream& err) {
    try {
        switch (job.command) {
            case Command::simulate: return cmd_simulate(job, log);
            case Command::stationary: return cmd_stationary(job, log);
            case Command::manifold: return cmd_manifold(job, log);
            case Command::analyze: return cmd_analyze(job, log);
            case Command::sweep: return cmd_sweep(job, log);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const FermiViolation& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}

}  // namespace hubbard
