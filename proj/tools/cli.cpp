#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <CLI11.hpp>

#include "fkpp/config.hpp"
#include "fkpp/experiments.hpp"
#include "fkpp/record_io.hpp"
#include "fkpp/trajectory_io.hpp"

namespace fkpp::cli {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

unsigned threads_from_env() {
    const char* s = std::getenv("FKPP_THREADS");
    if (!s || !*s) return 0;
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("FKPP_THREADS must be a positive integer", "", 0, 0);
    return static_cast<unsigned>(v);
}

int report_error(std::ostream& err, const std::filesystem::path& out_dir, const std::string& kind,
                 const std::string& message, int code) {
    const std::string doc = error_json(kind, message, code);
    err << doc << '\n';
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        std::ofstream f(out_dir / "error.json");
        if (f) f << doc << '\n';
    }
    return code;
}

void print_record(std::ostream& out, const RunRecord& rec) {
    for (const auto& c : rec.curves) {
        for (const auto& p : c.points) {
            out << rec.runner << " " << rec.experiment << " [" << c.label << "] parameter="
                << g17(p.parameter) << " lambda=" << g17(p.lambda);
            if (p.lambda_scaled) out << " lambda_scaled=" << g17(*p.lambda_scaled);
            if (p.classification) out << " class=" << to_string(*p.classification);
            if (p.decay_rate) out << " decay_rate=" << g17(*p.decay_rate);
            out << " residual=" << g17(p.residual) << " iterations=" << p.iterations
                << " nodes=" << p.nodes << '\n';
        }
        if (c.reference_lambda)
            out << rec.runner << " " << rec.experiment << " [" << c.label
                << "] reference_lambda=" << g17(*c.reference_lambda) << '\n';
        for (const auto& w : c.warnings) out << "warning: " << w << '\n';
    }
    out << rec.runner << " " << rec.experiment << ": " << (rec.passed ? "ok" : "FAILED")
        << " (spec " << rec.spec_hash << ")\n";
    for (const auto& f : rec.failures) out << "  failure: " << f << '\n';
}

bool runner_accepts(const std::string& command, const ExperimentSpec& e) {
    if (command == "eigen") return true;
    if (command == "simulate") return e.horizon > 0.0;
    if (command == "dichotomy") return e.sweep.kind == SweepKind::Shift;
    if (command == "sweep")
        return e.sweep.kind == SweepKind::Period || e.sweep.kind == SweepKind::Diffusivity;
    if (command == "truncation") return e.sweep.kind == SweepKind::Radius;
    return false;
}

RunRecord dispatch(const std::string& command, const ExperimentSpec& e, const RunOptions& opt,
                   const std::filesystem::path& out_dir) {
    if (command == "eigen") return run_eigen(e, opt);
    if (command == "dichotomy") return run_dichotomy(e, opt);
    if (command == "sweep") return run_monotonicity(e, opt);
    if (command == "truncation") return run_truncation_study(e, opt);
    // simulate: stream rho frames and a final dense dump
    const Landscape r = make_preset(e.landscape);
    const Grid g = periodic_cell_grid(r, e.grid.space_points, resolved_pheno(e));
    TrajectoryWriter writer(out_dir / (e.name + "_trajectory"), g, {e.horizon});
    RunOptions with_observer = opt;
    with_observer.observer = writer.observer();
    return run_simulation(e, with_observer);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Space/phenotype nonlocal Fisher-KPP: principal eigenvalues and dynamics", "fkpp"};
    std::string config_path, out_dir_opt;
    unsigned threads_opt = 0;
    bool seed_check = false;
    app.add_flag("--seed-check", seed_check, "Run the built-in oracle suite and exit");
    const std::vector<std::string> commands{"eigen", "simulate", "dichotomy", "sweep", "truncation"};
    const std::vector<std::string> help{
        "Principal eigenvalue on the periodic x Neumann cell of every experiment",
        "Simulate every experiment with a horizon; writes rho frames and a final dump",
        "Shift sweeps: eigenvalue, shift cross-check and long-time classification",
        "Period or diffusivity sweeps with monotonicity checks",
        "Truncation sequences against the periodic x Neumann reference"};
    for (std::size_t i = 0; i < commands.size(); ++i) {
        auto* sub = app.add_subcommand(commands[i], help[i]);
        sub->add_option("--config", config_path, "Config file (YAML)");
        sub->add_option("--out", out_dir_opt, "Output directory (overrides output_dir)");
        sub->add_option("--threads", threads_opt, "Worker threads (default: FKPP_THREADS or config)")
            ->check(CLI::PositiveNumber);
    }
    app.require_subcommand(0, 1);

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << app.help();
        return report_error(err, out_dir_opt, "usage", e.what(), kExitConfig);
    }

    if (seed_check) {
        const auto checks = run_seed_checks();
        bool ok = true;
        for (const auto& c : checks) {
            out << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
            ok = ok && c.passed;
        }
        return ok ? kExitOk : kExitFailure;
    }

    const auto subs = app.get_subcommands();
    if (subs.empty()) {
        err << app.help();
        return report_error(err, out_dir_opt, "usage", "a subcommand is required", kExitConfig);
    }
    const std::string command = subs.front()->get_name();
    if (config_path.empty()) {
        err << subs.front()->help();
        return report_error(err, out_dir_opt, "usage", "--config is required", kExitConfig);
    }

    Config cfg;
    unsigned threads = 1;
    try {
        cfg = load_config(config_path);
        const unsigned env = threads_from_env();
        threads = threads_opt ? threads_opt : env ? env : cfg.threads;
    } catch (const ConfigError& e) {
        return report_error(err, out_dir_opt, "config", e.what(), kExitConfig);
    }
    const std::filesystem::path out_dir = out_dir_opt.empty() ? cfg.output_dir : out_dir_opt;

    RunOptions opt;
    opt.threads = threads;
    bool all_passed = true;
    int ran = 0;
    for (const auto& e : cfg.experiments) {
        if (!runner_accepts(command, e)) continue;
        ++ran;
        try {
            const RunRecord rec = dispatch(command, e, opt, out_dir);
            write_record_files(out_dir, rec);
            print_record(out, rec);
            all_passed = all_passed && rec.passed;
        } catch (const InvalidArgument& ex) {
            return report_error(err, out_dir, "config",
                                "experiment '" + e.name + "': " + ex.what(), kExitConfig);
        } catch (const Error& ex) {
            report_error(err, out_dir, "solver", "experiment '" + e.name + "': " + ex.what(),
                         kExitFailure);
            all_passed = false;
        }
    }
    if (ran == 0)
        return report_error(err, out_dir, "config",
                            "no experiment in " + config_path + " fits the '" + command +
                                "' command",
                            kExitConfig);
    if (!all_passed) {
        std::ofstream diag(out_dir / "diagnostics.txt");
        diag << "one or more experiments failed; see the JSON records in this directory\n";
        return report_error(err, out_dir, "assertion", "experiment assertion failed", kExitFailure);
    }
    return kExitOk;
}

}  // namespace fkpp::cli
