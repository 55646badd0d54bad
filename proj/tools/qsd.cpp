#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <qsd/experiment.hpp>
#include <qsd/verify.hpp>

namespace {

using namespace qsd;

enum Exit { ok = 0, failed = 1, config = 2, numerical = 3, io = 4 };

experiment::ExperimentConfig resolve(const std::string& config_path, const std::string& preset)
{
    if (!preset.empty() && !config_path.empty())
        throw ConfigError("--config and --preset are mutually exclusive");
    if (!preset.empty())
        return experiment::preset(preset);
    if (config_path.empty())
        throw ConfigError("either --config or --preset is required");
    return experiment::load_config(config_path);
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot write " + path);
    return os;
}

int run_experiment(const experiment::ExperimentConfig& cfg, const std::string& out_override, bool print_config)
{
    if (print_config) {
        std::cout << experiment::to_json(cfg).dump(2) << "\n";
        return ok;
    }
    const std::string out = out_override.empty() ? cfg.output.path : out_override;
    const auto result = experiment::run(cfg, worker_count());
    if (result.classification) {
        const std::string verdict = experiment::verdict_json(*result.classification);
        if (out.empty()) {
            experiment::write_classification_csv(*result.classification, std::cout);
        } else {
            auto os = open_out(out);
            experiment::write_classification_csv(*result.classification, os);
            auto vs = open_out(out + ".verdict.json");
            vs << verdict << "\n";
        }
        std::cout << verdict << "\n";
        return ok;
    }
    if (out.empty()) {
        result.trace.write_csv(std::cout);
    } else {
        result.trace.write_csv(out);
        std::cerr << "wrote " << result.trace.size() << " samples to " << out << "\n";
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-level quantum dynamics experiments.\n"
                 "Presets: fig1 (resonant Rabi, x = 0, Gamma = hbar = 1, t in [0, 2 pi]),\n"
                 "fig3 (scenario 1 resonance limit, x = 0, xi = 1, t in [0, 6]),\n"
                 "fig4 (scenario 2, x = 0, xi = 1, t in [0, 6]); all with 2000 samples.\n"
                 "QSD_WORKERS caps the number of worker threads."};
    app.require_subcommand(1);

    std::string config_path, out_path, preset;
    bool print_config = false;

    auto* run_cmd = app.add_subcommand("run", "run an experiment and write its CSV trace");
    run_cmd->add_option("--config", config_path, "JSON experiment config");
    run_cmd->add_option("--out", out_path, "output CSV (overrides output.path; stdout if both empty)");
    run_cmd->add_option("--preset", preset, "figure preset")->check(CLI::IsMember({"fig1", "fig3", "fig4"}));
    run_cmd->add_flag("--print-config", print_config, "print the resolved config and exit");

    std::string classify_config, classify_out;
    auto* classify_cmd = app.add_subcommand("classify", "classify a speed law; writes the report CSV and a JSON verdict");
    classify_cmd->add_option("--config", classify_config, "JSON config with experiment = classify")->required();
    classify_cmd->add_option("--out", classify_out, "report CSV");

    std::string suite = "all", report_path;
    double rel_tol = 0;
    auto* verify_cmd = app.add_subcommand("verify", "run cross-validation checks and emit a JSON report");
    verify_cmd->add_option("--suite", suite, "closed_forms, schedules, inverse or all")
        ->check(CLI::IsMember({"closed_forms", "schedules", "inverse", "all"}));
    verify_cmd->add_option("--rel-tol", rel_tol, "override the propagation relative tolerance");
    verify_cmd->add_option("--out", report_path, "write the JSON report to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : Exit::config;
    }

    try {
        if (*run_cmd)
            return run_experiment(resolve(config_path, preset), out_path, print_config);
        if (*classify_cmd) {
            const auto cfg = experiment::load_config(classify_config);
            if (cfg.experiment != experiment::Kind::classify)
                throw ConfigError("classify needs a config with experiment = classify");
            return run_experiment(cfg, classify_out, false);
        }
        verify::Settings settings;
        if (rel_tol != 0) {
            settings.propagation.rel_tol = rel_tol;
            validate(settings.propagation.ode());
        }
        const auto checks = verify::run(verify::suite(suite), settings, worker_count());
        const auto rep = verify::report(suite, checks);
        if (report_path.empty()) {
            std::cout << rep.dump(2) << "\n";
        } else {
            auto os = open_out(report_path);
            os << rep.dump(2) << "\n";
            for (const auto& c : checks)
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.suite << "/" << c.name << " max_error=" << c.max_error
                          << "\n";
        }
        return rep["pass"].get<bool>() ? ok : failed;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return io;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical;
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return Exit::config;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::config;
    }
}
