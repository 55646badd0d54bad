#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include <qsd/experiment.hpp>
#include <qsd/verify.hpp>

using namespace qsd;
using namespace qsd::experiment;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("qsd_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d / name;
}

int cli(const std::string& args)
{
    const std::string cmd = std::string(QSD_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string csv_of(const RunResult& r)
{
    std::ostringstream os;
    r.trace.write_csv(os);
    return os.str();
}

} // namespace

TEST(Config, RoundTrip)
{
    for (const char* name : {"fig1", "fig3", "fig4"}) {
        const auto c = preset(name);
        EXPECT_EQ(parse_config(to_json(c)), c);
        EXPECT_EQ(parse_config(to_json(c).dump()), c);
    }
    ExperimentConfig c;
    c.experiment = Kind::zener;
    c.parameters = {{"alpha", 0.5}, {"f_sq", 2.0}};
    c.sampling.n_samples = 17;
    c.output.path = "a.csv";
    EXPECT_EQ(parse_config(to_json(c)), c);
    EXPECT_FALSE(to_json(c)["sampling"].contains("t_max"));
}

TEST(Config, StrictParsing)
{
    EXPECT_THROW(parse_config(std::string("{")), ConfigError);
    EXPECT_THROW(parse_config(std::string(R"({"experiment": "nope"})")), ConfigError);
    EXPECT_THROW(parse_config(std::string(R"({"parameters": {}})")), ConfigError);
    EXPECT_THROW(parse_config(std::string(R"({"experiment": "rabi", "extra": 1})")), ConfigError);
    EXPECT_THROW(parse_config(std::string(R"({"experiment": "rabi", "sampling": {"n_samples": 1}})")), ConfigError);
    EXPECT_THROW(parse_config(std::string(R"({"experiment": "rabi", "sampling": {"t_max": -1}})")), ConfigError);
    EXPECT_THROW(parse_config(std::string(R"({"experiment": "rabi", "output": {"format": "hdf5"}})")), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
    const auto c = parse_config(std::string(R"({"experiment": "gqs"})"));
    EXPECT_EQ(c.experiment, Kind::gqs);
    EXPECT_EQ(c.sampling.n_samples, 2000u);
}

TEST(Config, UnknownOrMistypedParametersRejected)
{
    auto c = parse_config(std::string(R"({"experiment": "rabi", "parameters": {"Gamma": 1, "gama": 2}})"));
    EXPECT_THROW(run(c), ConfigError);
    c = parse_config(std::string(R"({"experiment": "rabi", "parameters": {"Gamma": "one"}})"));
    EXPECT_THROW(run(c), ConfigError);
    c = parse_config(std::string(R"({"experiment": "gqs", "parameters": {"method": "magic"}})"));
    EXPECT_THROW(run(c), ConfigError);
    c = parse_config(std::string(R"({"experiment": "inverse1", "parameters": {"resonance": true, "c": 1}})"));
    EXPECT_THROW(run(c), ConfigError);
    c = parse_config(std::string(R"({"experiment": "rabi", "parameters": {"Gamma": -1}})"));
    EXPECT_THROW(run(c), InvalidParameter);
}

TEST(Presets, Fig1IsResonantRabi)
{
    const auto r = run(preset("fig1"));
    ASSERT_EQ(r.trace.size(), 2000u);
    EXPECT_NEAR(r.trace.times().back(), 2 * std::numbers::pi, 1e-15);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const double s = std::sin(r.trace.times()[i]);
        EXPECT_NEAR(r.trace.p_target()[i], s * s, 1e-12);
    }
}

TEST(Presets, Fig3AndFig4AreMonotone)
{
    for (const char* name : {"fig3", "fig4"}) {
        const auto r = run(preset(name));
        ASSERT_EQ(r.trace.size(), 2000u);
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            EXPECT_GE(r.trace.p_target()[i], r.trace.p_target()[i - 1]) << name;
        EXPECT_GT(r.trace.p_target().back(), 0.99) << name;
        EXPECT_LT(r.trace.p_residual().back(), 0.01) << name;
    }
    EXPECT_THROW(preset("fig2"), ConfigError);
}

TEST(Run, EveryKindProducesATrace)
{
    const char* configs[] = {
        R"({"experiment": "gqs", "parameters": {"beta_im": 0.5, "x": 0.6, "method": "propagate"}, "sampling": {"n_samples": 50}})",
        R"({"experiment": "rabi", "parameters": {"detuning": 2, "method": "propagate"}, "sampling": {"n_samples": 50}})",
        R"({"experiment": "adiabatic", "parameters": {"x": 0.2}, "sampling": {"n_samples": 50}})",
        R"({"experiment": "nonadiabatic", "parameters": {"variant": "fixed_point"}, "sampling": {"n_samples": 50}})",
        R"({"experiment": "inverse1", "parameters": {"c": 1, "method": "propagate"}, "sampling": {"n_samples": 50}})",
        R"({"experiment": "inverse2", "parameters": {"x": 0.3}, "sampling": {"n_samples": 50}})",
        R"({"experiment": "zener", "sampling": {"n_samples": 50}})",
    };
    for (const char* text : configs) {
        const auto r = run(parse_config(std::string(text)));
        EXPECT_EQ(r.trace.size(), 50u) << text;
        for (double e : r.trace.norm_error())
            EXPECT_LE(std::abs(e), 1e-9) << text;
    }
}

TEST(Run, ClosedFormAndPropagationAgree)
{
    for (const char* kind : {"gqs", "rabi", "inverse1"}) {
        json params = {{"x", 0.3}};
        if (std::string(kind) == "inverse1")
            params["c"] = 1.0;
        if (std::string(kind) == "gqs")
            params["beta_im"] = 0.4;
        ExperimentConfig a;
        a.experiment = kind_names().at(kind);
        a.parameters = params;
        a.sampling.n_samples = 200;
        auto b = a;
        b.parameters["method"] = "propagate";
        b.parameters["rel_tol"] = 1e-12;
        b.parameters["abs_tol"] = 1e-14;
        const auto ra = run(a), rb = run(b);
        for (std::size_t i = 0; i < ra.trace.size(); ++i)
            EXPECT_NEAR(ra.trace.p_target()[i], rb.trace.p_target()[i], 1e-8) << kind;
    }
}

TEST(Run, AdiabaticRejectsSamplingPastRunTime)
{
    const auto c = parse_config(std::string(R"({"experiment": "adiabatic", "sampling": {"t_max": 1e6}})"));
    EXPECT_THROW(run(c), ConfigError);
}

TEST(Run, ByteIdenticalOutput)
{
    for (const char* name : {"fig1", "fig3", "fig4"})
        EXPECT_EQ(csv_of(run(preset(name))), csv_of(run(preset(name))));
    const auto c = parse_config(std::string(
        R"({"experiment": "classify", "parameters": {"law": "eps_gap2", "epsilon": 0.2, "w_min": 0.01, "w_max": 1}})"));
    EXPECT_THROW(run(c), InvalidParameter); // w = 1 lies outside (0, 1)
}

TEST(Run, ClassificationOutputIndependentOfWorkers)
{
    const auto c = parse_config(std::string(
        R"({"experiment": "classify", "parameters": {"law": "eps_gap2", "epsilon": 0.2, "w_min": 0.005, "w_max": 0.9}})"));
    std::ostringstream a, b;
    write_classification_csv(*run(c, 1).classification, a);
    write_classification_csv(*run(c, 3).classification, b);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "w,epsilon,T,p_final,satisfies_fp");
    const auto v = json::parse(verdict_json(*run(c, 2).classification));
    EXPECT_TRUE(v.contains("grover_scaling"));
    EXPECT_TRUE(v.contains("fixed_point"));
    EXPECT_TRUE(v["slope"].is_number());
}

TEST(Verify, SuitesPass)
{
    for (const char* s : {"closed_forms", "schedules", "inverse"}) {
        const auto checks = verify::run(verify::suite(s), {}, 2);
        EXPECT_FALSE(checks.empty());
        for (const auto& c : checks)
            EXPECT_TRUE(c.pass) << c.suite << "/" << c.name << " " << c.max_error << " " << c.error;
        EXPECT_TRUE(verify::report(s, checks)["pass"].get<bool>());
    }
    EXPECT_THROW(verify::suite("bogus"), InvalidParameter);
}

TEST(Verify, LooseToleranceIsCaught)
{
    verify::Settings s;
    s.propagation.rel_tol = 1e-2;
    s.propagation.abs_tol = 1e-4;
    const auto checks = verify::run(verify::suite("closed_forms"), s, 1);
    bool drift_failed = false;
    for (const auto& c : checks)
        if (c.name == "norm_drift")
            drift_failed = !c.pass;
    EXPECT_TRUE(drift_failed);
    EXPECT_FALSE(verify::report("closed_forms", checks)["pass"].get<bool>());
}

TEST(Cli, ExitCodes)
{
    const auto out = scratch("fig1.csv");
    EXPECT_EQ(cli("run --preset fig1 --out " + out.string()), 0);
    EXPECT_EQ(slurp(out).substr(0, 30), "t,p_target,p_residual,norm_err");
    const auto out2 = scratch("fig1b.csv");
    EXPECT_EQ(cli("run --preset fig1 --out " + out2.string()), 0);
    EXPECT_EQ(slurp(out), slurp(out2));

    EXPECT_EQ(cli(""), 2);
    EXPECT_EQ(cli("run"), 2);
    EXPECT_EQ(cli("run --preset fig9"), 2);
    EXPECT_EQ(cli("run --config /nonexistent.json"), 4);
    EXPECT_EQ(cli("run --preset fig1 --out /nonexistent-dir/x.csv"), 4);

    const auto bad = scratch("bad.json");
    std::ofstream(bad) << R"({"experiment": "rabi", "parameters": {"Gamma": 0}})";
    EXPECT_EQ(cli("run --config " + bad.string()), 2);

    const auto stiff = scratch("stiff.json");
    std::ofstream(stiff) << R"({"experiment": "zener", "parameters": {"alpha": 1e9, "rel_tol": 1e-12},
                               "sampling": {"t_max": 1e3, "n_samples": 2}})";
    EXPECT_EQ(cli("run --config " + stiff.string()), 3);

    const auto notcls = scratch("notcls.json");
    std::ofstream(notcls) << R"({"experiment": "rabi"})";
    EXPECT_EQ(cli("classify --config " + notcls.string()), 2);

    const auto cls = scratch("cls.json");
    std::ofstream(cls) << R"({"experiment": "classify", "parameters": {"law": "constant", "w_min": 0.01, "w_max": 1e-0}})";
    EXPECT_EQ(cli("classify --config " + cls.string()), 2);

    EXPECT_EQ(cli("verify --suite closed_forms"), 0);
    EXPECT_EQ(cli("verify --suite closed_forms --rel-tol 1e-2"), 1);
    EXPECT_EQ(cli("verify --suite nope"), 2);
    const auto rep = scratch("report.json");
    EXPECT_EQ(cli("verify --suite inverse --out " + rep.string()), 0);
    EXPECT_TRUE(json::parse(slurp(rep))["pass"].get<bool>());
}

TEST(Cli, ClassifyWritesCsvAndVerdict)
{
    const auto cfg = scratch("gap2.json");
    std::ofstream(cfg) << R"({"experiment": "classify", "parameters": {"law": "eps_gap2", "epsilon": 0.2, "w_min": 0.005, "w_max": 0.9}})";
    const auto out = scratch("gap2.csv");
    ASSERT_EQ(cli("classify --config " + cfg.string() + " --out " + out.string()), 0);
    EXPECT_EQ(slurp(out).substr(0, 32), "w,epsilon,T,p_final,satisfies_fp");
    const auto v = json::parse(slurp(out.string() + ".verdict.json"));
    EXPECT_TRUE(v["fixed_point"].get<bool>());
}

TEST(Cli, ShippedConfigsParse)
{
    for (const auto& e : fs::directory_iterator(QSD_CONFIG_DIR)) {
        if (e.path().extension() == ".json") {
            EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
        }
    }
}
