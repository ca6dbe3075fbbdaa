#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ciotsim/experiment.hpp"
#include "ciotsim/plot.hpp"

using namespace ciot;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

ExperimentSpec tiny_spec(const std::string& outdir) {
    ExperimentSpec spec;
    spec.base.T = 5;
    spec.base.L = 3;
    spec.base.M = 3;
    spec.base.N = 3;
    spec.base.C_s = 2;
    spec.base.agent.episodes = 12;
    spec.base.agent.replay_episodes = 2;
    spec.base.agent.batch_size = 8;
    spec.base.agent.h1 = 8;
    spec.base.agent.h2 = 8;
    spec.strategies = {Strategy::Ucbz, Strategy::Lru};
    spec.seeds = {1, 2};
    spec.outdir = outdir;
    spec.workers = 1;
    spec.final_window = 5;
    return spec;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ciotsim_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("csv formatting is locale-independent and round-trips") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(18.0) == "18");
    CHECK(format_double(0.05) == "0.05");
    CHECK(parse_double(format_double(3.4594316186372973)) == 3.4594316186372973);
    CHECK(parse_double("1e-3") == 1e-3);
    CHECK_THROWS_AS(parse_double("1,5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_long("abc"), std::invalid_argument);
}

TEST_CASE("config file parsing: sections, overrides, errors") {
    ExperimentSpec spec;
    apply_kv(spec, "env.T", "10");
    apply_kv(spec, "env.L", "7");
    apply_kv(spec, "agent.episodes", "42");
    apply_kv(spec, "agent.exploration", "egreedy");
    apply_kv(spec, "run.strategies", "ucbz, lru");
    apply_kv(spec, "run.seeds", "3,4,5");
    apply_kv(spec, "sweep.axis", "L");
    apply_kv(spec, "sweep.values", "2, 4, 6");
    apply_kv(spec, "metrics.ema_weight", "0.1");
    CHECK(spec.base.T == 10);
    CHECK(spec.base.L == 7);
    CHECK(spec.base.agent.episodes == 42);
    CHECK(spec.base.agent.exploration == ExplorationMode::EpsilonGreedy);
    REQUIRE(spec.strategies.size() == 2);
    CHECK(spec.strategies[1] == Strategy::Lru);
    CHECK(spec.seeds == std::vector<std::uint64_t>{3, 4, 5});
    CHECK(spec.axis == SweepAxis::L);
    CHECK(spec.values == std::vector<double>{2, 4, 6});
    CHECK(spec.base.agent.ema_weight == 0.1);

    CHECK_THROWS_AS(apply_kv(spec, "env.bogus", "1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_kv(spec, "agent.episodes", "ten"), std::invalid_argument);
    CHECK_THROWS_AS(apply_kv(spec, "run.strategies", "ucbz,warp"), std::invalid_argument);

    TempDir tmp;
    fs::path cfg_path = tmp.path / "run.cfg";
    {
        std::ofstream f(cfg_path);
        f << "# comment line\n";
        f << "env.T = 8\n";
        f << "env.L = 5   # trailing comment\n";
        f << "\n";
        f << "agent.episodes = 7\n";
    }
    ExperimentSpec loaded = load_spec(cfg_path.string());
    CHECK(loaded.base.T == 8);
    CHECK(loaded.base.L == 5);
    CHECK(loaded.base.agent.episodes == 7);

    fs::path bad_path = tmp.path / "bad.cfg";
    {
        std::ofstream f(bad_path);
        f << "env.T 8\n";
    }
    CHECK_THROWS_AS(load_spec(bad_path.string()), std::invalid_argument);
}

TEST_CASE("spec validation rejects empty seeds and bad sweep values") {
    TempDir tmp;
    ExperimentSpec spec = tiny_spec((tmp.path / "out").string());
    spec.seeds.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = tiny_spec((tmp.path / "out").string());
    spec.axis = SweepAxis::L;
    spec.values = {4.0, 99.0};  // L > T
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec.values = {2.5};  // non-integer L
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec.values.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);  // axis without values
}

TEST_CASE("experiment run writes training csvs and deterministic bytes") {
    TempDir tmp;
    ExperimentSpec spec = tiny_spec((tmp.path / "out").string());
    run_experiment(spec);

    for (const char* name : {"train_ucbz_seed1.csv", "train_ucbz_seed2.csv",
                             "train_lru_seed1.csv", "train_lru_seed2.csv"}) {
        fs::path p = fs::path(spec.outdir) / name;
        REQUIRE(fs::exists(p));
        CsvTable t = read_csv(p.string());
        CHECK(t.header == split_csv_line(kTrainingHeader));
        CHECK(t.rows.size() == 12);
    }

    std::string first = slurp(fs::path(spec.outdir) / "train_ucbz_seed1.csv");
    CHECK(first.find(',') != std::string::npos);
    CHECK(first.find(';') == std::string::npos);

    // re-running the identical spec reproduces identical bytes
    ExperimentSpec spec2 = tiny_spec((tmp.path / "out2").string());
    run_experiment(spec2);
    CHECK(slurp(fs::path(spec2.outdir) / "train_ucbz_seed1.csv") == first);
}

TEST_CASE("sweep emits per-value directories and a summary with the expected rows") {
    TempDir tmp;
    ExperimentSpec spec = tiny_spec((tmp.path / "sweep").string());
    spec.axis = SweepAxis::L;
    spec.values = {1.0, 4.0};
    std::vector<SweepRow> rows = run_experiment(spec);

    // |values| * |strategies| * |seeds|
    CHECK(rows.size() == 2 * 2 * 2);
    fs::path summary = fs::path(spec.outdir) / "sweep_L.csv";
    REQUIRE(fs::exists(summary));
    CsvTable t = read_csv(summary.string());
    CHECK(t.header == split_csv_line(kSweepHeader));
    CHECK(t.rows.size() == 8);
    CHECK(fs::exists(fs::path(spec.outdir) / "L_1" / "train_ucbz_seed1.csv"));
    CHECK(fs::exists(fs::path(spec.outdir) / "L_4" / "train_lru_seed2.csv"));

    // axis order and per-row grouping follow planning order
    CHECK(t.rows[0][0] == "1");
    CHECK(t.rows[4][0] == "4");
}

TEST_CASE("plot: grouped training series, bands, determinism, degenerate input") {
    TempDir tmp;
    ExperimentSpec spec = tiny_spec((tmp.path / "plots").string());
    spec.strategies = {Strategy::Ucbz, Strategy::EpsilonGreedy, Strategy::NonCooperative,
                       Strategy::Lru};
    run_experiment(spec);

    std::vector<std::string> paths;
    for (Strategy s : spec.strategies)
        for (auto seed : spec.seeds)
            paths.push_back((fs::path(spec.outdir) / training_csv_name(s, seed)).string());

    PlotInput pi = build_plot(paths, "asr_ema", true, "training");
    REQUIRE(pi.series.size() == 4);  // one per strategy, seeds averaged
    for (const Series& s : pi.series) {
        CHECK(s.x.size() == 12);
        CHECK(s.ylo.size() == 12);
    }
    std::string svg = render_line_chart(pi.spec, pi.series);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("ucbz") != std::string::npos);
    CHECK(svg.find("lru") != std::string::npos);
    // four polylines, one per strategy
    size_t count = 0;
    for (size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) ++count;
    CHECK(count == 4);

    // identical inputs render identical bytes
    PlotInput pi2 = build_plot(paths, "asr_ema", true, "training");
    CHECK(render_line_chart(pi2.spec, pi2.series) == svg);

    // single-row csv plots without crashing
    fs::path single = tmp.path / "single.csv";
    {
        std::ofstream f(single);
        f << kTrainingHeader << "\n1,2.0,3.0,0.5,0.25\n";
    }
    PlotInput one = build_plot({single.string()}, "asr_ema", false, "");
    std::string dot = render_line_chart(one.spec, one.series);
    CHECK(dot.find("<circle") != std::string::npos);

    // mixing schemas fails loudly
    ExperimentSpec sw = tiny_spec((tmp.path / "sw").string());
    sw.axis = SweepAxis::L;
    sw.values = {1.0};
    run_experiment(sw);
    std::vector<std::string> mixed{paths[0],
                                   (fs::path(sw.outdir) / "sweep_L.csv").string()};
    CHECK_THROWS_AS(build_plot(mixed, "asr_ema", false, ""), std::invalid_argument);

    // summary schema groups by the strategy column
    PlotInput sp = build_plot({(fs::path(sw.outdir) / "sweep_L.csv").string()}, "final_delay",
                              false, "sweep");
    CHECK(sp.series.size() == 2);
    CHECK_THROWS_AS(build_plot({paths[0]}, "no_such_metric", false, ""), std::invalid_argument);
}

TEST_CASE("default output directory honors the environment variable") {
    const char* old = std::getenv("CIOTSIM_OUTDIR");
    setenv("CIOTSIM_OUTDIR", "/tmp/ciotsim_envdir", 1);
    CHECK(default_outdir() == "/tmp/ciotsim_envdir");
    ExperimentSpec spec;
    CHECK(resolved_outdir(spec) == "/tmp/ciotsim_envdir");  // empty outdir defers to the env
    spec.outdir = "elsewhere";
    CHECK(resolved_outdir(spec) == "elsewhere");
    if (old) setenv("CIOTSIM_OUTDIR", old, 1);
    else unsetenv("CIOTSIM_OUTDIR");
    if (!old) CHECK(default_outdir() == "results");
}

TEST_CASE("worker pool output matches single-threaded output byte for byte") {
    TempDir tmp;
    ExperimentSpec a = tiny_spec((tmp.path / "w1").string());
    a.workers = 1;
    run_experiment(a);
    ExperimentSpec b = tiny_spec((tmp.path / "w4").string());
    b.workers = 4;
    run_experiment(b);
    for (const char* name : {"train_ucbz_seed1.csv", "train_ucbz_seed2.csv",
                             "train_lru_seed1.csv", "train_lru_seed2.csv"}) {
        CHECK(slurp(fs::path(a.outdir) / name) == slurp(fs::path(b.outdir) / name));
    }
}
