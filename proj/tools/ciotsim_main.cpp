// ciotsim: experiment runner for the cooperative-caching cognitive-IoT
// simulator. Subcommands: train (single run), sweep (strategies x seeds x
// axis values), plot (csv -> svg), validate (configuration check).
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ciotsim/experiment.hpp"
#include "ciotsim/plot.hpp"

namespace fs = std::filesystem;
using namespace ciot;

namespace {

struct CommonOpts {
    std::string config_file;
    std::vector<std::string> sets;  // key=value overrides
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_file, "configuration file (key = value lines)");
    cmd->add_option("--set", opts.sets, "override a configuration key, e.g. --set env.L=22")
        ->take_all();
}

ExperimentSpec build_spec(const CommonOpts& opts) {
    ExperimentSpec spec;
    if (!opts.config_file.empty()) spec = load_spec(opts.config_file);
    for (const std::string& kv : opts.sets) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        apply_kv(spec, spec_detail::trim(kv.substr(0, eq)),
                 spec_detail::trim(kv.substr(eq + 1)));
    }
    return spec;
}

void print_spec(const ExperimentSpec& spec) {
    const Config& c = spec.base;
    std::printf("environment: T=%d L=%d tau=%s P_p=%s P_s=%s sigma2=%s W_bw=%s k=%s\n", c.T, c.L,
                format_double(c.tau).c_str(), format_double(c.P_p).c_str(),
                format_double(c.P_s).c_str(), format_double(c.sigma2).c_str(),
                format_double(c.W_bw).c_str(), format_double(c.k_share).c_str());
    std::printf("catalogs:    M=%d N=%d C_s=%d gamma_p=%s gamma_s=%s cooperative=%s\n", c.M, c.N,
                c.C_s, format_double(c.gamma_p).c_str(), format_double(c.gamma_s).c_str(),
                c.cooperative ? "true" : "false");
    std::printf("channel:     mean_gss=%s mean_gsp=%s phi=%s F_size=%s D_core=%s\n",
                format_double(c.mean_gss).c_str(), format_double(c.mean_gsp).c_str(),
                format_double(c.phi).c_str(), format_double(c.F_size).c_str(),
                format_double(c.D_core).c_str());
    const AgentConfig& a = c.agent;
    std::printf("agent:       episodes=%d h1=%d h2=%d batch=%d eta0=%s beta=%s c'=%s kappa=%d\n",
                a.episodes, a.h1, a.h2, a.batch_size, format_double(a.eta0).c_str(),
                format_double(a.beta_discount).c_str(), format_double(a.c_prime).c_str(),
                a.kappa_target);
    std::printf("replay:      capacity=%ld transitions (%d episodes x T)\n", c.replay_capacity(),
                a.replay_episodes);
    std::printf("run:         strategies=");
    for (size_t i = 0; i < spec.strategies.size(); ++i)
        std::printf("%s%s", i ? "," : "", strategy_id(spec.strategies[i]));
    std::printf(" seeds=");
    for (size_t i = 0; i < spec.seeds.size(); ++i)
        std::printf("%s%llu", i ? "," : "",
                    static_cast<unsigned long long>(spec.seeds[i]));
    std::printf(" outdir=%s workers=%d\n", resolved_outdir(spec).c_str(), spec.workers);
    if (spec.axis != SweepAxis::None) {
        std::printf("sweep:       axis=%s values=", sweep_axis_id(spec.axis));
        for (size_t i = 0; i < spec.values.size(); ++i)
            std::printf("%s%s", i ? "," : "", format_double(spec.values[i]).c_str());
        std::printf("\n");
    }
}

int cmd_validate(const CommonOpts& opts) {
    ExperimentSpec spec = build_spec(opts);
    spec.validate();
    print_spec(spec);
    std::printf("configuration ok\n");
    return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& strategy, std::uint64_t seed,
              const std::string& out_file, const std::string& save_net) {
    ExperimentSpec spec = build_spec(opts);
    auto strat = parse_strategy(strategy);
    if (!strat) throw std::invalid_argument("unknown strategy: '" + strategy + "'");
    spec.base.validate();

    TrainResult res = run_strategy(*strat, spec.base, seed);
    std::string path = out_file;
    if (path.empty()) {
        fs::create_directories(resolved_outdir(spec));
        path = (fs::path(resolved_outdir(spec)) / training_csv_name(*strat, seed)).string();
    } else if (!fs::path(path).parent_path().empty()) {
        fs::create_directories(fs::path(path).parent_path());
    }
    write_training_csv(path, res.records);
    if (!save_net.empty()) {
        if (*strat == Strategy::Lru)
            throw std::invalid_argument("lru runs have no network to save");
        save_params(res.params, save_net);
    }

    const MetricsRecord& last = res.records.back();
    std::printf("wrote %s (%zu episodes)\n", path.c_str(), res.records.size());
    std::printf("final: asr=%s delay=%s su_hit=%s pu_hit=%s\n",
                format_double(last.asr_ema).c_str(), format_double(last.delay_ema).c_str(),
                format_double(last.su_hit_rate).c_str(),
                format_double(last.pu_hit_rate).c_str());
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis, const std::string& values) {
    ExperimentSpec spec = build_spec(opts);
    if (!axis.empty()) apply_kv(spec, "sweep.axis", axis);
    if (!values.empty()) apply_kv(spec, "sweep.values", values);
    spec.validate();

    std::vector<RunJob> jobs = plan_jobs(spec);
    std::printf("running %zu jobs into %s\n", jobs.size(), resolved_outdir(spec).c_str());
    run_experiment(spec);
    if (spec.axis != SweepAxis::None)
        std::printf("wrote %s\n",
                    (fs::path(resolved_outdir(spec)) / ("sweep_" + std::string(sweep_axis_id(spec.axis)) +
                                              ".csv")).string().c_str());
    std::printf("done\n");
    return 0;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& out,
             const std::string& metric, bool band, const std::string& title) {
    PlotInput pi = build_plot(csvs, metric, band, title);
    std::string svg = render_line_chart(pi.spec, pi.series);
    if (!fs::path(out).parent_path().empty())
        fs::create_directories(fs::path(out).parent_path());
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + out);
    f << svg;
    if (!f) throw std::runtime_error("write failed: " + out);
    std::printf("wrote %s (%zu series)\n", out.c_str(), pi.series.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cooperative-caching cognitive-IoT simulator"};
    app.require_subcommand(1);

    CommonOpts validate_opts;
    CLI::App* validate = app.add_subcommand("validate", "parse and check a configuration");
    add_common(validate, validate_opts);

    CommonOpts train_opts;
    std::string strategy = "ucbz";
    std::uint64_t seed = 1;
    std::string out_file, save_net;
    CLI::App* train = app.add_subcommand("train", "run one strategy for one seed");
    add_common(train, train_opts);
    train->add_option("--strategy", strategy, "ucbz | egreedy | noncoop | lru");
    train->add_option("--seed", seed, "run seed");
    train->add_option("--out", out_file, "training csv path (default <outdir>/train_*.csv)");
    train->add_option("--save-net", save_net, "write the trained network checkpoint here");

    CommonOpts sweep_opts;
    std::string axis, values;
    CLI::App* sweep = app.add_subcommand("sweep", "run strategies x seeds (x axis values)");
    add_common(sweep, sweep_opts);
    sweep->add_option("--axis", axis, "none | L | P_s | gamma_s");
    sweep->add_option("--values", values, "comma-separated axis values");

    std::vector<std::string> plot_csvs;
    std::string plot_out = "chart.svg", plot_metric, plot_title;
    bool plot_band = false;
    CLI::App* plot = app.add_subcommand("plot", "render csv results as an svg line chart");
    plot->add_option("csv", plot_csvs, "input csv files")->required()->expected(-1);
    plot->add_option("--out", plot_out, "output svg path");
    plot->add_option("--metric", plot_metric, "metric column (default asr_ema / final_asr)");
    plot->add_option("--title", plot_title, "chart title");
    plot->add_flag("--band", plot_band, "shade the min/max band across seeds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) return cmd_validate(validate_opts);
        if (train->parsed()) return cmd_train(train_opts, strategy, seed, out_file, save_net);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, axis, values);
        if (plot->parsed()) return cmd_plot(plot_csvs, plot_out, plot_metric, plot_band,
                                            plot_title);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
