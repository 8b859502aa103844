#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gcl/bench.hpp"
#include "gcl/chaining.hpp"
#include "gcl/function_class.hpp"
#include "gcl/generators.hpp"
#include "gcl/rng.hpp"
#include "gcl/tournament.hpp"

namespace fs = std::filesystem;

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

int cmd_complexity(const std::string& class_file, double kappa, double sigma,
                   int N, int n_mc, int ppd, std::uint64_t seed,
                   const std::string& out_dir) {
    const gcl::FunctionClass F = gcl::FunctionClass::load_json(class_file);
    gcl::ComplexityOptions opt;
    opt.kappa = kappa;
    opt.sigma = sigma;
    opt.N = N;
    opt.n_mc = n_mc;
    opt.points_per_decade = ppd;
    opt.seed = seed;
    const gcl::ComplexityReport rep = gcl::compute_complexity_report(F, opt);
    fs::create_directories(out_dir);
    rep.save_json((fs::path(out_dir) / "complexity.json").string());
    rep.save_csv((fs::path(out_dir) / "complexity.csv").string());
    std::cout << "d_F=" << rep.d_F << " gamma2=" << rep.gamma2_value
              << " EsupG=" << rep.gaussian_sup.value << " r_Q=" << rep.r_Q.r
              << " r_M=" << rep.r_M.r << " lambda*=" << rep.lambda_star.r
              << " r~=" << rep.r_tilde.r << "\n";
    return 0;
}

int cmd_learn(const std::string& config_path, bool dump_oracles) {
    const gcl::ExperimentConfig config =
        gcl::ExperimentConfig::load_json(config_path);
    const gcl::FunctionClass F = config.build_class();
    const gcl::RegressionModel model = config.build_model(F);

    double r = config.r_override;
    if (!(r > 0.0)) {
        gcl::ComplexityOptions copt;
        copt.kappa = config.kappa;
        copt.N = config.N;
        copt.sigma = std::max(config.sigma_noise, 1e-12);
        copt.n_mc = config.n_mc;
        copt.points_per_decade = config.points_per_decade;
        copt.seed = gcl::derive_seed(config.master_seed, 0xC0);
        const gcl::ComplexityReport rep = gcl::compute_complexity_report(F, copt);
        r = config.r_multiplier * std::max(rep.r_star.r, rep.lambda_star.r);
    }

    const std::uint64_t seed = gcl::derive_seed(config.master_seed, 1000);
    const gcl::LabeledSample sample =
        gcl::gen_regression(model, 2 * config.N, seed);
    gcl::LearnConfig lc;
    lc.consts = config.consts;
    lc.shuffle_seed = seed;
    const gcl::TournamentOutcome out = gcl::learn(F, sample.X, sample.Y, r, lc);

    nlohmann::json j;
    j["r"] = r;
    j["sigma_hat"] = out.sigma_hat;
    j["sigma_star"] = out.sigma_star;
    j["v_hat_size"] = out.v_hat.size();
    j["v_star_size"] = out.v_star.size();
    j["selected"] = out.selected;
    j["failed"] = out.failed;
    if (out.selected >= 0) {
        const gcl::RegressionTruth truth = model.truth();
        int f_star = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int f = 0; f < F.size(); ++f) {
            const double rf = truth.risk(F.point(f));
            if (rf < best) {
                best = rf;
                f_star = f;
            }
        }
        j["error_l2"] = gcl::l2_distance(F.point(out.selected), F.point(f_star),
                                         F.cov, gcl::MetricKind::True);
        j["excess_risk"] = truth.risk(F.point(out.selected)) - best;
    }
    std::cout << j.dump(2) << "\n";

    if (dump_oracles) {
        fs::create_directories(config.out_dir);
        {
            std::ofstream f(fs::path(config.out_dir) / "psi_c.csv");
            f << "class_index,psi_c,in_v_hat\n";
            for (std::size_t i = 0; i < out.psi_c.size(); ++i) {
                const bool in_vhat =
                    std::find(out.v_hat.begin(), out.v_hat.end(),
                              static_cast<int>(i)) != out.v_hat.end();
                f << i << ',' << fmt17(out.psi_c[i]) << ',' << (in_vhat ? 1 : 0)
                  << '\n';
            }
        }
        if (out.matches) {
            std::ofstream f(fs::path(config.out_dir) / "psi_l.csv");
            f << "visitor,home,psi_l,home_win\n";
            const auto& mm = *out.matches;
            for (std::size_t h = 0; h < mm.players.size(); ++h)
                for (std::size_t v = 0; v < mm.players.size(); ++v) {
                    if (h == v) continue;
                    f << mm.players[v] << ',' << mm.players[h] << ','
                      << fmt17(mm.psi_l(static_cast<int>(v), static_cast<int>(h)))
                      << ',' << (mm.win[h][v] ? 1 : 0) << '\n';
                }
        }
        std::cout << "oracle dumps written to " << config.out_dir << "\n";
    }
    return out.failed ? 2 : 0;
}

int cmd_gap(int d, double alpha, const std::string& k_grid_str, int n_mc,
            std::uint64_t seed, const std::string& out_dir) {
    std::vector<double> ks;
    std::size_t pos = 0;
    while (pos < k_grid_str.size()) {
        std::size_t next = k_grid_str.find(',', pos);
        if (next == std::string::npos) next = k_grid_str.size();
        ks.push_back(std::stod(k_grid_str.substr(pos, next - pos)));
        pos = next + 1;
    }
    const gcl::GapReport rep = gcl::run_gap_experiment(d, alpha, ks, n_mc, seed);
    fs::create_directories(out_dir);
    rep.save_csv((fs::path(out_dir) / "gap.csv").string());
    rep.save_svg((fs::path(out_dir) / "gap.svg").string());
    for (const gcl::GapPoint& p : rep.points)
        std::cout << "k=" << p.k << " phi=" << p.phi.value
                  << " gmax=" << p.gmax.value << " ratio=" << p.ratio << " (se "
                  << p.ratio_se << ")" << (p.in_window ? "" : " [out-of-window]")
                  << "\n";
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
    gcl::ExperimentConfig config = gcl::ExperimentConfig::load_json(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    const gcl::BenchResult res = gcl::run_benchmark(config);
    std::cout << "r=" << res.r << " success=" << res.success_freq
              << " crude_event=" << res.crude_event_freq
              << " fine_event=" << res.fine_event_freq
              << " failed=" << res.failed_freq
              << " q95(tournament)=" << res.q95_error_tournament
              << " q95(erm)=" << res.q95_error_erm << " ["
              << res.wall_clock_sec << "s]\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gaussian-complexity regression learner"};
    app.require_subcommand(1);

    auto* c_cmd = app.add_subcommand("complexity", "complexity report of a class");
    std::string class_file, out_dir = "out";
    double kappa = 0.25, sigma = 1.0;
    int N = 1000, n_mc = 200, ppd = 50;
    std::uint64_t seed = 1;
    c_cmd->add_option("--class-file", class_file, "class JSON")->required();
    c_cmd->add_option("--kappa", kappa);
    c_cmd->add_option("--sigma", sigma);
    c_cmd->add_option("--N", N);
    c_cmd->add_option("--n-mc", n_mc);
    c_cmd->add_option("--points-per-decade", ppd);
    c_cmd->add_option("--seed", seed);
    c_cmd->add_option("--out", out_dir);

    auto* l_cmd = app.add_subcommand("learn", "one learning run from a config");
    std::string config_path;
    bool dump_oracles = false;
    l_cmd->add_option("--config", config_path, "config JSON")->required();
    l_cmd->add_flag("--dump-oracles", dump_oracles);

    auto* g_cmd = app.add_subcommand("gap", "empirical-vs-gaussian gap sweep");
    int gd = 256;
    double galpha = 2.0;
    std::string k_grid = "256,4096,65536", g_out = "out";
    int g_n_mc = 2000;
    std::uint64_t g_seed = 1;
    g_cmd->add_option("--d", gd);
    g_cmd->add_option("--alpha", galpha);
    g_cmd->add_option("--k-grid", k_grid, "comma-separated k values");
    g_cmd->add_option("--n-mc", g_n_mc);
    g_cmd->add_option("--seed", g_seed);
    g_cmd->add_option("--out", g_out);

    auto* b_cmd = app.add_subcommand("bench", "full benchmark run");
    std::string b_config, b_out;
    b_cmd->add_option("--config", b_config, "config JSON")->required();
    b_cmd->add_option("--out", b_out, "output directory (overrides config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_cmd->parsed())
            return cmd_complexity(class_file, kappa, sigma, N, n_mc, ppd, seed,
                                  out_dir);
        if (l_cmd->parsed()) return cmd_learn(config_path, dump_oracles);
        if (g_cmd->parsed())
            return cmd_gap(gd, galpha, k_grid, g_n_mc, g_seed, g_out);
        if (b_cmd->parsed()) return cmd_bench(b_config, b_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
