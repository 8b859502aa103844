#include "gcl/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "gcl/rng.hpp"

namespace gcl {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t idx = std::min(
        v.size() - 1,
        static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) -
            (q > 0.0 ? 1 : 0));
    return v[idx];
}

}  // namespace

void ExperimentConfig::validate() const {
    if (trials < 1) throw invalid_argument("config: trials must be >= 1");
    if (N < 2) throw invalid_argument("config: N must be >= 2");
    if (!(kappa > 0.0 && consts.gamma > 0.0 && consts.theta > 0.0 &&
          consts.alpha > 0.0 && consts.c0 > 0.0 && consts.c1 > 0.0))
        throw invalid_argument("config: all constants must be positive");
    if (class_file.empty() && dim < 1)
        throw invalid_argument("config: need a class file or a positive dim");
}

ExperimentConfig ExperimentConfig::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config: " + path);
    nlohmann::json j;
    in >> j;
    ExperimentConfig c;
    c.class_file = j.value("class_file", c.class_file);
    c.dim = j.value("dim", c.dim);
    c.resolution = j.value("resolution", c.resolution);
    c.design = j.value("design", c.design);
    c.noise = j.value("noise", c.noise);
    c.sigma_noise = j.value("sigma_noise", c.sigma_noise);
    if (j.contains("z0")) c.z0 = j.at("z0").get<std::vector<double>>();
    c.N = j.value("N", c.N);
    c.trials = j.value("trials", c.trials);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.kappa = j.value("kappa", c.kappa);
    c.r_override = j.value("r", c.r_override);
    c.r_multiplier = j.value("r_multiplier", c.r_multiplier);
    c.n_mc = j.value("n_mc", c.n_mc);
    c.points_per_decade = j.value("points_per_decade", c.points_per_decade);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.consts.gamma = j.value("gamma", c.consts.gamma);
    c.consts.theta = j.value("theta", c.consts.theta);
    c.consts.alpha = j.value("alpha", c.consts.alpha);
    c.consts.c0 = j.value("c0", c.consts.c0);
    c.consts.c1 = j.value("c1", c.consts.c1);
    c.consts.estimator.c0_floor = j.value("c0_floor", c.consts.estimator.c0_floor);
    c.consts.estimator.c_trim = j.value("c_trim", c.consts.estimator.c_trim);
    const std::string est = j.value("estimator", std::string("median_of_means"));
    if (est == "median_of_means")
        c.consts.estimator.kind = EstimatorKind::MedianOfMeans;
    else if (est == "trimmed_mean")
        c.consts.estimator.kind = EstimatorKind::TrimmedMean;
    else
        throw invalid_argument("config: unknown estimator '" + est + "'");
    c.validate();
    return c;
}

FunctionClass ExperimentConfig::build_class() const {
    if (!class_file.empty()) return FunctionClass::load_json(class_file);
    return l1_ball_net(dim, resolution);
}

RegressionModel ExperimentConfig::build_model(const FunctionClass& F) const {
    RegressionModel m;
    m.design = DistributionSpec::parse(design);
    double noise_scale = 1.0;
    m.noise = DistributionSpec::parse(noise, &noise_scale);
    m.sigma_noise = sigma_noise * noise_scale;
    if (z0.empty()) {
        m.z0 = Vec::Zero(F.dim());
        m.z0[0] = resolution;
    } else {
        if (static_cast<int>(z0.size()) != F.dim())
            throw dimension_mismatch("config: z0 dimension mismatch");
        m.z0 = Eigen::Map<const Vec>(z0.data(), static_cast<int>(z0.size()));
    }
    return m;
}

int erm_baseline(const FunctionClass& F, const Mat& X, const Vec& Y) {
    if (X.rows() == 0) throw insufficient_samples("erm_baseline: empty sample");
    if (F.size() == 0) throw invalid_argument("erm_baseline: empty class");
    int best = 0;
    double best_risk = std::numeric_limits<double>::infinity();
    for (int f = 0; f < F.size(); ++f) {
        const Vec res = X * F.point(f) - Y;
        const double risk = res.squaredNorm() / static_cast<double>(X.rows());
        const bool better =
            risk < best_risk ||
            (risk == best_risk && F.labels[static_cast<std::size_t>(f)] <
                                      F.labels[static_cast<std::size_t>(best)]);
        if (better) {
            best_risk = risk;
            best = f;
        }
    }
    return best;
}

GapReport run_gap_experiment(int d, double alpha,
                             const std::vector<double>& k_grid, int n_mc,
                             std::uint64_t seed) {
    if (d < 1) throw invalid_argument("gap: d must be positive");
    if (!(alpha > 0.0)) throw invalid_argument("gap: alpha must be positive");
    if (k_grid.empty()) throw invalid_argument("gap: empty k grid");
    for (std::size_t i = 1; i < k_grid.size(); ++i)
        if (k_grid[i] <= k_grid[i - 1])
            throw invalid_argument("gap: k grid must be strictly increasing");
    GapReport rep;
    rep.d = d;
    rep.alpha = alpha;
    rep.N = std::max(1, static_cast<int>(std::llround(std::pow(d, 1.0 / alpha))));

    // T = vertices of the l1 ball; sup over T of a linear form is max_j |.|.
    Mat vertices(2 * d, d);
    vertices.setZero();
    for (int i = 0; i < d; ++i) {
        vertices(2 * i, i) = 1.0;
        vertices(2 * i + 1, i) = -1.0;
    }
    const CovarianceStructure id_cov = CovarianceStructure::identity(d);
    const MonteCarloEstimate gmax =
        gaussian_sup_mc(vertices, id_cov, n_mc, derive_seed(seed, 0));

    for (std::size_t gi = 0; gi < k_grid.size(); ++gi) {
        const double k = k_grid[gi];
        DistributionSpec coord;
        coord.kind = DistKind::TwoPoint;
        coord.k = k;
        coord.validate();
        DesignSampler design = [coord, d](int n, std::mt19937_64& rng) {
            Mat X(n, d);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < d; ++j) X(i, j) = coord.sample(rng);
            return X;
        };
        const PhiEstimate phi = rademacher_phi(vertices, design, rep.N, n_mc,
                                               false, {}, derive_seed(seed, gi + 1));
        GapPoint p;
        p.k = k;
        p.phi = phi.phi;
        p.gmax = gmax;
        p.ratio = phi.phi.value / gmax.value;
        const double rel = std::hypot(phi.phi.std_error / phi.phi.value,
                                      gmax.std_error / gmax.value);
        p.ratio_se = p.ratio * rel;
        p.in_window = k >= rep.N && k <= static_cast<double>(rep.N) * d;
        rep.points.push_back(p);
    }
    return rep;
}

void GapReport::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write gap report: " + path);
    out << "k,phi,phi_se,gmax,gmax_se,ratio,ratio_se,in_window\n";
    for (const GapPoint& p : points)
        out << fmt17(p.k) << ',' << fmt17(p.phi.value) << ','
            << fmt17(p.phi.std_error) << ',' << fmt17(p.gmax.value) << ','
            << fmt17(p.gmax.std_error) << ',' << fmt17(p.ratio) << ','
            << fmt17(p.ratio_se) << ',' << (p.in_window ? 1 : 0) << '\n';
}

void GapReport::save_svg(const std::string& path) const {
    PlotSeries s;
    s.label = "phi / gmax";
    for (const GapPoint& p : points) {
        s.x.push_back(p.k);
        s.y.push_back(p.ratio);
    }
    write_svg_plot(path, "empirical-vs-gaussian complexity ratio", {s}, true);
}

namespace {

struct TruthTable {
    int f_star = 0;
    std::vector<double> risks;
    double min_risk = 0.0;
};

TruthTable make_truth(const FunctionClass& F, const RegressionTruth& truth) {
    TruthTable t;
    t.risks.resize(static_cast<std::size_t>(F.size()));
    double best = std::numeric_limits<double>::infinity();
    for (int f = 0; f < F.size(); ++f) {
        t.risks[static_cast<std::size_t>(f)] = truth.risk(F.point(f));
        if (t.risks[static_cast<std::size_t>(f)] < best) {
            best = t.risks[static_cast<std::size_t>(f)];
            t.f_star = f;
        }
    }
    t.min_risk = best;
    return t;
}

bool crude_event_holds(const TournamentOutcome& out, const TruthTable& truth,
                       double r) {
    for (std::size_t f = 0; f < out.psi_c.size(); ++f) {
        const double target = truth.risks[f];
        if (std::abs(out.psi_c[f] - target) >
            0.5 * std::max(r * r, target))
            return false;
    }
    return true;
}

bool fine_event_holds(const TournamentOutcome& out, const FunctionClass& F,
                      const TruthTable& truth, double r) {
    if (!out.matches) return true;  // singleton V-hat: vacuous
    const MatchMatrix& mm = *out.matches;
    const int m = static_cast<int>(mm.players.size());
    for (int fi = 0; fi < m; ++fi)
        for (int hi = 0; hi < m; ++hi) {
            if (fi == hi) continue;
            const int f = mm.players[static_cast<std::size_t>(fi)];
            const int h = mm.players[static_cast<std::size_t>(hi)];
            const double target = truth.risks[static_cast<std::size_t>(f)] -
                                  truth.risks[static_cast<std::size_t>(h)];
            const double dist =
                l2_distance(F.point(f), F.point(h), F.cov, MetricKind::True);
            if (std::abs(mm.psi_l(fi, hi) - target) >
                0.5 * std::max(r * r, dist * dist))
                return false;
        }
    return true;
}

}  // namespace

BenchResult run_benchmark(const ExperimentConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);

    const FunctionClass F = config.build_class();
    const RegressionModel model = config.build_model(F);
    const RegressionTruth truth = model.truth();
    const TruthTable tt = make_truth(F, truth);
    const double eta = F.cov.eta;

    BenchResult res;
    {
        ComplexityOptions copt;
        copt.kappa = config.kappa;
        copt.N = config.N;
        copt.sigma = std::max(config.sigma_noise, 1e-12);
        copt.n_mc = config.n_mc;
        copt.n_mc_global = std::max(config.n_mc, 1000);
        copt.points_per_decade = config.points_per_decade;
        copt.seed = derive_seed(config.master_seed, 0xC0);
        res.complexity = compute_complexity_report(F, copt);
    }
    res.r = config.r_override > 0.0
                ? config.r_override
                : config.r_multiplier *
                      std::max(res.complexity.r_star.r, res.complexity.lambda_star.r);

    int n_success = 0, n_crude = 0, n_fine = 0, n_failed = 0;
    std::vector<double> err_t, err_e;
    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t seed = derive_seed(config.master_seed, 1000 + trial);
        const LabeledSample sample = gen_regression(model, 2 * config.N, seed);

        LearnConfig lc;
        lc.consts = config.consts;
        lc.shuffle_seed = seed;
        TournamentOutcome out = learn(F, sample.X, sample.Y, res.r, lc);
        const bool crude_ok = crude_event_holds(out, tt, res.r);
        const bool fine_ok = fine_event_holds(out, F, tt, res.r);
        n_crude += crude_ok;
        n_fine += fine_ok;

        TrialRecord rec;
        rec.trial_id = trial;
        rec.seed = seed;
        rec.method = "tournament";
        rec.v_hat_size = static_cast<int>(out.v_hat.size());
        rec.v_star_size = static_cast<int>(out.v_star.size());
        rec.crude_event = crude_ok;
        rec.fine_event = fine_ok;
        if (out.failed) {
            ++n_failed;
            rec.error_l2 = std::numeric_limits<double>::infinity();
            rec.excess_risk = std::numeric_limits<double>::infinity();
        } else {
            rec.error_l2 = l2_distance(F.point(out.selected), F.point(tt.f_star),
                                       F.cov, MetricKind::True);
            rec.excess_risk =
                tt.risks[static_cast<std::size_t>(out.selected)] - tt.min_risk;
            if (rec.error_l2 <= res.r &&
                rec.excess_risk <= std::pow(eta, 4) * res.r * res.r)
                ++n_success;
        }
        err_t.push_back(rec.error_l2);
        res.records.push_back(rec);

        const int erm = erm_baseline(F, sample.X, sample.Y);
        TrialRecord rec2;
        rec2.trial_id = trial;
        rec2.seed = seed;
        rec2.method = "erm";
        rec2.error_l2 = l2_distance(F.point(erm), F.point(tt.f_star), F.cov,
                                    MetricKind::True);
        rec2.excess_risk = tt.risks[static_cast<std::size_t>(erm)] - tt.min_risk;
        rec2.crude_event = crude_ok;
        rec2.fine_event = fine_ok;
        err_e.push_back(rec2.error_l2);
        res.records.push_back(rec2);
    }
    const double nt = static_cast<double>(config.trials);
    res.success_freq = n_success / nt;
    res.crude_event_freq = n_crude / nt;
    res.fine_event_freq = n_fine / nt;
    res.failed_freq = n_failed / nt;
    res.q95_error_tournament = quantile(err_t, 0.95);
    res.q95_error_erm = quantile(err_e, 0.95);

    // results.csv (frozen schema), rows ordered by trial then method.
    {
        std::ofstream out(fs::path(config.out_dir) / "results.csv");
        if (!out) throw io_error("cannot write results.csv in " + config.out_dir);
        out << "trial_id,seed,method,error_l2,excess_risk,v_hat_size,v_star_size,"
               "crude_event,fine_event\n";
        for (const TrialRecord& r : res.records)
            out << r.trial_id << ',' << r.seed << ',' << r.method << ','
                << fmt17(r.error_l2) << ',' << fmt17(r.excess_risk) << ','
                << r.v_hat_size << ',' << r.v_star_size << ',' << r.crude_event
                << ',' << r.fine_event << '\n';
    }
    res.complexity.save_csv((fs::path(config.out_dir) / "complexity.csv").string());

    res.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    {
        nlohmann::json j;
        j["r"] = res.r;
        j["eta"] = eta;
        j["success_freq"] = res.success_freq;
        j["crude_event_freq"] = res.crude_event_freq;
        j["fine_event_freq"] = res.fine_event_freq;
        j["failed_freq"] = res.failed_freq;
        j["q95_error_tournament"] = res.q95_error_tournament;
        j["q95_error_erm"] = res.q95_error_erm;
        j["trials"] = config.trials;
        j["N"] = config.N;
        j["design"] = config.design;
        j["noise"] = config.noise;
        j["sigma_noise"] = config.sigma_noise;
        j["master_seed"] = config.master_seed;
        j["class_size"] = F.size();
        j["wall_clock_sec"] = res.wall_clock_sec;
        j["fixed_points"] = {
            {"r_Q", res.complexity.r_Q.r},
            {"r_M", res.complexity.r_M.r},
            {"r_star", res.complexity.r_star.r},
            {"lambda_star", res.complexity.lambda_star.r},
            {"r_tilde", res.complexity.r_tilde.r}};
        std::ofstream out(fs::path(config.out_dir) / "summary.json");
        if (!out) throw io_error("cannot write summary.json in " + config.out_dir);
        out << j.dump(2) << "\n";
    }
    {
        // Error CDFs of both methods.
        auto cdf = [](std::vector<double> v) {
            std::sort(v.begin(), v.end());
            PlotSeries s;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!std::isfinite(v[i])) continue;
                s.x.push_back(v[i]);
                s.y.push_back(static_cast<double>(i + 1) / static_cast<double>(v.size()));
            }
            return s;
        };
        PlotSeries st = cdf(err_t);
        st.label = "tournament";
        PlotSeries se = cdf(err_e);
        se.label = "erm";
        write_svg_plot((fs::path(config.out_dir) / "error_cdf.svg").string(),
                       "L2 error CDF", {st, se});
    }
    return res;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& series, bool log_x) {
    const int W = 640, H = 480, ML = 60, MR = 20, MT = 40, MB = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    auto tx = [&](double x) { return log_x ? std::log10(std::max(x, 1e-300)) : x; };
    for (const PlotSeries& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmin < xmax)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymin < ymax)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto px = [&](double x) {
        return ML + (tx(x) - xmin) / (xmax - xmin) * (W - ML - MR);
    };
    auto py = [&](double y) {
        return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
    };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ofstream out(path);
    if (!out) throw io_error("cannot write plot: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
        << "\" height=\"" << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
        << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML
        << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        if (s.x.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << colors[si % 4]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << W - MR - 150 << "\" y=\"" << MT + 20 * (si + 1)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
            << colors[si % 4] << "\">" << s.label << "</text>\n";
    }
    // Axis extent labels.
    out << "<text x=\"" << ML << "\" y=\"" << H - MB + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << (log_x ? std::pow(10.0, xmin) : xmin) << "</text>\n";
    out << "<text x=\"" << W - MR - 40 << "\" y=\"" << H - MB + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << (log_x ? std::pow(10.0, xmax) : xmax) << "</text>\n";
    out << "<text x=\"" << ML - 50 << "\" y=\"" << H - MB
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << ymin << "</text>\n";
    out << "<text x=\"" << ML - 50 << "\" y=\"" << MT + 10
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << ymax << "</text>\n";
    out << "</svg>\n";
}

}  // namespace gcl
