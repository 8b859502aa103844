// Acceptance gate: each criterion is invoked as `acceptance <n>` (n = 1..9),
// prints one [PASS]/[FAIL] line and exits 0/1. Tolerances are pinned here.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gcl/bench.hpp"
#include "gcl/chaining.hpp"
#include "gcl/function_class.hpp"
#include "gcl/generators.hpp"
#include "gcl/mean_estimators.hpp"
#include "gcl/risk_oracles.hpp"
#include "gcl/rng.hpp"
#include "gcl/tournament.hpp"

using namespace gcl;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

Mat random_rows(int n, int d, std::uint64_t seed) {
    auto rng = make_stream(seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat P(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) P(i, j) = normal(rng);
    return P;
}

// ---------------------------------------------------------------------------
// 1: sub-gaussian deviation quantiles of psi_delta across three tail laws.
Check criterion1() {
    Check c;
    const int N = 1000, trials = 2000;
    const double delta = 0.01;
    const double band = 6.0 * std::sqrt(std::log(2.0 / delta) / N);

    std::vector<std::pair<std::string, DistributionSpec>> laws;
    laws.emplace_back("gaussian", DistributionSpec::parse("gaussian"));
    laws.emplace_back("student_t{5}", DistributionSpec::parse("student_t{5}"));
    laws.emplace_back("two_point{1e4}", DistributionSpec::parse("two_point{10000}"));

    EstimatorSpec mom;
    EstimatorSpec trim;
    trim.kind = EstimatorKind::TrimmedMean;
    int which = 0;
    for (const auto& [name, law] : laws) {
        for (const EstimatorSpec* spec : {&mom, &trim}) {
            auto rng = make_stream(7000 + static_cast<std::uint64_t>(which++), 0);
            std::vector<double> devs;
            std::vector<double> buf(static_cast<std::size_t>(N));
            for (int t = 0; t < trials; ++t) {
                for (double& x : buf) x = law.sample(rng);
                devs.push_back(std::abs(psi_delta(buf, delta, *spec)));
            }
            std::sort(devs.begin(), devs.end());
            const double q =
                devs[static_cast<std::size_t>(std::ceil((1.0 - delta) * trials)) - 1];
            c.require(q <= band, name + " quantile " + num(q) + " > band " + num(band));
        }
    }
    c.note("band " + num(band));
    return c;
}

// ---------------------------------------------------------------------------
// 2: chain functional vs gaussian supremum over random classes.
Check criterion2() {
    Check c;
    const int n_classes = 20;
    double lo = 1e300, hi = 0.0;
    for (int t = 0; t < n_classes; ++t) {
        Mat P = random_rows(50, 8, 4000 + static_cast<std::uint64_t>(t));
        FunctionClass F =
            FunctionClass::from_points(P, CovarianceStructure::identity(8));
        FunctionClass H = difference_class(F);
        const DistanceOracle m(F.cov, MetricKind::True);
        const AdmissibleSequence seq = build_admissible_sequence(H.points, m);
        const double g2 = gamma2(seq, H.points, m);
        const MonteCarloEstimate sup = gaussian_sup_mc(
            H.points, F.cov, 100000, 4100 + static_cast<std::uint64_t>(t));
        c.require(g2 > 0.0 && sup.value > 0.0,
                  "class " + std::to_string(t) + ": degenerate values");
        const double ratio = g2 / sup.value;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    // Calibrated global band, recorded below; required spread <= 20.
    c.require(hi / lo <= 20.0, "ratio spread " + num(hi / lo) + " > 20");
    c.note("gamma2/Esup band [" + num(lo) + ", " + num(hi) + "], spread " +
           num(hi / lo));
    return c;
}

// ---------------------------------------------------------------------------
// 3: defining property of the solved fixed points.
Check criterion3() {
    Check c;
    FixedPointParams params;
    params.kappa = 0.25;
    params.N = 100;  // small enough for interior crossings on these classes
    params.sigma = 1.0;
    int interior = 0;
    for (int t = 0; t < 10; ++t) {
        const int d = 2 + t % 4;
        Mat P = random_rows(6 + t, d, 5000 + static_cast<std::uint64_t>(t));
        FunctionClass F =
            FunctionClass::from_points(P, CovarianceStructure::identity(d));
        ComplexityOptions opt;
        opt.kappa = params.kappa;
        opt.N = params.N;
        opt.sigma = params.sigma;
        opt.n_mc = 600;
        opt.n_mc_global = 1000;
        opt.points_per_decade = 60;
        opt.seed = 5100 + static_cast<std::uint64_t>(t);
        const ComplexityReport rep = compute_complexity_report(F, opt);
        const FunctionClass H = difference_class(F);
        const DistanceOracle m(F.cov, MetricKind::True);

        // Fresh Monte-Carlo lhs at a given radius, per fixed-point kind.
        auto lhs_at = [&](FixedPointKind kind, double r,
                          std::uint64_t seed) -> MonteCarloEstimate {
            if (kind == FixedPointKind::lambda)
                return {log_packing_number(F.points, r, m), 0.0};
            return localized_gaussian_sup_at(H.points, F.cov, r, 3000, seed);
        };
        const std::pair<FixedPointKind, const FixedPointResult*> fps[] = {
            {FixedPointKind::rQ, &rep.r_Q},
            {FixedPointKind::rM, &rep.r_M},
            {FixedPointKind::lambda, &rep.lambda_star},
            {FixedPointKind::r_tilde, &rep.r_tilde},
        };
        for (const auto& [kind, fp] : fps) {
            // The inequality must hold at 2 r-hat (3 MC stderr slack)...
            if (!fp->saturated) {
                const double r2 = 2.0 * fp->r;
                const MonteCarloEstimate up =
                    lhs_at(kind, r2, 5200 + static_cast<std::uint64_t>(t));
                const double thr = fixed_point_threshold(kind, r2, params, rep.d_F);
                c.require(up.value <= thr + 3.0 * up.std_error,
                          to_string(kind) + " t" + std::to_string(t) +
                              ": holds-at-2r violated (" + num(up.value) + " > " +
                              num(thr) + ")");
            }
            // ...and fail at r-hat / 2.
            if (!fp->at_floor && !fp->saturated) {
                ++interior;
                const double rh = fp->r / 2.0;
                const MonteCarloEstimate dn =
                    lhs_at(kind, rh, 5300 + static_cast<std::uint64_t>(t));
                const double thr = fixed_point_threshold(kind, rh, params, rep.d_F);
                c.require(dn.value >= thr - 3.0 * dn.std_error,
                          to_string(kind) + " t" + std::to_string(t) +
                              ": fails-at-r/2 violated (" + num(dn.value) + " < " +
                              num(thr) + ")");
            }
        }
    }
    c.require(interior > 0, "no interior fixed points were exercised");
    c.note(std::to_string(interior) + " interior fixed points exercised");
    return c;
}

// ---------------------------------------------------------------------------
// 4: coarse estimator isomorphism event and the noise estimate, on the
// default testbed class/design with the solved radius.
Check criterion4() {
    Check c;
    ExperimentConfig cfg;  // defaults: d=4 lattice net, heavy-tailed design
    const FunctionClass F = cfg.build_class();
    RegressionModel model = cfg.build_model(F);
    const OracleConstants consts = cfg.consts;

    double r = 0.0;
    {
        ComplexityOptions opt;
        opt.kappa = cfg.kappa;
        opt.N = cfg.N;
        opt.sigma = cfg.sigma_noise;
        opt.n_mc = cfg.n_mc;
        opt.points_per_decade = cfg.points_per_decade;
        opt.seed = derive_seed(41, 0);
        const ComplexityReport rep = compute_complexity_report(F, opt);
        r = cfg.r_multiplier * std::max(rep.r_star.r, rep.lambda_star.r);
    }
    const RegressionTruth truth = model.truth();

    int hits = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        auto s = gen_regression(model, cfg.N, 6000 + static_cast<std::uint64_t>(t));
        const CrudeOracleOutput out = crude_oracle(F, s.X, s.Y, r, consts);
        bool ok = true;
        for (int v = 0; v < F.size() && ok; ++v) {
            const double target = truth.risk(F.point(v));
            if (std::abs(out.psi_c[static_cast<std::size_t>(v)] - target) >
                0.5 * std::max(r * r, target))
                ok = false;
        }
        hits += ok;
    }
    const double freq = static_cast<double>(hits) / trials;
    c.require(freq >= 0.99, "joint event freq " + num(freq) + " < 0.99");

    // High-noise regime sigma = 10 r: sigma_hat^2 within a factor 2 of sigma^2.
    model.sigma_noise = 10.0 * r;
    const double s2 = model.sigma_noise * model.sigma_noise;
    int sig_hits = 0;
    for (int t = 0; t < trials; ++t) {
        auto s = gen_regression(model, cfg.N, 6600 + static_cast<std::uint64_t>(t));
        const CrudeOracleOutput out = crude_oracle(F, s.X, s.Y, r, consts);
        const double sh2 = out.sigma_hat * out.sigma_hat;
        if (sh2 >= s2 / 2.0 && sh2 <= 2.0 * s2) ++sig_hits;
    }
    const double sig_freq = static_cast<double>(sig_hits) / trials;
    c.require(sig_freq >= 0.99,
              "sigma=10r band freq " + num(sig_freq) + " < 0.99");
    c.note("event freq " + num(freq) + ", noise band freq " + num(sig_freq) +
           " at r " + num(r));
    return c;
}

// ---------------------------------------------------------------------------
// 5: fine-estimator band over admissible pairs.
Check criterion5() {
    Check c;
    ExperimentConfig cfg;
    cfg.dim = 4;
    cfg.resolution = 1.0 / 3.0;
    cfg.design = "two_point{10000}";
    cfg.noise = "student_t{5}";
    cfg.sigma_noise = 1.0;
    cfg.N = 2000;
    cfg.trials = 100;
    cfg.master_seed = 21;
    cfg.n_mc = 200;
    cfg.points_per_decade = 50;
    cfg.out_dir = "/tmp/gcl_acc5";
    const BenchResult res = run_benchmark(cfg);
    c.require(res.fine_event_freq >= 0.90,
              "fine band freq " + num(res.fine_event_freq) + " < 0.90");
    c.note("fine band freq " + num(res.fine_event_freq) + " at r " + num(res.r));
    return c;
}

// ---------------------------------------------------------------------------
// 6: end-to-end guarantee at r = 4 max{r*, lambda*} for two noise laws,
// plus the ERM error comparison.
Check criterion6() {
    Check c;
    for (const char* noise : {"student_t{5}", "two_point{10000}"}) {
        ExperimentConfig cfg;
        cfg.dim = 4;
        cfg.resolution = 1.0 / 3.0;
        cfg.design = "two_point{10000}";
        cfg.noise = noise;
        cfg.sigma_noise = 1.0;
        cfg.N = 2000;
        cfg.trials = 200;
        cfg.master_seed = 22;
        cfg.n_mc = 200;
        cfg.points_per_decade = 50;
        cfg.out_dir = std::string("/tmp/gcl_acc6_") +
                      (std::string(noise).find("student") == 0 ? "t" : "tp");
        const BenchResult res = run_benchmark(cfg);
        c.require(res.success_freq >= 0.95,
                  std::string(noise) + ": success freq " + num(res.success_freq) +
                      " < 0.95");
        // The ERM comparison clause applies on the heavy-tailed-noise testbed.
        if (std::string(noise).rfind("two_point", 0) == 0)
            c.require(res.q95_error_tournament <= res.q95_error_erm,
                      std::string(noise) + ": q95 tournament " +
                          num(res.q95_error_tournament) + " > q95 erm " +
                          num(res.q95_error_erm));
        c.note(std::string(noise) + " success " + num(res.success_freq) + " q95 " +
               num(res.q95_error_tournament) + "/" + num(res.q95_error_erm));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 7: heavy-tail separation of the empirical and gaussian complexities.
Check criterion7() {
    Check c;
    const int d = 256;
    const double alpha = 2.0;
    const GapReport rep =
        run_gap_experiment(d, alpha, {256.0, 4096.0, 65536.0}, 2000, 23);
    for (std::size_t i = 1; i < rep.points.size(); ++i)
        c.require(rep.points[i].ratio > rep.points[i - 1].ratio,
                  "ratio not strictly increasing at k=" + num(rep.points[i].k));
    c.require(rep.points.back().ratio > 2.0,
              "largest-k ratio " + num(rep.points.back().ratio) + " <= 2");

    // The gaussian quantity itself must be stable (within 5%) across the grid:
    // independent re-estimates per grid point.
    Mat vertices(2 * d, d);
    vertices.setZero();
    for (int i = 0; i < d; ++i) {
        vertices(2 * i, i) = 1.0;
        vertices(2 * i + 1, i) = -1.0;
    }
    double glo = 1e300, ghi = 0.0;
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const auto g = gaussian_sup_mc(vertices, CovarianceStructure::identity(d),
                                       2000, 2400 + static_cast<std::uint64_t>(i));
        glo = std::min(glo, g.value);
        ghi = std::max(ghi, g.value);
    }
    c.require(ghi / glo <= 1.05,
              "gaussian quantity varies by " + num((ghi / glo - 1.0) * 100.0) +
                  "% across the grid");
    std::string rs;
    for (const auto& p : rep.points) rs += " " + num(p.ratio);
    c.note("heavy-tail ratios" + rs + "; gaussian spread " +
           num((ghi / glo - 1.0) * 100.0) + "%");
    return c;
}

// ---------------------------------------------------------------------------
// 8: 1/sqrt(N) decay of the uniform errors of the chained product and
// multiplier estimators. The chain level is held fixed across N (theta is
// rescaled so theta^2 N is constant): the rate in N is measured at a fixed
// confidence level.
Check criterion8() {
    Check c;
    FunctionClass F = l1_ball_net(2, 1.0);  // {0, +/-e1, +/-e2}
    const double r = 0.7, sigma = 1.0;
    RegressionModel model;
    model.design = DistributionSpec::parse("gaussian");
    model.noise = DistributionSpec::parse("gaussian");
    model.sigma_noise = sigma;
    model.z0 = Vec::Zero(2);

    const std::vector<int> Ns = {1000, 2000, 4000, 8000};
    const int trials = 50;
    std::vector<double> log_n, log_q, log_m;
    for (int N : Ns) {
        OracleConstants consts;
        consts.theta = 0.125 * std::sqrt(1000.0 / static_cast<double>(N));
        double dev_q = 0.0, dev_m = 0.0;
        for (int t = 0; t < trials; ++t) {
            auto s = gen_regression(model, N,
                                    8000 + static_cast<std::uint64_t>(N) * 100 +
                                        static_cast<std::uint64_t>(t));
            FineOracleState st(F, s.X, s.Y, r, std::max(sigma, r), consts);
            const Vec xi = s.Y - s.X * model.z0;
            double worst_q = 0.0, worst_m = 0.0;
            for (int i = 0; i < F.size(); ++i)
                for (int j = 0; j < F.size(); ++j) {
                    if (i == j) continue;
                    const int qu = st.query_pair(i, j);
                    const Vec u = (r / st.alpha_of_pair(i, j)) *
                                  (F.point(i) - F.point(j));
                    worst_m = std::max(worst_m, std::abs(st.phi_M(qu, xi)));
                    for (int k = 0; k < F.size(); ++k)
                        for (int l = 0; l < F.size(); ++l) {
                            if (k == l) continue;
                            const int qw = st.query_pair(k, l);
                            const Vec w = (r / st.alpha_of_pair(k, l)) *
                                          (F.point(k) - F.point(l));
                            worst_q = std::max(
                                worst_q, std::abs(st.psi_Q(qu, qw) - u.dot(w)));
                        }
                }
            dev_q += worst_q;
            dev_m += worst_m;
        }
        log_n.push_back(std::log(static_cast<double>(N)));
        log_q.push_back(std::log(dev_q / trials));
        log_m.push_back(std::log(dev_m / trials));
    }
    auto slope = [&](const std::vector<double>& y) {
        const std::size_t n = log_n.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sx += log_n[i];
            sy += y[i];
            sxx += log_n[i] * log_n[i];
            sxy += log_n[i] * y[i];
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    const double sq = slope(log_q), sm = slope(log_m);
    c.require(std::abs(sq + 0.5) <= 0.15,
              "product-estimator slope " + num(sq) + " outside -0.5 +/- 0.15");
    c.require(std::abs(sm + 0.5) <= 0.15,
              "multiplier-estimator slope " + num(sm) + " outside -0.5 +/- 0.15");
    c.note("slopes " + num(sq) + ", " + num(sm));
    return c;
}

// ---------------------------------------------------------------------------
// 9: run-to-run determinism of the benchmark artifacts.
Check criterion9() {
    Check c;
    auto slurp = [](const std::string& p) {
        std::string out;
        if (FILE* f = std::fopen(p.c_str(), "rb")) {
            char buf[4096];
            std::size_t n;
            while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, n);
            std::fclose(f);
        }
        return out;
    };
    ExperimentConfig cfg;
    cfg.dim = 2;
    cfg.resolution = 0.5;
    cfg.design = "gaussian";
    cfg.noise = "student_t{5}";
    cfg.sigma_noise = 1.0;
    cfg.N = 1000;
    cfg.trials = 5;
    cfg.master_seed = 31;
    cfg.n_mc = 100;
    cfg.points_per_decade = 20;
    cfg.out_dir = "/tmp/gcl_acc9_a";
    run_benchmark(cfg);
    cfg.out_dir = "/tmp/gcl_acc9_b";
    run_benchmark(cfg);
    for (const char* f : {"results.csv", "complexity.csv"}) {
        const std::string a = slurp(std::string("/tmp/gcl_acc9_a/") + f);
        const std::string b = slurp(std::string("/tmp/gcl_acc9_b/") + f);
        c.require(!a.empty(), std::string(f) + " missing");
        c.require(a == b, std::string(f) + " differs between identical runs");
    }
    cfg.master_seed = 32;
    cfg.out_dir = "/tmp/gcl_acc9_c";
    run_benchmark(cfg);
    c.require(slurp("/tmp/gcl_acc9_a/results.csv") !=
                  slurp("/tmp/gcl_acc9_c/results.csv"),
              "results.csv identical across different seeds");
    return c;
}

const char* kTitles[] = {
    "estimator deviation quantiles within the sub-gaussian band",
    "chain functional brackets the gaussian supremum",
    "solved fixed points satisfy their defining inequalities",
    "coarse isomorphism event and noise estimate",
    "fine estimator band over admissible pairs",
    "end-to-end guarantee at the solved radius",
    "heavy-tail empirical/gaussian complexity separation",
    "1/sqrt(N) decay of the chained estimators",
    "benchmark artifacts are byte-deterministic",
};

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..9>\n");
        return 2;
    }
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > 9) {
        std::fprintf(stderr, "criterion out of range: %s\n", argv[1]);
        return 2;
    }
    Check (*fns[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                        criterion6, criterion7, criterion8, criterion9};
    Check c;
    try {
        c = fns[n - 1]();
    } catch (const std::exception& e) {
        c.ok = false;
        c.require(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %d: %s%s%s\n", c.ok ? "PASS" : "FAIL", n,
                kTitles[n - 1], c.detail.empty() ? "" : " -- ",
                c.detail.c_str());
    return c.ok ? 0 : 1;
}
