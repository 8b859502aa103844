#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcl/chaining.hpp"
#include "gcl/common.hpp"
#include "gcl/function_class.hpp"
#include "gcl/generators.hpp"
#include "gcl/risk_oracles.hpp"
#include "gcl/tournament.hpp"

namespace gcl {

// Full description of a benchmark run; serializable as flat JSON.
struct ExperimentConfig {
    // Class: either an explicit file or a generated l1-ball lattice net.
    std::string class_file;
    int dim = 4;
    double resolution = 1.0 / 3.0;

    // Model.
    std::string design = "two_point{10000}";
    std::string noise = "student_t{5}";
    double sigma_noise = 1.0;
    std::vector<double> z0;   // empty -> (resolution, 0, ..., 0)

    int N = 2000;             // per half; each trial draws 2N rows
    int trials = 200;
    std::uint64_t master_seed = 1;

    OracleConstants consts;
    double kappa = 0.25;
    double r_override = 0.0;  // 0 -> r = r_multiplier * max{r_star, lambda_star}
    double r_multiplier = 4.0;
    int n_mc = 200;           // Monte-Carlo draws for complexity profiles
    int points_per_decade = 50;

    std::string out_dir = "out";

    void validate() const;
    static ExperimentConfig load_json(const std::string& path);
    FunctionClass build_class() const;
    RegressionModel build_model(const FunctionClass& F) const;
};

// One output row of results.csv (frozen schema).
struct TrialRecord {
    int trial_id = 0;
    std::uint64_t seed = 0;
    std::string method;      // "tournament" | "erm"
    double error_l2 = 0.0;
    double excess_risk = 0.0;
    int v_hat_size = 0;
    int v_star_size = 0;
    int crude_event = 0;     // crude isomorphism held on this trial
    int fine_event = 0;      // fine band held jointly over V-hat pairs
};

// Smallest-label empirical risk minimizer over the full sample.
int erm_baseline(const FunctionClass& F, const Mat& X, const Vec& Y);

struct GapPoint {
    double k = 0.0;
    MonteCarloEstimate phi;    // Phi_N over the l1-ball vertices
    MonteCarloEstimate gmax;   // E max_j |g_j|
    double ratio = 0.0;
    double ratio_se = 0.0;
    bool in_window = false;    // N <= k <= N d
};

struct GapReport {
    int d = 0;
    int N = 0;
    double alpha = 0.0;
    std::vector<GapPoint> points;

    void save_csv(const std::string& path) const;
    void save_svg(const std::string& path) const;
};

// Rademacher-vs-gaussian comparison on T = B_1^d vertices with heavy-tailed
// two-point coordinates: N = d^{1/alpha}, Phi_N vs E max|g_j| across a k-grid.
GapReport run_gap_experiment(int d, double alpha,
                             const std::vector<double>& k_grid, int n_mc,
                             std::uint64_t seed);

struct BenchResult {
    double r = 0.0;
    ComplexityReport complexity;
    std::vector<TrialRecord> records;
    double success_freq = 0.0;       // error <= r and excess <= eta^4 r^2
    double crude_event_freq = 0.0;
    double fine_event_freq = 0.0;
    double failed_freq = 0.0;        // empty winner set
    double q95_error_tournament = 0.0;
    double q95_error_erm = 0.0;
    double wall_clock_sec = 0.0;
};

// Runs the full benchmark and writes results.csv, summary.json,
// complexity.csv and the error-CDF SVG into out_dir.
BenchResult run_benchmark(const ExperimentConfig& config);

// Minimal polyline plot; series are (x, y) vectors drawn on shared axes.
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& series, bool log_x = false);

}  // namespace gcl
