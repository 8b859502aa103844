#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/function_class.hpp"

namespace gcl {

// Nested approximating levels H_s of a finite carrier set, |H_0| = 1,
// |H_s| <= 2^(2^s), built by greedy farthest-point expansion. Levels always
// saturate: the last level is the full carrier.
struct AdmissibleSequence {
    std::vector<std::vector<int>> levels;  // carrier indices per level
    // proj[s][i] = carrier index of pi_s(carrier point i): the nearest member
    // of H_s under the build metric, smallest-label ties.
    std::vector<std::vector<int>> proj;

    int s_max() const { return static_cast<int>(levels.size()) - 1; }
    int project(int s, int i) const { return proj[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]; }
};

// Level capacity min(n, 2^(2^s)) without overflow.
int level_capacity(int s, int n);

AdmissibleSequence build_admissible_sequence(const Mat& carrier,
                                             const DistanceOracle& metric,
                                             int s_max = -1);

// sup over the carrier of sum_s 2^(s/2) rho(pi_s v, pi_{s+1} v) for the given
// sequence; an upper bound on the true gamma_2 infimum.
double gamma2(const AdmissibleSequence& seq, const Mat& carrier,
              const DistanceOracle& metric);

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// E sup_{h in H u {0}} <Z, h> for Z ~ N(0, sigma_true), by Monte Carlo.
MonteCarloEstimate gaussian_sup_mc(const Mat& H, const CovarianceStructure& cov,
                                   int n_mc, std::uint64_t seed);

// Samplers for the empirical (Rademacher / multiplier) oscillations.
using DesignSampler = std::function<Mat(int n, std::mt19937_64&)>;  // n x d rows of X
using ScalarSampler = std::function<double(std::mt19937_64&)>;      // one xi draw

struct PhiEstimate {
    MonteCarloEstimate phi;                      // Phi_N(r)
    std::optional<MonteCarloEstimate> phi_xi;    // Phi_{N,xi}(r)
};

// Phi_N(r) = E sup_{u in members} |N^{-1/2} sum eps_i <X_i, u>| and, when
// requested, the multiplier version with iid xi_i.
PhiEstimate rademacher_phi(const Mat& members, const DesignSampler& design,
                           int N, int n_mc, bool with_multiplier,
                           const ScalarSampler& xi, std::uint64_t seed);

// Geometric grid over [d_F * 1e-6, 2 d_F].
std::vector<double> make_r_grid(double d_F, int points_per_decade = 200);

// Localized expected-supremum profile over an r-grid. For a centrally
// symmetric member list with norms n_u, the star-shaped localization at
// radius r attains its supremum at scale min(1, r/n_u) per member, so
//   sup_{(H cap rD)} Z = max_u |z_u| min(1, r/n_u),
// which is evaluated for the whole grid per draw via prefix/suffix maxima.
class LocalizedSupProfile {
public:
    static LocalizedSupProfile gaussian(const Mat& members,
                                        const CovarianceStructure& cov,
                                        std::span<const double> r_grid, int n_mc,
                                        std::uint64_t seed);

    // Empirical version: z_u = N^{-1/2} sum_i eps_i xi_i <X_i, u>. Pass
    // xi == nullptr for the plain Rademacher process.
    static LocalizedSupProfile empirical(const Mat& members,
                                         const CovarianceStructure& cov,
                                         const DesignSampler& design,
                                         const ScalarSampler* xi, int N,
                                         std::span<const double> r_grid, int n_mc,
                                         std::uint64_t seed);

    // Assemble from an already-tabulated grid (used internally and by tests).
    static LocalizedSupProfile from_table(std::vector<double> grid,
                                          std::vector<double> mean,
                                          std::vector<double> se);

    std::size_t size() const { return grid_.size(); }
    double r(std::size_t i) const { return grid_[i]; }
    double value(std::size_t i) const { return mean_[i]; }
    double std_error(std::size_t i) const { return se_[i]; }

private:
    std::vector<double> grid_, mean_, se_;
};

// One-off evaluation at a single radius (used by fixed-point verification).
MonteCarloEstimate localized_gaussian_sup_at(const Mat& members,
                                             const CovarianceStructure& cov,
                                             double r, int n_mc,
                                             std::uint64_t seed);
MonteCarloEstimate localized_phi_at(const Mat& members,
                                    const DesignSampler& design,
                                    const ScalarSampler* xi, int N, double r,
                                    int n_mc, std::uint64_t seed);

enum class FixedPointKind { rQ, rM, lambda, r_tilde, rQ_rad, rM_rad };

std::string to_string(FixedPointKind k);

struct FixedPointParams {
    double kappa = 0.25;
    int N = 0;
    double sigma = 0.0;  // noise level; required by rM, lambda, r_tilde
};

struct FixedPointResult {
    double r = 0.0;
    bool at_floor = false;   // condition held on the whole grid
    bool saturated = false;  // condition held nowhere; r = 2 d_F
};

// Inputs for the fixed-point conditions, tabulated on a common r-grid.
struct ComplexityTable {
    double d_F = 0.0;
    std::vector<double> r_grid;
    std::optional<LocalizedSupProfile> gaussian;   // E sup G over (F-F) cap rD
    std::optional<LocalizedSupProfile> rademacher; // Phi_N(r)
    std::optional<LocalizedSupProfile> multiplier; // Phi_{N,xi}(r)
    std::vector<double> log_packing;               // log M(F, rD)
};

// Smallest grid r at which the defining inequality of `kind` holds, after the
// monotone (suffix) closure of the indicator.
FixedPointResult solve_fixed_point(FixedPointKind kind,
                                   const ComplexityTable& table,
                                   const FixedPointParams& params);

// Raw defining condition "lhs <= rhs" of a fixed point at radius r, with the
// Monte-Carlo lhs supplied by the caller.
bool fixed_point_condition(FixedPointKind kind, double r, double lhs,
                           const FixedPointParams& params, double d_F);

// rhs of the defining inequality at radius r.
double fixed_point_threshold(FixedPointKind kind, double r,
                             const FixedPointParams& params, double d_F);

struct EntropyBoundsRow {
    double r = 0.0;
    double log_packing = 0.0;     // log M(F, rD)
    double sudakov = 0.0;         // c1 (E sup G over (F-F) cap 4rD / r)^2
    double local_to_global = 0.0; // c2 log(2 d_F / r) * sudakov-style bound
};

std::vector<EntropyBoundsRow> entropy_bounds(const FunctionClass& F,
                                             std::span<const double> r_grid,
                                             int n_mc, std::uint64_t seed,
                                             double c1 = 1.0, double c2 = 1.0);

// Full complexity report of a class: global Gaussian supremum, gamma_2 of the
// difference class, the tabulated profiles and every solved fixed point.
struct ComplexityReport {
    MonteCarloEstimate gaussian_sup;  // E sup over F-F (unlocalized)
    double gamma2_value = 0.0;
    double critical_dim = 0.0;        // (E sup G / R_H)^2
    double d_F = 0.0;
    double R_H = 0.0;
    ComplexityTable table;
    FixedPointResult r_Q, r_M, r_star, lambda_star, r_tilde, r_Q_rad, r_M_rad;
    FixedPointParams params;

    void save_json(const std::string& path) const;
    void save_csv(const std::string& path) const;
};

struct ComplexityOptions {
    double kappa = 0.25;
    int N = 1000;
    double sigma = 1.0;
    int n_mc = 200;
    int n_mc_global = 2000;
    int points_per_decade = 200;
    std::uint64_t seed = 1;
    bool with_empirical = false;     // also estimate Phi_N / Phi_{N,xi}
    DesignSampler design;            // required when with_empirical
    ScalarSampler xi;                // required for Phi_{N,xi}
};

ComplexityReport compute_complexity_report(const FunctionClass& F,
                                           const ComplexityOptions& opt);

}  // namespace gcl
