#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gcl/chaining.hpp"
#include "gcl/common.hpp"
#include "gcl/function_class.hpp"
#include "gcl/mean_estimators.hpp"

namespace gcl {

// Calibrated constants shared by the crude and fine risk oracles.
struct OracleConstants {
    double gamma = 0.1;    // packing scale eta*gamma*r
    double theta = 0.125;  // crude confidence level: 2^{s0} ~ theta^2 N
    // Chain confidence: delta_s = 2 exp(-alpha 2^s). Block-count feasibility
    // (ceil(8 alpha 2^s) <= N with nontrivial block sizes) pins alpha near 1
    // at the sample sizes this artifact targets.
    double alpha = 1.0;
    double c0 = 0.2;       // chain depth budget: alpha 2^{s1} <= c0 N
    double c1 = 8.0;       // fine-level cap: 2^{s0} <= c1 theta^2 N min{1, r^2/sigma*^2}
    EstimatorSpec estimator;
};

// Largest s >= 1 with 2^s <= budget; 0 signals "no admissible level".
int largest_level(double budget);

// delta_s = 2 exp(-alpha 2^s).
double delta_level(double alpha, int s);

// Largest s whose delta_s is admissible at sample size N: the block count
// ceil(8 alpha 2^s) must fit in N and delta_s must clear the floor
// 2 exp(-c0_floor N). Returns -1 when no level fits.
int max_feasible_level(int N, double alpha, double c0_floor);

// Output of the coarse risk estimator: a partition of the class at scale
// eta*gamma*r, the per-function estimate Psi_C (constant on cells), the noise
// estimate and the admissible set.
struct CrudeOracleOutput {
    PackingResult partition;       // centers index the class
    std::vector<double> psi_c;     // one value per class member
    int s0 = 0;
    double delta = 0.0;            // delta_{s0} used for every cell estimate
    double sigma_hat = 0.0;        // sqrt(min Psi_C), clamped at 0
    double sigma_star = 0.0;       // max{sigma_hat, r}
    std::vector<int> v_hat;        // class indices with Psi_C <= 4 sigma_star^2
    double r = 0.0;
};

// Psi_C over the first sample half: for each packing center u_j the estimator
// psi_delta of ((<X_i, u_j> - Y_i)^2)_i, extended to every class member by its
// cell. Requires log(#cells) <= 2^{s0 - 1} with 2^{s0} <= theta^2 N.
CrudeOracleOutput crude_oracle(const FunctionClass& F, const Mat& X, const Vec& Y,
                               double r, const OracleConstants& consts);

// (sigma_hat, sigma_star) of an already-populated crude output.
std::pair<double, double> noise_estimate(const CrudeOracleOutput& out);

// Carrier bookkeeping of the fine oracle. Every chained query is a linear
// combination a*(f_i - f_j) of class members, evaluated through the cached
// value matrix P = X * points^T; the carrier holds one recipe per member.
struct CarrierRecipe {
    double coeff = 0.0;  // 0 encodes the zero function
    int i = 0;           // class index (minuend)
    int j = 0;           // class index (subtrahend)
};

// State of the fine risk oracle, bound to the second sample half.
class FineOracleState {
public:
    // sigma_star comes from the crude oracle on the first half.
    FineOracleState(const FunctionClass& F, const Mat& X, const Vec& Y, double r,
                    double sigma_star, const OracleConstants& consts);

    double r() const { return r_; }
    double r0() const { return r0_; }
    int s0() const { return s0_; }
    int s1() const { return s1_; }
    int cell_count() const { return static_cast<int>(partition_.centers.size()); }
    int center_of(int v) const { return partition_.centers[static_cast<std::size_t>(partition_.assignment[static_cast<std::size_t>(v)])]; }
    const FunctionClass& cls() const { return *F_; }
    const OracleConstants& consts() const { return consts_; }

    // Carrier index of the rescaled difference r*(f_i - f_j)/alpha(f_i - f_j),
    // of v - v_{j(v)}, and of the zero function.
    int query_pair(int i, int j) const;
    int query_center_diff(int v) const;
    int query_zero() const { return zero_idx_; }

    // alpha(f_i - f_j) = max{r, d(f_i, f_j)} under the oracle metric.
    double alpha_of_pair(int i, int j) const;

    // Chained multiplier estimate of E xi * u for a carrier member; xi_values
    // holds xi_i per sample row of the bound half.
    double phi_M(int carrier_idx, const Vec& xi_values) const;
    // Chained product estimate of E u w for two carrier members.
    double psi_Q(int idx_u, int idx_w) const;

    // Multiplier values (v_j(X_i) - Y_i)_i for the cell center of class
    // member v.
    const Vec& center_multiplier(int v) const;

    // Per-sample values of a carrier member.
    Vec values(int carrier_idx) const;

private:
    const FunctionClass* F_;
    OracleConstants consts_;
    double r_ = 0.0, r0_ = 0.0;
    int s0_ = 0, s1_ = 0;
    int N_ = 0;
    PackingResult partition_;
    Mat P_;                          // N x |F| class value matrix
    Vec Y_;
    std::vector<CarrierRecipe> recipes_;
    Mat carrier_;                    // carrier points (rows), for the sequence
    AdmissibleSequence seq_;
    std::vector<int> pair_idx_;      // |F|^2 lookup (i*|F|+j) -> carrier index
    std::vector<int> center_diff_idx_;  // class index v -> carrier index
    int zero_idx_ = 0;
    std::map<int, Vec> center_xi_;   // center class index -> multiplier values

    double chained_multiplier(int carrier_idx, const Vec& xi) const;
};

// Psi_*(u~, w~, v) = Psi_1 + 2 Psi_2 + 2 Psi_3 with u = r u~ / alpha(u~):
//   Psi_1 = (alpha(u~)/r)(alpha(w~)/r) Psi_Q(u, w)
//   Psi_2 = (alpha(u~)/r) Psi_Q(u, v - v_j)
//   Psi_3 = (alpha(u~)/r) Phi_M(u, v_j - Y)
// u~ and w~ are differences of class members, given as index pairs.
double mixture_estimator(const FineOracleState& state, int u_i, int u_j,
                         int w_i, int w_j, int v, double* psi1 = nullptr,
                         double* psi2 = nullptr, double* psi3 = nullptr);

// Psi_L(f, h) = Psi_*(f - h, f - h, h); estimates the risk difference
// E(f - Y)^2 - E(h - Y)^2. Psi_L(f, f) = 0 exactly.
double fine_oracle(const FineOracleState& state, int f, int h);

}  // namespace gcl
