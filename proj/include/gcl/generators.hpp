#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "gcl/common.hpp"
#include "gcl/function_class.hpp"

namespace gcl {

// One standardized (mean 0, variance 1) scalar coordinate law.
//   gaussian        N(0,1)
//   two-point       eps * |x| / c0 with P(|x| = k^{1/4}) = 1/k, else |x| = 1,
//                   c0 = sqrt(1 - 1/k + k^{-1/2}); heavy fourth moment
//   student-t       t(nu) scaled by sqrt((nu-2)/nu), nu > 2
enum class DistKind { Gaussian, TwoPoint, StudentT };

struct DistributionSpec {
    DistKind kind = DistKind::Gaussian;
    double k = 16.0;   // two-point tail parameter, >= 2
    double nu = 5.0;   // student-t degrees of freedom, > 2

    void validate() const;
    double sample(std::mt19937_64& rng) const;

    // Normalizer c0 of the two-point law.
    double c0() const;
    // E x^4 of the standardized coordinate (infinite nu <= 4 returns +inf).
    double fourth_moment() const;

    // "gaussian" | "appendixB" | "appendixB{k}" | "two_point{k}" |
    // "student_t{nu}" | "t{nu}"; gaussian{s} is accepted and the scale s is
    // returned through *scale_out when non-null (used for noise specs).
    static DistributionSpec parse(const std::string& name, double* scale_out = nullptr);
    std::string name() const;
};

// eps * |x| / c0 with the two-point |x| law above.
double sample_two_point_scalar(double k, std::mt19937_64& rng);

struct RegressionTruth {
    Vec z0;
    Mat sigma_x;       // covariance of X (identity for iid coordinates)
    double noise_var = 0.0;

    // E (<X,t> - Y)^2 = <Sigma_X (t - z0), t - z0> + noise_var.
    double risk(const Vec& t) const;
};

struct LabeledSample {
    Mat X;   // n x d
    Vec Y;   // n
};

// Y = <X, z0> + sigma_noise * w, with X coordinates iid per `design` and w
// iid per `noise`, both standardized.
struct RegressionModel {
    DistributionSpec design;
    DistributionSpec noise;
    double sigma_noise = 1.0;
    Vec z0;

    void validate() const;
    RegressionTruth truth() const;
};

LabeledSample gen_regression(const RegressionModel& model, int n,
                             std::uint64_t trial_seed);

// All lattice points of step `resolution` inside the unit l1 ball of R^d,
// as a function class over the identity covariance.
FunctionClass l1_ball_net(int d, double resolution);

}  // namespace gcl
