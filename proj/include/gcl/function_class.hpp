#pragma once

#include <string>
#include <vector>

#include "gcl/common.hpp"

namespace gcl {

enum class MetricKind { Oracle, True };

// Covariance data of the design vector X: the ground-truth matrix sigma_true
// (used by generators and closed-form risk evaluation) and the learner-visible
// surrogate sigma_oracle, which distorts L2 geometry by at most a factor eta.
struct CovarianceStructure {
    Mat sigma_true;
    Mat sigma_oracle;
    double eta = 1.0;

    int dim() const { return static_cast<int>(sigma_true.rows()); }
    const Mat& metric(MetricKind kind) const {
        return kind == MetricKind::Oracle ? sigma_oracle : sigma_true;
    }

    static CovarianceStructure identity(int d);

    // Throws if either matrix is asymmetric/non-PSD beyond tolerance, or if the
    // eta-sandwich fails on the probe directions (columns of `probes`).
    void validate(const Mat& probes, double tol = 1e-9) const;
};

// d(u, v) = sqrt(<M (u-v), u-v>) with M = sigma_oracle or sigma_true.
double l2_distance(const Vec& u, const Vec& v, const CovarianceStructure& cov,
                   MetricKind kind);

// Learner-visible distance functional over a fixed covariance structure.
class DistanceOracle {
public:
    DistanceOracle(const CovarianceStructure& cov, MetricKind kind)
        : cov_(&cov), kind_(kind) {}

    double operator()(const Vec& u, const Vec& v) const {
        return l2_distance(u, v, *cov_, kind_);
    }
    double norm(const Vec& u) const {
        return std::sqrt(u.dot(cov_->metric(kind_) * u));
    }
    MetricKind kind() const { return kind_; }
    const CovarianceStructure& cov() const { return *cov_; }

private:
    const CovarianceStructure* cov_;
    MetricKind kind_;
};

// Finite net of a class of linear functionals f_t = <., t>, t in R^d.
// Rows of `points` are the vectors t; labels are stable indices used for all
// deterministic tie-breaking.
struct FunctionClass {
    Mat points;                 // n x d
    std::vector<int> labels;    // n, unique
    CovarianceStructure cov;
    bool contains_zero = false;

    int size() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
    Vec point(int i) const { return points.row(i).transpose(); }

    // L2 diameter d_F under the chosen metric.
    double diameter(MetricKind kind = MetricKind::True) const;

    // Checks pairwise distinctness, label uniqueness and the contains_zero
    // convention; throws on violation.
    void validate(double tol = 1e-9) const;

    static FunctionClass from_points(Mat pts, CovarianceStructure cov);
    static FunctionClass load_json(const std::string& path);
    void save_json(const std::string& path) const;
};

// F - F = {f - h : f, h in F}, deduplicated at `tol` relative to the diameter.
// The result is centrally symmetric and contains 0.
FunctionClass difference_class(const FunctionClass& F, double tol = 1e-9);

// (H cap rD) with star-shape repair: geometric grid scalings 2^{-j} of every
// member plus boundary projections r*u/||u|| of members outside the ball.
struct LocalizedSet {
    Mat members;   // m x d
    double radius = 0.0;
};

LocalizedSet localize(const FunctionClass& H, double r, int grid_depth = 8);

struct PackingResult {
    std::vector<int> centers;     // indices into the input point set
    std::vector<int> assignment;  // point index -> index into `centers`
    int count() const { return static_cast<int>(centers.size()); }
};

// Greedy maximal sep-separated subset: centers pairwise >= sep apart, every
// point within sep of some center. Each point is assigned to its nearest
// center, ties to the smallest center position.
PackingResult greedy_packing(const Mat& points, double sep,
                             const DistanceOracle& metric);

// log of the greedy packing count of the rows of `points` at separation r.
double log_packing_number(const Mat& points, double r,
                          const DistanceOracle& metric);

}  // namespace gcl
