#include "gcl/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "gcl/rng.hpp"

namespace gcl {

void DistributionSpec::validate() const {
    if (kind == DistKind::TwoPoint && !(k >= 2.0))
        throw invalid_argument("two-point law needs k >= 2");
    if (kind == DistKind::StudentT && !(nu > 2.0))
        throw invalid_argument("student-t law needs nu > 2 for a finite variance");
}

double DistributionSpec::c0() const {
    if (kind != DistKind::TwoPoint)
        throw invalid_argument("c0 is defined for the two-point law only");
    return std::sqrt(1.0 - 1.0 / k + 1.0 / std::sqrt(k));
}

double DistributionSpec::fourth_moment() const {
    switch (kind) {
        case DistKind::Gaussian:
            return 3.0;
        case DistKind::TwoPoint: {
            // E x~^4 = (1 - 1/k) + k^{1/4*4}/k = 2 - 1/k, then / c0^4.
            const double raw = 2.0 - 1.0 / k;
            const double c = c0();
            return raw / (c * c * c * c);
        }
        case DistKind::StudentT: {
            if (!(nu > 4.0)) return std::numeric_limits<double>::infinity();
            // E t^4 = 3 nu^2 / ((nu-2)(nu-4)); standardized scale (nu-2)/nu per square.
            const double et4 = 3.0 * nu * nu / ((nu - 2.0) * (nu - 4.0));
            const double s2 = (nu - 2.0) / nu;
            return et4 * s2 * s2;
        }
    }
    throw invalid_argument("unknown distribution kind");
}

double sample_two_point_scalar(double k, std::mt19937_64& rng) {
    if (!(k >= 2.0)) throw invalid_argument("two-point law needs k >= 2");
    std::bernoulli_distribution sign(0.5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double eps = sign(rng) ? 1.0 : -1.0;
    const double mag = unif(rng) < 1.0 / k ? std::pow(k, 0.25) : 1.0;
    const double c0 = std::sqrt(1.0 - 1.0 / k + 1.0 / std::sqrt(k));
    return eps * mag / c0;
}

double DistributionSpec::sample(std::mt19937_64& rng) const {
    switch (kind) {
        case DistKind::Gaussian: {
            std::normal_distribution<double> normal(0.0, 1.0);
            return normal(rng);
        }
        case DistKind::TwoPoint:
            return sample_two_point_scalar(k, rng);
        case DistKind::StudentT: {
            std::student_t_distribution<double> t(nu);
            return t(rng) * std::sqrt((nu - 2.0) / nu);
        }
    }
    throw invalid_argument("unknown distribution kind");
}

namespace {

// "name{param}" -> (name, param); no braces -> (name, nullopt-as-nan).
std::pair<std::string, double> split_param(const std::string& s) {
    const auto lb = s.find('{');
    if (lb == std::string::npos) return {s, std::numeric_limits<double>::quiet_NaN()};
    const auto rb = s.find('}', lb);
    if (rb == std::string::npos)
        throw invalid_argument("distribution spec: unbalanced braces in '" + s + "'");
    const std::string body = s.substr(lb + 1, rb - lb - 1);
    try {
        return {s.substr(0, lb), std::stod(body)};
    } catch (const std::exception&) {
        throw invalid_argument("distribution spec: bad parameter in '" + s + "'");
    }
}

}  // namespace

DistributionSpec DistributionSpec::parse(const std::string& name, double* scale_out) {
    if (scale_out) *scale_out = 1.0;
    auto [base, param] = split_param(name);
    DistributionSpec spec;
    if (base == "gaussian") {
        spec.kind = DistKind::Gaussian;
        if (!std::isnan(param)) {
            if (!scale_out)
                throw invalid_argument("distribution spec: gaussian takes no parameter here");
            *scale_out = param;
        }
    } else if (base == "appendixB" || base == "two_point") {
        spec.kind = DistKind::TwoPoint;
        if (!std::isnan(param)) spec.k = param;
    } else if (base == "student_t" || base == "t") {
        spec.kind = DistKind::StudentT;
        if (!std::isnan(param)) spec.nu = param;
    } else {
        throw invalid_argument("unknown distribution spec: '" + name + "'");
    }
    spec.validate();
    return spec;
}

std::string DistributionSpec::name() const {
    char buf[64];
    switch (kind) {
        case DistKind::Gaussian:
            return "gaussian";
        case DistKind::TwoPoint:
            std::snprintf(buf, sizeof(buf), "two_point{%g}", k);
            return buf;
        case DistKind::StudentT:
            std::snprintf(buf, sizeof(buf), "student_t{%g}", nu);
            return buf;
    }
    return "?";
}

double RegressionTruth::risk(const Vec& t) const {
    if (t.size() != z0.size())
        throw dimension_mismatch("risk: dimension mismatch");
    const Vec w = t - z0;
    return w.dot(sigma_x * w) + noise_var;
}

void RegressionModel::validate() const {
    design.validate();
    noise.validate();
    if (z0.size() == 0) throw invalid_argument("RegressionModel: empty z0");
    if (!(sigma_noise >= 0.0))
        throw invalid_argument("RegressionModel: negative noise scale");
}

RegressionTruth RegressionModel::truth() const {
    RegressionTruth t;
    t.z0 = z0;
    t.sigma_x = Mat::Identity(z0.size(), z0.size());
    t.noise_var = sigma_noise * sigma_noise;
    return t;
}

LabeledSample gen_regression(const RegressionModel& model, int n,
                             std::uint64_t trial_seed) {
    model.validate();
    if (n < 1) throw invalid_argument("gen_regression: n must be positive");
    const int d = static_cast<int>(model.z0.size());
    auto rng = make_stream(trial_seed, 0);
    LabeledSample s;
    s.X.resize(n, d);
    s.Y.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) s.X(i, j) = model.design.sample(rng);
        const double w = model.sigma_noise > 0.0 ? model.noise.sample(rng) : 0.0;
        s.Y[i] = s.X.row(i).dot(model.z0) + model.sigma_noise * w;
    }
    return s;
}

namespace {

void enumerate_l1(int d, int radius, std::vector<int>& coord, int budget,
                  std::vector<Vec>& out, double h) {
    const int depth = static_cast<int>(coord.size());
    if (depth == d) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = h * coord[static_cast<std::size_t>(i)];
        out.push_back(std::move(v));
        return;
    }
    for (int m = -budget; m <= budget; ++m) {
        coord.push_back(m);
        enumerate_l1(d, radius, coord, budget - std::abs(m), out, h);
        coord.pop_back();
    }
}

}  // namespace

FunctionClass l1_ball_net(int d, double resolution) {
    if (d < 1) throw invalid_argument("l1_ball_net: d must be positive");
    if (!(resolution > 0.0 && resolution <= 1.0))
        throw invalid_argument("l1_ball_net: resolution must be in (0, 1]");
    const int radius = static_cast<int>(std::floor(1.0 / resolution + 1e-9));
    std::vector<Vec> pts;
    std::vector<int> coord;
    enumerate_l1(d, radius, coord, radius, pts, resolution);
    // Deterministic order: lexicographic in the enumeration above.
    Mat P(static_cast<int>(pts.size()), d);
    for (std::size_t i = 0; i < pts.size(); ++i)
        P.row(static_cast<int>(i)) = pts[i].transpose();
    return FunctionClass::from_points(std::move(P), CovarianceStructure::identity(d));
}

}  // namespace gcl
