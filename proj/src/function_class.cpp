#include "gcl/function_class.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace gcl {

namespace {

void check_symmetric_psd(const Mat& M, const char* name, double tol) {
    if (M.rows() != M.cols())
        throw dimension_mismatch(std::string(name) + " is not square");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        throw numerical_error(std::string(name) + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    if (es.eigenvalues().minCoeff() < -tol * scale)
        throw numerical_error(std::string(name) + " is not PSD");
}

}  // namespace

CovarianceStructure CovarianceStructure::identity(int d) {
    CovarianceStructure c;
    c.sigma_true = Mat::Identity(d, d);
    c.sigma_oracle = Mat::Identity(d, d);
    c.eta = 1.0;
    return c;
}

void CovarianceStructure::validate(const Mat& probes, double tol) const {
    check_symmetric_psd(sigma_true, "sigma_true", tol);
    check_symmetric_psd(sigma_oracle, "sigma_oracle", tol);
    if (eta < 1.0) throw invalid_argument("eta must be >= 1");
    if (sigma_true.rows() != sigma_oracle.rows())
        throw dimension_mismatch("sigma_true / sigma_oracle dimension mismatch");
    const double e2 = eta * eta;
    for (int j = 0; j < probes.cols(); ++j) {
        const Vec u = probes.col(j);
        const double qt = u.dot(sigma_true * u);
        const double qa = u.dot(sigma_oracle * u);
        const double slack = tol * std::max(1.0, qt);
        if (qa < qt / e2 - slack || qa > qt * e2 + slack)
            throw numerical_error("eta-sandwich violated on a probe direction");
    }
}

double l2_distance(const Vec& u, const Vec& v, const CovarianceStructure& cov,
                   MetricKind kind) {
    if (u.size() != v.size() || u.size() != cov.dim())
        throw dimension_mismatch("l2_distance: dimension mismatch");
    const Vec w = u - v;
    const double q = w.dot(cov.metric(kind) * w);
    if (q < -1e-9 * std::max(1.0, w.squaredNorm()))
        throw numerical_error("l2_distance: metric matrix not PSD");
    return std::sqrt(std::max(0.0, q));
}

double FunctionClass::diameter(MetricKind kind) const {
    double d = 0.0;
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j)
            d = std::max(d, l2_distance(point(i), point(j), cov, kind));
    return d;
}

void FunctionClass::validate(double tol) const {
    if (size() == 0) throw invalid_argument("FunctionClass: empty");
    if (static_cast<int>(labels.size()) != size())
        throw invalid_argument("FunctionClass: labels/points size mismatch");
    std::vector<int> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw invalid_argument("FunctionClass: duplicate labels");
    const double scale = std::max(diameter(), 1e-300);
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j)
            if (l2_distance(point(i), point(j), cov, MetricKind::True) <= tol * scale)
                throw invalid_argument("FunctionClass: points not distinct at tolerance");
    if (contains_zero) {
        double zmin = std::numeric_limits<double>::infinity();
        const Vec zero = Vec::Zero(dim());
        for (int i = 0; i < size(); ++i)
            zmin = std::min(zmin, l2_distance(point(i), zero, cov, MetricKind::True));
        if (zmin > tol * scale)
            throw invalid_argument("FunctionClass: contains_zero set but 0 not in class");
    }
}

FunctionClass FunctionClass::from_points(Mat pts, CovarianceStructure cov) {
    FunctionClass F;
    F.points = std::move(pts);
    F.cov = std::move(cov);
    F.labels.resize(F.size());
    for (int i = 0; i < F.size(); ++i) F.labels[i] = i;
    for (int i = 0; i < F.size(); ++i)
        if (F.point(i).norm() == 0.0) F.contains_zero = true;
    return F;
}

FunctionClass FunctionClass::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open class file: " + path);
    nlohmann::json j;
    in >> j;
    const int d = j.at("dim").get<int>();
    const auto& pts = j.at("points");
    Mat P(static_cast<int>(pts.size()), d);
    for (int i = 0; i < P.rows(); ++i)
        for (int k = 0; k < d; ++k) P(i, k) = pts.at(i).at(k).get<double>();
    CovarianceStructure cov;
    auto read_mat = [&](const char* key) {
        Mat M(d, d);
        const auto& rows = j.at(key);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) M(a, b) = rows.at(a).at(b).get<double>();
        return M;
    };
    cov.sigma_true = read_mat("sigma_true");
    cov.sigma_oracle = j.contains("sigma_oracle") ? read_mat("sigma_oracle")
                                                  : cov.sigma_true;
    cov.eta = j.value("eta", 1.0);
    return from_points(std::move(P), std::move(cov));
}

void FunctionClass::save_json(const std::string& path) const {
    nlohmann::json j;
    j["dim"] = dim();
    for (int i = 0; i < size(); ++i) {
        std::vector<double> row(points.row(i).begin(), points.row(i).end());
        j["points"].push_back(row);
    }
    auto write_mat = [&](const char* key, const Mat& M) {
        for (int a = 0; a < M.rows(); ++a) {
            std::vector<double> row(M.row(a).begin(), M.row(a).end());
            j[key].push_back(row);
        }
    };
    write_mat("sigma_true", cov.sigma_true);
    write_mat("sigma_oracle", cov.sigma_oracle);
    j["eta"] = cov.eta;
    std::ofstream out(path);
    if (!out) throw io_error("cannot write class file: " + path);
    out << j.dump(2) << "\n";
}

FunctionClass difference_class(const FunctionClass& F, double tol) {
    if (F.size() == 0) throw invalid_argument("difference_class: empty class");
    const int n = F.size();
    const double scale = std::max(F.diameter(), 1e-300);
    std::vector<Vec> kept;
    kept.reserve(static_cast<std::size_t>(n) * n);
    // Exact bit-pattern dedup first (catches 0 and the systematic duplicates);
    // the tolerance pass is quadratic and only run at small sizes.
    std::unordered_set<std::string> seen;
    auto push_exact = [&](const Vec& v) {
        std::string key(reinterpret_cast<const char*>(v.data()),
                        sizeof(double) * static_cast<std::size_t>(v.size()));
        if (seen.insert(std::move(key)).second) kept.push_back(v);
    };
    push_exact(Vec::Zero(F.dim()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) push_exact(F.point(i) - F.point(j));
    if (kept.size() <= 2000) {
        std::vector<Vec> uniq;
        for (const Vec& v : kept) {
            bool dup = false;
            for (const Vec& k : uniq)
                if (l2_distance(k, v, F.cov, MetricKind::True) <= tol * scale) {
                    dup = true;
                    break;
                }
            if (!dup) uniq.push_back(v);
        }
        kept = std::move(uniq);
    }
    Mat P(static_cast<int>(kept.size()), F.dim());
    for (int i = 0; i < P.rows(); ++i) P.row(i) = kept[i].transpose();
    FunctionClass H = FunctionClass::from_points(std::move(P), F.cov);
    H.contains_zero = true;
    return H;
}

LocalizedSet localize(const FunctionClass& H, double r, int grid_depth) {
    if (r <= 0.0) throw invalid_argument("localize: r must be positive");
    LocalizedSet out;
    out.radius = r;
    std::vector<Vec> members;
    const DistanceOracle true_metric(H.cov, MetricKind::True);
    for (int i = 0; i < H.size(); ++i) {
        const Vec u = H.point(i);
        const double nu = true_metric.norm(u);
        if (nu == 0.0) {
            members.push_back(u);
            continue;
        }
        double lambda = 1.0;
        for (int j = 0; j <= grid_depth; ++j, lambda *= 0.5)
            if (lambda * nu <= r * (1.0 + 1e-12)) members.push_back(lambda * u);
        if (nu > r) members.push_back((r / nu) * u);
    }
    out.members.resize(static_cast<int>(members.size()), H.dim());
    for (int i = 0; i < out.members.rows(); ++i)
        out.members.row(i) = members[i].transpose();
    return out;
}

PackingResult greedy_packing(const Mat& points, double sep,
                             const DistanceOracle& metric) {
    if (points.rows() == 0) throw invalid_argument("greedy_packing: empty input");
    if (sep <= 0.0) throw invalid_argument("greedy_packing: sep must be positive");
    const int n = static_cast<int>(points.rows());
    PackingResult res;
    // Greedy maximal separated subset in index order (stable-label order).
    for (int i = 0; i < n; ++i) {
        bool far = true;
        for (int c : res.centers) {
            if (metric(points.row(i).transpose(), points.row(c).transpose()) < sep) {
                far = false;
                break;
            }
        }
        if (far) res.centers.push_back(i);
    }
    res.assignment.resize(n);
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (std::size_t k = 0; k < res.centers.size(); ++k) {
            const double d =
                metric(points.row(i).transpose(), points.row(res.centers[k]).transpose());
            if (d < best) {
                best = d;
                arg = static_cast<int>(k);
            }
        }
        res.assignment[i] = arg;
    }
    return res;
}

double log_packing_number(const Mat& points, double r, const DistanceOracle& metric) {
    return std::log(static_cast<double>(greedy_packing(points, r, metric).count()));
}

}  // namespace gcl
