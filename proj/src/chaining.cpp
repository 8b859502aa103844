#include "gcl/chaining.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "gcl/rng.hpp"

namespace gcl {

namespace {

// Symmetric PSD square root T of M, so that ||T w|| equals the M-norm of w.
// Robust to semidefinite M, unlike a plain Cholesky.
Mat metric_sqrt(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    if (es.info() != Eigen::Success)
        throw numerical_error("metric_sqrt: eigendecomposition failed");
    Vec lam = es.eigenvalues();
    for (int i = 0; i < lam.size(); ++i) lam[i] = std::sqrt(std::max(0.0, lam[i]));
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

// Rows of `points` mapped so that Euclidean distance equals the metric distance.
Mat transformed_rows(const Mat& points, const DistanceOracle& metric) {
    return points * metric_sqrt(metric.cov().metric(metric.kind()));
}

double row_dist(const Mat& T, int i, int j) { return (T.row(i) - T.row(j)).norm(); }

std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Accumulates per-cell mean and standard error over Monte-Carlo draws.
struct MeanAccumulator {
    std::vector<double> sum, sumsq;
    int n = 0;

    explicit MeanAccumulator(std::size_t cells) : sum(cells, 0.0), sumsq(cells, 0.0) {}
    void add(std::size_t i, double v) {
        sum[i] += v;
        sumsq[i] += v * v;
    }
    double mean(std::size_t i) const { return sum[i] / n; }
    double se(std::size_t i) const {
        if (n < 2) return 0.0;
        const double m = mean(i);
        const double var = std::max(0.0, (sumsq[i] - n * m * m) / (n - 1));
        return std::sqrt(var / n);
    }
};

std::vector<int> indices_sorted_by(const std::vector<double>& key) {
    std::vector<int> idx(key.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return key[a] < key[b]; });
    return idx;
}

std::vector<double> true_norms(const Mat& members, const CovarianceStructure& cov) {
    const Mat T = members * metric_sqrt(cov.sigma_true);
    std::vector<double> n(static_cast<std::size_t>(T.rows()));
    for (int i = 0; i < T.rows(); ++i) n[static_cast<std::size_t>(i)] = T.row(i).norm();
    return n;
}

}  // namespace

int level_capacity(int s, int n) {
    if (s < 0) throw invalid_argument("level_capacity: negative level");
    if (s == 0) return std::min(n, 1);
    if (s >= 6) return n;  // 2^64 points never fit in memory anyway
    const std::uint64_t cap = std::uint64_t{1} << (std::uint64_t{1} << s);
    return static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(n), cap));
}

AdmissibleSequence build_admissible_sequence(const Mat& carrier,
                                             const DistanceOracle& metric,
                                             int s_max) {
    const int n = static_cast<int>(carrier.rows());
    if (n == 0) throw invalid_argument("build_admissible_sequence: empty carrier");
    const Mat T = transformed_rows(carrier, metric);

    int s_last;
    if (s_max >= 0) {
        s_last = s_max;
    } else {
        s_last = 0;
        while (level_capacity(s_last, n) < n) ++s_last;
    }
    std::vector<int> sizes(static_cast<std::size_t>(s_last) + 1);
    for (int s = 0; s <= s_last; ++s) sizes[static_cast<std::size_t>(s)] = level_capacity(s, n);

    // Selection order is only needed up to the largest unsaturated level;
    // saturated levels are the full carrier with identity projections.
    int m_needed = 1;
    for (int s = 0; s <= s_last; ++s)
        if (sizes[static_cast<std::size_t>(s)] < n)
            m_needed = std::max(m_needed, sizes[static_cast<std::size_t>(s)]);

    // Root: approximate 1-center over a deterministic candidate subset.
    std::vector<int> cands;
    if (n <= 1024) {
        cands.resize(static_cast<std::size_t>(n));
        std::iota(cands.begin(), cands.end(), 0);
    } else {
        for (int j = 0; j < 64; ++j)
            cands.push_back(static_cast<int>(static_cast<std::int64_t>(j) * n / 64));
    }
    int root = 0;
    double best_ecc = std::numeric_limits<double>::infinity();
    for (int c : cands) {
        double ecc = 0.0;
        for (int i = 0; i < n; ++i) ecc = std::max(ecc, row_dist(T, c, i));
        if (ecc < best_ecc) {
            best_ecc = ecc;
            root = c;
        }
    }

    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(m_needed));
    order.push_back(root);
    std::vector<double> dnear(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dnear[static_cast<std::size_t>(i)] = row_dist(T, root, i);
    while (static_cast<int>(order.size()) < m_needed) {
        int arg = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i)
            if (dnear[static_cast<std::size_t>(i)] > best) {
                best = dnear[static_cast<std::size_t>(i)];
                arg = i;
            }
        order.push_back(arg);
        for (int i = 0; i < n; ++i)
            dnear[static_cast<std::size_t>(i)] =
                std::min(dnear[static_cast<std::size_t>(i)], row_dist(T, arg, i));
    }

    AdmissibleSequence seq;
    seq.levels.resize(static_cast<std::size_t>(s_last) + 1);
    seq.proj.resize(static_cast<std::size_t>(s_last) + 1);
    for (int s = 0; s <= s_last; ++s) {
        const int sz = sizes[static_cast<std::size_t>(s)];
        auto& lvl = seq.levels[static_cast<std::size_t>(s)];
        auto& prj = seq.proj[static_cast<std::size_t>(s)];
        prj.resize(static_cast<std::size_t>(n));
        if (sz >= n) {
            lvl.resize(static_cast<std::size_t>(n));
            std::iota(lvl.begin(), lvl.end(), 0);
            std::iota(prj.begin(), prj.end(), 0);
            continue;
        }
        lvl.assign(order.begin(), order.begin() + sz);
        for (int i = 0; i < n; ++i) {
            int arg = lvl[0];
            double best = row_dist(T, i, lvl[0]);
            for (int j = 1; j < sz; ++j) {
                const double d = row_dist(T, i, lvl[static_cast<std::size_t>(j)]);
                if (d < best) {
                    best = d;
                    arg = lvl[static_cast<std::size_t>(j)];
                }
            }
            prj[static_cast<std::size_t>(i)] = arg;
        }
    }
    return seq;
}

double gamma2(const AdmissibleSequence& seq, const Mat& carrier,
              const DistanceOracle& metric) {
    const int n = static_cast<int>(carrier.rows());
    const Mat T = transformed_rows(carrier, metric);
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int s = 0; s + 1 <= seq.s_max(); ++s) {
            const int a = seq.project(s, i);
            const int b = seq.project(s + 1, i);
            if (a != b) acc += std::exp2(0.5 * s) * row_dist(T, a, b);
        }
        sup = std::max(sup, acc);
    }
    return sup;
}

MonteCarloEstimate gaussian_sup_mc(const Mat& H, const CovarianceStructure& cov,
                                   int n_mc, std::uint64_t seed) {
    if (n_mc < 1) throw invalid_argument("gaussian_sup_mc: n_mc must be positive");
    const int d = static_cast<int>(H.cols());
    const Mat T = metric_sqrt(cov.sigma_true);
    auto rng = make_stream(seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    MeanAccumulator acc(1);
    Vec g(d);
    for (int t = 0; t < n_mc; ++t) {
        for (int i = 0; i < d; ++i) g[i] = normal(rng);
        const Vec z = H * (T * g);
        acc.add(0, std::max(0.0, z.size() > 0 ? z.maxCoeff() : 0.0));
        ++acc.n;
    }
    return {acc.mean(0), acc.se(0)};
}

PhiEstimate rademacher_phi(const Mat& members, const DesignSampler& design,
                           int N, int n_mc, bool with_multiplier,
                           const ScalarSampler& xi, std::uint64_t seed) {
    if (n_mc < 1 || N < 1) throw invalid_argument("rademacher_phi: bad n_mc or N");
    if (with_multiplier && !xi)
        throw invalid_argument("rademacher_phi: multiplier requested without xi sampler");
    auto rng = make_stream(seed, 0);
    std::bernoulli_distribution coin(0.5);
    const double root_n = std::sqrt(static_cast<double>(N));
    MeanAccumulator acc(2);
    for (int t = 0; t < n_mc; ++t) {
        const Mat X = design(N, rng);
        if (X.rows() != N || X.cols() != members.cols())
            throw dimension_mismatch("rademacher_phi: design sampler shape mismatch");
        Vec e(N), exi(N);
        for (int i = 0; i < N; ++i) {
            e[i] = coin(rng) ? 1.0 : -1.0;
            exi[i] = with_multiplier ? e[i] * xi(rng) : 0.0;
        }
        const Vec v = X.transpose() * e / root_n;
        acc.add(0, members.rows() > 0 ? (members * v).cwiseAbs().maxCoeff() : 0.0);
        if (with_multiplier) {
            const Vec vx = X.transpose() * exi / root_n;
            acc.add(1, members.rows() > 0 ? (members * vx).cwiseAbs().maxCoeff() : 0.0);
        }
        ++acc.n;
    }
    PhiEstimate out;
    out.phi = {acc.mean(0), acc.se(0)};
    if (with_multiplier) out.phi_xi = MonteCarloEstimate{acc.mean(1), acc.se(1)};
    return out;
}

std::vector<double> make_r_grid(double d_F, int points_per_decade) {
    if (!(d_F > 0.0)) throw invalid_argument("make_r_grid: d_F must be positive");
    if (points_per_decade < 1) throw invalid_argument("make_r_grid: bad density");
    const double lo = d_F * 1e-6;
    const double hi = 2.0 * d_F;
    const double ratio = std::pow(10.0, 1.0 / points_per_decade);
    std::vector<double> grid;
    for (double r = lo; r < hi * (1.0 - 1e-12); r *= ratio) grid.push_back(r);
    grid.push_back(hi);
    return grid;
}

namespace {

// Shared profile core: per draw, member values z are reduced to the whole
// grid with a prefix max of |z| over norm-sorted members and a suffix max of
// |z|/n, giving sup = max(prefix(r), r * suffix(r)) at each radius.
LocalizedSupProfile profile_from_draws(
    const std::vector<double>& norms, std::span<const double> r_grid, int n_mc,
    const std::function<void(Vec&)>& draw_values, std::size_t m) {
    if (n_mc < 1) throw invalid_argument("LocalizedSupProfile: n_mc must be positive");
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        if (r_grid[i] < r_grid[i - 1])
            throw invalid_argument("LocalizedSupProfile: r_grid must be ascending");
    const std::vector<int> order = indices_sorted_by(norms);
    std::vector<double> ns(m);
    for (std::size_t i = 0; i < m; ++i) ns[i] = norms[static_cast<std::size_t>(order[i])];

    MeanAccumulator acc(r_grid.size());
    Vec z(static_cast<int>(m));
    std::vector<double> pref(m + 1), suf(m + 1);
    for (int t = 0; t < n_mc; ++t) {
        draw_values(z);
        pref[0] = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            pref[i + 1] = std::max(pref[i], std::abs(z[order[i]]));
        suf[m] = 0.0;
        for (std::size_t i = m; i-- > 0;)
            suf[i] = std::max(suf[i + 1], ns[i] > 0.0 ? std::abs(z[order[i]]) / ns[i] : 0.0);
        std::size_t cut = 0;
        for (std::size_t k = 0; k < r_grid.size(); ++k) {
            while (cut < m && ns[cut] <= r_grid[k]) ++cut;
            acc.add(k, std::max(pref[cut], r_grid[k] * suf[cut]));
        }
        ++acc.n;
    }
    std::vector<double> grid(r_grid.begin(), r_grid.end());
    std::vector<double> mean(r_grid.size()), se(r_grid.size());
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        mean[k] = acc.mean(k);
        se[k] = acc.se(k);
    }
    return LocalizedSupProfile::from_table(std::move(grid), std::move(mean),
                                           std::move(se));
}

}  // namespace

LocalizedSupProfile LocalizedSupProfile::from_table(std::vector<double> grid,
                                                    std::vector<double> mean,
                                                    std::vector<double> se) {
    if (grid.size() != mean.size() || grid.size() != se.size())
        throw invalid_argument("LocalizedSupProfile: table size mismatch");
    LocalizedSupProfile out;
    out.grid_ = std::move(grid);
    out.mean_ = std::move(mean);
    out.se_ = std::move(se);
    return out;
}

LocalizedSupProfile LocalizedSupProfile::gaussian(const Mat& members,
                                                  const CovarianceStructure& cov,
                                                  std::span<const double> r_grid,
                                                  int n_mc, std::uint64_t seed) {
    const std::size_t m = static_cast<std::size_t>(members.rows());
    const std::vector<double> norms = true_norms(members, cov);
    const Mat T = metric_sqrt(cov.sigma_true);
    auto rng = make_stream(seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec g(members.cols());
    auto draw = [&](Vec& z) {
        for (int i = 0; i < g.size(); ++i) g[i] = normal(rng);
        z = members * (T * g);
    };
    return profile_from_draws(norms, r_grid, n_mc, draw, m);
}

LocalizedSupProfile LocalizedSupProfile::empirical(
    const Mat& members, const CovarianceStructure& cov, const DesignSampler& design,
    const ScalarSampler* xi, int N, std::span<const double> r_grid, int n_mc,
    std::uint64_t seed) {
    if (N < 1) throw invalid_argument("LocalizedSupProfile: N must be positive");
    const std::size_t m = static_cast<std::size_t>(members.rows());
    const std::vector<double> norms = true_norms(members, cov);
    auto rng = make_stream(seed, 0);
    std::bernoulli_distribution coin(0.5);
    const double root_n = std::sqrt(static_cast<double>(N));
    auto draw = [&](Vec& z) {
        const Mat X = design(N, rng);
        if (X.rows() != N || X.cols() != members.cols())
            throw dimension_mismatch("LocalizedSupProfile: design sampler shape mismatch");
        Vec w(N);
        for (int i = 0; i < N; ++i) {
            const double e = coin(rng) ? 1.0 : -1.0;
            w[i] = xi ? e * (*xi)(rng) : e;
        }
        z = members * (X.transpose() * w / root_n);
    };
    return profile_from_draws(norms, r_grid, n_mc, draw, m);
}

MonteCarloEstimate localized_gaussian_sup_at(const Mat& members,
                                             const CovarianceStructure& cov,
                                             double r, int n_mc,
                                             std::uint64_t seed) {
    const double grid[1] = {r};
    const LocalizedSupProfile p =
        LocalizedSupProfile::gaussian(members, cov, std::span<const double>(grid, 1),
                                      n_mc, seed);
    return {p.value(0), p.std_error(0)};
}

MonteCarloEstimate localized_phi_at(const Mat& members, const DesignSampler& design,
                                    const ScalarSampler* xi, int N, double r,
                                    int n_mc, std::uint64_t seed) {
    // Norm data requires a covariance; use the identity so callers pass
    // pre-whitened members, or go through LocalizedSupProfile::empirical.
    CovarianceStructure cov = CovarianceStructure::identity(static_cast<int>(members.cols()));
    const double grid[1] = {r};
    const LocalizedSupProfile p = LocalizedSupProfile::empirical(
        members, cov, design, xi, N, std::span<const double>(grid, 1), n_mc, seed);
    return {p.value(0), p.std_error(0)};
}

std::string to_string(FixedPointKind k) {
    switch (k) {
        case FixedPointKind::rQ: return "r_Q";
        case FixedPointKind::rM: return "r_M";
        case FixedPointKind::lambda: return "lambda_star";
        case FixedPointKind::r_tilde: return "r_tilde";
        case FixedPointKind::rQ_rad: return "r_Q_rad";
        case FixedPointKind::rM_rad: return "r_M_rad";
    }
    return "?";
}

double fixed_point_threshold(FixedPointKind kind, double r,
                             const FixedPointParams& params, double d_F) {
    if (params.N < 1) throw invalid_argument("fixed point: N must be positive");
    const double root_n = std::sqrt(static_cast<double>(params.N));
    const double sigma = params.sigma;
    auto need_sigma = [&] {
        if (!(sigma > 0.0))
            throw invalid_argument("fixed point: sigma must be positive for this kind");
    };
    switch (kind) {
        case FixedPointKind::rQ:
        case FixedPointKind::rQ_rad:
            return params.kappa * root_n * r;
        case FixedPointKind::rM:
            need_sigma();
            return params.kappa * root_n * r * r / sigma;
        case FixedPointKind::rM_rad:
            return params.kappa * root_n * r * r;
        case FixedPointKind::lambda:
            need_sigma();
            return params.kappa * static_cast<double>(params.N) *
                   std::min(1.0, r * r / (sigma * sigma));
        case FixedPointKind::r_tilde: {
            need_sigma();
            const double lg = std::log(2.0 * d_F / r);
            const double theta = 1.0 / std::max(1.0, std::sqrt(std::max(0.0, lg)));
            return params.kappa * root_n * theta * r * std::min(1.0, r / sigma);
        }
    }
    throw invalid_argument("fixed point: unknown kind");
}

bool fixed_point_condition(FixedPointKind kind, double r, double lhs,
                           const FixedPointParams& params, double d_F) {
    return lhs <= fixed_point_threshold(kind, r, params, d_F);
}

FixedPointResult solve_fixed_point(FixedPointKind kind,
                                   const ComplexityTable& table,
                                   const FixedPointParams& params) {
    const std::size_t n = table.r_grid.size();
    if (n == 0) throw invalid_argument("solve_fixed_point: empty grid");
    auto lhs_at = [&](std::size_t i) -> double {
        switch (kind) {
            case FixedPointKind::rQ:
            case FixedPointKind::rM:
            case FixedPointKind::r_tilde:
                if (!table.gaussian) throw invalid_argument("solve_fixed_point: missing gaussian profile");
                return table.gaussian->value(i);
            case FixedPointKind::rQ_rad:
                if (!table.rademacher) throw invalid_argument("solve_fixed_point: missing rademacher profile");
                return table.rademacher->value(i);
            case FixedPointKind::rM_rad:
                if (!table.multiplier) throw invalid_argument("solve_fixed_point: missing multiplier profile");
                return table.multiplier->value(i);
            case FixedPointKind::lambda:
                if (table.log_packing.size() != n)
                    throw invalid_argument("solve_fixed_point: missing packing table");
                return table.log_packing[i];
        }
        throw invalid_argument("solve_fixed_point: unknown kind");
    };
    // Monotone closure: accept the smallest radius from which the condition
    // holds on the entire tail of the grid.
    std::size_t first_good = n;
    for (std::size_t i = n; i-- > 0;) {
        if (fixed_point_condition(kind, table.r_grid[i], lhs_at(i), params, table.d_F))
            first_good = i;
        else
            break;
    }
    FixedPointResult res;
    if (first_good == n) {
        res.r = 2.0 * table.d_F;
        res.saturated = true;
    } else {
        res.r = table.r_grid[first_good];
        res.at_floor = (first_good == 0);
    }
    return res;
}

namespace {

// Greedy maximal separated-subset count on pre-transformed (Euclidean) rows.
int greedy_pack_count(const Mat& T, double sep) {
    std::vector<int> centers;
    for (int i = 0; i < T.rows(); ++i) {
        bool far = true;
        for (int c : centers)
            if ((T.row(i) - T.row(c)).norm() < sep) {
                far = false;
                break;
            }
        if (far) centers.push_back(i);
    }
    return static_cast<int>(centers.size());
}

}  // namespace

std::vector<EntropyBoundsRow> entropy_bounds(const FunctionClass& F,
                                             std::span<const double> r_grid,
                                             int n_mc, std::uint64_t seed,
                                             double c1, double c2) {
    const FunctionClass H = difference_class(F);
    const double d_F = F.diameter(MetricKind::True);
    const Mat TF = transformed_rows(F.points, DistanceOracle(F.cov, MetricKind::True));
    std::vector<double> grid4(r_grid.begin(), r_grid.end());
    for (double& r : grid4) r *= 4.0;
    const LocalizedSupProfile g4 =
        LocalizedSupProfile::gaussian(H.points, F.cov, grid4, n_mc, seed);
    std::vector<EntropyBoundsRow> rows(r_grid.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const double r = r_grid[i];
        rows[i].r = r;
        rows[i].log_packing = std::log(static_cast<double>(greedy_pack_count(TF, r)));
        const double ratio = g4.value(i) / r;
        rows[i].sudakov = c1 * ratio * ratio;
        rows[i].local_to_global =
            c2 * std::max(0.0, std::log(2.0 * d_F / r)) * ratio * ratio;
    }
    return rows;
}

ComplexityReport compute_complexity_report(const FunctionClass& F,
                                           const ComplexityOptions& opt) {
    if (opt.with_empirical && !opt.design)
        throw invalid_argument("complexity report: empirical profiles need a design sampler");
    ComplexityReport rep;
    rep.params = {opt.kappa, opt.N, opt.sigma};

    const FunctionClass H = difference_class(F);
    rep.d_F = F.diameter(MetricKind::True);
    if (!(rep.d_F > 0.0))
        throw invalid_argument("complexity report: class has zero diameter");
    {
        const std::vector<double> norms = true_norms(H.points, F.cov);
        rep.R_H = *std::max_element(norms.begin(), norms.end());
    }

    rep.table.d_F = rep.d_F;
    rep.table.r_grid = make_r_grid(rep.d_F, opt.points_per_decade);
    rep.table.gaussian = LocalizedSupProfile::gaussian(
        H.points, F.cov, rep.table.r_grid, opt.n_mc, derive_seed(opt.seed, 1));

    rep.gaussian_sup =
        gaussian_sup_mc(H.points, F.cov, opt.n_mc_global, derive_seed(opt.seed, 2));
    rep.critical_dim = rep.R_H > 0.0
                           ? (rep.gaussian_sup.value / rep.R_H) *
                                 (rep.gaussian_sup.value / rep.R_H)
                           : 0.0;

    {
        const DistanceOracle oracle_metric(F.cov, MetricKind::Oracle);
        const AdmissibleSequence seq = build_admissible_sequence(H.points, oracle_metric);
        rep.gamma2_value = gamma2(seq, H.points, oracle_metric);
    }

    {
        const Mat TF = transformed_rows(F.points, DistanceOracle(F.cov, MetricKind::True));
        rep.table.log_packing.resize(rep.table.r_grid.size());
        for (std::size_t i = 0; i < rep.table.r_grid.size(); ++i)
            rep.table.log_packing[i] =
                std::log(static_cast<double>(greedy_pack_count(TF, rep.table.r_grid[i])));
    }

    if (opt.with_empirical) {
        rep.table.rademacher = LocalizedSupProfile::empirical(
            H.points, F.cov, opt.design, nullptr, opt.N, rep.table.r_grid, opt.n_mc,
            derive_seed(opt.seed, 3));
        if (opt.xi) {
            const ScalarSampler xi = opt.xi;
            rep.table.multiplier = LocalizedSupProfile::empirical(
                H.points, F.cov, opt.design, &xi, opt.N, rep.table.r_grid, opt.n_mc,
                derive_seed(opt.seed, 4));
        }
    }

    rep.r_Q = solve_fixed_point(FixedPointKind::rQ, rep.table, rep.params);
    rep.r_M = solve_fixed_point(FixedPointKind::rM, rep.table, rep.params);
    rep.lambda_star = solve_fixed_point(FixedPointKind::lambda, rep.table, rep.params);
    rep.r_tilde = solve_fixed_point(FixedPointKind::r_tilde, rep.table, rep.params);
    rep.r_star.r = std::max(rep.r_Q.r, rep.r_M.r);
    rep.r_star.at_floor = rep.r_Q.at_floor && rep.r_M.at_floor;
    rep.r_star.saturated = rep.r_Q.saturated || rep.r_M.saturated;
    if (rep.table.rademacher)
        rep.r_Q_rad = solve_fixed_point(FixedPointKind::rQ_rad, rep.table, rep.params);
    if (rep.table.multiplier)
        rep.r_M_rad = solve_fixed_point(FixedPointKind::rM_rad, rep.table, rep.params);
    return rep;
}

void ComplexityReport::save_json(const std::string& path) const {
    nlohmann::json j;
    j["gaussian_sup"] = {{"value", gaussian_sup.value},
                         {"std_error", gaussian_sup.std_error}};
    j["gamma2"] = gamma2_value;
    j["critical_dim"] = critical_dim;
    j["d_F"] = d_F;
    j["R_H"] = R_H;
    j["params"] = {{"kappa", params.kappa}, {"N", params.N}, {"sigma", params.sigma}};
    auto put = [&](const char* key, const FixedPointResult& f) {
        j["fixed_points"][key] = {
            {"r", f.r}, {"at_floor", f.at_floor}, {"saturated", f.saturated}};
    };
    put("r_Q", r_Q);
    put("r_M", r_M);
    put("r_star", r_star);
    put("lambda_star", lambda_star);
    put("r_tilde", r_tilde);
    if (table.rademacher) put("r_Q_rad", r_Q_rad);
    if (table.multiplier) put("r_M_rad", r_M_rad);
    std::ofstream out(path);
    if (!out) throw io_error("cannot write report: " + path);
    out << j.dump(2) << "\n";
}

void ComplexityReport::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write table: " + path);
    out << "r,gaussian_sup,gaussian_se,phi_N,phi_N_se,phi_N_xi,phi_N_xi_se,log_packing\n";
    for (std::size_t i = 0; i < table.r_grid.size(); ++i) {
        out << fmt_g(table.r_grid[i]);
        out << ',' << (table.gaussian ? fmt_g(table.gaussian->value(i)) : "");
        out << ',' << (table.gaussian ? fmt_g(table.gaussian->std_error(i)) : "");
        out << ',' << (table.rademacher ? fmt_g(table.rademacher->value(i)) : "");
        out << ',' << (table.rademacher ? fmt_g(table.rademacher->std_error(i)) : "");
        out << ',' << (table.multiplier ? fmt_g(table.multiplier->value(i)) : "");
        out << ',' << (table.multiplier ? fmt_g(table.multiplier->std_error(i)) : "");
        out << ',' << (table.log_packing.size() == table.r_grid.size()
                           ? fmt_g(table.log_packing[i])
                           : std::string());
        out << '\n';
    }
}

}  // namespace gcl
