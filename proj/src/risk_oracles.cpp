#include "gcl/risk_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <unordered_map>

namespace gcl {

int largest_level(double budget) {
    if (budget < 2.0) return 0;
    int s = 1;
    while (std::exp2(s + 1) <= budget) ++s;
    return s;
}

double delta_level(double alpha, int s) { return 2.0 * std::exp(-alpha * std::exp2(s)); }

int max_feasible_level(int N, double alpha, double c0_floor) {
    auto ok = [&](int s) {
        const double a = alpha * std::exp2(s);
        return std::ceil(8.0 * a) <= static_cast<double>(N) &&
               a <= c0_floor * static_cast<double>(N);
    };
    if (!ok(0)) return -1;
    int s = 0;
    while (ok(s + 1)) ++s;
    return s;
}

namespace {

std::span<const double> as_span(const Vec& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

CrudeOracleOutput crude_oracle(const FunctionClass& F, const Mat& X, const Vec& Y,
                               double r, const OracleConstants& consts) {
    if (X.rows() != Y.size() || X.cols() != F.dim())
        throw dimension_mismatch("crude_oracle: sample/class shape mismatch");
    if (!(r > 0.0)) throw invalid_argument("crude_oracle: r must be positive");
    const int N = static_cast<int>(X.rows());
    CrudeOracleOutput out;
    out.r = r;
    out.s0 = std::min(largest_level(consts.theta * consts.theta * N),
                      max_feasible_level(N, consts.alpha,
                                         consts.estimator.c0_floor));
    if (out.s0 < 1)
        throw insufficient_samples("crude_oracle: no admissible confidence level at this sample size");
    out.delta = delta_level(consts.alpha, out.s0);

    const DistanceOracle metric(F.cov, MetricKind::Oracle);
    const double sep = F.cov.eta * consts.gamma * r;
    out.partition = greedy_packing(F.points, sep, metric);
    const double budget = std::exp2(out.s0 - 1);
    if (std::log(static_cast<double>(out.partition.count())) > budget)
        throw entropy_violation(
            "crude_oracle: packing count " + std::to_string(out.partition.count()) +
            " exceeds the entropy budget exp(2^{s0-1}) = exp(" +
            std::to_string(budget) + ")");

    EstimatorSpec spec = consts.estimator;
    std::vector<double> center_psi(out.partition.centers.size());
    Vec sq(N);
    for (std::size_t j = 0; j < out.partition.centers.size(); ++j) {
        const Vec u = F.point(out.partition.centers[j]);
        for (int i = 0; i < N; ++i) {
            const double d = X.row(i).dot(u) - Y[i];
            sq[i] = d * d;
        }
        center_psi[j] = psi_delta(as_span(sq), out.delta, spec);
    }
    out.psi_c.resize(static_cast<std::size_t>(F.size()));
    for (int f = 0; f < F.size(); ++f)
        out.psi_c[static_cast<std::size_t>(f)] =
            center_psi[static_cast<std::size_t>(out.partition.assignment[static_cast<std::size_t>(f)])];

    const double min_psi =
        *std::min_element(out.psi_c.begin(), out.psi_c.end());
    out.sigma_hat = std::sqrt(std::max(0.0, min_psi));
    out.sigma_star = std::max(out.sigma_hat, r);
    const double cutoff = 4.0 * out.sigma_star * out.sigma_star;
    for (int f = 0; f < F.size(); ++f)
        if (out.psi_c[static_cast<std::size_t>(f)] <= cutoff) out.v_hat.push_back(f);
    return out;
}

std::pair<double, double> noise_estimate(const CrudeOracleOutput& out) {
    return {out.sigma_hat, out.sigma_star};
}

FineOracleState::FineOracleState(const FunctionClass& F, const Mat& X, const Vec& Y,
                                 double r, double sigma_star,
                                 const OracleConstants& consts)
    : F_(&F), consts_(consts), r_(r) {
    if (X.rows() != Y.size() || X.cols() != F.dim())
        throw dimension_mismatch("fine oracle: sample/class shape mismatch");
    if (!(r > 0.0)) throw invalid_argument("fine oracle: r must be positive");
    if (!(sigma_star > 0.0))
        throw invalid_argument("fine oracle: sigma_star must be positive");
    N_ = static_cast<int>(X.rows());
    const double eta = F.cov.eta;
    r0_ = eta * eta * r;

    const int feas =
        max_feasible_level(N_, consts.alpha, consts.estimator.c0_floor);
    s1_ = std::min(largest_level(consts.c0 * N_ / consts.alpha), feas + 1);
    if (s1_ < 2)
        throw insufficient_samples("fine oracle: chain depth s1 < 2 at this sample size");
    const double ratio = std::min(1.0, r * r / (sigma_star * sigma_star));
    s0_ = largest_level(consts.c1 * consts.theta * consts.theta * N_ * ratio);
    // Never exceed the crude confidence level theta^2 N.
    s0_ = std::min({s0_, s1_ - 1, feas,
                    largest_level(consts.theta * consts.theta * N_)});
    if (s0_ < 1)
        throw insufficient_samples("fine oracle: no admissible base level s0");

    const DistanceOracle oracle(F.cov, MetricKind::Oracle);
    partition_ = greedy_packing(F.points, eta * consts.gamma * r, oracle);
    const double budget = std::exp2(s0_ - 1);
    if (std::log(static_cast<double>(partition_.count())) > budget)
        throw entropy_violation(
            "fine oracle: partition count " + std::to_string(partition_.count()) +
            " exceeds exp(2^{s0-1}) = exp(" + std::to_string(budget) + ")");
    for (int v = 0; v < F.size(); ++v) {
        const int c = center_of(v);
        if (l2_distance(F.point(v), F.point(c), F.cov, MetricKind::True) >
            r0_ * (1.0 + 1e-9))
            throw numerical_error("fine oracle: partition cell radius exceeds eta^2 r");
    }

    P_ = X * F.points.transpose();
    Y_ = Y;

    // Carrier: every query the mixture decomposition can ask for, exactly
    // dedup'd: the zero function, the rescaled pair differences
    // r (f_i - f_j) / alpha, and the cell displacements v - v_j. All have
    // oracle norm <= r and true norm <= eta^2 r.
    const int nF = F.size();
    std::vector<Vec> rows;
    std::unordered_map<std::string, int> seen;
    auto intern = [&](const Vec& u) {
        std::string key(reinterpret_cast<const char*>(u.data()),
                        sizeof(double) * static_cast<std::size_t>(u.size()));
        auto [it, fresh] = seen.try_emplace(std::move(key), static_cast<int>(rows.size()));
        if (fresh) {
            rows.push_back(u);
            recipes_.push_back({});
        }
        return it->second;
    };
    zero_idx_ = intern(Vec::Zero(F.dim()));
    recipes_[static_cast<std::size_t>(zero_idx_)] = {0.0, 0, 0};
    pair_idx_.assign(static_cast<std::size_t>(nF) * nF, zero_idx_);
    for (int i = 0; i < nF; ++i)
        for (int j = 0; j < nF; ++j) {
            if (i == j) continue;
            const double a = std::max(r, oracle(F.point(i), F.point(j)));
            const double coeff = r / a;
            const int idx = intern(coeff * (F.point(i) - F.point(j)));
            recipes_[static_cast<std::size_t>(idx)] = {coeff, i, j};
            pair_idx_[static_cast<std::size_t>(i) * nF + j] = idx;
        }
    center_diff_idx_.resize(static_cast<std::size_t>(nF), zero_idx_);
    for (int v = 0; v < nF; ++v) {
        const int c = center_of(v);
        if (v == c) continue;
        const int idx = intern(F.point(v) - F.point(c));
        recipes_[static_cast<std::size_t>(idx)] = {1.0, v, c};
        center_diff_idx_[static_cast<std::size_t>(v)] = idx;
    }
    carrier_.resize(static_cast<int>(rows.size()), F.dim());
    for (std::size_t i = 0; i < rows.size(); ++i)
        carrier_.row(static_cast<int>(i)) = rows[i].transpose();
    seq_ = build_admissible_sequence(carrier_, oracle);

    for (int c : partition_.centers)
        center_xi_.emplace(c, Vec(P_.col(c) - Y_));
}

int FineOracleState::query_pair(int i, int j) const {
    return pair_idx_[static_cast<std::size_t>(i) * F_->size() + j];
}

int FineOracleState::query_center_diff(int v) const {
    return center_diff_idx_[static_cast<std::size_t>(v)];
}

double FineOracleState::alpha_of_pair(int i, int j) const {
    if (i == j) return r_;
    const DistanceOracle oracle(F_->cov, MetricKind::Oracle);
    return std::max(r_, oracle(F_->point(i), F_->point(j)));
}

Vec FineOracleState::values(int carrier_idx) const {
    const CarrierRecipe& rec = recipes_[static_cast<std::size_t>(carrier_idx)];
    if (rec.coeff == 0.0) return Vec::Zero(N_);
    return rec.coeff * (P_.col(rec.i) - P_.col(rec.j));
}

const Vec& FineOracleState::center_multiplier(int v) const {
    return center_xi_.at(center_of(v));
}

namespace {

int proj_at(const AdmissibleSequence& seq, int s, int q) {
    return s >= seq.s_max() ? q : seq.project(s, q);
}

}  // namespace

double FineOracleState::phi_M(int carrier_idx, const Vec& xi) const {
    if (xi.size() != N_) throw dimension_mismatch("phi_M: multiplier length mismatch");
    const EstimatorSpec& spec = consts_.estimator;
    Vec prod = xi.cwiseProduct(values(proj_at(seq_, s0_, carrier_idx)));
    double total = psi_delta(as_span(prod), delta_level(consts_.alpha, s0_), spec);
    for (int s = s0_; s < s1_; ++s) {
        const int a = proj_at(seq_, s + 1, carrier_idx);
        const int b = proj_at(seq_, s, carrier_idx);
        if (a == b) continue;
        prod = xi.cwiseProduct(values(a) - values(b));
        total += psi_delta(as_span(prod), delta_level(consts_.alpha, s), spec);
    }
    return total;
}

double FineOracleState::psi_Q(int idx_u, int idx_w) const {
    const EstimatorSpec& spec = consts_.estimator;
    const int u0 = proj_at(seq_, s0_, idx_u);
    const int w0 = proj_at(seq_, s0_, idx_w);
    Vec prod = values(u0).cwiseProduct(values(w0));
    double total = psi_delta(as_span(prod), delta_level(consts_.alpha, s0_), spec);
    for (int s = s0_; s < s1_; ++s) {
        const int u1 = proj_at(seq_, s + 1, idx_u);
        const int w1 = proj_at(seq_, s + 1, idx_w);
        const int ua = proj_at(seq_, s, idx_u);
        const int wa = proj_at(seq_, s, idx_w);
        if (u1 == ua && w1 == wa) continue;
        prod = values(u1).cwiseProduct(values(w1)) - values(ua).cwiseProduct(values(wa));
        total += psi_delta(as_span(prod), delta_level(consts_.alpha, s), spec);
    }
    return total;
}

double mixture_estimator(const FineOracleState& state, int u_i, int u_j,
                         int w_i, int w_j, int v, double* psi1, double* psi2,
                         double* psi3) {
    const double r = state.r();
    const double au = state.alpha_of_pair(u_i, u_j) / r;
    const double aw = state.alpha_of_pair(w_i, w_j) / r;
    const int qu = state.query_pair(u_i, u_j);
    const int qw = state.query_pair(w_i, w_j);
    const double p1 = au * aw * state.psi_Q(qu, qw);
    const double p2 = au * state.psi_Q(qu, state.query_center_diff(v));
    const double p3 = au * state.phi_M(qu, state.center_multiplier(v));
    if (psi1) *psi1 = p1;
    if (psi2) *psi2 = p2;
    if (psi3) *psi3 = p3;
    return p1 + 2.0 * p2 + 2.0 * p3;
}

double fine_oracle(const FineOracleState& state, int f, int h) {
    if (f < 0 || h < 0 || f >= state.cls().size() || h >= state.cls().size())
        throw invalid_argument("fine_oracle: class index out of range");
    if (f == h) return 0.0;
    return mixture_estimator(state, f, h, f, h, h);
}

}  // namespace gcl
