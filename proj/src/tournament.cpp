#include "gcl/tournament.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcl/rng.hpp"

namespace gcl {

MatchMatrix play_matches(const FineOracleState& state,
                         const std::vector<int>& v_hat, double r) {
    if (v_hat.empty()) throw invalid_argument("play_matches: empty admissible set");
    const FunctionClass& F = state.cls();
    const DistanceOracle oracle(F.cov, MetricKind::Oracle);
    const double eta = F.cov.eta;
    const double near_threshold = -(std::pow(eta, 4) / 2.0) * r * r;
    const int m = static_cast<int>(v_hat.size());
    MatchMatrix out;
    out.players = v_hat;
    out.win.assign(static_cast<std::size_t>(m),
                   std::vector<bool>(static_cast<std::size_t>(m), false));
    out.psi_l = Mat::Zero(m, m);
    for (int hi = 0; hi < m; ++hi) {
        const int h = v_hat[static_cast<std::size_t>(hi)];
        for (int fi = 0; fi < m; ++fi) {
            if (fi == hi) continue;
            const int f = v_hat[static_cast<std::size_t>(fi)];
            const double psi = fine_oracle(state, f, h);
            out.psi_l(fi, hi) = psi;
            const double d = oracle(F.point(f), F.point(h));
            const double thr = d >= eta * r ? 0.0 : near_threshold;
            out.win[static_cast<std::size_t>(hi)][static_cast<std::size_t>(fi)] =
                psi >= thr;
        }
    }
    return out;
}

void select_winner(const MatchMatrix& matches, const FunctionClass& F,
                   TournamentOutcome& out) {
    const int m = static_cast<int>(matches.players.size());
    out.v_star.clear();
    for (int hi = 0; hi < m; ++hi) {
        bool all = true;
        for (int fi = 0; fi < m && all; ++fi)
            if (fi != hi &&
                !matches.win[static_cast<std::size_t>(hi)][static_cast<std::size_t>(fi)])
                all = false;
        if (all) out.v_star.push_back(matches.players[static_cast<std::size_t>(hi)]);
    }
    if (out.v_star.empty()) {
        out.selected = -1;
        out.failed = true;
        return;
    }
    // Smallest stable label wins.
    out.selected = *std::min_element(
        out.v_star.begin(), out.v_star.end(), [&](int a, int b) {
            return F.labels[static_cast<std::size_t>(a)] <
                   F.labels[static_cast<std::size_t>(b)];
        });
    out.failed = false;
}

TournamentOutcome learn(const FunctionClass& F, const Mat& X, const Vec& Y,
                        double r, const LearnConfig& config) {
    if (X.rows() != Y.size())
        throw dimension_mismatch("learn: sample shape mismatch");
    if (X.rows() < 2) throw insufficient_samples("learn: need at least 2 samples");
    const int n = static_cast<int>(X.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    if (config.shuffle) {
        auto rng = make_stream(config.shuffle_seed, 0xA11CE);
        std::shuffle(perm.begin(), perm.end(), rng);
    }
    const int half = n / 2;
    Mat X1(half, X.cols()), X2(n - half, X.cols());
    Vec Y1(half), Y2(n - half);
    for (int i = 0; i < half; ++i) {
        X1.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
        Y1[i] = Y[perm[static_cast<std::size_t>(i)]];
    }
    for (int i = half; i < n; ++i) {
        X2.row(i - half) = X.row(perm[static_cast<std::size_t>(i)]);
        Y2[i - half] = Y[perm[static_cast<std::size_t>(i)]];
    }

    const CrudeOracleOutput crude = crude_oracle(F, X1, Y1, r, config.consts);
    TournamentOutcome out;
    out.r = r;
    out.sigma_hat = crude.sigma_hat;
    out.sigma_star = crude.sigma_star;
    out.v_hat = crude.v_hat;
    out.psi_c = crude.psi_c;
    if (out.v_hat.size() == 1) {
        out.selected = out.v_hat[0];
        out.v_star = out.v_hat;
        return out;
    }
    const FineOracleState state(F, X2, Y2, r, crude.sigma_star, config.consts);
    out.matches = play_matches(state, out.v_hat, r);
    select_winner(*out.matches, F, out);
    return out;
}

}  // namespace gcl
