#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gcl/generators.hpp"
#include "gcl/tournament.hpp"
#include "gcl/rng.hpp"

using namespace gcl;

namespace {

LabeledSample draw(const Vec& z0, double sigma, int n, std::uint64_t seed) {
    RegressionModel model;
    model.design = DistributionSpec::parse("gaussian");
    model.noise = DistributionSpec::parse("gaussian");
    model.sigma_noise = sigma;
    model.z0 = z0;
    return gen_regression(model, n, seed);
}

}  // namespace

TEST_CASE("singleton admissible set short-circuits") {
    Mat P(1, 2);
    P << 0.25, 0.0;
    FunctionClass F = FunctionClass::from_points(P, CovarianceStructure::identity(2));
    Vec z0(2);
    z0 << 0.25, 0.0;
    auto s = draw(z0, 0.5, 2000, 1);
    LearnConfig cfg;
    TournamentOutcome out = learn(F, s.X, s.Y, 0.6, cfg);
    CHECK(!out.failed);
    CHECK(out.selected == 0);
    CHECK(out.v_hat == std::vector<int>{0});
    CHECK(out.v_star == std::vector<int>{0});
    CHECK(!out.matches.has_value());
}

TEST_CASE("noiseless realizable truth wins the tournament") {
    FunctionClass F = l1_ball_net(2, 0.5);
    // Truth is a class member with a nonzero index.
    int truth_idx = -1;
    for (int i = 0; i < F.size(); ++i)
        if ((F.point(i) - (Vec(2) << 0.5, 0.5).finished()).norm() < 1e-12)
            truth_idx = i;
    REQUIRE(truth_idx >= 0);
    auto s = draw(F.point(truth_idx), 0.0, 4000, 2);
    LearnConfig cfg;
    TournamentOutcome out = learn(F, s.X, s.Y, 0.4, cfg);
    REQUIRE(!out.failed);
    CHECK(out.selected == truth_idx);
    // The truth sits in every reported set.
    CHECK(std::find(out.v_hat.begin(), out.v_hat.end(), truth_idx) != out.v_hat.end());
    CHECK(std::find(out.v_star.begin(), out.v_star.end(), truth_idx) != out.v_star.end());
}

TEST_CASE("winner selection semantics") {
    Mat P(3, 2);
    P << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
    FunctionClass F = FunctionClass::from_points(P, CovarianceStructure::identity(2));
    MatchMatrix m;
    m.players = {0, 1, 2};
    m.psi_l = Mat::Zero(3, 3);

    SUBCASE("two all-winners: smallest label picked") {
        m.win = {{false, true, true}, {true, false, true}, {true, false, false}};
        TournamentOutcome out;
        select_winner(m, F, out);
        CHECK(out.v_star == std::vector<int>{0, 1});
        CHECK(out.selected == 0);
        CHECK(!out.failed);
    }
    SUBCASE("label order, not index order, decides") {
        FunctionClass G = F;
        G.labels = {5, 1, 3};
        m.win = {{false, true, true}, {true, false, true}, {true, false, false}};
        TournamentOutcome out;
        select_winner(m, G, out);
        CHECK(out.selected == 1);  // label 1 < label 5
    }
    SUBCASE("no all-winner: flagged failure, no throw") {
        m.win = {{false, true, false}, {false, false, true}, {true, false, false}};
        TournamentOutcome out;
        select_winner(m, F, out);
        CHECK(out.failed);
        CHECK(out.selected == -1);
        CHECK(out.v_star.empty());
    }
}

TEST_CASE("match thresholds distinguish near and far visitors") {
    FunctionClass F = l1_ball_net(2, 0.5);
    Vec z0 = Vec::Zero(2);
    const double sigma = 0.5, r = 0.6;
    auto s = draw(z0, sigma, 4000, 3);
    OracleConstants consts;
    FineOracleState st(F, s.X, s.Y, r, std::max(sigma, r), consts);
    std::vector<int> all(static_cast<std::size_t>(F.size()));
    for (int i = 0; i < F.size(); ++i) all[static_cast<std::size_t>(i)] = i;
    MatchMatrix m = play_matches(st, all, r);

    const DistanceOracle oracle(F.cov, MetricKind::Oracle);
    const double eta = F.cov.eta;
    for (int hi = 0; hi < F.size(); ++hi)
        for (int fi = 0; fi < F.size(); ++fi) {
            if (fi == hi) continue;
            const double d = oracle(F.point(fi), F.point(hi));
            const double thr =
                d >= eta * r ? 0.0 : -(std::pow(eta, 4) / 2.0) * r * r;
            CHECK(m.win[static_cast<std::size_t>(hi)][static_cast<std::size_t>(fi)] ==
                  (m.psi_l(fi, hi) >= thr));
        }
}

TEST_CASE("end-to-end learn respects its contracts") {
    FunctionClass F = l1_ball_net(2, 0.5);
    Vec z0(2);
    z0 << 0.5, 0.0;
    auto s = draw(z0, 1.0, 4000, 4);
    LearnConfig cfg;
    cfg.shuffle_seed = 11;
    TournamentOutcome out = learn(F, s.X, s.Y, 0.8, cfg);
    REQUIRE(!out.failed);
    // V* inside V-hat, selection inside V*.
    for (int v : out.v_star)
        CHECK(std::find(out.v_hat.begin(), out.v_hat.end(), v) != out.v_hat.end());
    CHECK(std::find(out.v_star.begin(), out.v_star.end(), out.selected) !=
          out.v_star.end());
    CHECK(out.sigma_star == std::max(out.sigma_hat, out.r));
    CHECK(out.psi_c.size() == static_cast<std::size_t>(F.size()));

    // Deterministic in the shuffle seed.
    TournamentOutcome again = learn(F, s.X, s.Y, 0.8, cfg);
    CHECK(again.selected == out.selected);
    CHECK(again.v_hat == out.v_hat);
    CHECK(again.v_star == out.v_star);

    CHECK_THROWS_AS(learn(F, s.X, s.Y.head(10), 0.8, cfg), dimension_mismatch);
}
