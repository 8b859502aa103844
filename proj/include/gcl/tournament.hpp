#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/function_class.hpp"
#include "gcl/risk_oracles.hpp"

namespace gcl {

// Home-match results over the admissible set: win[h][f] says whether home h
// beats visitor f. Indices are positions in v_hat, not class indices.
struct MatchMatrix {
    std::vector<int> players;               // class indices (= v_hat)
    std::vector<std::vector<bool>> win;     // win[home][visitor], diag unused
    Mat psi_l;                              // recorded Psi_L(f, h) per pair
};

struct TournamentOutcome {
    std::vector<int> v_hat;    // admissible class indices (crude filter)
    std::vector<int> v_star;   // all-home-winners
    int selected = -1;         // class index of f_hat; -1 on failure
    bool failed = false;       // empty winner set
    double sigma_hat = 0.0;
    double sigma_star = 0.0;
    double r = 0.0;
    // Diagnostics, filled when ground truth is available.
    double error_l2 = std::numeric_limits<double>::quiet_NaN();
    double excess_risk = std::numeric_limits<double>::quiet_NaN();
    // Raw oracle outputs, kept for event auditing against closed-form truths.
    std::vector<double> psi_c;              // per class member
    std::optional<MatchMatrix> matches;
};

// Home h beats visitor f iff Psi_L(f, h) >= 0 when d(f, h) >= eta r, and
// iff Psi_L(f, h) >= -(eta^4 / 2) r^2 otherwise (oracle metric d).
MatchMatrix play_matches(const FineOracleState& state,
                         const std::vector<int>& v_hat, double r);

// V* = homes that won every match; f_hat = smallest label in V*; empty V*
// yields selected = -1 with the failed flag, never a throw.
void select_winner(const MatchMatrix& matches, const FunctionClass& F,
                   TournamentOutcome& out);

struct LearnConfig {
    OracleConstants consts;
    std::uint64_t shuffle_seed = 0;  // pre-shuffle of the sample rows
    bool shuffle = true;
};

// End-to-end learner: shuffles and halves the sample, runs the crude oracle
// and noise estimate on half 1, builds the fine oracle on half 2 and plays
// the tournament over the admissible set.
TournamentOutcome learn(const FunctionClass& F, const Mat& X, const Vec& Y,
                        double r, const LearnConfig& config);

}  // namespace gcl
