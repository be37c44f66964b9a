#pragma once

//---------------------------------------------------------------------------
// Whittle index of the scalar Kalman-filter arm.
//
// With both orbits of orbit_pair started at x, the index is
//     lambda(x) = w * N / D - h,
//     N = sum_{t>=1} beta^t (x_t^upper - x_t^lower),
//     D = sum_{t>=0} beta^t (act_t^lower - act_t^upper),
// the subsidy that makes observing and not observing equally attractive at
// variance x. When x classifies to a word of period m the denominator is
// exactly (1 - beta) / (1 - beta^m), boundary words included (m = 1), and
// the numerator can be driven by the word's letters instead of threshold
// comparisons; this is the closed form. The series form never classifies.
//---------------------------------------------------------------------------

#include <cstddef>
#include <vector>

#include "whittlekf/moebius.hpp"
#include "whittlekf/threshold.hpp"
#include "whittlekf/words.hpp"

namespace whittlekf {

enum class IndexMethod { series, closed, bracketed };

const char* to_string(IndexMethod m);

struct IndexPoint {
  double x = 0.0;
  double lambda = 0.0;
  Word word;  // certified word; empty when the method never classified
  IndexMethod method = IndexMethod::series;
  double trunc_error_bound = 0.0;
};

// Direct series evaluation from threshold orbits; works for every x >= 0,
// including thresholds with aperiodic action streams. The word field is
// filled from an orbit classification when one certifies.
IndexPoint whittle_index_series(double x, const ArmParams<double>& params, double tol = 1e-9);

// Closed form driven by a conclusive classification of x. Requires
// cls.conclusive and x inside [cls.interval_lo, cls.interval_hi].
IndexPoint whittle_index_closed(double x, const ThresholdClassification& cls,
                                const ArmParams<double>& params, double tol = 1e-9);

// Classifies by tree descent and evaluates the closed form; when the
// descent is inconclusive, brackets the index between the closed-form
// values at the neighbouring interval endpoints (index monotonicity), and
// falls back to the series when the upper bracket is unbounded.
IndexPoint whittle_index(double x, const ArmParams<double>& params, double tol = 1e-9);

struct IndexCurve {
  std::vector<IndexPoint> points;
  bool monotone_within_bounds = true;
  std::vector<std::size_t> violation_indices;  // i with lambda_{i+1} < lambda_i - bounds
};

// Index along a strictly increasing grid, reusing each conclusive interval
// for the grid points it covers. Flags adjacent monotonicity violations
// beyond the combined truncation bounds.
IndexCurve index_curve(const ArmParams<double>& params, const std::vector<double>& grid,
                       double tol = 1e-9);

struct SingleArmProblem {
  ArmParams<double> params;
  double nu = 0.0;        // activation subsidy added to the cost h
  double x0 = 1.0;        // initial variance
  double threshold = 1.0; // policy threshold from time 1 on
};

struct CostResult {
  double cost = 0.0;        // discounted cost over t = 0 .. T-1
  double tail_bound = 0.0;  // bound on the discarded t >= T remainder
};

// Discounted cost sum_{t<T} beta^t ((h + nu) act_t + w x_t) of the policy
// that plays first_action at t = 0 and from t = 1 follows the threshold,
// ties broken like first_action (first 1: act when x_t >= threshold).
CostResult single_arm_cost(const SingleArmProblem& problem, int first_action, int T);

struct AmbivalenceResult {
  double x = 0.0;
  double lambda = 0.0;
  double q_passive = 0.0;
  double q_active = 0.0;
  double gap = 0.0;       // |q_passive - q_active|
  double tol_used = 0.0;  // tol plus all truncation contributions
  bool within_tol = false;
};

// At nu = lambda(x) and threshold x the two first actions must cost the
// same; checks the gap against tol plus the truncation error budget.
AmbivalenceResult ambivalence_check(double x, const ArmParams<double>& params, double tol = 1e-6);

}  // namespace whittlekf
