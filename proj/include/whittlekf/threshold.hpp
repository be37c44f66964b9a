#pragma once

//---------------------------------------------------------------------------
// Classification of threshold values to Christoffel words.
//
// The x-threshold policy on a single arm activates exactly when the current
// variance exceeds x (tie conventions below). Away from a countable set,
// the induced action stream is periodic and its period is a rotation of a
// Christoffel word c = 0 w 1; the set of thresholds producing c is the
// closed interval [y_{01w}, y_{10w}] between two fixed points. Thresholds
// x <= y_1 produce the boundary word "1" (always observe), x >= y_0 the
// boundary word "0" (never observe); with a = 0 the latter region is empty.
//
// Two independent classifiers:
//  * by_orbit simulates the threshold orbit and reads the period off the
//    action stream;
//  * by_tree descends the Christoffel tree comparing x against interval
//    endpoints, never simulating.
//---------------------------------------------------------------------------

#include <cstddef>
#include <vector>

#include "whittlekf/moebius.hpp"
#include "whittlekf/words.hpp"

namespace whittlekf {

// Coupled passive-start / active-start orbits from x_0 = x under the
// x-threshold policy. The passive-start orbit breaks the tie at variance
// exactly x toward staying passive, the active-start orbit toward active:
//   upper: act_t = 1{x_t > x},  lower: act_t = 1{x_t >= x}.
// The skipped observation keeps the upper orbit higher at t = 1; later the
// two interleave out of phase and only block sums compare, not states.
struct OrbitPair {
  double x = 0.0;
  std::vector<double> upper_states;  // length T+1, upper_states[0] == x
  std::vector<double> lower_states;  // length T+1, lower_states[0] == x
  std::vector<int> upper_actions;    // length T, action taken at time t
  std::vector<int> lower_actions;    // length T
};

OrbitPair orbit_pair(double x, const ArmParams<double>& params, int T);

struct ThresholdClassification {
  double x = 0.0;
  Word word;                 // Christoffel word, or deepest bracketing node word
  double interval_lo = 0.0;  // y_{01w} for interior words; 0 for "1"; y_0 for "0"
  double interval_hi = 0.0;  // y_{10w} for interior words; y_1 for "1"; +inf for "0"
  std::size_t period = 0;    // |word|
  bool is_boundary = false;  // word is "0" or "1"
  bool conclusive = true;

  // Neighbouring conclusive intervals maintained during tree descent; used
  // to bracket the index when the descent stops inconclusive. bracket_lo is
  // the word whose interval lies below x, bracket_hi above; lo_endpoint is
  // y_{10 w_lo} (top of the lower interval), hi_endpoint is y_{01 w_hi}.
  Word bracket_lo, bracket_hi;
  double lo_endpoint = 0.0;
  double hi_endpoint = 0.0;
};

// Simulates the active-start action stream and extracts its eventual period
// (at most one transient letter occurs), then rotates the period to the
// Christoffel representative. Inconclusive when no period is certified
// within max_len letters (three full repetitions required).
ThresholdClassification threshold_word_by_orbit(double x, const ArmParams<double>& params,
                                                std::size_t max_len = 4096);

// Descends the Christoffel tree: at node word c = 0 w 1, x < y_{01w} moves
// toward larger slopes, x > y_{10w} toward smaller, otherwise c is the
// answer. Stops inconclusive at max_depth or on matrix overflow, returning
// the deepest bracketing information.
ThresholdClassification threshold_word_by_tree(double x, const ArmParams<double>& params,
                                               int max_depth = 32);

// Classification record for a known Christoffel word ("0", "1", or 0w1),
// intervals from the fixed points; does not test that x lies inside.
ThresholdClassification classification_of_word(double x, const Word& word,
                                               const ArmParams<double>& params);

}  // namespace whittlekf
