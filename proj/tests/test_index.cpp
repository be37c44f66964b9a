#include <cmath>
#include <cstdlib>
#include <iostream>
#include <vector>

#include "whittlekf/errors.hpp"
#include "whittlekf/index.hpp"

#define REQUIRE(cond)                                                   \
  do {                                                                  \
    if (!(cond)) {                                                      \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " "      \
                << #cond << "\n";                                       \
      std::exit(1);                                                     \
    }                                                                   \
  } while (0)

#define REQUIRE_THROWS(expr, ex)                                        \
  do {                                                                  \
    bool caught_ = false;                                               \
    try {                                                               \
      (void)(expr);                                                     \
    } catch (const ex&) {                                               \
      caught_ = true;                                                   \
    }                                                                   \
    if (!caught_) {                                                     \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__             \
                << " expected " #ex " from " #expr "\n";                \
      std::exit(1);                                                     \
    }                                                                   \
  } while (0)

using whittlekf::ArmParams;
using whittlekf::IndexMethod;
using whittlekf::IndexPoint;
using whittlekf::Word;

static ArmParams<double> params_d(double a, double b, double beta = 0.5, double w = 1.0,
                                  double h = 0.0) {
  ArmParams<double> p;
  p.a = a;
  p.b = b;
  p.beta = beta;
  p.weight = w;
  p.cost = h;
  return p;
}

// Values recomputed independently in exact rational arithmetic (coupled
// threshold orbits truncated at t = 300, far below double resolution).
static void frozen_index_values() {
  const ArmParams<double> p = params_d(0.2, 1.0);
  struct Case { double x; double lambda; const char* word; };
  const Case cases[] = {
      {1.0, 0.4416955216097367, "01"},
      {0.5, 0.2951061962098023, "1"},
      {2.0, 0.7314647606647193, "0"},
      {1.5, 0.5937115072402458, "001"},
  };
  for (const Case& c : cases) {
    const IndexPoint closed = whittlekf::whittle_index(c.x, p);
    REQUIRE(closed.method == IndexMethod::closed);
    REQUIRE(closed.word == Word(c.word));
    REQUIRE(std::abs(closed.lambda - c.lambda) <= closed.trunc_error_bound + 1e-13);

    const IndexPoint series = whittlekf::whittle_index_series(c.x, p);
    REQUIRE(series.method == IndexMethod::series);
    REQUIRE(std::abs(series.lambda - c.lambda) <= series.trunc_error_bound + 1e-13);
    REQUIRE(series.word == Word(c.word));
  }

  // Weight scales the numerator, cost shifts.
  const ArmParams<double> pw = params_d(0.2, 1.0, 0.5, 2.0, 0.1);
  const IndexPoint wpt = whittlekf::whittle_index(0.8, pw);
  REQUIRE(std::abs(wpt.lambda - 0.6632907797799126) <= wpt.trunc_error_bound + 1e-13);
}

static void series_closed_agreement() {
  const ArmParams<double> p = params_d(0.15, 0.9, 0.6);
  for (int i = 0; i <= 60; ++i) {
    const double x = 0.05 + static_cast<double>(i) * 0.05;
    const IndexPoint a = whittlekf::whittle_index(x, p, 1e-10);
    const IndexPoint b = whittlekf::whittle_index_series(x, p, 1e-10);
    REQUIRE(std::abs(a.lambda - b.lambda) <=
            a.trunc_error_bound + b.trunc_error_bound + 1e-10);
  }
}

static void method_selection() {
  // Unbounded upper bracket (a = 0, threshold beyond tree reach): series.
  const IndexPoint esc = whittlekf::whittle_index(50.0, params_d(0.0, 1.0));
  REQUIRE(esc.method == IndexMethod::series);
  REQUIRE(std::isfinite(esc.lambda));

  // Weakly contracting maps leave a gap unresolved at the default depth;
  // the index is then bracketed between the neighbouring interval values.
  const ArmParams<double> weak = params_d(0.001, 0.002);
  const double y10 = whittlekf::fixed_point(Word("10"), weak).value;
  const double x = y10 + 1e-3;
  const IndexPoint br = whittlekf::whittle_index(x, weak);
  REQUIRE(br.method == IndexMethod::bracketed);
  REQUIRE(br.trunc_error_bound < 1e-3);
  const IndexPoint ser = whittlekf::whittle_index_series(x, weak);
  REQUIRE(std::abs(br.lambda - ser.lambda) <=
          br.trunc_error_bound + ser.trunc_error_bound);

  // The closed form insists on a conclusive classification.
  const auto stub = whittlekf::threshold_word_by_tree(x, weak, 0);
  REQUIRE(!stub.conclusive);
  REQUIRE_THROWS(whittlekf::whittle_index_closed(x, stub, weak), std::invalid_argument);
}

static void curve_properties() {
  const ArmParams<double> p = params_d(0.2, 1.0, 0.9);
  std::vector<double> grid;
  for (int i = 0; i <= 150; ++i) grid.push_back(static_cast<double>(i) * 0.02);
  const whittlekf::IndexCurve curve = whittlekf::index_curve(p, grid);
  REQUIRE(curve.points.size() == grid.size());
  REQUIRE(curve.monotone_within_bounds);
  REQUIRE(curve.violation_indices.empty());

  // Empirical Lipschitz bound 1 / (1 - beta)^2 for unit weight, zero cost.
  const double cap = 1.0 / (0.1 * 0.1) + 1e-4;
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const double slope = (curve.points[i + 1].lambda - curve.points[i].lambda) /
                         (grid[i + 1] - grid[i]);
    REQUIRE(slope <= cap);
  }

  // Index continuity across the always-observe boundary.
  const ArmParams<double> q = params_d(0.2, 1.0);
  const double y1 = whittlekf::fixed_point(Word::one(), q).value;
  const double left = whittlekf::whittle_index(y1 - 1e-6, q).lambda;
  const double right = whittlekf::whittle_index(y1 + 1e-6, q).lambda;
  REQUIRE(std::abs(left - right) <= 1e-4);

  REQUIRE_THROWS(whittlekf::index_curve(p, {1.0, 1.0}), std::invalid_argument);
  REQUIRE_THROWS(whittlekf::index_curve(p, {2.0, 1.0}), std::invalid_argument);
}

static void single_arm_costs() {
  whittlekf::SingleArmProblem prob;
  prob.params = params_d(0.25, 1.5);
  prob.nu = 0.0;
  prob.x0 = 1.0;
  prob.threshold = 1e9;  // never reactivate

  // All-passive cost over three steps is 1 + beta 4/3 + beta^2 28/19 = 116/57.
  const whittlekf::CostResult c0 = whittlekf::single_arm_cost(prob, 0, 3);
  REQUIRE(std::abs(c0.cost - 2.0350877192982457) <= 1e-12);

  prob.params.cost = 0.02;
  prob.nu = 0.05;
  const whittlekf::CostResult c1 = whittlekf::single_arm_cost(prob, 1, 3);
  REQUIRE(std::abs(c1.cost - 1.5927272727272727) <= 1e-12);

  // The tail bound covers the discarded remainder.
  prob.nu = 0.0;
  prob.params.cost = 0.0;
  prob.threshold = 1.2;
  const whittlekf::CostResult shortc = whittlekf::single_arm_cost(prob, 0, 12);
  const whittlekf::CostResult longc = whittlekf::single_arm_cost(prob, 0, 60);
  REQUIRE(std::abs(longc.cost - shortc.cost) <= shortc.tail_bound);
  REQUIRE(longc.tail_bound < shortc.tail_bound);

  REQUIRE_THROWS(whittlekf::single_arm_cost(prob, 2, 8), std::invalid_argument);
  REQUIRE_THROWS(whittlekf::single_arm_cost(prob, 0, 0), std::invalid_argument);
}

static void ambivalence() {
  const ArmParams<double> p = params_d(0.2, 1.0, 0.5, 1.0, 0.05);
  // Spanning word regions including both boundary regimes.
  for (double x : {0.3, 0.65, 1.0, 1.3, 1.5, 2.0, 3.0}) {
    const whittlekf::AmbivalenceResult r = whittlekf::ambivalence_check(x, p);
    REQUIRE(r.within_tol);
    REQUIRE(r.gap <= r.tol_used);
    REQUIRE(std::isfinite(r.q_passive) && std::isfinite(r.q_active));
  }
  // Also through the bracketed regime; the wider index bound feeds tol_used.
  const ArmParams<double> weak = params_d(0.001, 0.002);
  const double x = whittlekf::fixed_point(Word("10"), weak).value + 1e-3;
  const whittlekf::AmbivalenceResult r = whittlekf::ambivalence_check(x, weak);
  REQUIRE(r.within_tol);
}

static void conditioning_guards() {
  REQUIRE_THROWS(whittlekf::whittle_index_series(1.0, params_d(0.2, 1.0), -1.0),
                 std::invalid_argument);
  // A tolerance that needs a multi-million step horizon is refused.
  REQUIRE_THROWS(whittlekf::whittle_index_series(1.0, params_d(0.2, 1.0, 0.99999), 1e-12),
                 whittlekf::conditioning_error);
  REQUIRE_THROWS(whittlekf::whittle_index_series(-1.0, params_d(0.2, 1.0)),
                 std::invalid_argument);
}

int main() {
  frozen_index_values();
  series_closed_agreement();
  method_selection();
  curve_properties();
  single_arm_costs();
  ambivalence();
  conditioning_guards();
  std::cout << "test_index: all checks passed\n";
  return 0;
}
