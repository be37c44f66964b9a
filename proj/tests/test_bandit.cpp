#include <cmath>
#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "whittlekf/bandit.hpp"
#include "whittlekf/errors.hpp"

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
using whittlekf::BanditInstance;
using whittlekf::Policy;
using whittlekf::SimResult;

static ArmParams<double> arm(double a, double b, double w, double h, double beta) {
  ArmParams<double> p;
  p.a = a;
  p.b = b;
  p.weight = w;
  p.cost = h;
  p.beta = beta;
  return p;
}

static BanditInstance two_arm() {
  BanditInstance inst;
  inst.arms = {arm(0.25, 1.5, 1.0, 0.02, 0.5), arm(0.5, 2.0, 2.0, 0.03, 0.5)};
  inst.x0 = {1.0, 0.5};
  inst.beta = 0.5;
  inst.horizon = 3;
  inst.m_active = 1;
  return inst;
}

static void validation() {
  BanditInstance inst = two_arm();
  whittlekf::validate(inst);  // baseline sanity

  BanditInstance bad = inst;
  bad.arms.clear();
  REQUIRE_THROWS(whittlekf::validate(bad), std::invalid_argument);

  bad = inst;
  bad.x0 = {1.0};
  REQUIRE_THROWS(whittlekf::validate(bad), std::invalid_argument);

  bad = inst;
  bad.beta = 1.0;
  bad.arms[0].beta = bad.arms[1].beta = 1.0;
  REQUIRE_THROWS(whittlekf::validate(bad), std::invalid_argument);

  bad = inst;
  bad.horizon = 0;
  REQUIRE_THROWS(whittlekf::validate(bad), std::invalid_argument);

  bad = inst;
  bad.m_active = 0;
  REQUIRE_THROWS(whittlekf::validate(bad), std::invalid_argument);
  bad.m_active = 3;
  REQUIRE_THROWS(whittlekf::validate(bad), std::invalid_argument);

  bad = inst;
  bad.arms[1].beta = 0.4;  // disagrees with the shared discount
  REQUIRE_THROWS(whittlekf::validate(bad), std::invalid_argument);

  bad = inst;
  bad.arms[0].cost = -0.01;
  REQUIRE_THROWS(whittlekf::validate(bad), std::invalid_argument);

  bad = inst;
  bad.x0[1] = -0.5;
  REQUIRE_THROWS(whittlekf::validate(bad), std::invalid_argument);
}

static void stage_costs() {
  const BanditInstance inst = two_arm();
  const std::vector<double> x = {1.2, 0.6};
  REQUIRE(std::abs(whittlekf::stage_cost(inst, x, {}) - 2.40) <= 1e-15);
  REQUIRE(std::abs(whittlekf::stage_cost(inst, x, {0}) - 2.42) <= 1e-15);
  REQUIRE(std::abs(whittlekf::stage_cost(inst, x, {0, 1}) - 2.45) <= 1e-15);

  // Variance maps: active uses b, passive uses a.
  REQUIRE(std::abs(whittlekf::variance_step(1.0, 1, inst.arms[0]) - 0.5) <= 1e-15);
  REQUIRE(std::abs(whittlekf::variance_step(1.0, 0, inst.arms[0]) - 4.0 / 3.0) <= 1e-15);
}

static void simulation_invariants() {
  BanditInstance inst = two_arm();
  inst.horizon = 8;
  const SimResult sim = whittlekf::simulate_policy(inst, whittlekf::whittle_policy());
  REQUIRE(sim.action_log.size() == 8 && sim.variance_log.size() == 8);

  // The logs fully determine the reported cost and each variance row.
  double recomputed = 0.0;
  double betat = 1.0;
  for (int t = 0; t < inst.horizon; ++t) {
    recomputed += betat * whittlekf::stage_cost(inst, sim.variance_log[t], sim.action_log[t]);
    betat *= inst.beta;
    if (t + 1 < inst.horizon) {
      for (std::size_t i = 0; i < inst.arms.size(); ++i) {
        const bool active = sim.action_log[t][0] == static_cast<int>(i);
        const double next =
            whittlekf::variance_step(sim.variance_log[t][i], active ? 1 : 0, inst.arms[i]);
        REQUIRE(std::abs(next - sim.variance_log[t + 1][i]) <= 1e-14);
      }
    }
  }
  REQUIRE(std::abs(recomputed - sim.discounted_cost) <= 1e-12);
  REQUIRE(sim.tail_bound > 0.0);

  // Identical arms and states: the index tie goes to the lowest id.
  BanditInstance tie = two_arm();
  tie.arms[1] = tie.arms[0];
  tie.x0 = {0.7, 0.7};
  const std::vector<int> pick = whittlekf::whittle_policy_action(tie.x0, tie);
  REQUIRE(pick.size() == 1 && pick[0] == 0);
}

static void policy_contract() {
  BanditInstance inst = two_arm();
  inst.m_active = 2;

  Policy dup;
  dup.name = "dup";
  dup.choose = [](int, const std::vector<double>&, const BanditInstance&) {
    return std::vector<int>{0, 0};
  };
  REQUIRE_THROWS(whittlekf::simulate_policy(inst, dup), std::logic_error);

  Policy range;
  range.name = "range";
  range.choose = [](int, const std::vector<double>&, const BanditInstance&) {
    return std::vector<int>{0, 5};
  };
  REQUIRE_THROWS(whittlekf::simulate_policy(inst, range), std::logic_error);

  Policy count;
  count.name = "count";
  count.choose = [](int, const std::vector<double>&, const BanditInstance&) {
    return std::vector<int>{0};
  };
  REQUIRE_THROWS(whittlekf::simulate_policy(inst, count), std::logic_error);

  count.may_underfill = true;  // now a single pick is allowed
  const SimResult ok = whittlekf::simulate_policy(inst, count);
  REQUIRE(ok.action_log.size() == static_cast<std::size_t>(inst.horizon));
}

static void brute_force() {
  const BanditInstance inst = two_arm();
  const SimResult brute = whittlekf::brute_force_optimal(inst);
  // Exhaustive optimum recomputed in exact rationals: 0 then 1 then 0.
  REQUIRE(std::abs(brute.discounted_cost - 3.6168398268398265) <= 1e-14);
  REQUIRE(brute.action_log.size() == 3);
  REQUIRE(brute.action_log[0][0] == 0 && brute.action_log[1][0] == 1 &&
          brute.action_log[2][0] == 0);

  REQUIRE_THROWS(whittlekf::brute_force_optimal(inst, 4), whittlekf::resource_error);

  // The optimum lower-bounds every admissible policy.
  const SimResult wh = whittlekf::simulate_policy(inst, whittlekf::whittle_policy());
  REQUIRE(brute.discounted_cost <= wh.discounted_cost + 1e-12);
  for (const Policy& p : whittlekf::baseline_policies(42)) {
    const SimResult s = whittlekf::simulate_policy(inst, p);
    REQUIRE(brute.discounted_cost <= s.discounted_cost + 1e-12);
    REQUIRE(std::abs(s.tail_bound - brute.tail_bound) <= 1e-12);  // policy independent
  }
}

static void baselines() {
  std::vector<Policy> pols = whittlekf::baseline_policies(99);
  REQUIRE(pols.size() == 4);
  bool myopic = false, rr = false, rnd = false, never = false;
  for (const Policy& p : pols) {
    myopic |= p.name == "myopic";
    rr |= p.name == "round_robin";
    rnd |= p.name == "random";
    never |= p.name == "never_observe";
    if (p.name == "never_observe") REQUIRE(p.may_underfill);
  }
  REQUIRE(myopic && rr && rnd && never);

  BanditInstance inst;
  inst.arms = {arm(0.2, 1.0, 1.0, 0.0, 0.5), arm(0.2, 1.0, 1.0, 0.0, 0.5),
               arm(0.2, 1.0, 1.0, 0.0, 0.5)};
  inst.x0 = {1.0, 1.0, 1.0};
  inst.beta = 0.5;
  inst.horizon = 7;
  inst.m_active = 1;

  for (const Policy& p : pols) {
    if (p.name == "round_robin") {
      const SimResult s = whittlekf::simulate_policy(inst, p);
      for (int t = 0; t < inst.horizon; ++t) {
        REQUIRE(s.action_log[t].size() == 1);
        REQUIRE(s.action_log[t][0] == t % 3);
      }
    }
    if (p.name == "never_observe") {
      const SimResult s = whittlekf::simulate_policy(inst, p);
      for (const auto& row : s.action_log) REQUIRE(row.empty());
    }
    if (p.name == "random") {
      const SimResult once = whittlekf::simulate_policy(inst, p);
      for (const Policy& q : whittlekf::baseline_policies(99)) {
        if (q.name != "random") continue;
        const SimResult twice = whittlekf::simulate_policy(inst, q);
        REQUIRE(once.action_log == twice.action_log);
        REQUIRE(once.discounted_cost == twice.discounted_cost);
      }
    }
  }
}

static void traces() {
  BanditInstance inst;
  inst.arms = {arm(0.0, 1.0, 1.0, 0.0, 0.9), arm(0.4, 1.3, 1.0, 0.0, 0.9)};
  inst.x0 = {1.0, 0.8};
  inst.beta = 0.9;
  inst.horizon = 6;
  inst.m_active = 1;
  const Policy wh = whittlekf::whittle_policy();

  const whittlekf::KalmanTrace tr = whittlekf::kalman_trace(inst, wh, 7);
  REQUIRE(tr.z.size() == 7 && tr.zhat.size() == 7 && tr.x.size() == 7);
  REQUIRE(tr.y.size() == 6 && tr.actions.size() == 6);

  // Variances and actions replay the deterministic simulation exactly.
  const SimResult sim = whittlekf::simulate_policy(inst, wh);
  REQUIRE(tr.actions == sim.action_log);
  for (int t = 0; t < inst.horizon; ++t) {
    for (std::size_t i = 0; i < 2; ++i) {
      REQUIRE(tr.x[t][i] == sim.variance_log[t][i]);
    }
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const bool active = tr.actions[5][0] == static_cast<int>(i);
    REQUIRE(std::abs(tr.x[6][i] -
                     whittlekf::variance_step(tr.x[5][i], active ? 1 : 0, inst.arms[i])) <=
            1e-14);
  }

  // Arm 0 has no passive channel: its observation exists iff it was chosen.
  for (int t = 0; t < inst.horizon; ++t) {
    const bool active0 = tr.actions[t][0] == 0;
    REQUIRE(std::isnan(tr.y[t][0]) == !active0);
    REQUIRE(std::isfinite(tr.y[t][1]));  // a > 0 always observes
  }

  const whittlekf::KalmanTrace again = whittlekf::kalman_trace(inst, wh, 7);
  REQUIRE(again.z == tr.z && again.y[1] == tr.y[1] && again.zhat == tr.zhat);

  // Filter consistency: the sampled squared error matches the reported
  // posterior variance in expectation (chi-square concentration, 4 sigma).
  BanditInstance one;
  one.arms = {arm(0.3, 1.2, 1.0, 0.0, 0.9)};
  one.x0 = {1.0};
  one.beta = 0.9;
  one.horizon = 6;
  one.m_active = 1;
  const int reps = 20000;
  double sum_sq = 0.0;
  double xfinal = 0.0;
  for (int r = 0; r < reps; ++r) {
    const whittlekf::KalmanTrace t = whittlekf::kalman_trace(one, wh, 1000 + r);
    const double err = t.z[6][0] - t.zhat[6][0];
    sum_sq += err * err;
    xfinal = t.x[6][0];
  }
  const double mean_sq = sum_sq / reps;
  const double sigma = xfinal * std::sqrt(2.0 / reps);
  REQUIRE(std::abs(mean_sq - xfinal) <= 4.0 * sigma);
}

int main() {
  validation();
  stage_costs();
  simulation_invariants();
  policy_contract();
  brute_force();
  baselines();
  traces();
  std::cout << "test_bandit: all checks passed\n";
  return 0;
}
