#pragma once

//---------------------------------------------------------------------------
// Multi-arm scheduling: N independent scalar Kalman-filter arms, a shared
// discount, and a budget of m_active simultaneous observations per step.
// At each step the controller sees all posterior variances, pays the
// discounted stage cost sum_i (h_i 1{i active} + w_i x_{i,t}), and every
// arm's variance moves through its active or passive map.
//---------------------------------------------------------------------------

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "whittlekf/moebius.hpp"

namespace whittlekf {

struct BanditInstance {
  std::vector<ArmParams<double>> arms;  // per-arm beta mirrors the shared one
  std::vector<double> x0;
  double beta = 0.95;
  int horizon = 16;
  int m_active = 1;
};

void validate(const BanditInstance& inst);

// One arm, one step: phi_active or phi_passive.
double variance_step(double x, int active, const ArmParams<double>& arm);

// Undiscounted cost of one step: sum_i w_i x_i plus h_i over the chosen ids.
double stage_cost(const BanditInstance& inst, const std::vector<double>& x,
                  const std::vector<int>& ids);

struct Policy {
  std::string name;
  bool may_underfill = false;  // allowed to pick fewer than m_active arms
  std::function<std::vector<int>(int t, const std::vector<double>& x, const BanditInstance&)>
      choose;
};

struct SimResult {
  std::string policy_name;
  double discounted_cost = 0.0;
  std::vector<std::vector<int>> action_log;      // horizon rows of chosen arm ids
  std::vector<std::vector<double>> variance_log; // horizon rows, N variances at decision time
  double tail_bound = 0.0;  // policy-independent bound on the discarded t >= horizon cost
};

SimResult simulate_policy(const BanditInstance& inst, const Policy& policy);

// Arms of the m_active largest Whittle indexes, ties to the lowest id.
std::vector<int> whittle_policy_action(const std::vector<double>& x, const BanditInstance& inst);

Policy whittle_policy();

// myopic (largest one-step weighted variance reduction net of cost),
// round_robin, random (seeded), never_observe.
std::vector<Policy> baseline_policies(std::uint64_t random_seed);

// Exact discounted optimum over all action sequences of the truncated
// horizon by exhaustive search; throws resource_error when the sequence
// count C(N, m_active)^horizon exceeds max_sequences.
SimResult brute_force_optimal(const BanditInstance& inst,
                              std::size_t max_sequences = 2000000);

// Sampled latent-state trajectory consistent with the variance recursion:
// states follow a standard Gaussian random walk, active observations carry
// precision b_i, passive ones a_i (a_i = 0 means no passive observation),
// and the posterior mean/variance update is the scalar Kalman filter.
struct KalmanTrace {
  std::uint64_t seed = 0;
  std::string policy_name;
  std::vector<std::vector<double>> z;     // (horizon+1) x N latent states
  std::vector<std::vector<double>> y;     // horizon x N observations, NaN when absent
  std::vector<std::vector<double>> zhat;  // (horizon+1) x N posterior means
  std::vector<std::vector<double>> x;     // (horizon+1) x N posterior variances
  std::vector<std::vector<int>> actions;  // horizon rows of chosen arm ids
};

KalmanTrace kalman_trace(const BanditInstance& inst, const Policy& policy, std::uint64_t seed);

}  // namespace whittlekf
