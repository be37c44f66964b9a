#include "whittlekf/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "whittlekf/errors.hpp"
#include "whittlekf/index.hpp"

namespace whittlekf {

namespace {

// Uniform in (0,1] and a Box-Muller normal built on the raw engine stream;
// std::uniform_real_distribution and friends are implementation-defined, so
// traces would not be portable across standard libraries.
double det_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double det_gauss(std::mt19937_64& rng) {
  const double u1 = det_uniform(rng);
  const double u2 = det_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::vector<int> validated_actions(std::vector<int> ids, const BanditInstance& inst,
                                   bool may_underfill) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::logic_error("policy chose a duplicate arm");
  }
  for (int id : ids) {
    if (id < 0 || id >= static_cast<int>(inst.arms.size())) {
      throw std::logic_error("policy chose an arm id out of range");
    }
  }
  const std::size_t m = static_cast<std::size_t>(inst.m_active);
  if (ids.size() != m && !(may_underfill && ids.size() < m)) {
    throw std::logic_error("policy returned the wrong number of arms");
  }
  return ids;
}

// Pick the m ids with the largest scores, ties to the lowest id.
std::vector<int> top_m(const std::vector<double>& score, int m) {
  std::vector<int> ids(score.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int i, int j) {
    if (score[static_cast<std::size_t>(i)] != score[static_cast<std::size_t>(j)]) {
      return score[static_cast<std::size_t>(i)] > score[static_cast<std::size_t>(j)];
    }
    return i < j;
  });
  ids.resize(static_cast<std::size_t>(m));
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Any policy's stage-t variance obeys x_{i,t} <= x0_i + t, so the cost of
// every step beyond the horizon is bounded by the same expression: a shared,
// policy-independent tail.
double shared_tail_bound(const BanditInstance& inst) {
  const double beta = inst.beta;
  const int T = inst.horizon;
  double wsum = 0.0, wx = 0.0;
  for (std::size_t i = 0; i < inst.arms.size(); ++i) {
    wsum += inst.arms[i].weight;
    wx += inst.arms[i].weight * (inst.x0[i] + static_cast<double>(T));
  }
  std::vector<double> costs;
  costs.reserve(inst.arms.size());
  for (const ArmParams<double>& arm : inst.arms) costs.push_back(arm.cost);
  std::sort(costs.rbegin(), costs.rend());
  double hm = 0.0;
  for (int j = 0; j < inst.m_active && j < static_cast<int>(costs.size()); ++j) {
    hm += costs[static_cast<std::size_t>(j)];
  }
  const double bT = std::pow(beta, static_cast<double>(T));
  return bT * ((wx + hm) / (1.0 - beta) + wsum * beta / ((1.0 - beta) * (1.0 - beta)));
}

SimResult run_fixed_sequence(const BanditInstance& inst,
                             const std::vector<std::vector<int>>& actions,
                             const std::string& name) {
  SimResult res;
  res.policy_name = name;
  res.tail_bound = shared_tail_bound(inst);
  std::vector<double> x = inst.x0;
  double bt = 1.0;
  for (int t = 0; t < inst.horizon; ++t) {
    const std::vector<int>& ids = actions[static_cast<std::size_t>(t)];
    res.variance_log.push_back(x);
    res.action_log.push_back(ids);
    res.discounted_cost += bt * stage_cost(inst, x, ids);
    std::vector<char> active(inst.arms.size(), 0);
    for (int id : ids) active[static_cast<std::size_t>(id)] = 1;
    for (std::size_t i = 0; i < inst.arms.size(); ++i) {
      x[i] = variance_step(x[i], active[i], inst.arms[i]);
    }
    bt *= inst.beta;
  }
  return res;
}

}  // namespace

void validate(const BanditInstance& inst) {
  if (inst.arms.empty()) throw std::invalid_argument("instance needs at least one arm");
  if (inst.x0.size() != inst.arms.size()) {
    throw std::invalid_argument("x0 must have one entry per arm");
  }
  if (!(inst.beta > 0.0 && inst.beta < 1.0)) {
    throw std::invalid_argument("discount beta must lie in (0,1)");
  }
  if (inst.horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (inst.m_active < 1 || inst.m_active > static_cast<int>(inst.arms.size())) {
    throw std::invalid_argument("m_active must lie in [1, N]");
  }
  for (const ArmParams<double>& arm : inst.arms) {
    validate(arm);
    if (arm.beta != inst.beta) {
      throw std::invalid_argument("all arms must share the instance discount");
    }
    if (!(arm.cost >= 0.0)) {
      throw std::invalid_argument("multi-arm observation costs must be nonnegative");
    }
  }
  for (double x : inst.x0) {
    if (!(x >= 0.0)) throw std::invalid_argument("initial variances must be nonnegative");
  }
}

double variance_step(double x, int active, const ArmParams<double>& arm) {
  return phi_apply(active ? 1 : 0, x, arm);
}

double stage_cost(const BanditInstance& inst, const std::vector<double>& x,
                  const std::vector<int>& ids) {
  double stage = 0.0;
  for (std::size_t i = 0; i < inst.arms.size(); ++i) stage += inst.arms[i].weight * x[i];
  for (int id : ids) stage += inst.arms[static_cast<std::size_t>(id)].cost;
  return stage;
}

SimResult simulate_policy(const BanditInstance& inst, const Policy& policy) {
  validate(inst);
  SimResult res;
  res.policy_name = policy.name;
  res.tail_bound = shared_tail_bound(inst);
  std::vector<double> x = inst.x0;
  double bt = 1.0;
  for (int t = 0; t < inst.horizon; ++t) {
    const std::vector<int> ids =
        validated_actions(policy.choose(t, x, inst), inst, policy.may_underfill);
    res.variance_log.push_back(x);
    res.action_log.push_back(ids);
    res.discounted_cost += bt * stage_cost(inst, x, ids);
    std::vector<char> active(inst.arms.size(), 0);
    for (int id : ids) active[static_cast<std::size_t>(id)] = 1;
    for (std::size_t i = 0; i < inst.arms.size(); ++i) {
      x[i] = variance_step(x[i], active[i], inst.arms[i]);
    }
    bt *= inst.beta;
  }
  return res;
}

std::vector<int> whittle_policy_action(const std::vector<double>& x, const BanditInstance& inst) {
  std::vector<double> score;
  score.reserve(inst.arms.size());
  for (std::size_t i = 0; i < inst.arms.size(); ++i) {
    score.push_back(whittle_index(x[i], inst.arms[i]).lambda);
  }
  return top_m(score, inst.m_active);
}

Policy whittle_policy() {
  Policy p;
  p.name = "whittle";
  p.choose = [](int, const std::vector<double>& x, const BanditInstance& inst) {
    return whittle_policy_action(x, inst);
  };
  return p;
}

std::vector<Policy> baseline_policies(std::uint64_t random_seed) {
  std::vector<Policy> out;
  {
    Policy p;
    p.name = "myopic";
    p.choose = [](int, const std::vector<double>& x, const BanditInstance& inst) {
      std::vector<double> score;
      score.reserve(inst.arms.size());
      for (std::size_t i = 0; i < inst.arms.size(); ++i) {
        const ArmParams<double>& arm = inst.arms[i];
        score.push_back(arm.weight * (phi_apply(0, x[i], arm) - phi_apply(1, x[i], arm)) -
                        arm.cost);
      }
      return top_m(score, inst.m_active);
    };
    out.push_back(std::move(p));
  }
  {
    Policy p;
    p.name = "round_robin";
    p.choose = [](int t, const std::vector<double>&, const BanditInstance& inst) {
      const int N = static_cast<int>(inst.arms.size());
      std::vector<int> ids;
      ids.reserve(static_cast<std::size_t>(inst.m_active));
      for (int j = 0; j < inst.m_active; ++j) {
        ids.push_back(((t * inst.m_active + j) % N + N) % N);
      }
      std::sort(ids.begin(), ids.end());
      return ids;
    };
    out.push_back(std::move(p));
  }
  {
    Policy p;
    p.name = "random";
    // One engine per simulation run would leak state across runs through
    // the shared lambda; reseed from (seed, t) instead so every step and
    // every run is reproducible in isolation.
    p.choose = [random_seed](int t, const std::vector<double>&, const BanditInstance& inst) {
      std::mt19937_64 rng(random_seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(t) + 1)));
      std::vector<int> ids(inst.arms.size());
      std::iota(ids.begin(), ids.end(), 0);
      for (int j = 0; j < inst.m_active; ++j) {
        const std::size_t pick =
            static_cast<std::size_t>(j) +
            static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(ids.size() - static_cast<std::size_t>(j)));
        std::swap(ids[static_cast<std::size_t>(j)], ids[pick]);
      }
      ids.resize(static_cast<std::size_t>(inst.m_active));
      std::sort(ids.begin(), ids.end());
      return ids;
    };
    out.push_back(std::move(p));
  }
  {
    Policy p;
    p.name = "never_observe";
    p.may_underfill = true;
    p.choose = [](int, const std::vector<double>&, const BanditInstance&) {
      return std::vector<int>{};
    };
    out.push_back(std::move(p));
  }
  return out;
}

SimResult brute_force_optimal(const BanditInstance& inst, std::size_t max_sequences) {
  validate(inst);
  const int N = static_cast<int>(inst.arms.size());
  const int m = inst.m_active;

  // All C(N, m) action sets, lexicographic.
  std::vector<std::vector<int>> combos;
  std::vector<int> cur(static_cast<std::size_t>(m));
  std::iota(cur.begin(), cur.end(), 0);
  while (true) {
    combos.push_back(cur);
    int j = m - 1;
    while (j >= 0 && cur[static_cast<std::size_t>(j)] == N - m + j) --j;
    if (j < 0) break;
    ++cur[static_cast<std::size_t>(j)];
    for (int k = j + 1; k < m; ++k) {
      cur[static_cast<std::size_t>(k)] = cur[static_cast<std::size_t>(k - 1)] + 1;
    }
  }
  const double total = std::pow(static_cast<double>(combos.size()),
                                static_cast<double>(inst.horizon));
  if (!(total <= static_cast<double>(max_sequences))) {
    throw resource_error("brute force sequence count exceeds the budget");
  }

  std::vector<std::size_t> choice(static_cast<std::size_t>(inst.horizon), 0);
  std::vector<std::size_t> best_choice;
  double best_cost = std::numeric_limits<double>::infinity();

  // Depth-first over the sequence tree; stage costs are nonnegative, so a
  // partial cost already at best_cost cannot improve.
  struct Frame {
    std::vector<double> x;
    double cost;
  };
  std::vector<Frame> stack(static_cast<std::size_t>(inst.horizon) + 1);
  stack[0].x = inst.x0;
  stack[0].cost = 0.0;

  std::function<void(int, double)> dfs = [&](int t, double bt) {
    if (t == inst.horizon) {
      if (stack[static_cast<std::size_t>(t)].cost < best_cost) {
        best_cost = stack[static_cast<std::size_t>(t)].cost;
        best_choice = choice;
      }
      return;
    }
    const Frame& f = stack[static_cast<std::size_t>(t)];
    if (f.cost >= best_cost) return;
    for (std::size_t c = 0; c < combos.size(); ++c) {
      choice[static_cast<std::size_t>(t)] = c;
      Frame& g = stack[static_cast<std::size_t>(t) + 1];
      g.cost = f.cost + bt * stage_cost(inst, f.x, combos[c]);
      g.x = f.x;
      std::vector<char> active(inst.arms.size(), 0);
      for (int id : combos[c]) active[static_cast<std::size_t>(id)] = 1;
      for (std::size_t i = 0; i < inst.arms.size(); ++i) {
        g.x[i] = variance_step(g.x[i], active[i], inst.arms[i]);
      }
      dfs(t + 1, bt * inst.beta);
    }
  };
  dfs(0, 1.0);

  std::vector<std::vector<int>> actions;
  actions.reserve(best_choice.size());
  for (std::size_t c : best_choice) actions.push_back(combos[c]);
  return run_fixed_sequence(inst, actions, "brute_force");
}

KalmanTrace kalman_trace(const BanditInstance& inst, const Policy& policy, std::uint64_t seed) {
  validate(inst);
  const std::size_t N = inst.arms.size();
  KalmanTrace tr;
  tr.seed = seed;
  tr.policy_name = policy.name;
  std::mt19937_64 rng(seed);

  std::vector<double> z(N), zhat(N, 0.0), x = inst.x0;
  for (std::size_t i = 0; i < N; ++i) {
    z[i] = std::sqrt(std::max(inst.x0[i], 0.0)) * det_gauss(rng);
  }
  tr.z.push_back(z);
  tr.zhat.push_back(zhat);
  tr.x.push_back(x);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int t = 0; t < inst.horizon; ++t) {
    const std::vector<int> ids =
        validated_actions(policy.choose(t, x, inst), inst, policy.may_underfill);
    tr.actions.push_back(ids);
    std::vector<char> active(N, 0);
    for (int id : ids) active[static_cast<std::size_t>(id)] = 1;

    for (std::size_t i = 0; i < N; ++i) z[i] += det_gauss(rng);

    std::vector<double> y(N, nan);
    for (std::size_t i = 0; i < N; ++i) {
      const double c = active[i] ? inst.arms[i].b : inst.arms[i].a;
      if (c > 0.0) y[i] = z[i] + det_gauss(rng) / std::sqrt(c);
    }

    for (std::size_t i = 0; i < N; ++i) {
      const double c = active[i] ? inst.arms[i].b : inst.arms[i].a;
      const double prior_var = x[i] + 1.0;
      const double post_var = phi_apply(active[i] ? 1 : 0, x[i], inst.arms[i]);
      zhat[i] = c > 0.0 ? post_var * (zhat[i] / prior_var + c * y[i]) : zhat[i];
      x[i] = post_var;
    }
    tr.z.push_back(z);
    tr.y.push_back(y);
    tr.zhat.push_back(zhat);
    tr.x.push_back(x);
  }
  return tr;
}

}  // namespace whittlekf
