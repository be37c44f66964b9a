#include "whittlekf/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "whittlekf/errors.hpp"

namespace whittlekf {

namespace {

// Every state of a threshold orbit started at x0 with threshold theta stays
// in (0, B]: a passive step fires only from a state <= theta, an active step
// never raises a state above max(state, y1).
double orbit_state_bound(double x0, double theta, const ArmParams<double>& params) {
  const double y1 = fixed_point(Word::one(), params).value;
  return std::max({x0, theta, y1}) + 1.0;
}

// Smallest T with beta^T * scale <= tol; clamped to [t_min, t_max].
int horizon_for(double beta, double scale, double tol, int t_min = 8,
                int t_max = 1 << 22) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  double t = std::log(tol / scale) / std::log(beta);
  if (!std::isfinite(t)) t = t_min;
  const int T = static_cast<int>(std::ceil(std::max(t, 0.0))) + 1;
  if (T > t_max) {
    throw conditioning_error("requested tolerance needs an impractical horizon");
  }
  return std::max(T, t_min);
}

Word interior_of(const Word& c) {
  if (c.size() < 2) return Word();
  return Word(c.str().substr(1, c.size() - 2));
}

// Letter streams of the coupled orbits for a classified word: the upper
// orbit plays (01w)^omega, the lower (10w)^omega; the boundary words keep
// the same pattern around their first letter, with the tail pinned to the
// word itself ("1": 0 1^omega vs 1^omega; "0": 0^omega vs 1 0^omega).
std::pair<OmegaWord, OmegaWord> classified_streams(const Word& word) {
  if (word == Word::one()) {
    return {OmegaWord(Word::zero(), Word::one()), OmegaWord(Word(), Word::one())};
  }
  if (word == Word::zero()) {
    return {OmegaWord(Word(), Word::zero()), OmegaWord(Word::one(), Word::zero())};
  }
  const Word w = interior_of(word);
  return {OmegaWord(Word(), Word("01") + w), OmegaWord(Word(), Word("10") + w)};
}

}  // namespace

const char* to_string(IndexMethod m) {
  switch (m) {
    case IndexMethod::series: return "series";
    case IndexMethod::closed: return "closed";
    case IndexMethod::bracketed: return "bracketed";
  }
  return "unknown";
}

IndexPoint whittle_index_series(double x, const ArmParams<double>& params, double tol) {
  validate(params);
  if (!(x >= 0.0)) throw std::invalid_argument("threshold must be nonnegative");
  const double beta = params.beta;
  const double B = orbit_state_bound(x, x, params);

  // A priori horizon: numerator tail beta^{T+1} B / (1-beta), denominator
  // tail beta^{T+1} / (1-beta), denominator itself >= 1 - beta. Split tol
  // between the two contributions through the quotient rule.
  const double scale =
      params.weight * (B + B / (1.0 - beta)) / ((1.0 - beta) * (1.0 - beta)) * beta;
  const int T = horizon_for(beta, scale, tol * 0.5);

  const OrbitPair op = orbit_pair(x, params, T);
  double N = 0.0, D = 0.0, bt = 1.0;
  for (int t = 0; t < T; ++t) {
    D += bt * static_cast<double>(op.lower_actions[static_cast<std::size_t>(t)] -
                                  op.upper_actions[static_cast<std::size_t>(t)]);
    bt *= beta;
    N += bt * (op.upper_states[static_cast<std::size_t>(t) + 1] -
               op.lower_states[static_cast<std::size_t>(t) + 1]);
  }
  // bt == beta^T here; posterior error bound through the quotient rule.
  const double tail_N = bt * beta * B / (1.0 - beta);
  const double tail_D = bt / (1.0 - beta);
  const double D_floor = D - tail_D;
  if (!(D_floor > 0.0)) {
    throw conditioning_error("denominator partial sum below its conditioning floor");
  }
  const double lambda = params.weight * N / D - params.cost;
  const double bound =
      params.weight * (tail_N + std::abs(N / D) * tail_D) / D_floor;

  IndexPoint pt;
  pt.x = x;
  pt.lambda = lambda;
  pt.method = IndexMethod::series;
  pt.trunc_error_bound = bound;
  const ThresholdClassification cls = threshold_word_by_orbit(x, params);
  if (cls.conclusive) pt.word = cls.word;
  return pt;
}

IndexPoint whittle_index_closed(double x, const ThresholdClassification& cls,
                                const ArmParams<double>& params, double tol) {
  validate(params);
  if (!cls.conclusive) {
    throw std::invalid_argument("closed form needs a conclusive classification");
  }
  if (!(x >= 0.0)) throw std::invalid_argument("threshold must be nonnegative");
  const double beta = params.beta;
  const std::size_t m = cls.period;
  // Exact denominator of the classified threshold: D = (1-beta)/(1-beta^m).
  const double prefactor = (1.0 - std::pow(beta, static_cast<double>(m))) / (1.0 - beta);

  const double B = orbit_state_bound(x, x, params);
  const double scale = params.weight * prefactor * beta * B / (1.0 - beta);
  const int T = horizon_for(beta, scale, tol, std::max<int>(8, static_cast<int>(3 * m)));

  auto [upper, lower] = classified_streams(cls.word);
  double xu = x, xl = x;
  double N = 0.0, bt = 1.0;
  for (int t = 0; t < T; ++t) {
    xu = phi_apply(upper.letter(static_cast<std::size_t>(t)), xu, params);
    xl = phi_apply(lower.letter(static_cast<std::size_t>(t)), xl, params);
    bt *= beta;
    N += bt * (xu - xl);
  }
  const double tail = params.weight * prefactor * bt * beta * B / (1.0 - beta);

  IndexPoint pt;
  pt.x = x;
  pt.lambda = params.weight * prefactor * N - params.cost;
  pt.word = cls.word;
  pt.method = IndexMethod::closed;
  pt.trunc_error_bound = tail;
  return pt;
}

IndexPoint whittle_index(double x, const ArmParams<double>& params, double tol) {
  const ThresholdClassification cls = threshold_word_by_tree(x, params);
  if (cls.conclusive) return whittle_index_closed(x, cls, params, tol);
  if (!std::isfinite(cls.hi_endpoint)) {
    // Unbounded upper bracket (deep never-observe-side descent with a = 0):
    // the series needs no classification at all.
    return whittle_index_series(x, params, tol);
  }
  // The index is nondecreasing, so its values at the neighbouring interval
  // endpoints bracket lambda(x).
  const ThresholdClassification lo_cls =
      classification_of_word(cls.lo_endpoint, cls.bracket_lo, params);
  const ThresholdClassification hi_cls =
      classification_of_word(cls.hi_endpoint, cls.bracket_hi, params);
  const IndexPoint lo = whittle_index_closed(cls.lo_endpoint, lo_cls, params, tol);
  const IndexPoint hi = whittle_index_closed(cls.hi_endpoint, hi_cls, params, tol);
  IndexPoint pt;
  pt.x = x;
  pt.lambda = 0.5 * (lo.lambda + hi.lambda);
  pt.word = cls.word;
  pt.method = IndexMethod::bracketed;
  pt.trunc_error_bound = 0.5 * (hi.lambda - lo.lambda) +
                         std::max(lo.trunc_error_bound, hi.trunc_error_bound);
  return pt;
}

IndexCurve index_curve(const ArmParams<double>& params, const std::vector<double>& grid,
                       double tol) {
  validate(params);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw std::invalid_argument("index grid must be strictly increasing");
    }
  }
  IndexCurve curve;
  curve.points.reserve(grid.size());
  ThresholdClassification cached;
  bool have_cached = false;
  for (double x : grid) {
    if (have_cached && cached.conclusive && x >= cached.interval_lo &&
        x <= cached.interval_hi) {
      curve.points.push_back(whittle_index_closed(x, cached, params, tol));
      continue;
    }
    const ThresholdClassification cls = threshold_word_by_tree(x, params);
    if (cls.conclusive) {
      cached = cls;
      have_cached = true;
      curve.points.push_back(whittle_index_closed(x, cls, params, tol));
    } else {
      curve.points.push_back(whittle_index(x, params, tol));
    }
  }
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const IndexPoint& a = curve.points[i];
    const IndexPoint& b = curve.points[i + 1];
    if (b.lambda < a.lambda - (a.trunc_error_bound + b.trunc_error_bound)) {
      curve.monotone_within_bounds = false;
      curve.violation_indices.push_back(i);
    }
  }
  return curve;
}

CostResult single_arm_cost(const SingleArmProblem& problem, int first_action, int T) {
  validate(problem.params);
  if (first_action != 0 && first_action != 1) {
    throw std::invalid_argument("first action must be 0 or 1");
  }
  if (!(problem.x0 >= 0.0) || !(problem.threshold >= 0.0)) {
    throw std::invalid_argument("initial variance and threshold must be nonnegative");
  }
  if (T < 1) throw std::invalid_argument("cost horizon must be positive");
  const ArmParams<double>& p = problem.params;
  const double charge = p.cost + problem.nu;

  double cost = 0.0, bt = 1.0, xt = problem.x0;
  for (int t = 0; t < T; ++t) {
    int act;
    if (t == 0) {
      act = first_action;
    } else {
      // Tie at the threshold follows the first action's disposition.
      act = first_action == 1 ? (xt >= problem.threshold ? 1 : 0)
                              : (xt > problem.threshold ? 1 : 0);
    }
    cost += bt * (charge * act + p.weight * xt);
    xt = phi_apply(act, xt, p);
    bt *= p.beta;
  }
  const double B = orbit_state_bound(problem.x0, problem.threshold, p);
  CostResult r;
  r.cost = cost;
  r.tail_bound = bt * (std::abs(charge) + p.weight * B) / (1.0 - p.beta);
  return r;
}

AmbivalenceResult ambivalence_check(double x, const ArmParams<double>& params, double tol) {
  validate(params);
  const IndexPoint idx = whittle_index(x, params, std::min(tol * 1e-3, 1e-9));

  SingleArmProblem problem;
  problem.params = params;
  problem.nu = idx.lambda;
  problem.x0 = x;
  problem.threshold = x;

  const double B = orbit_state_bound(x, x, params);
  const double scale =
      (std::abs(params.cost + idx.lambda) + params.weight * B) / (1.0 - params.beta);
  const int T = horizon_for(params.beta, scale, tol * 0.125);

  const CostResult q0 = single_arm_cost(problem, 0, T);
  const CostResult q1 = single_arm_cost(problem, 1, T);

  AmbivalenceResult r;
  r.x = x;
  r.lambda = idx.lambda;
  r.q_passive = q0.cost;
  r.q_active = q1.cost;
  r.gap = std::abs(q0.cost - q1.cost);
  // An index off by eps shifts the cost gap by at most eps / (1 - beta).
  r.tol_used = tol + q0.tail_bound + q1.tail_bound +
               idx.trunc_error_bound / (1.0 - params.beta);
  r.within_tol = r.gap <= r.tol_used;
  return r;
}

}  // namespace whittlekf
