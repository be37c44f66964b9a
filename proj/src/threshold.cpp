#include "whittlekf/threshold.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "whittlekf/errors.hpp"

namespace whittlekf {

namespace {

// Interior of a Christoffel word c = 0 w 1.
Word interior_of(const Word& c) {
  if (c.size() < 2) return Word();
  return Word(c.str().substr(1, c.size() - 2));
}

// Minimal weak period of s via the KMP failure function: smallest p with
// s[i] == s[i+p] for all valid i.
std::size_t minimal_period(const std::string& s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  std::vector<std::size_t> fail(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t k = fail[i - 1];
    while (k > 0 && s[i] != s[k]) k = fail[k - 1];
    if (s[i] == s[k]) ++k;
    fail[i] = k;
  }
  return n - fail[n - 1];
}

ThresholdClassification boundary_one(double x, const ArmParams<double>& params) {
  ThresholdClassification cls;
  cls.x = x;
  cls.word = Word::one();
  cls.interval_lo = 0.0;
  cls.interval_hi = fixed_point(Word::one(), params).value;
  cls.period = 1;
  cls.is_boundary = true;
  return cls;
}

ThresholdClassification boundary_zero(double x, const ArmParams<double>& params) {
  ThresholdClassification cls;
  cls.x = x;
  cls.word = Word::zero();
  cls.interval_lo = fixed_point(Word::zero(), params).value;
  cls.interval_hi = std::numeric_limits<double>::infinity();
  cls.period = 1;
  cls.is_boundary = true;
  return cls;
}

ThresholdClassification interior_classification(double x, const Word& c, double lo, double hi) {
  ThresholdClassification cls;
  cls.x = x;
  cls.word = c;
  cls.interval_lo = lo;
  cls.interval_hi = hi;
  cls.period = c.size();
  cls.is_boundary = false;
  return cls;
}

ThresholdClassification interior_classification(double x, const Word& c,
                                                const ArmParams<double>& params) {
  const Word w = interior_of(c);
  return interior_classification(x, c, fixed_point(Word("01") + w, params).value,
                                 fixed_point(Word("10") + w, params).value);
}

}  // namespace

ThresholdClassification classification_of_word(double x, const Word& word,
                                               const ArmParams<double>& params) {
  validate(params);
  if (word == Word::one()) return boundary_one(x, params);
  if (word == Word::zero()) return boundary_zero(x, params);
  if (!is_christoffel(word)) throw std::invalid_argument("not a christoffel word");
  return interior_classification(x, word, params);
}

OrbitPair orbit_pair(double x, const ArmParams<double>& params, int T) {
  validate(params);
  if (!(x >= 0.0)) throw std::invalid_argument("threshold must be nonnegative");
  if (T < 0) throw std::invalid_argument("orbit length must be nonnegative");
  OrbitPair op;
  op.x = x;
  op.upper_states.reserve(static_cast<std::size_t>(T) + 1);
  op.lower_states.reserve(static_cast<std::size_t>(T) + 1);
  op.upper_actions.reserve(static_cast<std::size_t>(T));
  op.lower_actions.reserve(static_cast<std::size_t>(T));
  double xu = x, xl = x;
  op.upper_states.push_back(xu);
  op.lower_states.push_back(xl);
  for (int t = 0; t < T; ++t) {
    const int au = xu > x ? 1 : 0;  // passive-start orbit: tie stays passive
    const int al = xl >= x ? 1 : 0; // active-start orbit: tie goes active
    xu = phi_apply(au, xu, params);
    xl = phi_apply(al, xl, params);
    op.upper_actions.push_back(au);
    op.lower_actions.push_back(al);
    op.upper_states.push_back(xu);
    op.lower_states.push_back(xl);
  }
  return op;
}

ThresholdClassification threshold_word_by_orbit(double x, const ArmParams<double>& params,
                                                std::size_t max_len) {
  validate(params);
  if (!(x >= 0.0)) throw std::invalid_argument("threshold must be nonnegative");
  if (max_len < 9) throw std::invalid_argument("max_len too small to certify any period");

  // Active-start action stream; its eventual period names the word.
  std::string s;
  s.reserve(max_len);
  double xt = x;
  for (std::size_t t = 0; t < max_len; ++t) {
    const int act = xt >= x ? 1 : 0;
    s.push_back(act ? '1' : '0');
    xt = phi_apply(act, xt, params);
  }

  // The stream has at most one transient letter: interior thresholds give a
  // periodic stream from t = 0, the never-observe region gives 1 0^omega.
  ThresholdClassification fail;
  fail.x = x;
  fail.conclusive = false;
  for (std::size_t pre = 0; pre <= 1; ++pre) {
    const std::string slice = s.substr(pre);
    const std::size_t m = minimal_period(slice);
    if (m == 0 || slice.size() < 3 * m) continue;  // need three full repetitions
    const Word period(slice.substr(0, m));
    if (period == Word::one()) return boundary_one(x, params);
    if (period == Word::zero()) return boundary_zero(x, params);
    const auto canonical = christoffel_rotation(period);
    if (!canonical) return fail;  // aperiodic stream masquerading; give up
    return interior_classification(x, *canonical, params);
  }
  return fail;
}

ThresholdClassification threshold_word_by_tree(double x, const ArmParams<double>& params,
                                               int max_depth) {
  validate(params);
  if (!(x >= 0.0)) throw std::invalid_argument("threshold must be nonnegative");
  if (max_depth < 0) throw std::invalid_argument("max_depth must be nonnegative");

  const double y1 = fixed_point(Word::one(), params).value;
  if (x <= y1) return boundary_one(x, params);
  const FixedPoint fp0 = fixed_point(Word::zero(), params);
  if (fp0.finite && x >= fp0.value) return boundary_zero(x, params);

  const Mat2<double> F = mat_F(params);
  const Mat2<double> G = mat_G(params);

  // Node state (u, v): A = M(tail(u)), Mu = M(u), B = M(init(v)), Mv = M(v),
  // where tail strips the leading letter and init the trailing one. The node
  // word is c = u v = 0 w 1 with interior w = tail(u) init(v), so
  // M(w) = B * A, M(01w) = M(w) G F, M(10w) = M(w) F G, all O(1) per step.
  Mat2<double> A = Mat2<double>::Identity();
  Mat2<double> Mu = F;
  Mat2<double> B = Mat2<double>::Identity();
  Mat2<double> Mv = G;
  std::string u = "0", v = "1";

  ThresholdClassification cls;
  cls.x = x;
  cls.conclusive = false;
  cls.bracket_lo = Word::one();
  cls.lo_endpoint = y1;
  cls.bracket_hi = Word::zero();
  cls.hi_endpoint = fp0.finite ? fp0.value : std::numeric_limits<double>::infinity();

  for (int depth = 0;; ++depth) {
    const Mat2<double> Mw = B * A;
    const Mat2<double> M01w = Mw * G * F;
    const Mat2<double> M10w = Mw * F * G;
    if (!(std::isfinite(M01w(1, 1)) && std::isfinite(M10w(1, 1)) && std::isfinite(M01w(0, 1)) &&
          std::isfinite(M10w(0, 1)))) {
      break;  // matrix overflow: report the bracket found so far
    }
    const Word c(u + v);
    const Word w = interior_of(c);
    const double lo = fixed_point_of_matrix(Word("01") + w, M01w).value;
    const double hi = fixed_point_of_matrix(Word("10") + w, M10w).value;
    if (x < lo) {
      // Interval sits above x: move toward larger slopes (smaller values),
      // child (uv, v).
      cls.bracket_hi = c;
      cls.hi_endpoint = lo;
      if (depth >= max_depth) break;
      u = u + v;
      A = (Mv * A).eval();
      Mu = (Mv * Mu).eval();
    } else if (x > hi) {
      // Smaller slopes live at larger thresholds, child (u, uv).
      cls.bracket_lo = c;
      cls.lo_endpoint = hi;
      if (depth >= max_depth) break;
      v = u + v;
      B = (B * Mu).eval();
      Mv = (Mv * Mu).eval();
    } else {
      ThresholdClassification found = interior_classification(x, c, lo, hi);
      found.bracket_lo = cls.bracket_lo;
      found.bracket_hi = cls.bracket_hi;
      found.lo_endpoint = cls.lo_endpoint;
      found.hi_endpoint = cls.hi_endpoint;
      return found;
    }
  }
  // Inconclusive: the word is the deepest node reached, the interval is the
  // bracketing gap that contains x.
  cls.word = Word(u + v);
  cls.period = cls.word.size();
  cls.interval_lo = cls.lo_endpoint;
  cls.interval_hi = cls.hi_endpoint;
  return cls;
}

}  // namespace whittlekf
