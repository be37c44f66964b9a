#pragma once

//---------------------------------------------------------------------------
// Numerical certification of the structural matrix identities behind the
// index: palindrome factor claims, prefix-sum identities, block
// majorisation at the word's majorisation point, the Schur-type weighted
// sum comparison, and the boundary degeneracies at variance -1.
//
// Everything is templated on the scalar: float instantiations compare with
// pinned tolerances, exact-rational instantiations compare exactly.
//---------------------------------------------------------------------------

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "whittlekf/moebius.hpp"
#include "whittlekf/words.hpp"

namespace whittlekf {

struct ClaimResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<ClaimResult> claims;

  bool all_pass() const {
    for (const ClaimResult& c : claims) {
      if (!c.pass) return false;
    }
    return true;
  }
  void add(std::string name, bool pass, std::string detail = std::string()) {
    claims.push_back({std::move(name), pass, std::move(detail)});
  }
  void merge(const VerifyReport& other) {
    claims.insert(claims.end(), other.claims.begin(), other.claims.end());
  }
};

// Comparison policy: exact for non-float scalars, pinned tolerances for
// floats (1e-8 relative equality, 1e-9 relative slack on inequalities).
template <class Scalar>
struct VerifyTol {
  static bool eq(const Scalar& a, const Scalar& b) {
    if constexpr (std::is_floating_point_v<Scalar>) {
      const Scalar scale = std::max({Scalar(1), std::abs(a), std::abs(b)});
      return std::abs(a - b) <= Scalar(1e-8) * scale;
    } else {
      return a == b;
    }
  }
  // a <= b up to slack.
  static bool le(const Scalar& a, const Scalar& b) {
    if constexpr (std::is_floating_point_v<Scalar>) {
      const Scalar scale = std::max({Scalar(1), std::abs(a), std::abs(b)});
      return a <= b + Scalar(1e-9) * scale;
    } else {
      return a <= b;
    }
  }
  // a <= b with slack scaled by a caller-supplied magnitude; for comparing
  // accumulated sums whose roundoff tracks the gross size of the summands,
  // not the size of the (possibly cancelled) result.
  static bool le(const Scalar& a, const Scalar& b, const Scalar& scale_hint) {
    if constexpr (std::is_floating_point_v<Scalar>) {
      const Scalar scale = std::max(Scalar(1), std::abs(scale_hint));
      return a <= b + Scalar(1e-9) * scale;
    } else {
      (void)scale_hint;
      return a <= b;
    }
  }
  static bool zero(const Scalar& a, const Scalar& scale_hint) {
    if constexpr (std::is_floating_point_v<Scalar>) {
      const Scalar scale = std::max(Scalar(1), std::abs(scale_hint));
      return std::abs(a) <= Scalar(1e-9) * scale;
    } else {
      (void)scale_hint;
      return a == Scalar(0);
    }
  }
};

// Weak supermajorisation comparison: holds iff the ascending-sorted prefix
// sums of u dominate those of v for every j. partial_sums[j] =
// sum_{i<=j}(u_(i) - v_(i)); witness_j is the first failing prefix.
struct MajorisationReport {
  bool holds = false;
  std::vector<double> partial_sums;
  std::optional<std::size_t> witness_j;
};

MajorisationReport check_weak_supermajorisation(std::vector<double> u, std::vector<double> v,
                                                double slack = 1e-10);

// Weighted Schur-type comparison for f(z) = 1/z^2 (symmetric, convex,
// decreasing on the positive axis): ascending prefix-sum dominance of u
// over v forces sum_i beta^i f(u_(i)) <= sum_i beta^i f(v_(i)), i = 1..m
// over the ascending sort, for every beta in [0,1]. This is the comparison
// that makes the index gradient nonnegative. Throws std::invalid_argument
// unless the precondition holds and all entries are positive.
ClaimResult schur_weighted_sum_check(std::vector<double> u, std::vector<double> v, double beta);

namespace detail {

inline Word rep_word(const Word& w, int k) {
  return w.repeated(static_cast<std::size_t>(k));
}

template <class Scalar>
double to_double_value(const Scalar& s) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return static_cast<double>(s);
  } else {
    return s.template convert_to<double>();
  }
}

template <class Scalar>
ArmParams<double> to_double_params(const ArmParams<Scalar>& p) {
  ArmParams<double> d;
  d.a = to_double_value(p.a);
  d.b = to_double_value(p.b);
  d.weight = to_double_value(p.weight);
  d.cost = to_double_value(p.cost);
  d.beta = to_double_value(p.beta);
  return d;
}

}  // namespace detail

// Structural claims about M(p) for a palindrome p (throws
// std::invalid_argument otherwise), with the alternation words built from
// p checked for every repetition count k = 0..n:
//   1. M(p) = [[(fh+1)/(h+f), f], [(h^2-1)/(h+f), h]] with f = M12, h = M22
//   2. tr M(10p) = tr M(01p)
//   3. M(u) - M(reverse(u)) = lambda K with lambda <= 0,
//      u in { p(10p)^k, (10p)^k 10 }
//   4. [M(p(10p)^k 10 w)]_22 <= [M(p(01p)^k 01 w)]_22 for every prefix w of p
//   5. [M((10p)^k 10 w)]_21 >= [M((01p)^k 01 w)]_21 for every prefix w of p
//   6. [M((10p)^k 1)]_21 >= [M((01p)^k 0)]_21
template <class Scalar>
VerifyReport palindrome_matrix_claims(const Word& p, const ArmParams<Scalar>& params, int n) {
  if (!p.is_palindrome()) throw std::invalid_argument("claims need a palindrome");
  if (n < 0) throw std::invalid_argument("repetition count must be nonnegative");
  validate(params);
  using T = VerifyTol<Scalar>;
  VerifyReport rep;
  const std::string tag = "p=" + (p.empty() ? std::string("eps") : p.str());

  const Mat2<Scalar> P = matrix_of_word(p, params);
  {
    const Scalar f = P(0, 1), h = P(1, 1);
    const bool c11 = T::eq(P(0, 0) * (h + f), f * h + Scalar(1));
    const bool c21 = T::eq(P(1, 0) * (h + f), h * h - Scalar(1));
    rep.add("pal.claim1[" + tag + "]", c11 && c21);
  }
  {
    const Mat2<Scalar> A = matrix_of_word(Word("10") + p, params);
    const Mat2<Scalar> B = matrix_of_word(Word("01") + p, params);
    rep.add("pal.claim2[" + tag + "]", T::eq(A.trace(), B.trace()));
  }

  const Word s10p = Word("10") + p;
  const Word s01p = Word("01") + p;
  for (int k = 0; k <= n; ++k) {
    const std::string ktag = tag + ",k=" + std::to_string(k);
    {
      bool ok = true;
      for (const Word& u :
           {p + detail::rep_word(s10p, k), detail::rep_word(s10p, k) + Word("10")}) {
        const Mat2<Scalar> Mu = matrix_of_word(u, params);
        const Mat2<Scalar> D = Mu - matrix_of_word(u.reversed(), params);
        const Scalar scale = Mu(1, 1);
        ok = ok && T::zero(D(1, 0), scale) && T::zero(D(0, 0) - D(0, 1), scale) &&
             T::zero(D(0, 0) + D(1, 1), scale) && T::le(D(1, 1), Scalar(0));
      }
      rep.add("pal.claim3[" + ktag + "]", ok);
    }
    {
      // Claims 4 and 5, extended letter by letter over the prefixes of p.
      Mat2<Scalar> A4 = matrix_of_word(p + detail::rep_word(s10p, k) + Word("10"), params);
      Mat2<Scalar> B4 = matrix_of_word(p + detail::rep_word(s01p, k) + Word("01"), params);
      Mat2<Scalar> A5 = matrix_of_word(detail::rep_word(s10p, k) + Word("10"), params);
      Mat2<Scalar> B5 = matrix_of_word(detail::rep_word(s01p, k) + Word("01"), params);
      bool ok4 = T::le(A4(1, 1), B4(1, 1));
      bool ok5 = T::le(B5(1, 0), A5(1, 0));
      for (std::size_t i = 0; i < p.size(); ++i) {
        const Mat2<Scalar> L = letter_matrix(p[i], params);
        A4 = (L * A4).eval();
        B4 = (L * B4).eval();
        A5 = (L * A5).eval();
        B5 = (L * B5).eval();
        ok4 = ok4 && T::le(A4(1, 1), B4(1, 1));
        ok5 = ok5 && T::le(B5(1, 0), A5(1, 0));
      }
      rep.add("pal.claim4[" + ktag + "]", ok4);
      rep.add("pal.claim5[" + ktag + "]", ok5);
    }
    {
      const Mat2<Scalar> A = matrix_of_word(detail::rep_word(s10p, k) + Word::one(), params);
      const Mat2<Scalar> B = matrix_of_word(detail::rep_word(s01p, k) + Word::zero(), params);
      rep.add("pal.claim6[" + ktag + "]", T::le(B(1, 0), A(1, 0)));
    }
  }
  return rep;
}

// Prefix-sum identities for a palindrome p:
//   S21(p) = M22(p) - 1,  S22(p) = M12(p) + S21(p),
//   Delta_k = [S(10p) M(p(10p)^k) - S(01p) M(p(01p)^k)]_22 = 0, k = 0..K.
template <class Scalar>
VerifyReport prefix_sum_identities(const Word& p, const ArmParams<Scalar>& params, int K) {
  if (!p.is_palindrome()) throw std::invalid_argument("identities need a palindrome");
  if (K < 0) throw std::invalid_argument("repetition count must be nonnegative");
  validate(params);
  using T = VerifyTol<Scalar>;
  VerifyReport rep;
  const std::string tag = "p=" + (p.empty() ? std::string("eps") : p.str());

  const Mat2<Scalar> M = matrix_of_word(p, params);
  const Mat2<Scalar> S = prefix_sum_matrix(p, params);
  rep.add("sum.s21[" + tag + "]", T::eq(S(1, 0), M(1, 1) - Scalar(1)));
  rep.add("sum.s22[" + tag + "]", T::eq(S(1, 1), M(0, 1) + S(1, 0)));

  const Mat2<Scalar> S10 = prefix_sum_matrix(Word("10") + p, params);
  const Mat2<Scalar> S01 = prefix_sum_matrix(Word("01") + p, params);
  Mat2<Scalar> A = M;  // M(p (10p)^k)
  Mat2<Scalar> B = M;  // M(p (01p)^k)
  const Mat2<Scalar> step10 = matrix_of_word(Word("10"), params);
  const Mat2<Scalar> step01 = matrix_of_word(Word("01"), params);
  for (int k = 0; k <= K; ++k) {
    const Scalar delta = (S10 * A)(1, 1) - (S01 * B)(1, 1);
    const Scalar scale = (S10 * A)(1, 1);
    rep.add("sum.delta[" + tag + ",k=" + std::to_string(k) + "]", T::zero(delta, scale));
    A = (M * step10 * A).eval();  // append 10p on the right of the word
    B = (M * step01 * B).eval();
  }
  return rep;
}

// Homogeneous orbit block of Eq-(9) type: entry k = [M(r^nu r_{1:k}) v(x)]_2
// for k = 1..|r|, r the driving period.
template <class Scalar>
std::vector<Scalar> block_second_components(const Word& r, int nu, const Scalar& x,
                                            const ArmParams<Scalar>& params) {
  std::vector<Scalar> out;
  out.reserve(r.size());
  Mat2<Scalar> M = matrix_of_word(detail::rep_word(r, nu), params);
  for (std::size_t i = 0; i < r.size(); ++i) {
    M = (letter_matrix(r[i], params) * M).eval();
    out.push_back(M(1, 0) * x + M(1, 1));
  }
  return out;
}

struct OrbitBlock {
  int n = 0;
  std::vector<double> sigma_x;  // 10w-driven block
  std::vector<double> sigma_y;  // 01w-driven block
  double x = 0.0;
  Word word;
};

OrbitBlock orbit_block(const Word& w, const ArmParams<double>& params, int n, double x);

// Majorisation structure at the word's majorisation point x* = phi_w(0):
// for each block nu = 0..n the 10w-driven entries ascend, the 01w-driven
// entries ascend, the partial sums T_j = sum_{k<=j}(x_k - y_k) at x* are
// nonnegative with T_m(x*) exactly zero, and at `samples` points x > x*
// the 10w block weakly supermajorises the 01w block. w must be a
// palindrome. A point slightly below x* is reported without assertion.
template <class Scalar>
VerifyReport majorisation_point_check(const Word& w, const ArmParams<Scalar>& params, int n,
                                      int samples) {
  if (!w.is_palindrome()) throw std::invalid_argument("majorisation point needs a palindrome");
  if (n < 0 || samples < 1) throw std::invalid_argument("bad block or sample count");
  validate(params);
  using std::abs;  // unqualified below so the rational overload is found by ADL
  using T = VerifyTol<Scalar>;
  VerifyReport rep;
  const std::string tag = "w=" + (w.empty() ? std::string("eps") : w.str());

  const Scalar xstar = phi_zero_of_word(w, params);
  const Word r10 = Word("10") + w;
  const Word r01 = Word("01") + w;
  const std::size_t m = r10.size();

  for (int nu = 0; nu <= n; ++nu) {
    const std::string btag = tag + ",nu=" + std::to_string(nu);
    const std::vector<Scalar> sx = block_second_components(r10, nu, xstar, params);
    const std::vector<Scalar> sy = block_second_components(r01, nu, xstar, params);

    bool asc = true;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      asc = asc && T::le(sx[k], sx[k + 1]) && T::le(sy[k], sy[k + 1]);
    }
    rep.add("major.ascending[" + btag + "]", asc);

    Scalar run = Scalar(0), gross = Scalar(0);
    bool nonneg = true;
    for (std::size_t k = 0; k < m; ++k) {
      run += sx[k] - sy[k];
      gross += abs(sx[k]) + abs(sy[k]);
      if (!T::le(Scalar(0), run, gross)) nonneg = false;
    }
    rep.add("major.Tj_nonneg[" + btag + "]", nonneg);
    rep.add("major.Tm_zero[" + btag + "]", T::zero(run, gross));

    for (int s = 1; s <= samples; ++s) {
      const Scalar xs = xstar + Scalar(s) * (xstar + Scalar(1)) / Scalar(samples);
      const std::vector<Scalar> ux = block_second_components(r10, nu, xs, params);
      const std::vector<Scalar> uy = block_second_components(r01, nu, xs, params);
      Scalar srun = Scalar(0), sgross = Scalar(0);
      bool hold = true;
      for (std::size_t k = 0; k < m; ++k) {
        srun += ux[k] - uy[k];
        sgross += abs(ux[k]) + abs(uy[k]);
        if (!T::le(Scalar(0), srun, sgross)) hold = false;
      }
      rep.add("major.supermajor[" + btag + ",s=" + std::to_string(s) + "]", hold);
    }
  }

  // Informational: just below x* domination may fail; record, do not assert.
  {
    const Scalar xlo = xstar * Scalar(9) / Scalar(10);
    const std::vector<Scalar> ux = block_second_components(r10, 0, xlo, params);
    const std::vector<Scalar> uy = block_second_components(r01, 0, xlo, params);
    Scalar srun = Scalar(0), sgross = Scalar(0);
    bool hold = true;
    for (std::size_t k = 0; k < m; ++k) {
      srun += ux[k] - uy[k];
      sgross += abs(ux[k]) + abs(uy[k]);
      if (!T::le(Scalar(0), srun, sgross)) hold = false;
    }
    rep.add("major.below_point_info[" + tag + "]", true,
            hold ? "still holds below x*" : "fails below x* (expected)");
  }
  return rep;
}

// Degeneracies at variance -1 and entrywise domination above min(y0, y1):
//   F v(-1) = G v(-1) = v(0),  E v(-1) = 0,
//   (G - F) G^k v(x) >= 0 and (G - F) F^k v(x) >= 0 entrywise,
//   E G^k v(-1) >= E F^k v(-1) >= 0 entrywise, k = 0..K.
template <class Scalar>
VerifyReport boundary_case_check(const ArmParams<Scalar>& params, int K) {
  if (K < 0) throw std::invalid_argument("repetition count must be nonnegative");
  validate(params);
  using T = VerifyTol<Scalar>;
  VerifyReport rep;

  const Mat2<Scalar> F = mat_F(params);
  const Mat2<Scalar> G = mat_G(params);
  const Mat2<Scalar> E = mat_E<Scalar>();
  Vec2<Scalar> vm1, v0;
  vm1 << Scalar(-1), Scalar(1);
  v0 << Scalar(0), Scalar(1);

  {
    const Vec2<Scalar> fv = F * vm1;
    const Vec2<Scalar> gv = G * vm1;
    rep.add("bdry.Fv", T::eq(fv(0), v0(0)) && T::eq(fv(1), v0(1)));
    rep.add("bdry.Gv", T::eq(gv(0), v0(0)) && T::eq(gv(1), v0(1)));
    const Vec2<Scalar> ev = E * vm1;
    rep.add("bdry.Ev", T::zero(ev(0), Scalar(1)) && T::zero(ev(1), Scalar(1)));
  }

  // Sample variances at and above y1 = min(y0, y1); integer-valued samples
  // so exact scalars stay exact.
  const double y1 = fixed_point(Word::one(), detail::to_double_params(params)).value;
  const Scalar xs = Scalar(static_cast<int>(std::ceil(y1)) + 1);
  Vec2<Scalar> vx;
  vx << xs, Scalar(1);

  Mat2<Scalar> Gk = Mat2<Scalar>::Identity();
  Mat2<Scalar> Fk = Mat2<Scalar>::Identity();
  const Mat2<Scalar> GmF = G - F;
  bool dom = true, edom = true;
  for (int k = 0; k <= K; ++k) {
    const Vec2<Scalar> dg = GmF * (Gk * vx);
    const Vec2<Scalar> df = GmF * (Fk * vx);
    dom = dom && T::le(Scalar(0), dg(0)) && T::le(Scalar(0), dg(1)) &&
          T::le(Scalar(0), df(0)) && T::le(Scalar(0), df(1));
    const Vec2<Scalar> eg = E * (Gk * vm1);
    const Vec2<Scalar> ef = E * (Fk * vm1);
    edom = edom && T::le(Scalar(0), ef(0)) && T::le(Scalar(0), ef(1)) &&
           T::le(ef(0), eg(0)) && T::le(ef(1), eg(1));
    Gk = (G * Gk).eval();
    Fk = (F * Fk).eval();
  }
  rep.add("bdry.GF_dominate", dom);
  rep.add("bdry.E_dominate", edom);
  return rep;
}

}  // namespace whittlekf
