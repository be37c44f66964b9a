#pragma once

//---------------------------------------------------------------------------
// Kalman-filter variance maps as Moebius transformations.
//
// One step of the scalar predict-update recursion with observation
// precision c sends the variance x to (x + 1) / (c x + c + 1). The passive
// map phi_0 uses precision a, the active map phi_1 precision b, 0 <= a < b.
// In homogeneous coordinates these are
//     F = [1 1; a 1+a],   G = [1 1; b 1+b],
// both of determinant 1, and a word w = w_1 ... w_n acts by the ordered
// product M(w) = M(w_n) ... M(w_1), so phi_w = mu_{M(w)} applies w_1 first.
// All identities here hold for any scalar field; float instantiations add
// overflow checks, exact-rational ones stay exact.
//---------------------------------------------------------------------------

#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>

#include <Eigen/Core>

#include "whittlekf/errors.hpp"
#include "whittlekf/words.hpp"

namespace whittlekf {

template <class Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

// One arm of the bandit: observation precisions a (passive) and b (active),
// holding weight on the variance, cost per activation, discount beta.
template <class Scalar>
struct ArmParams {
  Scalar a = Scalar(0);
  Scalar b = Scalar(1);
  Scalar weight = Scalar(1);
  Scalar cost = Scalar(0);
  Scalar beta = Scalar(1) / Scalar(2);
};

template <class Scalar>
void validate(const ArmParams<Scalar>& p) {
  if (!(p.a >= Scalar(0)) || !(p.a < p.b)) {
    throw std::invalid_argument("arm precisions must satisfy 0 <= a < b");
  }
  if (!(p.weight > Scalar(0))) throw std::invalid_argument("arm weight must be positive");
  if (!(p.beta > Scalar(0)) || !(p.beta < Scalar(1))) {
    throw std::invalid_argument("discount beta must lie in (0,1)");
  }
}

template <class Scalar>
Mat2<Scalar> mat_F(const ArmParams<Scalar>& p) {
  Mat2<Scalar> m;
  m << Scalar(1), Scalar(1), p.a, Scalar(1) + p.a;
  return m;
}

template <class Scalar>
Mat2<Scalar> mat_G(const ArmParams<Scalar>& p) {
  Mat2<Scalar> m;
  m << Scalar(1), Scalar(1), p.b, Scalar(1) + p.b;
  return m;
}

// GF - FG = (b - a) K and G - F = (b - a) E.
template <class Scalar>
Mat2<Scalar> mat_K() {
  Mat2<Scalar> m;
  m << Scalar(-1), Scalar(-1), Scalar(0), Scalar(1);
  return m;
}

template <class Scalar>
Mat2<Scalar> mat_E() {
  Mat2<Scalar> m;
  m << Scalar(0), Scalar(0), Scalar(1), Scalar(1);
  return m;
}

template <class Scalar>
Mat2<Scalar> letter_matrix(int letter, const ArmParams<Scalar>& p) {
  return letter ? mat_G(p) : mat_F(p);
}

namespace detail {

template <class Scalar>
bool entries_finite(const Mat2<Scalar>& m) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return std::isfinite(m(0, 0)) && std::isfinite(m(0, 1)) && std::isfinite(m(1, 0)) &&
           std::isfinite(m(1, 1));
  } else {
    (void)m;
    return true;
  }
}

}  // namespace detail

// phi_c(x) for a single letter. The maps are only meaningful on x >= 0.
template <class Scalar>
Scalar phi_apply(int letter, const Scalar& x, const ArmParams<Scalar>& p) {
  if (!(x >= Scalar(0))) throw std::invalid_argument("variance must be nonnegative");
  const Scalar c = letter ? p.b : p.a;
  return (x + Scalar(1)) / (c * x + c + Scalar(1));
}

// phi_w(x): leftmost letter of w acts first.
template <class Scalar>
Scalar phi_word(const Word& w, Scalar x, const ArmParams<Scalar>& p) {
  for (std::size_t i = 0; i < w.size(); ++i) x = phi_apply(w[i], x, p);
  return x;
}

// M(w) = M(w_n) ... M(w_1). Entries are nonnegative with unit determinant;
// float overflow (any non-finite entry) throws resource_error.
template <class Scalar>
Mat2<Scalar> matrix_of_word(const Word& w, const ArmParams<Scalar>& p) {
  Mat2<Scalar> m = Mat2<Scalar>::Identity();
  const Mat2<Scalar> F = mat_F(p);
  const Mat2<Scalar> G = mat_G(p);
  for (std::size_t i = 0; i < w.size(); ++i) {
    m = ((w[i] ? G : F) * m).eval();
    if (!detail::entries_finite(m)) {
      throw resource_error("matrix_of_word overflow at prefix length " + std::to_string(i + 1));
    }
  }
  return m;
}

// S(w) = sum_{k=1}^{|w|} M(w_1 ... w_k); S(empty) = 0.
template <class Scalar>
Mat2<Scalar> prefix_sum_matrix(const Word& w, const ArmParams<Scalar>& p) {
  Mat2<Scalar> m = Mat2<Scalar>::Identity();
  Mat2<Scalar> s = Mat2<Scalar>::Zero();
  const Mat2<Scalar> F = mat_F(p);
  const Mat2<Scalar> G = mat_G(p);
  for (std::size_t i = 0; i < w.size(); ++i) {
    m = ((w[i] ? G : F) * m).eval();
    if (!detail::entries_finite(m)) {
      throw resource_error("prefix_sum_matrix overflow at prefix length " + std::to_string(i + 1));
    }
    s += m;
  }
  return s;
}

// mu_A(x) = (A11 x + A12) / (A21 x + A22).
template <class Scalar>
Scalar mobius_apply(const Mat2<Scalar>& A, const Scalar& x) {
  const Scalar den = A(1, 0) * x + A(1, 1);
  if (den == Scalar(0)) throw singularity_error("moebius denominator vanishes");
  return (A(0, 0) * x + A(0, 1)) / den;
}

// d/dx mu_A(x) = det(A) / (A21 x + A22)^2.
template <class Scalar>
Scalar mobius_derivative(const Mat2<Scalar>& A, const Scalar& x) {
  const Scalar den = A(1, 0) * x + A(1, 1);
  if (den == Scalar(0)) throw singularity_error("moebius denominator vanishes");
  return (A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0)) / (den * den);
}

// phi_w(0) = M(w)_{12} / M(w)_{22}; exact in rational arithmetic.
template <class Scalar>
Scalar phi_zero_of_word(const Word& w, const ArmParams<Scalar>& p) {
  const Mat2<Scalar> m = matrix_of_word(w, p);
  return m(0, 1) / m(1, 1);
}

struct FixedPoint {
  Word word;
  double value = 0.0;  // +infinity for the escaping case (all-passive, a = 0)
  bool finite = true;
};

// Unique fixed point of phi_w on [0, +inf] for nonempty w, from
// m21 y^2 + (m22 - m11) y - m12 = 0 evaluated in the conjugate form that
// avoids cancellation. m21 = 0 happens only for w = 0^n with a = 0, where
// the orbit escapes and the fixed point is +infinity.
FixedPoint fixed_point_of_matrix(const Word& w, const Mat2<double>& m);

inline FixedPoint fixed_point(const Word& w, const ArmParams<double>& p) {
  if (w.empty()) throw std::invalid_argument("fixed point needs a nonempty word");
  return fixed_point_of_matrix(w, matrix_of_word(w, p));
}

inline FixedPoint fixed_point_of_matrix(const Word& w, const Mat2<double>& m) {
  FixedPoint fp;
  fp.word = w;
  const double m11 = m(0, 0), m12 = m(0, 1), m21 = m(1, 0), m22 = m(1, 1);
  if (m21 == 0.0) {
    fp.finite = false;
    fp.value = std::numeric_limits<double>::infinity();
    return fp;
  }
  const double s = m22 - m11;
  const double disc = s * s + 4.0 * m21 * m12;
  const double root = std::sqrt(disc);
  fp.value = (s >= 0.0) ? (2.0 * m12) / (s + root) : (-s + root) / (2.0 * m21);
  return fp;
}

}  // namespace whittlekf
