#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include "whittlekf/errors.hpp"
#include "whittlekf/moebius.hpp"
#include "whittlekf/rational.hpp"
#include "whittlekf/words.hpp"

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
using whittlekf::Mat2;
using whittlekf::Rational;
using whittlekf::Word;

static bool near(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

static ArmParams<double> params_d(double a, double b, double beta = 0.5) {
  ArmParams<double> p;
  p.a = a;
  p.b = b;
  p.beta = beta;
  return p;
}

static void validation() {
  REQUIRE_THROWS(whittlekf::validate(params_d(1.0, 0.5)), std::invalid_argument);
  REQUIRE_THROWS(whittlekf::validate(params_d(-0.1, 1.0)), std::invalid_argument);
  ArmParams<double> p = params_d(0.0, 1.0);
  p.beta = 1.0;
  REQUIRE_THROWS(whittlekf::validate(p), std::invalid_argument);
  p.beta = 0.5;
  p.weight = 0.0;
  REQUIRE_THROWS(whittlekf::validate(p), std::invalid_argument);
  whittlekf::validate(params_d(0.0, 1.0));  // a = 0 is legal
}

static void frozen_matrices() {
  // Integer parameters keep every double product exact.
  const ArmParams<double> p = params_d(0.0, 1.0);
  const Mat2<double> F = whittlekf::mat_F(p);
  const Mat2<double> G = whittlekf::mat_G(p);
  REQUIRE(F(0, 0) == 1 && F(0, 1) == 1 && F(1, 0) == 0 && F(1, 1) == 1);
  REQUIRE(G(0, 0) == 1 && G(0, 1) == 1 && G(1, 0) == 1 && G(1, 1) == 2);

  // M(w) applies the first letter first: M("01") = G F.
  const Mat2<double> M01 = whittlekf::matrix_of_word(Word("01"), p);
  REQUIRE(M01(0, 0) == 1 && M01(0, 1) == 2 && M01(1, 0) == 1 && M01(1, 1) == 3);
  const Mat2<double> M10 = whittlekf::matrix_of_word(Word("10"), p);
  REQUIRE(M10(0, 0) == 2 && M10(0, 1) == 3 && M10(1, 0) == 1 && M10(1, 1) == 2);

  const Mat2<double> S01 = whittlekf::prefix_sum_matrix(Word("01"), p);
  REQUIRE(S01(0, 0) == 2 && S01(0, 1) == 3 && S01(1, 0) == 1 && S01(1, 1) == 4);
  const Mat2<double> S10 = whittlekf::prefix_sum_matrix(Word("10"), p);
  REQUIRE(S10(0, 0) == 3 && S10(0, 1) == 4 && S10(1, 0) == 2 && S10(1, 1) == 4);
  const Mat2<double> S0 = whittlekf::prefix_sum_matrix(Word(), p);
  REQUIRE(S0(0, 0) == 0 && S0(0, 1) == 0 && S0(1, 0) == 0 && S0(1, 1) == 0);

  REQUIRE(whittlekf::matrix_of_word(Word(), p) == Mat2<double>::Identity());
}

static void commutator_identities() {
  // Dyadic parameters, so GF - FG = (b - a) K and G - F = (b - a) E hold
  // bit for bit in doubles.
  const ArmParams<double> p = params_d(0.25, 1.5);
  const Mat2<double> F = whittlekf::mat_F(p);
  const Mat2<double> G = whittlekf::mat_G(p);
  const Mat2<double> C = G * F - F * G;
  const Mat2<double> K = whittlekf::mat_K<double>();
  const Mat2<double> E = whittlekf::mat_E<double>();
  const double d = p.b - p.a;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      REQUIRE(C(i, j) == d * K(i, j));
      REQUIRE(G(i, j) - F(i, j) == d * E(i, j));
    }
  }
  REQUIRE(whittlekf::letter_matrix(0, p) == F);
  REQUIRE(whittlekf::letter_matrix(1, p) == G);
}

static void exact_rational_layer() {
  ArmParams<Rational> p;
  p.a = Rational(1, 3);
  p.b = Rational(7, 2);
  p.beta = Rational(1, 2);
  const Word w("0110100110");
  const Mat2<Rational> M = whittlekf::matrix_of_word(w, p);
  // det M(w) = 1 exactly, every letter matrix having unit determinant.
  REQUIRE(M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0) == Rational(1));

  // The rational product projects onto the double product.
  ArmParams<double> pd;
  pd.a = 1.0 / 3.0;
  pd.b = 3.5;
  pd.beta = 0.5;
  const Mat2<double> Md = whittlekf::matrix_of_word(w, pd);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      REQUIRE(near(M(i, j).convert_to<double>(), Md(i, j), 1e-12));
    }
  }

  // phi_w(0) exact vs the matrix entries.
  REQUIRE(whittlekf::phi_zero_of_word(w, p) == M(0, 1) / M(1, 1));
  REQUIRE(whittlekf::phi_word(w, Rational(0), p) == M(0, 1) / M(1, 1));
}

static void moebius_maps() {
  const ArmParams<double> p = params_d(0.2, 1.0);
  // Word action equals the matrix action.
  const Word w("010011");
  const Mat2<double> M = whittlekf::matrix_of_word(w, p);
  for (double x : {0.0, 0.5, 1.0, 3.25}) {
    REQUIRE(near(whittlekf::phi_word(w, x, p), whittlekf::mobius_apply(M, x)));
  }
  REQUIRE(near(whittlekf::phi_zero_of_word(w, p), whittlekf::phi_word(w, 0.0, p)));

  // Derivative against a central difference.
  const double h = 1e-6;
  const double fd =
      (whittlekf::mobius_apply(M, 1.0 + h) - whittlekf::mobius_apply(M, 1.0 - h)) / (2 * h);
  REQUIRE(near(whittlekf::mobius_derivative(M, 1.0), fd, 1e-6));

  REQUIRE_THROWS(whittlekf::phi_apply(0, -1.0, p), std::invalid_argument);

  Mat2<double> sing;
  sing << 1.0, 1.0, 1.0, -1.0;
  REQUIRE_THROWS(whittlekf::mobius_apply(sing, 1.0), whittlekf::singularity_error);
  REQUIRE_THROWS(whittlekf::mobius_derivative(sing, 1.0), whittlekf::singularity_error);
}

static void fixed_points() {
  // y_1 for b = 1 solves y^2 + y - 1 = 0.
  const ArmParams<double> p = params_d(0.2, 1.0);
  const whittlekf::FixedPoint y1 = whittlekf::fixed_point(Word::one(), p);
  REQUIRE(y1.finite);
  REQUIRE(near(y1.value, (std::sqrt(5.0) - 1.0) / 2.0));
  // y_0 for a = 0.2 solves a y^2 + a y - 1 = 0.
  const whittlekf::FixedPoint y0 = whittlekf::fixed_point(Word::zero(), p);
  REQUIRE(near(y0.value, (-0.2 + std::sqrt(0.04 + 0.8)) / 0.4));

  // Escape: all-passive word with a = 0 has no finite fixed point.
  const whittlekf::FixedPoint esc = whittlekf::fixed_point(Word("00"), params_d(0.0, 1.0));
  REQUIRE(!esc.finite);
  REQUIRE(std::isinf(esc.value));

  // Fixed points are fixed, stable, and rotate with the word.
  for (const char* ws : {"01", "001", "01011", "0010100101"}) {
    const Word w(ws);
    const whittlekf::FixedPoint fp = whittlekf::fixed_point(w, p);
    REQUIRE(near(whittlekf::phi_word(w, fp.value, p), fp.value, 1e-10));
    const Mat2<double> M = whittlekf::matrix_of_word(w, p);
    REQUIRE(std::abs(whittlekf::mobius_derivative(M, fp.value)) < 1.0);
    for (std::size_t k = 1; k < w.size(); ++k) {
      const double rotated = whittlekf::phi_word(w.prefix(k), fp.value, p);
      const whittlekf::FixedPoint fr = whittlekf::fixed_point(w.rotated(k), p);
      REQUIRE(near(rotated, fr.value, 1e-10));
    }
  }
  // The "01" and "10" fixed points are each other's images.
  const double a01 = whittlekf::fixed_point(Word("01"), p).value;
  const double a10 = whittlekf::fixed_point(Word("10"), p).value;
  REQUIRE(near(whittlekf::phi_apply(0, a01, p), a10));
  REQUIRE(near(whittlekf::phi_apply(1, a10, p), a01));
  REQUIRE(a01 < a10);

  REQUIRE_THROWS(whittlekf::fixed_point(Word(), p), std::invalid_argument);
}

static void overflow_guard() {
  ArmParams<double> p = params_d(0.0, 1e6);
  const Word long_ones = Word("1").repeated(100);
  REQUIRE_THROWS(whittlekf::matrix_of_word(long_ones, p), whittlekf::resource_error);
  REQUIRE_THROWS(whittlekf::prefix_sum_matrix(long_ones, p), whittlekf::resource_error);
}

int main() {
  validation();
  frozen_matrices();
  commutator_identities();
  exact_rational_layer();
  moebius_maps();
  fixed_points();
  overflow_guard();
  std::cout << "test_moebius: all checks passed\n";
  return 0;
}
