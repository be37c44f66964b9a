#include "whittlekf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace whittlekf {

MajorisationReport check_weak_supermajorisation(std::vector<double> u, std::vector<double> v,
                                                double slack) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("supermajorisation compares equal-length sequences");
  }
  std::sort(u.begin(), u.end());
  std::sort(v.begin(), v.end());
  MajorisationReport rep;
  rep.holds = true;
  rep.partial_sums.reserve(u.size());
  double run = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    run += u[j] - v[j];
    rep.partial_sums.push_back(run);
    if (run < -slack && rep.holds) {
      rep.holds = false;
      rep.witness_j = j;
    }
  }
  return rep;
}

ClaimResult schur_weighted_sum_check(std::vector<double> u, std::vector<double> v, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("beta must lie in [0,1]");
  }
  for (double z : u) {
    if (!(z > 0.0)) throw std::invalid_argument("entries must be positive");
  }
  for (double z : v) {
    if (!(z > 0.0)) throw std::invalid_argument("entries must be positive");
  }
  const MajorisationReport pre = check_weak_supermajorisation(u, v);
  if (!pre.holds) {
    throw std::invalid_argument("u must weakly supermajorise v");
  }
  std::sort(u.begin(), u.end());
  std::sort(v.begin(), v.end());
  double su = 0.0, sv = 0.0, bi = 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    bi *= beta;
    su += bi / (u[i] * u[i]);
    sv += bi / (v[i] * v[i]);
  }
  // u dominating v in ascending prefix sums pushes the decreasing convex
  // f(z) = 1/z^2 the other way: the u-sum is the smaller one. (Abel
  // summation over the decreasing weights beta^i reduces each prefix to the
  // unweighted comparison on the truncated vectors.)
  ClaimResult r;
  r.name = "schur_weighted_sum";
  r.pass = su <= sv + 1e-10 * std::max(1.0, std::max(su, sv));
  return r;
}

OrbitBlock orbit_block(const Word& w, const ArmParams<double>& params, int n, double x) {
  OrbitBlock blk;
  blk.n = n;
  blk.x = x;
  blk.word = w;
  std::vector<double> sx = block_second_components(Word("10") + w, n, x, params);
  std::vector<double> sy = block_second_components(Word("01") + w, n, x, params);
  blk.sigma_x = std::move(sx);
  blk.sigma_y = std::move(sy);
  return blk;
}

}  // namespace whittlekf
