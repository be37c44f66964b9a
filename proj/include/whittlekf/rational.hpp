#pragma once

// Exact-rational scalar used by the verification suite. The Eigen interop
// header supplies NumTraits so Mat2<Rational> products work unchanged.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace whittlekf {

using Rational = boost::multiprecision::cpp_rational;

}  // namespace whittlekf

// Overload resolution of matrix products also substitutes Eigen's
// scalar-times-matrix candidates, which probe is_convertible<expr, Rational>
// and with that every converting constructor of boost's number type. The
// byte-container constructor's trait is not substitution-safe for dense
// Eigen types (their const_iterator is void outside the vector case) and
// the probe becomes a hard error; name those types non-containers up front.
namespace boost {
namespace multiprecision {
namespace detail {

template <class S, int R, int C, int O, int MR, int MC>
struct is_byte_container<Eigen::Matrix<S, R, C, O, MR, MC>> : public boost::false_type {};

template <class L, class R, int O>
struct is_byte_container<Eigen::Product<L, R, O>> : public boost::false_type {};

template <class Op, class L, class R>
struct is_byte_container<Eigen::CwiseBinaryOp<Op, L, R>> : public boost::false_type {};

template <class Op, class X>
struct is_byte_container<Eigen::CwiseUnaryOp<Op, X>> : public boost::false_type {};

}  // namespace detail
}  // namespace multiprecision
}  // namespace boost
