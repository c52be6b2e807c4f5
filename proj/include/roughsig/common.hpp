#ifndef ROUGHSIG_COMMON_HPP
#define ROUGHSIG_COMMON_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace roughsig {

using Index = Eigen::Index;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Exact exponent / scale values as entered in configs ("1/2", "-1", "0.25").
using Rational = boost::rational<std::int64_t>;

Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_residual = 0.0)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Reduces a periodic argument to the half-open cell [0, 1).
template <typename Scalar>
Scalar wrap_unit(Scalar y) {
  using std::floor;
  Scalar w = y - floor(y);
  if (w >= Scalar(1)) w -= Scalar(1);
  if (w < Scalar(0)) w = Scalar(0);
  return w;
}

}  // namespace roughsig

#endif  // ROUGHSIG_COMMON_HPP
