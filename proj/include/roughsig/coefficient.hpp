#ifndef ROUGHSIG_COEFFICIENT_HPP
#define ROUGHSIG_COEFFICIENT_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roughsig/common.hpp"
#include "roughsig/geometry.hpp"

namespace roughsig {

enum class CoefficientKind { Identity, Layered, RotatedAnisotropic, Constant, Function };

std::string to_string(CoefficientKind kind);

/// Y-periodic 2x2 coefficient field A(y) with ellipticity constants
/// alpha |l|^2 <= (A l, l) and |A l| <= beta |l|.
class PeriodicCoefficient {
 public:
  using Function = std::function<Mat2(const Vec2&)>;

  static PeriodicCoefficient identity();
  /// (2 + sin 2 pi y1) I.
  static PeriodicCoefficient layered();
  /// R(theta) diag(2 + sin 2 pi y1, 1 + cos(2 pi y2) / 2) R(theta)^T.
  static PeriodicCoefficient rotated_anisotropic(double theta);
  static PeriodicCoefficient constant(const Mat2& a);
  /// Arbitrary field; ellipticity constants are sampled on the validation grid.
  static PeriodicCoefficient from_function(Function fn, std::string name = "function");

  CoefficientKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double theta() const { return theta_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  bool symmetric() const { return symmetric_; }

  /// A at cell coordinate y, reduced into [0, 1)^2.
  Mat2 operator()(const Vec2& y) const;

  PeriodicCoefficient transposed() const;
  PeriodicCoefficient scaled(double t) const;

  /// Ellipticity certificate on a validation grid. When claimed constants are
  /// given they must hold on every sample.
  void validate(std::optional<double> claimed_alpha = std::nullopt,
                std::optional<double> claimed_beta = std::nullopt) const;

 private:
  void sample_constants();

  CoefficientKind kind_ = CoefficientKind::Identity;
  std::string name_ = "identity";
  double theta_ = 0.0;
  Mat2 constant_ = Mat2::Identity();
  Function fn_;
  double alpha_ = 1.0;
  double beta_ = 1.0;
  bool symmetric_ = true;
};

/// Smallest eigenvalue of the symmetric part and the spectral norm of a 2x2 matrix.
template <typename Derived>
typename Derived::Scalar coercivity_of(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Scalar p = a(0, 0), q = Scalar(0.5) * (a(0, 1) + a(1, 0)), r = a(1, 1);
  using std::sqrt;
  return Scalar(0.5) * (p + r) - sqrt(Scalar(0.25) * (p - r) * (p - r) + q * q);
}

template <typename Derived>
typename Derived::Scalar spectral_norm_of(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, 2, 2> ata = a.transpose() * a;
  using std::sqrt;
  const Scalar tr = ata.trace();
  const Scalar det = ata.determinant();
  return sqrt(Scalar(0.5) * tr + sqrt(std::max(Scalar(0), Scalar(0.25) * tr * tr - det)));
}

enum class ConductanceKind { Constant, SinePositive, Samples, Zero };

std::string to_string(ConductanceKind kind);

/// Y'-periodic interface conductance h.
class InterfaceConductance {
 public:
  static InterfaceConductance constant(double value);
  /// mean (1 + sin(2 pi y) / 2).
  static InterfaceConductance sine_positive(double mean);
  static InterfaceConductance samples(std::vector<double> abscissae, std::vector<double> values);
  /// h == 0.
  static InterfaceConductance zero();

  ConductanceKind kind() const { return kind_; }
  bool is_zero() const { return kind_ == ConductanceKind::Zero; }
  double parameter() const { return value_; }
  double lower_bound() const { return h0_; }
  double max_value() const;
  const std::vector<double>& sample_abscissae() const { return xs_; }
  const std::vector<double>& sample_values() const { return ys_; }

  double operator()(double y) const;

  InterfaceConductance scaled(double t) const;
  /// Sets the claimed lower bound h0; validate() checks it.
  InterfaceConductance with_lower_bound(double h0) const;

  void validate() const;

 private:
  ConductanceKind kind_ = ConductanceKind::Constant;
  double value_ = 1.0;
  double h0_ = 1.0;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

enum class SourceKind { Constant, SplitSign, Bump };

std::string to_string(SourceKind kind);
SourceKind parse_source_kind(const std::string& name);

/// Right-hand side f in L^2(Q).
///
/// SplitSign is +c in the lower component and -c in the upper one; on flat
/// meshes that is +c for x_N < 0 and -c for x_N > 0. With a reversal abscissa
/// the sign is flipped for x_1 > reverse_beyond.
struct SourceTerm {
  SourceKind kind = SourceKind::Constant;
  double c = 0.0;
  std::optional<double> reverse_beyond;
  Vec2 center{0.5, -0.5};
  double radius = 0.5;

  static SourceTerm constant(double c) { return {SourceKind::Constant, c, std::nullopt}; }
  static SourceTerm split_sign(double c, std::optional<double> reverse_beyond = std::nullopt) {
    return {SourceKind::SplitSign, c, reverse_beyond};
  }
  static SourceTerm bump(double c, const Vec2& center, double radius) {
    return {SourceKind::Bump, c, std::nullopt, center, radius};
  }

  /// f at `point` inside a triangle with tag `side` and centroid `centroid`.
  double operator()(const Vec2& point, Component side, const Vec2& centroid) const;
  SourceTerm scaled(double t) const;
};

}  // namespace roughsig

#endif  // ROUGHSIG_COEFFICIENT_HPP
