#include "roughsig/coefficient.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace roughsig {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Index kValidationGrid = 64;

}  // namespace

std::string to_string(CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::Identity: return "identity";
    case CoefficientKind::Layered: return "layered";
    case CoefficientKind::RotatedAnisotropic: return "rotated-anisotropic";
    case CoefficientKind::Constant: return "constant";
    case CoefficientKind::Function: return "function";
  }
  return "?";
}

PeriodicCoefficient PeriodicCoefficient::identity() { return {}; }

PeriodicCoefficient PeriodicCoefficient::layered() {
  PeriodicCoefficient c;
  c.kind_ = CoefficientKind::Layered;
  c.name_ = "layered";
  c.alpha_ = 1.0;
  c.beta_ = 3.0;
  return c;
}

PeriodicCoefficient PeriodicCoefficient::rotated_anisotropic(double theta) {
  PeriodicCoefficient c;
  c.kind_ = CoefficientKind::RotatedAnisotropic;
  c.name_ = "rotated-anisotropic";
  c.theta_ = theta;
  c.alpha_ = 0.5;
  c.beta_ = 3.0;
  return c;
}

PeriodicCoefficient PeriodicCoefficient::constant(const Mat2& a) {
  PeriodicCoefficient c;
  c.kind_ = CoefficientKind::Constant;
  c.name_ = "constant";
  c.constant_ = a;
  c.alpha_ = coercivity_of(a);
  c.beta_ = spectral_norm_of(a);
  c.symmetric_ = std::abs(a(0, 1) - a(1, 0)) <= 1e-14 * a.norm();
  return c;
}

PeriodicCoefficient PeriodicCoefficient::from_function(Function fn, std::string name) {
  PeriodicCoefficient c;
  c.kind_ = CoefficientKind::Function;
  c.name_ = std::move(name);
  c.fn_ = std::move(fn);
  c.sample_constants();
  return c;
}

void PeriodicCoefficient::sample_constants() {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool sym = true;
  // Cell-centred and vertex samples.
  for (Index j = 0; j < 2 * kValidationGrid; ++j) {
    for (Index i = 0; i < 2 * kValidationGrid; ++i) {
      const Vec2 y(0.5 * static_cast<double>(i) / kValidationGrid,
                   0.5 * static_cast<double>(j) / kValidationGrid);
      const Mat2 a = (*this)(y);
      lo = std::min(lo, coercivity_of(a));
      hi = std::max(hi, spectral_norm_of(a));
      sym = sym && std::abs(a(0, 1) - a(1, 0)) <= 1e-14 * std::max(1.0, a.norm());
    }
  }
  alpha_ = lo;
  beta_ = hi;
  symmetric_ = sym;
}

Mat2 PeriodicCoefficient::operator()(const Vec2& y) const {
  const Vec2 w(wrap_unit(y.x()), wrap_unit(y.y()));
  switch (kind_) {
    case CoefficientKind::Identity: return Mat2::Identity();
    case CoefficientKind::Layered: return (2.0 + std::sin(kTwoPi * w.x())) * Mat2::Identity();
    case CoefficientKind::RotatedAnisotropic: {
      const Eigen::Rotation2Dd rot(theta_);
      const Mat2 r = rot.toRotationMatrix();
      const Vec2 d(2.0 + std::sin(kTwoPi * w.x()), 1.0 + 0.5 * std::cos(kTwoPi * w.y()));
      return r * d.asDiagonal() * r.transpose();
    }
    case CoefficientKind::Constant: return constant_;
    case CoefficientKind::Function: return fn_(w);
  }
  return Mat2::Identity();
}

PeriodicCoefficient PeriodicCoefficient::transposed() const {
  if (kind_ == CoefficientKind::Constant) return constant(constant_.transpose());
  if (symmetric_) return *this;
  const PeriodicCoefficient self = *this;
  return from_function([self](const Vec2& y) -> Mat2 { return self(y).transpose(); },
                       name_ + "^T");
}

PeriodicCoefficient PeriodicCoefficient::scaled(double t) const {
  if (kind_ == CoefficientKind::Constant) return constant(t * constant_);
  const PeriodicCoefficient self = *this;
  PeriodicCoefficient c = from_function([self, t](const Vec2& y) -> Mat2 { return t * self(y); },
                                        name_ + "*t");
  c.alpha_ = t * alpha_;
  c.beta_ = t * beta_;
  c.symmetric_ = symmetric_;
  return c;
}

void PeriodicCoefficient::validate(std::optional<double> claimed_alpha,
                                   std::optional<double> claimed_beta) const {
  const double a = claimed_alpha.value_or(alpha_);
  const double b = claimed_beta.value_or(beta_);
  if (!(a > 0.0)) {
    std::ostringstream os;
    os << "coefficient." << name_ << ": alpha = " << a << " is not positive";
    throw ValidationError(os.str());
  }
  if (a > b) throw ValidationError("coefficient." + name_ + ": alpha exceeds beta");
  const double slack = 1e-12 * b;
  for (Index j = 0; j < kValidationGrid; ++j) {
    for (Index i = 0; i < kValidationGrid; ++i) {
      const Vec2 y((i + 0.5) / kValidationGrid, (j + 0.5) / kValidationGrid);
      const Mat2 m = (*this)(y);
      if (coercivity_of(m) < a - slack || spectral_norm_of(m) > b + slack) {
        std::ostringstream os;
        os << "coefficient." << name_ << ": ellipticity bounds (alpha = " << a
           << ", beta = " << b << ") fail at y = (" << y.x() << ", " << y.y() << ")";
        throw ValidationError(os.str());
      }
    }
  }
}

std::string to_string(ConductanceKind kind) {
  switch (kind) {
    case ConductanceKind::Constant: return "constant";
    case ConductanceKind::SinePositive: return "sine-positive";
    case ConductanceKind::Samples: return "samples";
    case ConductanceKind::Zero: return "zero";
  }
  return "?";
}

InterfaceConductance InterfaceConductance::constant(double value) {
  InterfaceConductance h;
  h.kind_ = ConductanceKind::Constant;
  h.value_ = value;
  h.h0_ = value;
  return h;
}

InterfaceConductance InterfaceConductance::sine_positive(double mean) {
  InterfaceConductance h;
  h.kind_ = ConductanceKind::SinePositive;
  h.value_ = mean;
  h.h0_ = 0.5 * mean;
  return h;
}

InterfaceConductance InterfaceConductance::samples(std::vector<double> abscissae,
                                                   std::vector<double> values) {
  if (abscissae.size() != values.size() || abscissae.size() < 2)
    throw ValidationError("conductance.samples: need at least two samples of equal count");
  if (abscissae.front() != 0.0 || abscissae.back() != 1.0)
    throw ValidationError("conductance.samples: abscissae must start at 0 and end at 1");
  for (std::size_t i = 1; i < abscissae.size(); ++i)
    if (!(abscissae[i] > abscissae[i - 1]))
      throw ValidationError("conductance.samples: abscissae must increase strictly");
  InterfaceConductance h;
  h.kind_ = ConductanceKind::Samples;
  h.h0_ = *std::min_element(values.begin(), values.end());
  h.xs_ = std::move(abscissae);
  h.ys_ = std::move(values);
  return h;
}

InterfaceConductance InterfaceConductance::zero() {
  InterfaceConductance h;
  h.kind_ = ConductanceKind::Zero;
  h.value_ = 0.0;
  h.h0_ = 0.0;
  return h;
}

double InterfaceConductance::max_value() const {
  switch (kind_) {
    case ConductanceKind::Constant: return value_;
    case ConductanceKind::SinePositive: return 1.5 * value_;
    case ConductanceKind::Samples: return *std::max_element(ys_.begin(), ys_.end());
    case ConductanceKind::Zero: return 0.0;
  }
  return 0.0;
}

double InterfaceConductance::operator()(double y) const {
  switch (kind_) {
    case ConductanceKind::Constant: return value_;
    case ConductanceKind::SinePositive:
      return value_ * (1.0 + 0.5 * std::sin(kTwoPi * wrap_unit(y)));
    case ConductanceKind::Samples: {
      const double t = wrap_unit(y);
      auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
      std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - xs_.begin()), 1,
                                              xs_.size() - 1);
      const double s = (t - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return (1.0 - s) * ys_[i - 1] + s * ys_[i];
    }
    case ConductanceKind::Zero: return 0.0;
  }
  return 0.0;
}

InterfaceConductance InterfaceConductance::scaled(double t) const {
  InterfaceConductance h = *this;
  h.value_ *= t;
  h.h0_ *= t;
  for (double& v : h.ys_) v *= t;
  return h;
}

InterfaceConductance InterfaceConductance::with_lower_bound(double h0) const {
  InterfaceConductance h = *this;
  h.h0_ = h0;
  return h;
}

void InterfaceConductance::validate() const {
  if (kind_ == ConductanceKind::Zero) return;
  if (!(h0_ > 0.0)) {
    std::ostringstream os;
    os << "conductance.h0: lower bound " << h0_ << " is not positive";
    throw ValidationError(os.str());
  }
  for (Index i = 0; i <= 4 * kValidationGrid; ++i) {
    const double y = static_cast<double>(i) / (4.0 * kValidationGrid);
    if ((*this)(y) < h0_ * (1.0 - 1e-14)) {
      std::ostringstream os;
      os << "conductance: h(" << y << ") = " << (*this)(y) << " below h0 = " << h0_;
      throw ValidationError(os.str());
    }
  }
}

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::Constant: return "constant";
    case SourceKind::SplitSign: return "split-sign";
    case SourceKind::Bump: return "bump";
  }
  return "?";
}

SourceKind parse_source_kind(const std::string& name) {
  if (name == "constant") return SourceKind::Constant;
  if (name == "split-sign") return SourceKind::SplitSign;
  if (name == "bump") return SourceKind::Bump;
  throw ValidationError("source.preset: unknown source '" + name + "'");
}

double SourceTerm::operator()(const Vec2& point, Component side, const Vec2& centroid) const {
  switch (kind) {
    case SourceKind::Constant: return c;
    case SourceKind::SplitSign: {
      double v = side == Component::Minus ? c : -c;
      if (reverse_beyond && centroid.x() > *reverse_beyond) v = -v;
      return v;
    }
    case SourceKind::Bump: {
      const double rho2 = (point - center).squaredNorm() / (radius * radius);
      if (rho2 >= 1.0) return 0.0;
      return c * std::exp(1.0 - 1.0 / (1.0 - rho2));
    }
  }
  return 0.0;
}

SourceTerm SourceTerm::scaled(double t) const {
  SourceTerm s = *this;
  s.c *= t;
  return s;
}

}  // namespace roughsig
