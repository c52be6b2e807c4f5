#ifndef ROUGHSIG_PROFILE_HPP
#define ROUGHSIG_PROFILE_HPP

#include <string>
#include <vector>

#include "roughsig/common.hpp"

namespace roughsig {

enum class ProfileKind { Sine, Sawtooth, Samples };

std::string to_string(ProfileKind kind);
ProfileKind parse_profile_kind(const std::string& name);

struct ProfileSample {
  double value;
  double slope;
};

/// The periodic interface profile g on the surface cell [0, 1).
///
/// Sine:     g(y) = mean + amplitude sin(2 pi y).
/// Sawtooth: two teeth per cell, g(0) = mean - amplitude, slopes +-8 amplitude,
///           kinks at multiples of 1/4.
/// Samples:  piecewise-linear interpolation of a table on [0, 1] with
///           table.front() == table.back().
class InterfaceProfile {
 public:
  static InterfaceProfile sine(double mean = 1.0, double amplitude = 0.5);
  static InterfaceProfile sawtooth(double mean = 1.0, double amplitude = 0.5);
  /// Abscissae must start at 0, end at 1 and increase strictly.
  static InterfaceProfile samples(std::vector<double> abscissae, std::vector<double> values);
  /// Shorthand for the flat profile g == value.
  static InterfaceProfile constant(double value);

  ProfileKind kind() const { return kind_; }
  double mean_level() const { return mean_; }
  double amplitude() const { return amplitude_; }
  double lipschitz() const { return lipschitz_; }
  double max_value() const;
  double min_value() const;
  const std::vector<double>& sample_abscissae() const { return xs_; }
  const std::vector<double>& sample_values() const { return ys_; }

  /// Points in [0, 1) where g is not differentiable. Rough meshes place
  /// grid nodes there.
  std::vector<double> kinks() const;
  /// Kinks plus the points where |g'| has a kink; quadrature panels break there.
  std::vector<double> breakpoints() const;

  /// Value and right-sided slope at y (wrapped into [0, 1)).
  ProfileSample eval(double y) const;

  /// Throws ValidationError naming the offending sample when g <= 0 somewhere.
  void validate() const;

 private:
  ProfileKind kind_ = ProfileKind::Sine;
  double mean_ = 1.0;
  double amplitude_ = 0.5;
  double lipschitz_ = 0.0;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

inline ProfileSample eval_profile(const InterfaceProfile& profile, double y) {
  return profile.eval(y);
}

}  // namespace roughsig

#endif  // ROUGHSIG_PROFILE_HPP
