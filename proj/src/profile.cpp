#include "roughsig/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace roughsig {

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Sine: return "sine";
    case ProfileKind::Sawtooth: return "sawtooth";
    case ProfileKind::Samples: return "samples";
  }
  return "?";
}

ProfileKind parse_profile_kind(const std::string& name) {
  if (name == "sine") return ProfileKind::Sine;
  if (name == "sawtooth") return ProfileKind::Sawtooth;
  if (name == "samples" || name == "user-samples") return ProfileKind::Samples;
  throw ValidationError("profile.preset: unknown profile '" + name + "'");
}

InterfaceProfile InterfaceProfile::sine(double mean, double amplitude) {
  InterfaceProfile p;
  p.kind_ = ProfileKind::Sine;
  p.mean_ = mean;
  p.amplitude_ = amplitude;
  p.lipschitz_ = 2.0 * std::numbers::pi * std::abs(amplitude);
  return p;
}

InterfaceProfile InterfaceProfile::sawtooth(double mean, double amplitude) {
  InterfaceProfile p;
  p.kind_ = ProfileKind::Sawtooth;
  p.mean_ = mean;
  p.amplitude_ = amplitude;
  p.lipschitz_ = 8.0 * std::abs(amplitude);
  return p;
}

InterfaceProfile InterfaceProfile::samples(std::vector<double> abscissae,
                                           std::vector<double> values) {
  if (abscissae.size() != values.size() || abscissae.size() < 2)
    throw ValidationError("profile.samples: need at least two (y, g) samples of equal count");
  if (abscissae.front() != 0.0 || abscissae.back() != 1.0)
    throw ValidationError("profile.samples: abscissae must start at 0 and end at 1");
  for (std::size_t i = 1; i < abscissae.size(); ++i)
    if (!(abscissae[i] > abscissae[i - 1]))
      throw ValidationError("profile.samples: abscissae must increase strictly (sample " +
                            std::to_string(i) + ")");
  if (std::abs(values.front() - values.back()) > 1e-12)
    throw ValidationError("profile.samples: g(0) != g(1), profile is not periodic");

  InterfaceProfile p;
  p.kind_ = ProfileKind::Samples;
  double sum = 0.0;
  double lip = 0.0;
  for (std::size_t i = 1; i < abscissae.size(); ++i) {
    const double dx = abscissae[i] - abscissae[i - 1];
    sum += 0.5 * (values[i] + values[i - 1]) * dx;
    lip = std::max(lip, std::abs(values[i] - values[i - 1]) / dx);
  }
  p.mean_ = sum;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  p.amplitude_ = 0.5 * (*hi - *lo);
  p.lipschitz_ = lip;
  p.xs_ = std::move(abscissae);
  p.ys_ = std::move(values);
  return p;
}

InterfaceProfile InterfaceProfile::constant(double value) {
  return samples({0.0, 1.0}, {value, value});
}

double InterfaceProfile::max_value() const {
  if (kind_ == ProfileKind::Samples) return *std::max_element(ys_.begin(), ys_.end());
  return mean_ + std::abs(amplitude_);
}

double InterfaceProfile::min_value() const {
  if (kind_ == ProfileKind::Samples) return *std::min_element(ys_.begin(), ys_.end());
  return mean_ - std::abs(amplitude_);
}

std::vector<double> InterfaceProfile::kinks() const {
  switch (kind_) {
    case ProfileKind::Sine: return {};
    case ProfileKind::Sawtooth: return {0.0, 0.25, 0.5, 0.75};
    case ProfileKind::Samples: return {xs_.begin(), xs_.end() - 1};
  }
  return {};
}

std::vector<double> InterfaceProfile::breakpoints() const {
  if (kind_ == ProfileKind::Sine) return {0.0, 0.25, 0.75};  // zeros of g'
  return kinks();
}

ProfileSample InterfaceProfile::eval(double y) const {
  const double t = wrap_unit(y);
  switch (kind_) {
    case ProfileKind::Sine: {
      const double w = 2.0 * std::numbers::pi;
      return {mean_ + amplitude_ * std::sin(w * t), amplitude_ * w * std::cos(w * t)};
    }
    case ProfileKind::Sawtooth: {
      const double slope = 8.0 * amplitude_;
      const double q = 4.0 * t;
      const int tooth = std::min(3, static_cast<int>(std::floor(q)));
      const double local = t - 0.25 * tooth;
      if (tooth % 2 == 0) return {mean_ - amplitude_ + slope * local, slope};
      return {mean_ + amplitude_ - slope * local, -slope};
    }
    case ProfileKind::Samples: {
      auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
      std::size_t i = static_cast<std::size_t>(it - xs_.begin());
      i = std::clamp<std::size_t>(i, 1, xs_.size() - 1);
      const double x0 = xs_[i - 1], x1 = xs_[i];
      const double slope = (ys_[i] - ys_[i - 1]) / (x1 - x0);
      return {ys_[i - 1] + slope * (t - x0), slope};
    }
  }
  return {0.0, 0.0};
}

void InterfaceProfile::validate() const {
  if (kind_ == ProfileKind::Samples) {
    for (std::size_t i = 0; i < ys_.size(); ++i) {
      if (!(ys_[i] > 0.0)) {
        std::ostringstream os;
        os << "profile.samples[" << i << "]: g(" << xs_[i] << ") = " << ys_[i]
           << " is not positive";
        throw ValidationError(os.str());
      }
    }
    return;
  }
  if (!(min_value() > 0.0)) {
    std::ostringstream os;
    os << "profile: " << to_string(kind_) << " preset has min g = " << min_value()
       << ", profile must be positive";
    throw ValidationError(os.str());
  }
}

}  // namespace roughsig
