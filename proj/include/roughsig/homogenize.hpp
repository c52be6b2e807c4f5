#ifndef ROUGHSIG_HOMOGENIZE_HPP
#define ROUGHSIG_HOMOGENIZE_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "roughsig/coefficient.hpp"
#include "roughsig/common.hpp"
#include "roughsig/geometry.hpp"
#include "roughsig/profile.hpp"

namespace roughsig {

enum class Regime { A, B, C };

char regime_letter(Regime r);
Regime parse_regime(const std::string& text);

/// Case of the (k, gamma) parameter plane, decided in exact arithmetic.
Regime classify_regime(const Rational& k, const Rational& gamma);

/// Corrector omega_l = l . y + phi on the cell mesh nodes (non-periodic node
/// numbering, so omega itself is not periodic but omega - l . y is).
struct CellCorrector {
  Vec2 direction;
  VectorXd fluctuation;  // phi per node, mean zero
  VectorXd corrector;    // omega per node
};

CellCorrector solve_cell(const PeriodicCoefficient& coeff, const Vec2& direction,
                         const CellMesh& mesh);

struct HomogenizedData {
  Mat2 tensor = Mat2::Identity();  // A0
  /// min and max of (A0 l, l) and of |A0 l| over sampled unit directions.
  double min_form = 0.0;
  double max_form = 0.0;
  double max_image = 0.0;
  CellCorrector corrector_e1;
  CellCorrector corrector_e2;
  std::optional<double> conductance;  // h_{gamma,k}; empty means vanishing
  bool conductance_known = false;     // false in case C or when not computed
  Regime regime = Regime::A;
};

/// A0 from the correctors of e1 and e2. Certified constants use `directions`
/// samples of the unit circle.
HomogenizedData homogenized_tensor(const PeriodicCoefficient& coeff, const CellMesh& mesh,
                                   Index directions = 360);

/// True when alpha |l|^2 <= (A0 l, l) and |A0 l| <= beta^2 / alpha |l| held on
/// every sampled direction.
bool certify_bounds(const HomogenizedData& data, double alpha, double beta);

/// h_{gamma,k}: a number in case A, std::nullopt ("vanishing") in case B.
/// Throws DomainError in case C.
std::optional<double> effective_conductance(const InterfaceConductance& h,
                                            const InterfaceProfile& profile, const Rational& k,
                                            const Rational& gamma, Index panels = 4096);

/// Text block: tensor entries, certified bounds, conductance, regime.
void write_homogenized(std::ostream& os, const HomogenizedData& data);

}  // namespace roughsig

#endif  // ROUGHSIG_HOMOGENIZE_HPP
