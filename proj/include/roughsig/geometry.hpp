#ifndef ROUGHSIG_GEOMETRY_HPP
#define ROUGHSIG_GEOMETRY_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "roughsig/common.hpp"
#include "roughsig/profile.hpp"

namespace roughsig {

/// Q = ]0, L[ x ]-ell, ell[ with an eps-periodic interface of amplitude eps^k.
struct DomainSpec {
  double length = 1.0;       // L
  double half_height = 1.0;  // ell
  Rational eps{1, 4};
  Rational k{1};
  Rational gamma{0};

  double eps_value() const { return to_double(eps); }
  double amplitude_scale() const;  // eps^k
  /// Number of whole periods of the interface in ]0, L[.
  Index periods() const;

  /// Checks ell > 0, eps > 0, k > 0 and that eps divides L.
  void validate() const;
};

enum class Component : std::int8_t { Minus = -1, Plus = 1 };

inline char tag_char(Component c) { return c == Component::Plus ? '+' : '-'; }

struct Triangle {
  std::array<Index, 3> nodes;
  Component tag;
};

/// Duplicated trace nodes at one interface abscissa. Edge lengths are those of
/// the interface polyline segments to the left and right (0 at the ends).
struct InterfacePair {
  Index plus;
  Index minus;
  double x;
  double left_length;
  double right_length;
};

struct TwoComponentMesh {
  Eigen::Matrix2Xd nodes;
  std::vector<Triangle> triangles;
  std::vector<InterfacePair> pairs;
  std::vector<std::uint8_t> on_boundary;
  double length = 0.0;
  double half_height = 0.0;
  double area_plus = 0.0;
  double area_minus = 0.0;
  double interface_length = 0.0;

  Index num_nodes() const { return nodes.cols(); }
  Index num_boundary() const;
  /// Signed area of triangle t (positive for the counter-clockwise ordering used here).
  double triangle_area(std::size_t t) const;
  double max_edge_length() const;
};

/// Periodic structured triangulation of the unit cell Y = ]0,1[^2.
struct CellMesh {
  Index n = 0;
  Eigen::Matrix2Xd nodes;
  std::vector<std::array<Index, 3>> triangles;
  /// Right edge node -> left edge node, rows j = 0..n-1.
  std::vector<std::array<Index, 2>> left_right;
  /// Top edge node -> bottom edge node, columns i = 0..n-1.
  std::vector<std::array<Index, 2>> bottom_top;
  /// Node -> periodic DOF in [0, n^2). All four corners share DOF 0.
  std::vector<Index> periodic_dof;

  Index num_nodes() const { return nodes.cols(); }
  Index num_dofs() const { return n * n; }
  double triangle_area(std::size_t t) const;
};

/// Terrain-following mesh of Q with interface x_N = eps^k g(x'/eps).
TwoComponentMesh build_rough_mesh(const DomainSpec& domain, const InterfaceProfile& profile,
                                  Index nx_per_period, Index ny);

/// Same data model with the interface on x_N = 0.
TwoComponentMesh build_flat_mesh(const DomainSpec& domain, Index nx, Index ny);

/// Single-component mesh of Q with a grid row on x_N = 0 and no duplicated
/// nodes; the pair list is empty. Triangles are tagged by side.
TwoComponentMesh build_single_mesh(const DomainSpec& domain, Index nx, Index ny);

CellMesh build_cell_mesh(Index n);

/// Plain-text dump: header line, then node, triangle and pair lines.
void write_mesh(std::ostream& os, const TwoComponentMesh& mesh);

}  // namespace roughsig

#endif  // ROUGHSIG_GEOMETRY_HPP
