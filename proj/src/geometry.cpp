#include "roughsig/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace roughsig {

double DomainSpec::amplitude_scale() const { return std::pow(eps_value(), to_double(k)); }

Index DomainSpec::periods() const {
  const double ratio = length / eps_value();
  return static_cast<Index>(std::llround(ratio));
}

void DomainSpec::validate() const {
  if (!(length > 0.0)) throw ValidationError("domain.L: must be positive");
  if (!(half_height > 0.0)) throw ValidationError("domain.ell: must be positive");
  if (eps <= Rational(0)) throw ValidationError("eps: must be positive, got " + to_string(eps));
  if (k <= Rational(0)) throw ValidationError("exponents.k: must be positive, got " + to_string(k));
  const double ratio = length / eps_value();
  if (ratio < 0.5 || std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "eps = " << to_string(eps) << " does not divide L = " << length
       << " a whole number of times";
    throw ValidationError(os.str());
  }
}

Index TwoComponentMesh::num_boundary() const {
  return static_cast<Index>(std::count(on_boundary.begin(), on_boundary.end(), 1));
}

namespace {

double signed_area(const Eigen::Matrix2Xd& nodes, const std::array<Index, 3>& t) {
  const Vec2 a = nodes.col(t[0]);
  const Vec2 b = nodes.col(t[1]);
  const Vec2 c = nodes.col(t[2]);
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

// Columns at abscissae xs; interface heights ys; ny layers per component.
// Node ids: minus component column-major (bottom to interface), then plus
// component column-major (interface to top).
TwoComponentMesh build_structured(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double length, double ell, Index ny) {
  const Index ncol = static_cast<Index>(xs.size());
  const Index per_col = ny + 1;
  const Index offset = ncol * per_col;

  TwoComponentMesh mesh;
  mesh.length = length;
  mesh.half_height = ell;
  mesh.nodes.resize(2, 2 * offset);
  mesh.on_boundary.assign(static_cast<std::size_t>(2 * offset), 0);

  for (Index c = 0; c < ncol; ++c) {
    const double yi = ys[static_cast<std::size_t>(c)];
    const bool lateral = (c == 0 || c == ncol - 1);
    for (Index r = 0; r <= ny; ++r) {
      const double s = static_cast<double>(r) / static_cast<double>(ny);
      const Index lo = c * per_col + r;
      const Index hi = offset + c * per_col + r;
      mesh.nodes.col(lo) = Vec2(xs[static_cast<std::size_t>(c)], -ell + (yi + ell) * s);
      mesh.nodes.col(hi) = Vec2(xs[static_cast<std::size_t>(c)], yi + (ell - yi) * s);
      if (r == ny) mesh.nodes(1, lo) = yi;  // identical coordinates for the pair
      if (r == 0) mesh.nodes(1, hi) = yi;
      mesh.on_boundary[static_cast<std::size_t>(lo)] = lateral || r == 0;
      mesh.on_boundary[static_cast<std::size_t>(hi)] = lateral || r == ny;
    }
  }

  mesh.triangles.reserve(static_cast<std::size_t>(4 * (ncol - 1) * ny));
  for (const Component comp : {Component::Minus, Component::Plus}) {
    const Index base = comp == Component::Minus ? 0 : offset;
    for (Index c = 0; c + 1 < ncol; ++c) {
      for (Index r = 0; r < ny; ++r) {
        const Index a = base + c * per_col + r;
        const Index b = base + (c + 1) * per_col + r;
        const Index d = b + 1;
        const Index e = a + 1;
        mesh.triangles.push_back({{a, b, d}, comp});
        mesh.triangles.push_back({{a, d, e}, comp});
      }
    }
  }

  mesh.pairs.reserve(static_cast<std::size_t>(ncol));
  double polyline = 0.0;
  for (Index c = 0; c < ncol; ++c) {
    InterfacePair p{offset + c * per_col, c * per_col + ny, xs[static_cast<std::size_t>(c)], 0.0,
                    0.0};
    if (c > 0) {
      const double dx = xs[static_cast<std::size_t>(c)] - xs[static_cast<std::size_t>(c - 1)];
      const double dy = ys[static_cast<std::size_t>(c)] - ys[static_cast<std::size_t>(c - 1)];
      p.left_length = std::hypot(dx, dy);
      mesh.pairs.back().right_length = p.left_length;
      polyline += p.left_length;
    }
    mesh.pairs.push_back(p);
  }
  mesh.interface_length = polyline;

  double below = 0.0;
  for (Index c = 0; c + 1 < ncol; ++c) {
    const auto i = static_cast<std::size_t>(c);
    below += 0.5 * (ys[i] + ys[i + 1] + 2.0 * ell) * (xs[i + 1] - xs[i]);
  }
  mesh.area_minus = below;
  mesh.area_plus = 2.0 * ell * length - below;
  return mesh;
}

void check_counts(Index nx, Index ny, const char* what) {
  if (nx < 2 || ny < 2)
    throw ValidationError(std::string(what) + ": nx and ny must be at least 2");
}

}  // namespace

double TwoComponentMesh::triangle_area(std::size_t t) const {
  return signed_area(nodes, triangles[t].nodes);
}

double TwoComponentMesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& t : triangles)
    for (int e = 0; e < 3; ++e)
      m = std::max(m, (nodes.col(t.nodes[e]) - nodes.col(t.nodes[(e + 1) % 3])).norm());
  return m;
}

double CellMesh::triangle_area(std::size_t t) const { return signed_area(nodes, triangles[t]); }

TwoComponentMesh build_rough_mesh(const DomainSpec& domain, const InterfaceProfile& profile,
                                  Index nx_per_period, Index ny) {
  domain.validate();
  profile.validate();
  if (nx_per_period < 8)
    throw ValidationError("mesh.nx_per_period: must be at least 8 to resolve each oscillation");
  if (ny < 4) throw ValidationError("mesh.ny: must be at least 4 per component");

  const double scale = domain.amplitude_scale();
  const double ell = domain.half_height;
  if (scale * profile.max_value() >= ell) {
    std::ostringstream os;
    os << "interface leaves Q: eps^k max g = " << scale * profile.max_value()
       << " >= ell = " << ell;
    throw GeometryError(os.str());
  }
  if (scale * profile.min_value() <= -ell) throw GeometryError("interface leaves Q below");

  // Local abscissae in one period: uniform grid plus profile kinks.
  std::vector<double> local;
  for (Index j = 0; j < nx_per_period; ++j)
    local.push_back(static_cast<double>(j) / static_cast<double>(nx_per_period));
  for (double kink : profile.kinks()) local.push_back(kink);
  std::sort(local.begin(), local.end());
  local.erase(std::unique(local.begin(), local.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              local.end());

  const double eps = domain.eps_value();
  const Index periods = domain.periods();
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(static_cast<std::size_t>(periods) * local.size() + 1);
  for (Index p = 0; p < periods; ++p) {
    for (double t : local) {
      xs.push_back((static_cast<double>(p) + t) * eps);
      ys.push_back(scale * profile.eval(t).value);
    }
  }
  xs.push_back(domain.length);
  ys.push_back(scale * profile.eval(0.0).value);
  return build_structured(xs, ys, domain.length, ell, ny);
}

TwoComponentMesh build_flat_mesh(const DomainSpec& domain, Index nx, Index ny) {
  check_counts(nx, ny, "flat mesh");
  if (!(domain.length > 0.0) || !(domain.half_height > 0.0))
    throw ValidationError("domain: L and ell must be positive");
  std::vector<double> xs(static_cast<std::size_t>(nx + 1));
  for (Index i = 0; i <= nx; ++i)
    xs[static_cast<std::size_t>(i)] =
        domain.length * static_cast<double>(i) / static_cast<double>(nx);
  xs.back() = domain.length;
  std::vector<double> ys(xs.size(), 0.0);
  return build_structured(xs, ys, domain.length, domain.half_height, ny);
}

TwoComponentMesh build_single_mesh(const DomainSpec& domain, Index nx, Index ny) {
  check_counts(nx, ny, "single mesh");
  const double L = domain.length;
  const double ell = domain.half_height;
  const Index rows = 2 * ny;
  const Index per_col = rows + 1;

  TwoComponentMesh mesh;
  mesh.length = L;
  mesh.half_height = ell;
  mesh.nodes.resize(2, (nx + 1) * per_col);
  mesh.on_boundary.assign(static_cast<std::size_t>((nx + 1) * per_col), 0);
  for (Index c = 0; c <= nx; ++c) {
    const double x = c == nx ? L : L * static_cast<double>(c) / static_cast<double>(nx);
    for (Index r = 0; r <= rows; ++r) {
      const Index id = c * per_col + r;
      const double y = r == ny ? 0.0 : -ell + 2.0 * ell * static_cast<double>(r) / static_cast<double>(rows);
      mesh.nodes.col(id) = Vec2(x, y);
      mesh.on_boundary[static_cast<std::size_t>(id)] = c == 0 || c == nx || r == 0 || r == rows;
    }
  }
  for (Index c = 0; c < nx; ++c) {
    for (Index r = 0; r < rows; ++r) {
      const Index a = c * per_col + r;
      const Index b = (c + 1) * per_col + r;
      const Component tag = r < ny ? Component::Minus : Component::Plus;
      mesh.triangles.push_back({{a, b, b + 1}, tag});
      mesh.triangles.push_back({{a, b + 1, a + 1}, tag});
    }
  }
  mesh.area_minus = L * ell;
  mesh.area_plus = L * ell;
  mesh.interface_length = L;
  return mesh;
}

CellMesh build_cell_mesh(Index n) {
  if (n < 4) throw ValidationError("cell mesh: n must be at least 4");
  CellMesh mesh;
  mesh.n = n;
  const Index side = n + 1;
  mesh.nodes.resize(2, side * side);
  mesh.periodic_dof.resize(static_cast<std::size_t>(side * side));
  const double h = 1.0 / static_cast<double>(n);
  for (Index j = 0; j <= n; ++j) {
    for (Index i = 0; i <= n; ++i) {
      const Index id = j * side + i;
      mesh.nodes.col(id) = Vec2(i == n ? 1.0 : i * h, j == n ? 1.0 : j * h);
      mesh.periodic_dof[static_cast<std::size_t>(id)] = (j % n) * n + (i % n);
    }
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index a = j * side + i;
      const Index b = a + 1;
      const Index d = b + side;
      const Index e = a + side;
      mesh.triangles.push_back({a, b, d});
      mesh.triangles.push_back({a, d, e});
    }
  }
  for (Index j = 0; j < n; ++j) mesh.left_right.push_back({j * side + n, j * side});
  for (Index i = 0; i < n; ++i) mesh.bottom_top.push_back({n * side + i, i});
  return mesh;
}

void write_mesh(std::ostream& os, const TwoComponentMesh& mesh) {
  os << "nodes " << mesh.num_nodes() << " triangles " << mesh.triangles.size() << " pairs "
     << mesh.pairs.size() << '\n';
  os << std::setprecision(17);
  for (Index i = 0; i < mesh.num_nodes(); ++i)
    os << i << ' ' << mesh.nodes(0, i) << ' ' << mesh.nodes(1, i) << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << t << ' ' << tri.nodes[0] << ' ' << tri.nodes[1] << ' ' << tri.nodes[2] << ' '
       << tag_char(tri.tag) << '\n';
  }
  for (std::size_t p = 0; p < mesh.pairs.size(); ++p) {
    const auto& pr = mesh.pairs[p];
    os << p << ' ' << pr.plus << ' ' << pr.minus << ' ' << pr.x << '\n';
  }
}

}  // namespace roughsig
