#include "fem2nn/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace fem2nn {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Measure of the simplex spanned by `pts` (k+1 points in R^d) via the Gram determinant.
double simplex_measure(const std::vector<const Point*>& pts) {
  const int k = static_cast<int>(pts.size()) - 1;
  if (k <= 0) return 1.0;
  const int d = static_cast<int>(pts[0]->size());
  Eigen::MatrixXd e(d, k);
  for (int j = 0; j < k; ++j)
    for (int r = 0; r < d; ++r) e(r, j) = (*pts[j + 1])[r] - (*pts[0])[r];
  const double g = (e.transpose() * e).determinant();
  return std::sqrt(std::max(g, 0.0)) / factorial(k);
}

double point_simplex_distance(const std::vector<const Point*>& verts, std::span<const double> x) {
  if (verts.size() == 1) return distance(*verts[0], x);
  const int k = static_cast<int>(verts.size()) - 1;
  const int d = static_cast<int>(x.size());
  Eigen::MatrixXd e(d, k);
  Eigen::VectorXd rhs(d);
  for (int r = 0; r < d; ++r) {
    rhs(r) = x[r] - (*verts[0])[r];
    for (int j = 0; j < k; ++j) e(r, j) = (*verts[j + 1])[r] - (*verts[0])[r];
  }
  const Eigen::VectorXd mu = (e.transpose() * e).ldlt().solve(e.transpose() * rhs);
  const double mu0 = 1.0 - mu.sum();
  if (mu0 >= 0.0 && (mu.array() >= 0.0).all()) return (e * mu - rhs).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t drop = 0; drop < verts.size(); ++drop) {
    std::vector<const Point*> face;
    for (std::size_t j = 0; j < verts.size(); ++j)
      if (j != drop) face.push_back(verts[j]);
    best = std::min(best, point_simplex_distance(face, x));
  }
  return best;
}

}  // namespace

double Affine::operator()(std::span<const double> x) const {
  double v = intercept;
  for (std::size_t i = 0; i < slope.size(); ++i) v += slope[i] * x[i];
  return v;
}

Mesh::Mesh(int dim, std::vector<Point> vertices, std::vector<std::vector<int>> elements,
           std::vector<Point> corners)
    : dim_(dim),
      vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      corners_(std::move(corners)) {
  if (dim_ < 1) throw MeshError("mesh dimension must be positive");
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (static_cast<int>(vertices_[i].size()) != dim_)
      throw MeshError("vertex " + std::to_string(i) + " has wrong coordinate count");
  for (const auto& c : corners_)
    if (static_cast<int>(c.size()) != dim_) throw MeshError("corner has wrong coordinate count");

  const int nv = static_cast<int>(vertices_.size());
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const auto& el = elements_[k];
    if (static_cast<int>(el.size()) != dim_ + 1)
      throw MeshError("element " + std::to_string(k) + " must have d+1 vertices");
    for (int v : el)
      if (v < 0 || v >= nv)
        throw MeshError("element " + std::to_string(k) + " references invalid vertex " +
                        std::to_string(v));
    std::vector<int> sorted = el;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw MeshError("element " + std::to_string(k) + " repeats a vertex");
  }

  const std::size_t ne = elements_.size();
  volumes_.resize(ne);
  diameters_.resize(ne);
  degenerate_.resize(ne);
  inverse_jacobians_.resize(ne);
  for (std::size_t k = 0; k < ne; ++k) {
    const auto& el = elements_[k];
    double h = 0.0;
    for (std::size_t a = 0; a < el.size(); ++a)
      for (std::size_t b = a + 1; b < el.size(); ++b)
        h = std::max(h, distance(vertices_[el[a]], vertices_[el[b]]));
    diameters_[k] = h;
    Eigen::MatrixXd jac(dim_, dim_);
    for (int j = 0; j < dim_; ++j)
      for (int r = 0; r < dim_; ++r) jac(r, j) = vertices_[el[j + 1]][r] - vertices_[el[0]][r];
    const double vol = std::abs(jac.determinant()) / factorial(dim_);
    volumes_[k] = vol;
    degenerate_[k] = !(vol >= 1e-14 * std::pow(h, dim_)) || h == 0.0;
    if (!degenerate_[k]) {
      const Eigen::MatrixXd inv = jac.inverse();
      auto& out = inverse_jacobians_[k];
      out.resize(static_cast<std::size_t>(dim_ * dim_));
      for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) out[static_cast<std::size_t>(r * dim_ + c)] = inv(r, c);
    }
  }

  std::map<std::vector<int>, int> face_count;
  for (const auto& el : elements_) {
    for (std::size_t drop = 0; drop < el.size(); ++drop) {
      std::vector<int> face;
      for (std::size_t j = 0; j < el.size(); ++j)
        if (j != drop) face.push_back(el[j]);
      std::sort(face.begin(), face.end());
      ++face_count[face];
    }
  }
  boundary_vertex_.assign(vertices_.size(), false);
  for (const auto& [face, count] : face_count) {
    if (count == 1) {
      boundary_faces_.push_back(face);
      for (int v : face) boundary_vertex_[static_cast<std::size_t>(v)] = true;
    }
  }
}

void Mesh::check_element(int k) const {
  if (k < 0 || k >= static_cast<int>(elements_.size()))
    throw MeshError("element index " + std::to_string(k) + " out of range");
  if (degenerate_[static_cast<std::size_t>(k)])
    throw MeshError("element " + std::to_string(k) + " is degenerate");
}

std::vector<double> Mesh::barycentric(int k, std::span<const double> x) const {
  check_element(k);
  if (static_cast<int>(x.size()) != dim_) throw MeshError("point has wrong dimension");
  const auto& el = elements_[static_cast<std::size_t>(k)];
  const auto& inv = inverse_jacobians_[static_cast<std::size_t>(k)];
  const Point& a0 = vertices_[static_cast<std::size_t>(el[0])];
  std::vector<double> lam(static_cast<std::size_t>(dim_ + 1), 0.0);
  double sum = 0.0;
  for (int r = 0; r < dim_; ++r) {
    double v = 0.0;
    for (int c = 0; c < dim_; ++c) v += inv[static_cast<std::size_t>(r * dim_ + c)] * (x[c] - a0[c]);
    lam[static_cast<std::size_t>(r + 1)] = v;
    sum += v;
  }
  lam[0] = 1.0 - sum;
  return lam;
}

Affine Mesh::barycentric_affine(int k, int local) const {
  check_element(k);
  const auto& el = elements_[static_cast<std::size_t>(k)];
  const auto& inv = inverse_jacobians_[static_cast<std::size_t>(k)];
  const Point& a0 = vertices_[static_cast<std::size_t>(el[0])];
  Affine f;
  f.slope.assign(static_cast<std::size_t>(dim_), 0.0);
  if (local == 0) {
    f.intercept = 1.0;
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) f.slope[c] -= inv[static_cast<std::size_t>(r * dim_ + c)];
  } else {
    for (int c = 0; c < dim_; ++c)
      f.slope[c] = inv[static_cast<std::size_t>((local - 1) * dim_ + c)];
  }
  for (int c = 0; c < dim_; ++c) f.intercept -= f.slope[c] * a0[c];
  return f;
}

std::vector<std::vector<double>> Mesh::barycentric_gradients(int k) const {
  std::vector<std::vector<double>> g;
  for (int j = 0; j <= dim_; ++j) g.push_back(barycentric_affine(k, j).slope);
  return g;
}

std::optional<int> Mesh::locate(std::span<const double> x, double tol) const {
  for (int k = 0; k < static_cast<int>(elements_.size()); ++k) {
    if (degenerate_[static_cast<std::size_t>(k)]) continue;
    const auto lam = barycentric(k, x);
    if (*std::min_element(lam.begin(), lam.end()) >= -tol) return k;
  }
  return std::nullopt;
}

std::optional<int> Mesh::find_vertex(std::span<const double> p, double tol) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (distance(vertices_[i], p) <= tol) return static_cast<int>(i);
  return std::nullopt;
}

std::vector<int> Mesh::corner_vertices() const {
  std::vector<int> ids;
  for (const auto& c : corners_) {
    auto v = find_vertex(c);
    if (!v) throw MeshError("corner is not a mesh vertex");
    ids.push_back(*v);
  }
  return ids;
}

double Mesh::total_volume() const {
  return std::accumulate(volumes_.begin(), volumes_.end(), 0.0);
}

double facet_measure(const Mesh& mesh, int k, int local) {
  const auto& el = mesh.element(k);
  std::vector<const Point*> pts;
  for (std::size_t j = 0; j < el.size(); ++j)
    if (static_cast<int>(j) != local) pts.push_back(&mesh.vertex(el[j]));
  return simplex_measure(pts);
}

double distance_to_element(const Mesh& mesh, int k, std::span<const double> x) {
  std::vector<const Point*> pts;
  for (int v : mesh.element(k)) pts.push_back(&mesh.vertex(v));
  return point_simplex_distance(pts, x);
}

ShapeReport shape_regularity(const Mesh& mesh) {
  ShapeReport rep;
  const int d = mesh.dim();
  for (int k = 0; k < static_cast<int>(mesh.num_elements()); ++k) {
    if (mesh.is_degenerate(k))
      throw MeshError("element " + std::to_string(k) + " is degenerate");
    double facets = 0.0;
    for (int j = 0; j <= d; ++j) facets += facet_measure(mesh, k, j);
    const double h = mesh.diameter(k);
    const double r = d * mesh.volume(k) / facets;
    rep.diameters.push_back(h);
    rep.inradii.push_back(r);
    rep.kappa = std::max(rep.kappa, h / r);
  }
  return rep;
}

PatchIndex patch_index(const Mesh& mesh) {
  PatchIndex idx;
  idx.elements_of_vertex.resize(mesh.num_vertices());
  for (int k = 0; k < static_cast<int>(mesh.num_elements()); ++k)
    for (int v : mesh.element(k)) idx.elements_of_vertex[static_cast<std::size_t>(v)].push_back(k);
  for (const auto& list : idx.elements_of_vertex) {
    idx.s.push_back(static_cast<int>(list.size()));
    idx.s_max = std::max(idx.s_max, static_cast<int>(list.size()));
  }
  return idx;
}

namespace {

struct HalfSpace {
  std::vector<double> normal;  // constraint normal . x + offset >= 0
  double offset;
};

std::vector<HalfSpace> element_halfspaces(const Mesh& mesh, int k) {
  std::vector<HalfSpace> hs;
  for (int j = 0; j <= mesh.dim(); ++j) {
    Affine f = mesh.barycentric_affine(k, j);
    hs.push_back({std::move(f.slope), f.intercept});
  }
  return hs;
}

// Vertices of the polytope {x : h(x) >= 0 for all h} by brute-force enumeration of
// d-subsets of the constraint hyperplanes.
std::vector<Point> polytope_vertices(const std::vector<HalfSpace>& hs, int d, double tol) {
  std::vector<Point> out;
  const int n = static_cast<int>(hs.size());
  std::vector<int> pick(static_cast<std::size_t>(d));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Eigen::MatrixXd a(d, d);
    Eigen::VectorXd b(d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) a(r, c) = hs[pick[r]].normal[c];
      b(r) = -hs[pick[r]].offset;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible() && std::abs(lu.determinant()) > 1e-14 * std::pow(a.norm(), d)) {
      const Eigen::VectorXd x = lu.solve(b);
      bool feasible = true;
      for (const auto& h : hs) {
        double v = h.offset;
        for (int c = 0; c < d; ++c) v += h.normal[c] * x(c);
        if (v < -tol) {
          feasible = false;
          break;
        }
      }
      if (feasible) out.emplace_back(x.data(), x.data() + d);
    }
    int i = d - 1;
    while (i >= 0 && pick[i] == n - d + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < d; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

}  // namespace

RegularityReport validate_regularity(const Mesh& mesh, double tol) {
  if (mesh.num_elements() == 0 || mesh.num_vertices() == 0) throw MeshError("empty mesh");
  const int d = mesh.dim();
  const int nv = static_cast<int>(mesh.num_vertices());
  const int ne = static_cast<int>(mesh.num_elements());

  double scale = 0.0;
  for (int k = 0; k < ne; ++k) scale = std::max(scale, mesh.diameter(k));
  {
    std::vector<int> order(static_cast<std::size_t>(nv));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return mesh.vertex(a)[0] < mesh.vertex(b)[0]; });
    const double dup_tol = 1e-12 * std::max(scale, 1.0);
    for (std::size_t a = 0; a < order.size(); ++a) {
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        if (mesh.vertex(order[b])[0] - mesh.vertex(order[a])[0] > dup_tol) break;
        if (distance(mesh.vertex(order[a]), mesh.vertex(order[b])) <= dup_tol) {
          std::ostringstream msg;
          msg << "duplicate vertices " << std::min(order[a], order[b]) << " and "
              << std::max(order[a], order[b]);
          throw MeshError(msg.str());
        }
      }
    }
  }

  RegularityReport rep;
  std::vector<int> uses(static_cast<std::size_t>(nv), 0);
  for (const auto& el : mesh.elements())
    for (int v : el) ++uses[static_cast<std::size_t>(v)];
  for (int v = 0; v < nv; ++v) {
    if (uses[static_cast<std::size_t>(v)] == 0) {
      rep.pass = false;
      rep.unused_vertices.push_back(v);
      rep.messages.push_back("vertex " + std::to_string(v) + " belongs to no element");
    }
  }
  for (int k = 0; k < ne; ++k) {
    if (mesh.is_degenerate(k)) {
      rep.pass = false;
      rep.degenerate_elements.push_back(k);
      rep.messages.push_back("element " + std::to_string(k) + " is degenerate");
    }
  }
  if (!rep.degenerate_elements.empty()) return rep;

  std::vector<Point> lo(static_cast<std::size_t>(ne), Point(d, 0.0));
  std::vector<Point> hi(static_cast<std::size_t>(ne), Point(d, 0.0));
  for (int k = 0; k < ne; ++k) {
    for (int c = 0; c < d; ++c) {
      lo[k][c] = std::numeric_limits<double>::infinity();
      hi[k][c] = -std::numeric_limits<double>::infinity();
      for (int v : mesh.element(k)) {
        lo[k][c] = std::min(lo[k][c], mesh.vertex(v)[c]);
        hi[k][c] = std::max(hi[k][c], mesh.vertex(v)[c]);
      }
    }
  }
  const double box_tol = 1e-12 * std::max(scale, 1.0);

  for (int a = 0; a < ne; ++a) {
    for (int b = a + 1; b < ne; ++b) {
      bool overlap = true;
      for (int c = 0; c < d && overlap; ++c)
        overlap = lo[a][c] <= hi[b][c] + box_tol && lo[b][c] <= hi[a][c] + box_tol;
      if (!overlap) continue;

      const auto& ea = mesh.element(a);
      const auto& eb = mesh.element(b);
      std::vector<int> shared;
      for (int v : ea)
        if (std::find(eb.begin(), eb.end(), v) != eb.end()) shared.push_back(v);

      auto hs = element_halfspaces(mesh, a);
      auto hsb = element_halfspaces(mesh, b);
      hs.insert(hs.end(), hsb.begin(), hsb.end());
      const auto corners = polytope_vertices(hs, d, tol);

      // Every vertex of the intersection must lie in conv(shared): its barycentric
      // coordinates for the non-shared vertices of `a` must vanish.
      bool ok = true;
      for (const auto& x : corners) {
        const auto lam = mesh.barycentric(a, x);
        for (std::size_t j = 0; j < ea.size(); ++j) {
          const bool is_shared = std::find(shared.begin(), shared.end(), ea[j]) != shared.end();
          if (!is_shared && lam[j] > tol) ok = false;
        }
        if (shared.empty()) ok = false;
      }
      if (!ok) {
        rep.pass = false;
        rep.violating_pairs.emplace_back(a, b);
        rep.messages.push_back("elements " + std::to_string(a) + " and " + std::to_string(b) +
                               " do not meet in a common face");
      }
    }
  }
  return rep;
}

}  // namespace fem2nn
