#include "fem2nn/refine.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace fem2nn {

namespace {

using Edge = std::pair<int, int>;

Edge edge_key(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Criss-cross triangulation of the axis-aligned square [x0,x0+h] x [y0,y0+h]
// appended to (verts, elems); vertices are shared through `index`.
struct GridBuilder {
  std::vector<Point> verts;
  std::vector<std::vector<int>> elems;
  std::map<std::pair<long long, long long>, int> index;
  double unit;

  explicit GridBuilder(double unit_) : unit(unit_) {}

  int vertex(double x, double y) {
    const auto key = std::make_pair(std::llround(x / unit), std::llround(y / unit));
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    verts.push_back({x, y});
    const int id = static_cast<int>(verts.size()) - 1;
    index.emplace(key, id);
    return id;
  }

  void criss_cross(double x0, double y0, double h) {
    const int a = vertex(x0, y0), b = vertex(x0 + h, y0), c = vertex(x0 + h, y0 + h),
              d = vertex(x0, y0 + h), m = vertex(x0 + h / 2, y0 + h / 2);
    elems.push_back({a, b, m});
    elems.push_back({b, c, m});
    elems.push_back({c, d, m});
    elems.push_back({d, a, m});
  }

  void diagonal(double x0, double y0, double h, bool flip) {
    const int a = vertex(x0, y0), b = vertex(x0 + h, y0), c = vertex(x0 + h, y0 + h),
              d = vertex(x0, y0 + h);
    if (flip) {
      elems.push_back({a, b, d});
      elems.push_back({b, c, d});
    } else {
      elems.push_back({a, b, c});
      elems.push_back({a, c, d});
    }
  }
};

std::array<std::array<int, 3>, 4> red_children(const std::array<int, 3>& t, int m01, int m12, int m20) {
  return {{{t[0], m01, m20}, {m01, t[1], m12}, {m20, m12, t[2]}, {m01, m12, m20}}};
}

}  // namespace

Mesh lshape_mesh() {
  // Each quadrant square is cut by its diagonal through the reentrant corner.
  std::vector<Point> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}};
  std::vector<std::vector<int>> e{{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 6}, {0, 6, 7}};
  return Mesh(2, std::move(v), std::move(e), {{0.0, 0.0}});
}

Mesh square_mesh(int n, bool corner) {
  if (n < 1) throw MeshError("square_mesh: n must be positive");
  const double h = 1.0 / n;
  GridBuilder g(h / 4);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g.criss_cross(i * h, j * h, h);
  std::vector<Point> corners;
  if (corner) corners.push_back({0.0, 0.0});
  return Mesh(2, g.verts, g.elems, corners);
}

Mesh random_mesh(int domain, int n, std::uint64_t seed, double jitter) {
  if (n < 1) throw MeshError("random_mesh: n must be positive");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  const double h = 1.0 / n;
  GridBuilder g(h / 4);
  std::vector<Point> corners;
  if (domain == 0) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) g.diagonal(i * h, j * h, h, coin(rng));
  } else {
    for (int j = -n; j < n; ++j)
      for (int i = -n; i < n; ++i) {
        if (i >= 0 && j < 0) continue;
        g.diagonal(i * h, j * h, h, coin(rng));
      }
    corners.push_back({0.0, 0.0});
  }
  const Mesh flat(2, g.verts, g.elems);
  std::uniform_real_distribution<double> shift(-jitter * h, jitter * h);
  std::vector<Point> verts = g.verts;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const double dx = shift(rng), dy = shift(rng);
    if (flat.is_boundary_vertex(static_cast<int>(i))) continue;
    verts[i][0] += dx;
    verts[i][1] += dy;
  }
  return Mesh(2, std::move(verts), g.elems, corners);
}

Mesh cube_tets() {
  std::vector<Point> verts;
  for (int k = 0; k < 8; ++k) verts.push_back({double(k & 1), double((k >> 1) & 1), double((k >> 2) & 1)});
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::vector<int>> elems;
  for (const auto& p : perms) {
    int v = 0;
    std::vector<int> el{v};
    for (int s = 0; s < 3; ++s) {
      v |= 1 << p[s];
      el.push_back(v);
    }
    elems.push_back(el);
  }
  return Mesh(3, verts, elems);
}

Mesh uniform_refine(const Mesh& mesh) {
  if (mesh.dim() != 2) throw MeshError("uniform_refine: only d = 2 is supported");
  std::vector<Point> verts = mesh.vertices();
  std::map<Edge, int> mid;
  auto midpoint = [&](int a, int b) {
    auto [it, fresh] = mid.try_emplace(edge_key(a, b), static_cast<int>(verts.size()));
    if (fresh) verts.push_back({(verts[a][0] + verts[b][0]) / 2, (verts[a][1] + verts[b][1]) / 2});
    return it->second;
  };
  std::vector<std::vector<int>> elems;
  for (const auto& el : mesh.elements()) {
    const std::array<int, 3> t{el[0], el[1], el[2]};
    const int m01 = midpoint(t[0], t[1]), m12 = midpoint(t[1], t[2]), m20 = midpoint(t[2], t[0]);
    for (const auto& c : red_children(t, m01, m12, m20)) elems.push_back({c[0], c[1], c[2]});
  }
  return Mesh(2, std::move(verts), std::move(elems), mesh.corners());
}

std::vector<Mesh> geometric_refine(const GeometricMeshSpec& spec, double kappa_cap) {
  const Mesh& base = spec.base_mesh;
  if (!(spec.sigma > 0.0 && spec.sigma < 1.0)) throw MeshError("sigma must lie in (0,1)");
  if (std::abs(spec.sigma - 0.5) > 1e-12)
    throw MeshError("the built-in generator only produces sigma = 1/2 grading");
  if (base.dim() != 2) throw MeshError("the built-in generator only supports d = 2");
  if (spec.levels < 0) throw MeshError("levels must be nonnegative");

  std::vector<int> corner_ids;
  for (const auto& c : spec.corners) {
    auto v = base.find_vertex(c);
    if (!v) throw MeshError("corner is not a vertex of the base mesh");
    corner_ids.push_back(*v);
  }

  std::vector<Point> verts = base.vertices();
  std::map<Edge, int> mid;
  std::vector<std::array<int, 3>> leaves;
  for (const auto& el : base.elements()) leaves.push_back({el[0], el[1], el[2]});

  auto midpoint = [&](int a, int b) {
    auto [it, fresh] = mid.try_emplace(edge_key(a, b), static_cast<int>(verts.size()));
    if (fresh) verts.push_back({(verts[a][0] + verts[b][0]) / 2, (verts[a][1] + verts[b][1]) / 2});
    return it->second;
  };
  auto find_mid = [&](int a, int b) {
    auto it = mid.find(edge_key(a, b));
    return it == mid.end() ? -1 : it->second;
  };
  auto refine_marked = [&](const std::vector<char>& marked) {
    std::vector<std::array<int, 3>> next;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const auto& t = leaves[i];
      if (!marked[i]) {
        next.push_back(t);
        continue;
      }
      const int m01 = midpoint(t[0], t[1]), m12 = midpoint(t[1], t[2]), m20 = midpoint(t[2], t[0]);
      for (const auto& c : red_children(t, m01, m12, m20)) next.push_back(c);
    }
    leaves = std::move(next);
  };

  std::vector<Point> corners = spec.corners;
  auto emit = [&]() {
    std::vector<std::vector<int>> elems;
    for (const auto& t : leaves) {
      int hanging = -1, count = 0;
      for (int e = 0; e < 3; ++e)
        if (find_mid(t[e], t[(e + 1) % 3]) >= 0) {
          hanging = e;
          ++count;
        }
      if (count == 0) {
        elems.push_back({t[0], t[1], t[2]});
        continue;
      }
      const int a = t[hanging], b = t[(hanging + 1) % 3], c = t[(hanging + 2) % 3];
      const int m = find_mid(a, b);
      elems.push_back({a, m, c});
      elems.push_back({m, b, c});
    }
    Mesh out(2, verts, std::move(elems), corners);
    if (shape_regularity(out).kappa > kappa_cap)
      throw MeshError("geometric refinement exceeded the shape-regularity cap");
    return out;
  };

  std::vector<Mesh> levels;
  levels.push_back(emit());
  for (int round = 1; round <= spec.levels; ++round) {
    std::vector<char> marked(leaves.size(), 0);
    for (std::size_t i = 0; i < leaves.size(); ++i)
      for (int v : leaves[i])
        for (int c : corner_ids)
          if (v == c) marked[i] = 1;
    refine_marked(marked);
    while (true) {
      std::vector<char> close(leaves.size(), 0);
      bool any = false;
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        const auto& t = leaves[i];
        int count = 0;
        bool deep = false;
        for (int e = 0; e < 3; ++e) {
          const int a = t[e], b = t[(e + 1) % 3];
          const int m = find_mid(a, b);
          if (m < 0) continue;
          ++count;
          if (find_mid(a, m) >= 0 || find_mid(m, b) >= 0) deep = true;
        }
        if (count >= 2 || deep) {
          close[i] = 1;
          any = true;
        }
      }
      if (!any) break;
      refine_marked(close);
    }
    levels.push_back(emit());
  }
  return levels;
}

std::vector<Mesh> lshape_geometric(int levels) {
  const Mesh base = lshape_mesh();
  return geometric_refine(GeometricMeshSpec{0.5, base.corners(), levels, base});
}

GradingReport grading_ratios(const Mesh& mesh) {
  GradingReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (int k = 0; k < static_cast<int>(mesh.num_elements()); ++k) {
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& c : mesh.corners()) dist = std::min(dist, distance_to_element(mesh, k, c));
    const double h = mesh.diameter(k);
    if (dist <= 1e-12 * h) {
      rep.corner_diameter = std::max(rep.corner_diameter, h);
      continue;
    }
    rep.min_ratio = std::min(rep.min_ratio, h / dist);
    rep.max_ratio = std::max(rep.max_ratio, h / dist);
  }
  return rep;
}

}  // namespace fem2nn
