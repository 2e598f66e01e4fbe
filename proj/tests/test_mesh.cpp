#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fem2nn/mesh.hpp"
#include "fem2nn/nodes.hpp"
#include "fem2nn/refine.hpp"
#include "fem2nn/study.hpp"
#include "support.hpp"

using namespace fem2nn;

namespace {

using P2 = std::array<double, 2>;

double cross(const P2& o, const P2& a, const P2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Sutherland-Hodgman clip of polygon `poly` against the closed triangle `tri`
// (counter-clockwise).  Degenerate results (points, segments) survive as
// repeated vertices.
std::vector<P2> clip(std::vector<P2> poly, std::array<P2, 3> tri) {
  if (cross(tri[0], tri[1], tri[2]) < 0) std::swap(tri[1], tri[2]);
  const double eps = 1e-12;
  for (int e = 0; e < 3; ++e) {
    const P2 a = tri[e], b = tri[(e + 1) % 3];
    std::vector<P2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const P2 cur = poly[i], prev = poly[(i + poly.size() - 1) % poly.size()];
      const double sc = cross(a, b, cur), sp = cross(a, b, prev);
      const bool in_c = sc >= -eps, in_p = sp >= -eps;
      if (in_c != in_p) {
        const double t = sp / (sp - sc);
        out.push_back({prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])});
      }
      if (in_c) out.push_back(cur);
    }
    poly = std::move(out);
    if (poly.empty()) break;
  }
  return poly;
}

// Brute-force verdict for a pair: every point of the intersection polygon must
// have zero barycentric weight on the vertices the two triangles do not share.
bool pair_regular(const Mesh& mesh, int i, int j) {
  auto tri = [&](int k) {
    std::array<P2, 3> t;
    for (int a = 0; a < 3; ++a) t[a] = {mesh.vertex(mesh.element(k)[a])[0], mesh.vertex(mesh.element(k)[a])[1]};
    return t;
  };
  const auto ti = tri(i);
  const auto poly = clip({ti[0], ti[1], ti[2]}, tri(j));
  std::set<int> shared;
  for (int v : mesh.element(i))
    for (int w : mesh.element(j))
      if (v == w) shared.insert(v);
  for (const auto& pt : poly) {
    for (int k : {i, j}) {
      const auto lam = mesh.barycentric(k, std::vector<double>{pt[0], pt[1]});
      for (int a = 0; a < 3; ++a)
        if (!shared.count(mesh.element(k)[a]) && lam[a] > 1e-9) return false;
    }
  }
  return true;
}

std::set<std::pair<int, int>> brute_force_violations(const Mesh& mesh) {
  std::set<std::pair<int, int>> bad;
  const int n = static_cast<int>(mesh.num_elements());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!pair_regular(mesh, i, j)) bad.insert({i, j});
  return bad;
}

Mesh single_triangle() { return Mesh(2, {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}); }

double polygon_area(const Mesh& mesh) {
  double a = 0.0;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) a += mesh.volume(static_cast<int>(k));
  return a;
}

}  // namespace

TEST_CASE("two triangles sharing a full edge are regular") {
  const Mesh m(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
  CHECK(validate_regularity(m).pass);
}

TEST_CASE("hanging node is reported") {
  const Mesh m(2, {{0, 0}, {2, 0}, {1, 2}, {1, 0}, {0.5, -1}}, {{0, 1, 2}, {0, 3, 4}});
  const auto rep = validate_regularity(m);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.violating_pairs.size() == 1);
  CHECK(rep.violating_pairs[0] == std::pair<int, int>{0, 1});
  CHECK(brute_force_violations(m).size() == 1);
}

TEST_CASE("regularity agrees with pairwise clipping") {
  SUBCASE("criss-cross square") {
    const Mesh m = square_mesh(1);
    CHECK(validate_regularity(m).pass);
    CHECK(brute_force_violations(m).empty());
  }
  SUBCASE("random meshes and graded meshes") {
    std::vector<Mesh> meshes{random_mesh(0, 3, 1), random_mesh(1, 2, 2), lshape_geometric(3).back(),
                             uniform_refine(lshape_mesh())};
    for (const auto& m : meshes) {
      CHECK(validate_regularity(m).pass);
      CHECK(brute_force_violations(m).empty());
    }
  }
  SUBCASE("overlapping and hanging configurations") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      Mesh base = random_mesh(0, 3, trial);
      auto verts = base.vertices();
      auto elems = base.elements();
      std::uniform_int_distribution<int> pick(0, static_cast<int>(verts.size()) - 1);
      std::uniform_real_distribution<double> shift(-0.4, 0.4);
      const int v = pick(rng);
      verts[v][0] += shift(rng);
      verts[v][1] += shift(rng);
      const Mesh m(2, verts, elems);
      bool degenerate = false;
      for (int k = 0; k < static_cast<int>(m.num_elements()); ++k) degenerate = degenerate || m.is_degenerate(k);
      if (degenerate) continue;
      const auto rep = validate_regularity(m);
      const auto oracle = brute_force_violations(m);
      std::set<std::pair<int, int>> got(rep.violating_pairs.begin(), rep.violating_pairs.end());
      CHECK(got == oracle);
      CHECK(rep.pass == oracle.empty());
    }
  }
}

TEST_CASE("regularity input errors") {
  CHECK_THROWS_AS(validate_regularity(Mesh(2, {}, {})), MeshError);
  CHECK_THROWS_AS(validate_regularity(Mesh(2, {{0, 0}, {1, 0}, {0, 1}, {1e-15, 0}}, {{0, 1, 2}})), MeshError);
  const auto rep = validate_regularity(Mesh(2, {{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}));
  CHECK_FALSE(rep.pass);
  CHECK(rep.degenerate_elements == std::vector<int>{0});
}

TEST_CASE("shape regularity of reference triangles") {
  const Mesh eq(2, {{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}}, {{0, 1, 2}});
  const auto r = shape_regularity(eq);
  CHECK(r.diameters[0] == doctest::Approx(1.0));
  CHECK(r.inradii[0] == doctest::Approx(std::sqrt(3.0) / 6));
  CHECK(r.kappa == doctest::Approx(2 * std::sqrt(3.0)));

  const auto ri = shape_regularity(single_triangle());
  CHECK(ri.diameters[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(ri.inradii[0] == doctest::Approx((2 - std::sqrt(2.0)) / 2));

  const auto cc = shape_regularity(square_mesh(3));
  CHECK(cc.kappa == doctest::Approx(cc.diameters[0] / cc.inradii[0]));
  CHECK(cc.kappa > 1.0);

  CHECK_THROWS_AS(shape_regularity(Mesh(2, {{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}})), MeshError);
}

TEST_CASE("patch index") {
  const auto s1 = patch_index(single_triangle());
  CHECK(s1.s == std::vector<int>{1, 1, 1});
  CHECK(s1.s_max == 1);

  const Mesh cc = square_mesh(1);
  const auto s2 = patch_index(cc);
  const int center = *cc.find_vertex(std::vector<double>{0.5, 0.5});
  CHECK(s2.s[center] == 4);

  for (const Mesh& m : {random_mesh(1, 3, 4), lshape_geometric(4).back(), cube_tets()}) {
    const auto s = patch_index(m);
    long total = 0;
    for (int x : s.s) {
      CHECK(x >= 1);
      total += x;
    }
    CHECK(total == static_cast<long>((m.dim() + 1) * m.num_elements()));
    CHECK(s.s_max == *std::max_element(s.s.begin(), s.s.end()));
  }
}

TEST_CASE("barycentric coordinates") {
  const Mesh m = random_mesh(0, 2, 3);
  const int k = 2;
  const auto& el = m.element(k);
  const auto l0 = m.barycentric(k, m.vertex(el[0]));
  CHECK(l0[0] == doctest::Approx(1.0));
  CHECK(std::abs(l0[1]) < 1e-14);
  CHECK(std::abs(l0[2]) < 1e-14);
  Point c(2, 0.0);
  for (int v : el)
    for (int j = 0; j < 2; ++j) c[j] += m.vertex(v)[j] / 3;
  for (double l : m.barycentric(k, c)) CHECK(l == doctest::Approx(1.0 / 3));
  for (const auto& x : testing::random_points(100, 2, -3, 3, 5)) {
    const auto lam = m.barycentric(k, x);
    CHECK(std::abs(lam[0] + lam[1] + lam[2] - 1.0) < 1e-12);
  }
  const Mesh t = cube_tets();
  for (double l : t.barycentric(0, std::vector<double>{0.25, 0.25, 0.25}))
    CHECK(std::isfinite(l));
}

TEST_CASE("locate") {
  const Mesh m(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
  CHECK(m.locate(std::vector<double>{2.0 / 3, 1.0 / 3}) == 0);
  CHECK(m.locate(std::vector<double>{1.0 / 3, 2.0 / 3}) == 1);
  CHECK(m.locate(std::vector<double>{0.5, 0.5}) == 0);
  CHECK_FALSE(m.locate(std::vector<double>{1.5, 0.5}).has_value());
}

TEST_CASE("elements partition the domain") {
  CHECK(polygon_area(lshape_mesh()) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(polygon_area(random_mesh(1, 4, 9)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(polygon_area(random_mesh(0, 5, 9)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(polygon_area(lshape_geometric(6).back()) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(polygon_area(cube_tets()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("geometric refinement toward the reentrant corner") {
  const auto levels = lshape_geometric(8);
  REQUIRE(levels.size() == 9);
  const Mesh base = lshape_mesh();
  CHECK(levels[0].elements() == base.elements());
  CHECK(levels[0].vertices() == base.vertices());

  const double base_diam = grading_ratios(levels[0]).corner_diameter;
  CHECK(grading_ratios(levels[3]).corner_diameter == doctest::Approx(base_diam / 8));

  std::vector<double> ell, count;
  for (int l = 0; l < static_cast<int>(levels.size()); ++l) {
    const Mesh& m = levels[l];
    CAPTURE(l);
    CHECK(validate_regularity(m).pass);
    CHECK(shape_regularity(m).kappa < 10.0);
    CHECK(m.find_vertex(std::vector<double>{0.0, 0.0}).has_value());
    const auto g = grading_ratios(m);
    if (l > 0) {
      CHECK(g.min_ratio > 0.5);
      CHECK(g.max_ratio < 2.0);
    }
    ell.push_back(l);
    count.push_back(static_cast<double>(m.num_elements()));
  }
  const LineFit fit = fit_line(ell, count);
  CHECK(fit.r2 > 0.99);
  CHECK(fit.slope > 0);
}

TEST_CASE("geometric refinement rejects bad specs") {
  const Mesh base = lshape_mesh();
  CHECK_THROWS_AS(geometric_refine({0.5, {{0.3, 0.3}}, 2, base}), MeshError);
  CHECK_THROWS_AS(geometric_refine({1.5, base.corners(), 2, base}), MeshError);
  CHECK_THROWS_AS(geometric_refine({0.3, base.corners(), 2, base}), MeshError);
}

TEST_CASE("interpolation nodes") {
  CHECK(interpolation_nodes(single_triangle(), 2).size() == 6);

  const Mesh two(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
  CHECK(interpolation_nodes(two, 3).size() == 16);

  const auto p1 = interpolation_nodes(two, 1);
  REQUIRE(p1.size() == 4);
  for (const auto& n : p1.nodes) {
    CHECK(n.m() == 0);
    CHECK(n.alpha == std::vector<int>{1});
  }
}

TEST_CASE("node count matches brute-force lattice dedupe") {
  for (const Mesh& m : {random_mesh(1, 2, 11), lshape_geometric(2).back(), cube_tets()}) {
    const int d = m.dim();
    for (int p = 1; p <= 4; ++p) {
      CAPTURE(p);
      const auto set = interpolation_nodes(m, p);
      std::set<std::vector<long long>> pts;
      for (int k = 0; k < static_cast<int>(m.num_elements()); ++k)
        for (const auto& beta : local_multi_indices(d, p)) {
          std::vector<long long> key(d);
          for (int j = 0; j < d; ++j) {
            double x = 0.0;
            for (int a = 0; a <= d; ++a) x += beta[a] * m.vertex(m.element(k)[a])[j] / p;
            key[j] = std::llround(x * 1e9);
          }
          pts.insert(key);
        }
      CHECK(set.size() == pts.size());
      const std::size_t local = local_multi_indices(d, p).size();
      for (const auto& en : set.element_nodes) CHECK(en.size() == local);
      for (const auto& n : set.nodes) {
        int sum = 0;
        for (int a : n.alpha) {
          CHECK(a >= 1);
          sum += a;
        }
        CHECK(sum == p);
        CHECK(n.m() <= std::min(d, p));
      }
    }
  }
}
