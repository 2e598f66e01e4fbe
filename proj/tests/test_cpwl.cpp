#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fem2nn/cpwl.hpp"
#include "fem2nn/refine.hpp"
#include "fem2nn/study.hpp"
#include "support.hpp"

using namespace fem2nn;

namespace {

// Hat value by locate + barycentric coordinates.
double hat_oracle(const Mesh& mesh, int vertex, const Point& x) {
  const auto k = mesh.locate(x, 1e-12);
  if (!k) return 0.0;
  const auto& el = mesh.element(*k);
  const auto lam = mesh.barycentric(*k, x);
  for (std::size_t a = 0; a < el.size(); ++a)
    if (el[a] == vertex) return lam[a];
  return 0.0;
}

// Uniform point of element k.
Point point_in(const Mesh& mesh, int k, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  const int d = mesh.dim();
  std::vector<double> w(d + 1);
  double s = 0.0;
  for (auto& x : w) s += (x = e(rng));
  Point p(d, 0.0);
  for (int a = 0; a <= d; ++a)
    for (int j = 0; j < d; ++j) p[j] += w[a] / s * mesh.vertex(mesh.element(k)[a])[j];
  return p;
}

std::vector<Mesh> test_meshes() {
  return {lshape_mesh(), square_mesh(2), random_mesh(0, 4, 1), random_mesh(1, 2, 2), lshape_geometric(3).back(),
          cube_tets()};
}

}  // namespace

TEST_CASE("single triangle lattice is the barycentric coordinate") {
  const Mesh m(2, {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  for (int v = 0; v < 3; ++v) {
    const LatticeForm f = hat_lattice(m, v);
    for (const auto& x : sample_domain(m, 200, v)) {
      const auto lam = m.barycentric(0, x);
      CHECK(std::abs(f.evaluate(x) - lam[v]) < 1e-14);
    }
  }
}

TEST_CASE("convex patch uses max{0, min lambda}") {
  const Mesh m = square_mesh(2);
  const int center = *m.find_vertex(std::vector<double>{0.5, 0.5});
  const LatticeForm f = hat_lattice(m, center);
  REQUIRE(f.sets.size() == 2);
  CHECK(f.sets[0] == std::vector<int>{0});
  CHECK(f.pieces[0].kind == AffinePiece::Kind::Zero);
  CHECK(f.sets[1].size() == static_cast<std::size_t>(patch_index(m).s[center]));
  for (const auto& x : sample_domain(m, 1000, 3)) CHECK(std::abs(f.evaluate(x) - hat_oracle(m, center, x)) < 1e-12);
}

TEST_CASE("nonconvex patch at the reentrant corner") {
  for (const Mesh& m : {lshape_mesh(), lshape_geometric(2).back(), random_mesh(1, 2, 5)}) {
    const int corner = *m.find_vertex(std::vector<double>{0.0, 0.0});
    const LatticeForm f = hat_lattice(m, corner);
    CHECK(f.sets.size() > 1);
    for (const auto& x : sample_domain(m, 1000, 4)) CHECK(std::abs(f.evaluate(x) - hat_oracle(m, corner, x)) < 1e-12);
  }
}

TEST_CASE("lattice forms match the hat on every test mesh") {
  for (const Mesh& m : test_meshes()) {
    const auto pts = sample_domain(m, 300, 6);
    for (int v = 0; v < static_cast<int>(m.num_vertices()); ++v) {
      const LatticeForm f = hat_lattice(m, v);
      for (const auto& x : pts) CHECK(std::abs(f.evaluate(x) - hat_oracle(m, v, x)) < 1e-12);
      for (const auto& pc : f.pieces)
        if (pc.kind == AffinePiece::Kind::Barycentric) {
          for (int w : m.element(pc.element))
            CHECK(std::abs(pc.f(m.vertex(w)) - (w == v ? 1.0 : 0.0)) < 1e-12);
        }
    }
  }
}

TEST_CASE("max and min gadgets") {
  const Network mx = reduction_tree(2, true, 1);
  CHECK(mx.realize(std::vector<double>{1, -1})[0] == 1.0);
  CHECK(mx.realize(std::vector<double>{-3, 2.5})[0] == 2.5);
  const Network mn = reduction_tree(5, false, 3);
  CHECK(mn.realize(std::vector<double>(5, -0.75))[0] == -0.75);
  CHECK(mn.realize(std::vector<double>{3, 1, 4, 1.5, 9})[0] == 1.0);
  CHECK(size_depth(mn).relu2_layers == 0);
  for (const auto& x : testing::random_points(200, 7, -5, 5, 7)) {
    const double expect = *std::max_element(x.begin(), x.end());
    CHECK(std::abs(reduction_tree(7, true, 3).realize(x)[0] - expect) < 1e-12);
  }
}

TEST_CASE("compiled lattice matches the form") {
  for (const Mesh& m : {lshape_mesh(), random_mesh(1, 2, 8), cube_tets()}) {
    const auto pts = sample_domain(m, 1000, 9);
    for (int v = 0; v < static_cast<int>(m.num_vertices()); v += 2) {
      const LatticeForm f = hat_lattice(m, v);
      const Network n = lattice_to_relu(f);
      CHECK(size_depth(n).relu2_layers == 0);
      const auto ys = n.realize_batch(pts);
      for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(ys[i][0] - f.evaluate(pts[i])) <= 1e-10);
    }
  }
}

TEST_CASE("hat networks") {
  for (const Mesh& m : test_meshes()) {
    const Network h = hat_networks(m);
    const auto rep = size_depth(h);
    const int nv = static_cast<int>(m.num_vertices());
    CHECK(h.output_dim() == nv);
    CHECK(rep.relu2_layers == 0);
    CHECK(rep.mixed_layers == 0);

    for (int j = 0; j < nv; ++j) {
      const auto y = h.realize(m.vertex(j));
      for (int i = 0; i < nv; ++i) CHECK(std::abs(y[i] - (i == j ? 1.0 : 0.0)) <= 1e-12);
    }

    auto pts = sample_domain(m, 1000, 10);
    for (auto& p : testing::structural_points(m)) pts.push_back(p);
    const auto ys = h.realize_batch(pts);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      double sum = 0.0;
      for (int i = 0; i < nv; ++i) {
        sum += ys[q][i];
        CHECK(std::abs(ys[q][i] - hat_oracle(m, i, pts[q])) <= 1e-10);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("hat outputs vanish off their patch") {
  const Mesh m = random_mesh(1, 2, 11);
  const Network h = hat_networks(m);
  std::mt19937_64 rng(12);
  for (int k = 0; k < static_cast<int>(m.num_elements()); ++k)
    for (int s = 0; s < 20; ++s) {
      const Point x = point_in(m, k, rng);
      const auto y = h.realize(x);
      for (int i = 0; i < static_cast<int>(m.num_vertices()); ++i) {
        const auto& el = m.element(k);
        if (std::find(el.begin(), el.end(), i) == el.end()) CHECK(std::abs(y[i]) <= 1e-12);
      }
    }
}

TEST_CASE("CPwL functions") {
  for (const Mesh& m : {lshape_geometric(2).back(), random_mesh(0, 3, 13), cube_tets()}) {
    const int nv = static_cast<int>(m.num_vertices());
    const auto pts = sample_domain(m, 1000, 14);

    const Network c = cpwl_function_net(m, std::vector<double>(nv, 2.5));
    for (const auto& x : pts) CHECK(std::abs(c.realize(x)[0] - 2.5) <= 1e-10);

    std::vector<double> xs(nv);
    for (int i = 0; i < nv; ++i) xs[i] = m.vertex(i)[0];
    const Network lin = cpwl_function_net(m, xs);
    for (const auto& x : pts) CHECK(std::abs(lin.realize(x)[0] - x[0]) <= 1e-10);

    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> v(nv), w(nv), vw(nv);
    for (auto& a : v) a = u(rng);
    for (auto& a : w) a = u(rng);
    const double lambda = -1.7;
    for (int i = 0; i < nv; ++i) vw[i] = v[i] + lambda * w[i];
    const Network nv_net = cpwl_function_net(m, v), nw_net = cpwl_function_net(m, w), nvw = cpwl_function_net(m, vw);
    for (const auto& x : pts) {
      double expect = 0.0;
      for (int i = 0; i < nv; ++i) expect += v[i] * hat_oracle(m, i, x);
      const double rv = nv_net.realize(x)[0];
      CHECK(std::abs(rv - expect) <= 1e-10);
      CHECK(std::abs(rv + lambda * nw_net.realize(x)[0] - nvw.realize(x)[0]) <= 1e-10);
    }
    CHECK_THROWS(cpwl_function_net(m, std::vector<double>(nv + 1, 0.0)));
  }
}

TEST_CASE("hat network size grows linearly with the mesh") {
  Mesh m = lshape_mesh();
  std::vector<double> ratios;
  for (int r = 0; r < 4; ++r) {
    ratios.push_back(static_cast<double>(hat_networks(m).size()) / m.num_elements());
    m = uniform_refine(m);
  }
  MESSAGE("M / |T| under uniform refinement: " << ratios[0] << " " << ratios[1] << " " << ratios[2] << " "
                                               << ratios[3]);
  for (std::size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] <= 2.0 * ratios[1]);
}
