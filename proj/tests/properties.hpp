#pragma once

// Randomized invariants shared by the property suite and the acceptance run.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "fem2nn/combinators.hpp"
#include "fem2nn/cpwl.hpp"
#include "fem2nn/hofem.hpp"
#include "fem2nn/io.hpp"
#include "fem2nn/refine.hpp"
#include "fem2nn/study.hpp"

namespace properties {

using namespace fem2nn;

struct Outcome {
  bool ok = true;
  std::string detail;
};

inline std::vector<Mesh> property_meshes(std::uint64_t seed) {
  return {random_mesh(0, 3, seed), random_mesh(1, 2, seed + 1), lshape_geometric(3).back(), cube_tets()};
}

inline Outcome hat_partition_of_unity(std::uint64_t seed) {
  double worst = 0.0;
  for (const Mesh& m : property_meshes(seed)) {
    const Network h = hat_networks(m);
    for (const auto& y : h.realize_batch(sample_domain(m, 1000, seed))) {
      double s = 0.0;
      for (double v : y) s += v;
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return {worst <= 1e-10, "max |sum theta_i - 1| = " + std::to_string(worst)};
}

inline Outcome lagrange_partition_of_unity(std::uint64_t seed) {
  double worst = 0.0;
  for (const Mesh& m : property_meshes(seed))
    for (int p = 1; p <= 4; ++p) {
      const Network b = basis_networks(m, p);
      for (const auto& y : b.realize_batch(sample_domain(m, 1000, seed + p))) {
        double s = 0.0;
        for (double v : y) s += v;
        worst = std::max(worst, std::abs(s - 1.0));
      }
    }
  return {worst <= 1e-10, "max |sum phi_i - 1| = " + std::to_string(worst)};
}

inline Outcome hat_affine_reproduction(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2, 2);
  double worst = 0.0;
  for (const Mesh& m : property_meshes(seed)) {
    const int d = m.dim();
    std::vector<double> slope(d);
    for (auto& s : slope) s = u(rng);
    const double c = u(rng);
    auto f = [&](const Point& x) {
      double v = c;
      for (int j = 0; j < d; ++j) v += slope[j] * x[j];
      return v;
    };
    std::vector<double> nodal;
    for (const auto& v : m.vertices()) nodal.push_back(f(v));
    const Network n = cpwl_function_net(m, nodal);
    for (const auto& x : sample_domain(m, 1000, seed + 7)) worst = std::max(worst, std::abs(n.realize(x)[0] - f(x)));
  }
  return {worst <= 1e-10, "max affine reproduction error = " + std::to_string(worst)};
}

inline Outcome w_alpha_roots() {
  double worst = 0.0;
  for (int p = 1; p <= 6; ++p)
    for (int a = 1; a <= p; ++a) {
      const Network w = w_alpha_net(p, a);
      worst = std::max(worst, std::abs(w.realize(std::vector<double>{static_cast<double>(a) / p})[0] - 1.0));
      for (int j = 0; j < a; ++j)
        worst = std::max(worst, std::abs(w.realize(std::vector<double>{static_cast<double>(j) / p})[0]));
    }
  return {worst <= 1e-12, "max deviation at w_alpha(alpha/p) = 1 and roots j/p: " + std::to_string(worst)};
}

inline Outcome prune_preserves_realization(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(-1, 1);
  std::bernoulli_distribution keep(0.3);
  double worst = 0.0;
  bool grew = false;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Layer> layers;
    const std::vector<int> widths{10, 12, 8, 3};
    int prev = 3;
    for (std::size_t l = 0; l < widths.size(); ++l) {
      std::vector<Triplet> t;
      for (int r = 0; r < widths[l]; ++r)
        for (int c = 0; c < prev; ++c)
          if (keep(rng)) t.push_back({r, c, w(rng)});
      std::vector<double> b(widths[l]);
      for (auto& x : b) x = keep(rng) ? w(rng) : 0.0;
      const Activation a = l + 1 == widths.size() ? Activation::Identity
                           : (l + trial) % 2   ? Activation::ReLUSquared
                                               : Activation::ReLU;
      layers.push_back({SparseMatrix::from_triplets(widths[l], prev, t), b, std::vector<Activation>(widths[l], a)});
      prev = widths[l];
    }
    const Network n(3, std::move(layers));
    const Network p = prune(n);
    grew = grew || p.size() > n.size();
    std::uniform_real_distribution<double> x(-3, 3);
    for (int s = 0; s < 100; ++s) {
      const std::vector<double> pt{x(rng), x(rng), x(rng)};
      const auto a = n.realize(pt), b = p.realize(pt);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / (1 + std::abs(a[i])));
    }
  }
  // Compiled FE networks go through prune as well.
  auto space = std::make_shared<const FESpace>(random_mesh(1, 2, seed), 2);
  const BasisNetwork basis = compile_basis(space->mesh(), space->nodes());
  const Network again = prune(basis.net);
  grew = grew || again.size() > basis.net.size();
  for (const auto& pt : sample_domain(space->mesh(), 200, seed)) {
    const auto a = basis.net.realize(pt), b = again.realize(pt);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return {worst <= 1e-9 && !grew, "max relative deviation after prune = " + std::to_string(worst)};
}

inline Outcome network_json_round_trip(std::uint64_t seed) {
  bool same = true;
  for (const Mesh& m : property_meshes(seed))
    for (int p = 1; p <= 3; ++p) {
      auto space = std::make_shared<const FESpace>(m, p);
      std::mt19937_64 rng(seed + p);
      std::normal_distribution<double> g;
      std::vector<double> c(space->dim());
      for (auto& x : c) x = g(rng) * 1e3;
      const Network n = fe_function_net(FEFunction{space, c});
      const std::string a = dump(network_to_json(n));
      const std::string b = dump(network_to_json(network_from_json(nlohmann::json::parse(a))));
      same = same && a == b;
    }
  return {same, same ? "export -> import -> export identical" : "byte mismatch"};
}

}  // namespace properties
