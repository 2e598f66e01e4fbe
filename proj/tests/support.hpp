#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fem2nn/mesh.hpp"
#include "fem2nn/network.hpp"

namespace testing {

inline std::vector<std::vector<double>> random_points(int count, int dim, double lo, double hi,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& c : p) c = u(rng);
  return pts;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Largest |a_i - b_i| relative to 1 + |b|.
inline double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / (1.0 + std::abs(b[i])));
  return m;
}

// Centroids, vertices and edge midpoints of every element.
inline std::vector<fem2nn::Point> structural_points(const fem2nn::Mesh& mesh) {
  std::vector<fem2nn::Point> pts;
  const int d = mesh.dim();
  for (int k = 0; k < static_cast<int>(mesh.num_elements()); ++k) {
    const auto& el = mesh.element(k);
    fem2nn::Point c(d, 0.0);
    for (int v : el)
      for (int j = 0; j < d; ++j) c[j] += mesh.vertex(v)[j] / (d + 1);
    pts.push_back(c);
    for (std::size_t a = 0; a < el.size(); ++a)
      for (std::size_t b = a + 1; b < el.size(); ++b) {
        fem2nn::Point m(d);
        for (int j = 0; j < d; ++j) m[j] = (mesh.vertex(el[a])[j] + mesh.vertex(el[b])[j]) / 2;
        pts.push_back(m);
      }
  }
  for (const auto& v : mesh.vertices()) pts.push_back(v);
  return pts;
}

}  // namespace testing
