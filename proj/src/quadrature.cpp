#include "fem2nn/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace fem2nn {

void gauss_jacobi(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  // Golub-Welsch on the Jacobi matrix of the monic recurrence.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    j(k, k) = k == 0 ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1;
      const double t = 2.0 * m + a + b;
      const double beta =
          4.0 * m * (m + a) * (m + b) * (m + a + b) / (t * t * (t + 1.0) * (t - 1.0));
      j(k, k + 1) = j(k + 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    x[k] = eig.eigenvalues()(k);
    const double v0 = eig.eigenvectors()(0, k);
    w[k] = mu0 * v0 * v0;
  }
}

QuadratureRule gauss_simplex(int dim, int order) {
  if (order < 1) throw MeshError("quadrature order must be at least 1");
  if (dim < 1 || dim > 3) throw MeshError("quadrature only for d = 1, 2, 3");
  const int n = (order + 2) / 2;
  // Rule on [0,1] for the weight (1-u)^alpha.
  auto line = [n](int alpha, std::vector<double>& u, std::vector<double>& w) {
    gauss_jacobi(n, alpha, 0.0, u, w);
    for (int k = 0; k < n; ++k) {
      u[k] = (1.0 + u[k]) / 2.0;
      w[k] /= std::pow(2.0, alpha + 1);
    }
  };
  QuadratureRule rule;
  rule.dim = dim;
  rule.order = order;
  std::vector<double> u0, w0, u1, w1, u2, w2;
  line(dim - 1, u0, w0);
  if (dim >= 2) line(dim - 2, u1, w1);
  if (dim >= 3) line(0, u2, w2);
  if (dim == 1) {
    for (int a = 0; a < n; ++a) {
      rule.points.push_back({u0[a]});
      rule.weights.push_back(w0[a]);
    }
  } else if (dim == 2) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        rule.points.push_back({u0[a], u1[b] * (1.0 - u0[a])});
        rule.weights.push_back(w0[a] * w1[b]);
      }
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          const double x = u0[a], y = u1[b] * (1.0 - x), z = u2[c] * (1.0 - x) * (1.0 - u1[b]);
          rule.points.push_back({x, y, z});
          rule.weights.push_back(w0[a] * w1[b] * w2[c]);
        }
  }
  return rule;
}

void map_rule(const std::vector<Point>& simplex, const QuadratureRule& rule, std::vector<Point>& points,
              std::vector<double>& weights) {
  const int d = static_cast<int>(simplex.size()) - 1;
  Eigen::MatrixXd jac(d, d);
  for (int j = 0; j < d; ++j)
    for (int c = 0; c < d; ++c) jac(c, j) = simplex[j + 1][c] - simplex[0][c];
  const double scale = std::abs(jac.determinant());
  points.clear();
  weights.clear();
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    Point x = simplex[0];
    for (int j = 0; j < d; ++j)
      for (int c = 0; c < d; ++c) x[c] += rule.points[q][j] * jac(c, j);
    points.push_back(std::move(x));
    weights.push_back(rule.weights[q] * scale);
  }
}

void map_rule(const Mesh& mesh, int k, const QuadratureRule& rule, std::vector<Point>& points,
              std::vector<double>& weights) {
  std::vector<Point> simplex;
  for (int v : mesh.element(k)) simplex.push_back(mesh.vertex(v));
  map_rule(simplex, rule, points, weights);
}

std::vector<std::vector<Point>> split_toward(const std::vector<Point>& simplex, int apex, int levels) {
  if (levels <= 0 || simplex.size() != 3) return {simplex};
  auto mid = [](const Point& a, const Point& b) { return Point{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2}; };
  const Point& c = simplex[static_cast<std::size_t>(apex)];
  const Point& b1 = simplex[static_cast<std::size_t>((apex + 1) % 3)];
  const Point& b2 = simplex[static_cast<std::size_t>((apex + 2) % 3)];
  const Point m1 = mid(c, b1), m2 = mid(c, b2), m12 = mid(b1, b2);
  std::vector<std::vector<Point>> out{{m1, b1, m12}, {m2, m12, b2}, {m1, m12, m2}};
  for (auto& s : split_toward({c, m1, m2}, 0, levels - 1)) out.push_back(std::move(s));
  return out;
}

}  // namespace fem2nn
