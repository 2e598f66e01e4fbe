#pragma once

#include <vector>

#include "fem2nn/mesh.hpp"

namespace fem2nn {

/// Points and weights on the reference simplex conv(0, e_1, ..., e_d).
struct QuadratureRule {
  int dim = 2;
  int order = 0;
  std::vector<Point> points;
  std::vector<double> weights;
};

/// Gauss-Jacobi nodes and weights on [-1,1] for the weight (1-x)^a (1+x)^b.
void gauss_jacobi(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

/// Collapsed-coordinate tensor Gauss-Jacobi rule, exact for polynomials of degree <= order.
QuadratureRule gauss_simplex(int dim, int order);

/// Rule mapped onto element k: physical points and weights scaled by |K|/|ref|.
void map_rule(const Mesh& mesh, int k, const QuadratureRule& rule, std::vector<Point>& points,
              std::vector<double>& weights);

/// Rule mapped onto the simplex with the given vertex coordinates.
void map_rule(const std::vector<Point>& simplex, const QuadratureRule& rule, std::vector<Point>& points,
              std::vector<double>& weights);

/// Simplices (as vertex coordinate lists) obtained by splitting `simplex` `levels`
/// times toward its vertex `apex`: each level cuts the apex sub-simplex scaled by 1/2.
std::vector<std::vector<Point>> split_toward(const std::vector<Point>& simplex, int apex, int levels);

}  // namespace fem2nn
