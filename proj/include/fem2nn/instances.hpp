#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fem2nn/mesh.hpp"

namespace fem2nn {

using ScalarField = std::function<double(std::span<const double>)>;
using VectorField = std::function<std::vector<double>(std::span<const double>)>;

/// Model function with a point singularity at the corners of its domain,
/// u = r^a g(phi) near the corner.
struct SingularInstance {
  std::string name;
  Mesh base_mesh;  // corners recorded on the mesh
  double a = 0.5;      // radial exponent
  double delta = 1.0;  // Gevrey index of the angular profile
  double beta = -1.25; // weight exponent (metadata only)
  ScalarField u;
  VectorField grad_u;
};

/// lshape: r^{2/3} sin(2 phi / 3) on the L-shape (analytic, delta = 1).
/// square: r^a (1-x)(1-y) on the unit square, singular at the origin.
/// gevrey: r^a g(phi) on the unit square with the Gevrey-2 bump
///         g = exp(1 - 1/(1-t^2)), t = 4 phi / pi - 1.
std::vector<SingularInstance> builtin_instances(double a = 0.5);

/// Lookup by name; throws std::invalid_argument for unknown names.
SingularInstance instance_by_name(const std::string& name, double a = 0.5);

}  // namespace fem2nn
