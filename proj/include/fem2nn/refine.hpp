#pragma once

#include <cstdint>
#include <vector>

#include "fem2nn/mesh.hpp"

namespace fem2nn {

/// L-shaped domain (-1,1)^2 \ [0,1]x[-1,0]: six triangles around the reentrant
/// corner at the origin (recorded as the mesh corner).
Mesh lshape_mesh();

/// Unit square split into n x n criss-crossed cells (4 triangles per cell).
/// `corner` selects whether the origin is recorded as a singular corner.
Mesh square_mesh(int n, bool corner = false);

/// Jittered structured triangulation: n x n cells with randomly oriented
/// diagonals, interior vertices moved by up to `jitter` cell widths.
/// domain 0 = unit square (2 n^2 triangles), 1 = L-shape (6 n^2 triangles on
/// the three quadrant squares of side 1).
Mesh random_mesh(int domain, int n, std::uint64_t seed, double jitter = 0.2);

/// Unit cube split into 6 tetrahedra sharing the diagonal (0,0,0)-(1,1,1).
Mesh cube_tets();

/// Red refinement of every triangle (d = 2).
Mesh uniform_refine(const Mesh& mesh);

struct GeometricMeshSpec {
  double sigma = 0.5;
  std::vector<Point> corners;
  int levels = 0;
  Mesh base_mesh;
};

/// Meshes M^(0), ..., M^(levels) graded toward the corners.  Red refinement of
/// the elements touching a corner, red closure, and temporary green bisection of
/// elements with a single hanging edge.  Only sigma = 1/2 and d = 2 are built.
std::vector<Mesh> geometric_refine(const GeometricMeshSpec& spec, double kappa_cap = 50.0);

/// Convenience: graded L-shape meshes for levels 0..levels.
std::vector<Mesh> lshape_geometric(int levels);

/// Largest and smallest diam(K)/dist(K,S) over elements away from the corners.
struct GradingReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double corner_diameter = 0.0;  // largest element touching a corner
};

GradingReport grading_ratios(const Mesh& mesh);

}  // namespace fem2nn
