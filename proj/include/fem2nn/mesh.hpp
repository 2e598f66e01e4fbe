#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fem2nn {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Point = std::vector<double>;

/// Affine function x -> slope . x + intercept on R^d.
struct Affine {
  std::vector<double> slope;
  double intercept = 0.0;

  double operator()(std::span<const double> x) const;
};

/// Simplicial mesh of d-simplices in R^d.
///
/// The mesh is immutable after construction.  Per-element affine maps are
/// precomputed so that barycentric() and locate() are cheap and safe to call
/// concurrently.  Degenerate elements are accepted by the constructor (so that
/// diagnostics can name them) but every geometric query on them throws.
class Mesh {
 public:
  Mesh(int dim, std::vector<Point> vertices, std::vector<std::vector<int>> elements,
       std::vector<Point> corners = {});

  int dim() const { return dim_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return elements_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const std::vector<std::vector<int>>& elements() const { return elements_; }
  const std::vector<int>& element(int k) const { return elements_[static_cast<std::size_t>(k)]; }

  /// Singular points (coordinates); metadata carried through refinement and JSON.
  const std::vector<Point>& corners() const { return corners_; }

  /// Faces (sorted d-tuples of vertex indices) belonging to exactly one element.
  const std::vector<std::vector<int>>& boundary_faces() const { return boundary_faces_; }
  bool is_boundary_vertex(int i) const { return boundary_vertex_[static_cast<std::size_t>(i)]; }

  double volume(int k) const { return volumes_[static_cast<std::size_t>(k)]; }
  double diameter(int k) const { return diameters_[static_cast<std::size_t>(k)]; }
  bool is_degenerate(int k) const { return degenerate_[static_cast<std::size_t>(k)]; }

  /// Barycentric coordinates of x with respect to element k (local vertex order).
  std::vector<double> barycentric(int k, std::span<const double> x) const;

  /// The barycentric coordinate of local vertex `local` of element k as an affine
  /// function on all of R^d.
  Affine barycentric_affine(int k, int local) const;

  /// Gradients of the d+1 barycentric coordinates of element k.
  std::vector<std::vector<double>> barycentric_gradients(int k) const;

  /// Lowest-index element containing x (all barycentric coordinates >= -tol).
  std::optional<int> locate(std::span<const double> x, double tol = 1e-12) const;

  /// Index of the vertex coinciding with p (within tol), if any.
  std::optional<int> find_vertex(std::span<const double> p, double tol = 1e-12) const;

  /// Corner coordinates resolved to vertex indices; throws if a corner is not a vertex.
  std::vector<int> corner_vertices() const;

  double total_volume() const;

 private:
  void check_element(int k) const;

  int dim_;
  std::vector<Point> vertices_;
  std::vector<std::vector<int>> elements_;
  std::vector<Point> corners_;
  std::vector<std::vector<int>> boundary_faces_;
  std::vector<bool> boundary_vertex_;
  std::vector<double> volumes_;
  std::vector<double> diameters_;
  std::vector<bool> degenerate_;
  // Row-major d x d inverse of [a_1 - a_0, ..., a_d - a_0] per element.
  std::vector<std::vector<double>> inverse_jacobians_;
};

struct RegularityReport {
  bool pass = true;
  std::vector<std::pair<int, int>> violating_pairs;
  std::vector<int> degenerate_elements;
  std::vector<int> unused_vertices;
  std::vector<std::string> messages;
};

/// Full pairwise check that every two elements meet in the convex hull of their
/// shared vertices.  Throws MeshError for an empty mesh or duplicate vertices.
RegularityReport validate_regularity(const Mesh& mesh, double tol = 1e-9);

struct ShapeReport {
  std::vector<double> diameters;
  std::vector<double> inradii;
  double kappa = 0.0;
};

ShapeReport shape_regularity(const Mesh& mesh);

/// (d-1)-dimensional measure of the facet of element k opposite local vertex `local`.
double facet_measure(const Mesh& mesh, int k, int local);

struct PatchIndex {
  std::vector<std::vector<int>> elements_of_vertex;
  std::vector<int> s;
  int s_max = 0;
};

PatchIndex patch_index(const Mesh& mesh);

/// Distance from a point to element k (0 inside).
double distance_to_element(const Mesh& mesh, int k, std::span<const double> x);

}  // namespace fem2nn
