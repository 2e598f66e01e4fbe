#pragma once

#include <span>
#include <vector>

#include "fem2nn/mesh.hpp"
#include "fem2nn/network.hpp"

namespace fem2nn {

struct AffinePiece {
  enum class Kind { Zero, Barycentric, Barrier };
  Kind kind = Kind::Zero;
  int vertex = -1;   // hat vertex i
  int element = -1;  // element K of lambda_{i,K}; for barriers the element it stays above
  Affine f;
};

/// theta(x) = max over sets of (min over the pieces of the set).
struct LatticeForm {
  int dim = 2;
  std::vector<AffinePiece> pieces;
  std::vector<std::vector<int>> sets;

  double evaluate(std::span<const double> x) const;
  std::size_t total_items() const;
};

/// Value of the hat function of `vertex` at x (0 outside the domain).
double hat_direct(const Mesh& mesh, int vertex, std::span<const double> x);

/// Max-min representation of the hat function of `vertex`, valid on the closed domain.
/// Convex patches get the single set {lambda_{i,K} : K in patch}; otherwise every
/// element K of the patch contributes a set of pieces that dominate lambda_{i,K}
/// on K and lie below the hat on every other element, adding barrier pieces
/// lambda_{i,K} + c*phi where no barycentric piece does.
LatticeForm hat_lattice(const Mesh& mesh, int vertex);

/// Balanced tree of binary max or min gadgets over k inputs, `levels` >= ceil(log2 k)
/// ReLU layers plus an affine output.
Network reduction_tree(int k, bool is_max, int levels);

/// ReLU-only network with realization equal to the form.
Network lattice_to_relu(const LatticeForm& form);

/// All hat functions in parallel, depth-aligned with ReLU identity padding.
Network hat_networks(const Mesh& mesh);

/// x -> sum_i v_i theta_i(x).
Network cpwl_function_net(const Mesh& mesh, const std::vector<double>& nodal_values);

}  // namespace fem2nn
