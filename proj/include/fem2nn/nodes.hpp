#pragma once

#include <vector>

#include "fem2nn/mesh.hpp"

namespace fem2nn {

/// A Lagrange node i = sum_k alpha_k a_k / p, stored with its minimal
/// containing subsimplex K' = conv(a_0..a_m).
struct LagrangeNode {
  std::vector<int> vertices;  // a_0 < ... < a_m (global vertex indices)
  std::vector<int> alpha;     // alpha_k >= 1, sum = p
  Point x;

  int m() const { return static_cast<int>(vertices.size()) - 1; }
};

struct LagrangeNodeSet {
  int p = 1;
  int dim = 2;
  std::vector<LagrangeNode> nodes;
  /// element_nodes[k][j] is the global node of local_multi_indices(d, p)[j] on element k.
  std::vector<std::vector<int>> element_nodes;

  std::size_t size() const { return nodes.size(); }
};

/// All beta in N^{d+1} with |beta| = p, in lexicographic order.
std::vector<std::vector<int>> local_multi_indices(int d, int p);

/// Deduplicated nodes of the degree-p Lagrange space on `mesh`.  Nodes are
/// identified by (sorted vertex tuple, exponents), never by coordinates; the
/// resulting order is lexicographic in that key.
LagrangeNodeSet interpolation_nodes(const Mesh& mesh, int p);

/// True when node i lies on the boundary of the domain.
std::vector<bool> boundary_nodes(const Mesh& mesh, const LagrangeNodeSet& nodes);

}  // namespace fem2nn
