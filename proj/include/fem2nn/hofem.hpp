#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fem2nn/mesh.hpp"
#include "fem2nn/network.hpp"
#include "fem2nn/nodes.hpp"

namespace fem2nn {

/// theta_i = prod_k w_{alpha_k}(theta_{a_k}) for node i.
struct NodeFactor {
  int m = 0;
  std::vector<int> a;
  std::vector<int> alpha;
};

std::vector<NodeFactor> node_factorization(const LagrangeNodeSet& nodes);

/// Factor list of w_alpha(t) = prod_{j<alpha} (p/(j+1) t - j/(j+1)).
std::vector<std::pair<double, double>> w_alpha_factors(int p, int alpha);

/// w_alpha as a network, without depth padding.
Network w_alpha_raw(int p, int alpha);

/// Common depth c * ceil(log2(p+1)) of the w_alpha stack, c the smallest integer
/// that fits every alpha = 1..p.
int w_stack_depth(int p);

/// w_alpha padded to w_stack_depth(p) with ReLU^2 identities.
Network w_alpha_net(int p, int alpha);

/// 0/1 matrix with a row per (node, factor) picking w_{alpha_k}(theta_{a_k}) out of
/// the stacked outputs, column a_k * p + alpha_k - 1.
SparseMatrix routing_matrix(const LagrangeNodeSet& nodes, int num_vertices);

struct BasisNetwork {
  Network net;
  int depth_products = 0;  // product stage
  int depth_w = 0;         // w_alpha stacks
  int depth_hats = 0;      // hat functions
  std::size_t size_products = 0;
  std::size_t size_routing = 0;
  std::size_t size_w = 0;
  std::size_t size_hats = 0;
  std::size_t routing_rows = 0;
};

/// Products o routing o w-stacks o hats, joined by sparse concatenation, then pruned.
BasisNetwork compile_basis(const Mesh& mesh, const LagrangeNodeSet& nodes);

/// Network whose output i is the degree-p Lagrange basis function of node i.
Network basis_networks(const Mesh& mesh, int p);

/// Mesh together with its degree-p node set.
class FESpace {
 public:
  FESpace(Mesh mesh, int p);

  const Mesh& mesh() const { return mesh_; }
  const LagrangeNodeSet& nodes() const { return nodes_; }
  int p() const { return nodes_.p; }
  std::size_t dim() const { return nodes_.size(); }

 private:
  Mesh mesh_;
  LagrangeNodeSet nodes_;
};

/// v = sum_i coeffs_i theta_i; coefficient i is the value at node i.
struct FEFunction {
  std::shared_ptr<const FESpace> space;
  std::vector<double> coeffs;
};

/// Values of the local basis (local_multi_indices order) at barycentric coordinates lam.
std::vector<double> local_basis(int p, std::span<const double> lam);

/// Gradients of the local basis on element k.
std::vector<std::vector<double>> local_basis_gradients(const Mesh& mesh, int k, int p,
                                                       std::span<const double> lam);

/// v(x) via locate + barycentric coordinates.  Throws outside the domain.
double evaluate_fe_direct(const FEFunction& v, std::span<const double> x);

/// grad v(x) on the located element.
std::vector<double> evaluate_fe_gradient(const FEFunction& v, std::span<const double> x);

/// v evaluated on a known element.
double evaluate_on_element(const FEFunction& v, int k, std::span<const double> x);

Network fe_function_net(const Network& basis, const FEFunction& v);
Network fe_function_net(const FEFunction& v);

/// Several coefficient vectors at once: output r is the function of coeffs[r].
Network fe_functions_net(const Network& basis, const std::vector<std::vector<double>>& coeffs);

struct SizeAuditRow {
  int p = 0;
  std::size_t nodes = 0;
  std::size_t size = 0;
  int depth = 0;
  double size_per_node = 0.0;
  int relu_layers = 0;
  int relu2_layers = 0;
  int mixed_layers = 0;
  bool relu_before_relu2 = true;
};

SizeAuditRow size_audit(const Mesh& mesh, int p);

/// True if no ReLU layer follows a ReLU^2 layer.
bool relu_layers_first(const Network& net);

}  // namespace fem2nn
