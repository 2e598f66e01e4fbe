#include "fem2nn/hofem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fem2nn/combinators.hpp"
#include "fem2nn/cpwl.hpp"
#include "fem2nn/gadgets.hpp"

namespace fem2nn {

namespace {

int ceil_log2(int k) {
  int l = 0;
  while ((1 << l) < k) ++l;
  return l;
}

// W_b(t) = prod_{j<b} (p t - j)/(j+1) and its derivative.
void w_value(int p, int b, double t, double& value, double& deriv) {
  value = 1.0;
  deriv = 0.0;
  for (int j = 0; j < b; ++j) {
    const double f = (p * t - j) / (j + 1);
    const double df = static_cast<double>(p) / (j + 1);
    deriv = deriv * f + value * df;
    value *= f;
  }
}

const std::vector<std::vector<int>>& cached_betas(int d, int p) {
  thread_local std::vector<std::vector<int>> betas;
  thread_local int cd = -1, cp = -1;
  if (cd != d || cp != p) {
    betas = local_multi_indices(d, p);
    cd = d;
    cp = p;
  }
  return betas;
}

}  // namespace

std::vector<NodeFactor> node_factorization(const LagrangeNodeSet& nodes) {
  std::vector<NodeFactor> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes.nodes) {
    if (n.vertices.empty()) throw MeshError("node without containing subsimplex");
    out.push_back({n.m(), n.vertices, n.alpha});
  }
  return out;
}

std::vector<std::pair<double, double>> w_alpha_factors(int p, int alpha) {
  if (alpha < 1 || alpha > p)
    throw NetworkError("w_alpha: alpha must lie in 1.." + std::to_string(p));
  std::vector<std::pair<double, double>> f;
  for (int j = 0; j < alpha; ++j)
    f.emplace_back(static_cast<double>(p) / (j + 1), -static_cast<double>(j) / (j + 1));
  return f;
}

Network w_alpha_raw(int p, int alpha) { return factor_poly_net(w_alpha_factors(p, alpha)); }

int w_stack_depth(int p) {
  int deepest = 1;
  for (int a = 1; a <= p; ++a) deepest = std::max(deepest, w_alpha_raw(p, a).depth());
  const int unit = std::max(1, ceil_log2(p + 1));
  const int c = (deepest + unit - 1) / unit;
  return c * unit;
}

Network w_alpha_net(int p, int alpha) {
  return pad_to_depth(w_alpha_raw(p, alpha), w_stack_depth(p));
}

SparseMatrix routing_matrix(const LagrangeNodeSet& nodes, int num_vertices) {
  const int p = nodes.p;
  std::vector<Triplet> t;
  int row = 0;
  for (const auto& n : nodes.nodes)
    for (std::size_t k = 0; k < n.vertices.size(); ++k)
      t.push_back({row++, n.vertices[k] * p + n.alpha[k] - 1, 1.0});
  return SparseMatrix::from_triplets(row, p * num_vertices, std::move(t));
}

BasisNetwork compile_basis(const Mesh& mesh, const LagrangeNodeSet& nodes) {
  const int p = nodes.p;
  const int nv = static_cast<int>(mesh.num_vertices());
  BasisNetwork out;

  const Network hats = hat_networks(mesh);

  const int wdepth = w_stack_depth(p);
  std::vector<Network> stack;
  for (int a = 1; a <= p; ++a) stack.push_back(pad_to_depth(w_alpha_raw(p, a), wdepth));
  const Network per_vertex = parallelize(stack);
  const Network ws = full_parallelize(std::vector<Network>(static_cast<std::size_t>(nv), per_vertex));

  const SparseMatrix routing = routing_matrix(nodes, nv);
  const Network route = affine_net(routing, std::vector<double>(static_cast<std::size_t>(routing.rows()), 0.0));

  int pdepth = 1;
  std::vector<int> fan_ins;
  for (const auto& n : nodes.nodes) fan_ins.push_back(n.m() + 1);
  std::vector<Network> by_fan_in(static_cast<std::size_t>(mesh.dim() + 2));
  for (int f : fan_ins)
    if (f >= 2 && by_fan_in[f].depth() == 0) {
      by_fan_in[f] = product_d(f);
      pdepth = std::max(pdepth, by_fan_in[f].depth());
    }
  for (int f = 1; f < static_cast<int>(by_fan_in.size()); ++f) {
    if (f == 1) by_fan_in[f] = identity_net(1, pdepth);
    else if (by_fan_in[f].depth() > 0) by_fan_in[f] = pad_to_depth(by_fan_in[f], pdepth);
  }
  std::vector<Network> prods;
  prods.reserve(fan_ins.size());
  for (int f : fan_ins) prods.push_back(by_fan_in[f]);
  const Network products = full_parallelize(prods);

  out.depth_products = products.depth();
  out.depth_w = ws.depth();
  out.depth_hats = hats.depth();
  out.size_products = products.size();
  out.size_routing = route.size();
  out.size_w = ws.size();
  out.size_hats = hats.size();
  out.routing_rows = static_cast<std::size_t>(routing.rows());

  Network net = sparse_concat(ws, hats);
  net = sparse_concat(route, net);
  net = sparse_concat(products, net);
  out.net = prune(net);
  return out;
}

Network basis_networks(const Mesh& mesh, int p) {
  return compile_basis(mesh, interpolation_nodes(mesh, p)).net;
}

FESpace::FESpace(Mesh mesh, int p) : mesh_(std::move(mesh)), nodes_(interpolation_nodes(mesh_, p)) {}

std::vector<double> local_basis(int p, std::span<const double> lam) {
  const int d = static_cast<int>(lam.size()) - 1;
  const auto& betas = cached_betas(d, p);
  std::vector<double> out;
  out.reserve(betas.size());
  for (const auto& beta : betas) {
    double v = 1.0;
    for (int k = 0; k <= d; ++k) {
      double w, dw;
      w_value(p, beta[k], lam[k], w, dw);
      v *= w;
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::vector<double>> local_basis_gradients(const Mesh& mesh, int k, int p,
                                                       std::span<const double> lam) {
  const int d = mesh.dim();
  const auto grads = mesh.barycentric_gradients(k);
  const auto& betas = cached_betas(d, p);
  std::vector<std::vector<double>> out;
  out.reserve(betas.size());
  std::vector<double> w(static_cast<std::size_t>(d + 1)), dw(static_cast<std::size_t>(d + 1));
  for (const auto& beta : betas) {
    for (int j = 0; j <= d; ++j) w_value(p, beta[j], lam[j], w[j], dw[j]);
    std::vector<double> g(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j <= d; ++j) {
      double partial = dw[j];
      for (int q = 0; q <= d; ++q)
        if (q != j) partial *= w[q];
      if (partial == 0.0) continue;
      for (int c = 0; c < d; ++c) g[c] += partial * grads[j][c];
    }
    out.push_back(std::move(g));
  }
  return out;
}

double evaluate_on_element(const FEFunction& v, int k, std::span<const double> x) {
  const FESpace& s = *v.space;
  const auto lam = s.mesh().barycentric(k, x);
  const auto basis = local_basis(s.p(), lam);
  const auto& ids = s.nodes().element_nodes[static_cast<std::size_t>(k)];
  double sum = 0.0;
  for (std::size_t j = 0; j < ids.size(); ++j) sum += v.coeffs[ids[j]] * basis[j];
  return sum;
}

double evaluate_fe_direct(const FEFunction& v, std::span<const double> x) {
  const auto k = v.space->mesh().locate(x);
  if (!k) throw MeshError("point outside the domain");
  return evaluate_on_element(v, *k, x);
}

std::vector<double> evaluate_fe_gradient(const FEFunction& v, std::span<const double> x) {
  const FESpace& s = *v.space;
  const auto k = s.mesh().locate(x);
  if (!k) throw MeshError("point outside the domain");
  const auto lam = s.mesh().barycentric(*k, x);
  const auto grads = local_basis_gradients(s.mesh(), *k, s.p(), lam);
  const auto& ids = s.nodes().element_nodes[static_cast<std::size_t>(*k)];
  std::vector<double> g(static_cast<std::size_t>(s.mesh().dim()), 0.0);
  for (std::size_t j = 0; j < ids.size(); ++j)
    for (std::size_t c = 0; c < g.size(); ++c) g[c] += v.coeffs[ids[j]] * grads[j][c];
  return g;
}

Network fe_function_net(const Network& basis, const FEFunction& v) {
  if (v.coeffs.size() != static_cast<std::size_t>(basis.output_dim()))
    throw NetworkError("fe_function_net: coefficient count does not match the basis");
  return linear_output(basis, v.coeffs);
}

Network fe_function_net(const FEFunction& v) {
  return fe_function_net(compile_basis(v.space->mesh(), v.space->nodes()).net, v);
}

Network fe_functions_net(const Network& basis, const std::vector<std::vector<double>>& coeffs) {
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < coeffs.size(); ++r) {
    if (coeffs[r].size() != static_cast<std::size_t>(basis.output_dim()))
      throw NetworkError("fe_functions_net: coefficient count does not match the basis");
    for (std::size_t j = 0; j < coeffs[r].size(); ++j)
      if (coeffs[r][j] != 0.0) t.push_back({static_cast<int>(r), static_cast<int>(j), coeffs[r][j]});
  }
  return linear_output(basis, SparseMatrix::from_triplets(static_cast<int>(coeffs.size()),
                                                          basis.output_dim(), std::move(t)));
}

bool relu_layers_first(const Network& net) {
  bool seen_relu2 = false;
  for (const auto& l : net.layers()) {
    const bool relu = std::count(l.acts.begin(), l.acts.end(), Activation::ReLU) > 0;
    const bool relu2 = std::count(l.acts.begin(), l.acts.end(), Activation::ReLUSquared) > 0;
    if (relu && seen_relu2) return false;
    seen_relu2 = seen_relu2 || relu2;
  }
  return true;
}

SizeAuditRow size_audit(const Mesh& mesh, int p) {
  const LagrangeNodeSet nodes = interpolation_nodes(mesh, p);
  const Network net = compile_basis(mesh, nodes).net;
  const SizeReport r = size_depth(net);
  SizeAuditRow row;
  row.p = p;
  row.nodes = nodes.size();
  row.size = r.size;
  row.depth = r.depth;
  row.size_per_node = static_cast<double>(r.size) / static_cast<double>(nodes.size());
  row.relu_layers = r.relu_layers;
  row.relu2_layers = r.relu2_layers;
  row.mixed_layers = r.mixed_layers;
  row.relu_before_relu2 = relu_layers_first(net);
  return row;
}

}  // namespace fem2nn
