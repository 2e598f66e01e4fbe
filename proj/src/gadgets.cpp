#include "fem2nn/gadgets.hpp"

#include <string>

#include "fem2nn/combinators.hpp"

namespace fem2nn {

namespace {

// Two-layer ReLU^2 identity on R^d.
Network identity2(int d) {
  Layer hidden;
  std::vector<Triplet> t;
  for (int i = 0; i < d; ++i) {
    const int r = 4 * i;
    t.push_back({r, i, 1.0});
    t.push_back({r + 1, i, -1.0});
    t.push_back({r + 2, i, 1.0});
    t.push_back({r + 3, i, -1.0});
    hidden.bias.insert(hidden.bias.end(), {1.0, -1.0, -1.0, 1.0});
  }
  hidden.weights = SparseMatrix::from_triplets(4 * d, d, std::move(t));
  hidden.acts.assign(static_cast<std::size_t>(4 * d), Activation::ReLUSquared);

  Layer out;
  std::vector<Triplet> o;
  for (int i = 0; i < d; ++i) {
    o.push_back({i, 4 * i, 0.25});
    o.push_back({i, 4 * i + 1, 0.25});
    o.push_back({i, 4 * i + 2, -0.25});
    o.push_back({i, 4 * i + 3, -0.25});
  }
  out.weights = SparseMatrix::from_triplets(d, 4 * d, std::move(o));
  out.bias.assign(static_cast<std::size_t>(d), 0.0);
  out.acts.assign(static_cast<std::size_t>(d), Activation::Identity);
  return Network(d, {std::move(hidden), std::move(out)});
}

Network octree(int d) {
  const Network p2 = product2();
  if (d == 8) {
    Network stage = sparse_concat(p2, full_parallelize({p2, p2}));
    return sparse_concat(stage, full_parallelize({p2, p2, p2, p2}));
  }
  const Network p8 = octree(8);
  const Network top = octree(d / 8);
  return sparse_concat(top, full_parallelize(std::vector<Network>(static_cast<std::size_t>(d / 8), p8)));
}

}  // namespace

Network identity_net(int d, int depth) {
  if (d < 1 || depth < 1) throw NetworkError("identity_net: dimension and depth must be positive");
  if (depth == 1)
    return affine_net(SparseMatrix::identity(d), std::vector<double>(static_cast<std::size_t>(d), 0.0));
  const Network block = identity2(d);
  Network net = block;
  for (int l = 2; l < depth; ++l) net = concatenate(block, net);
  return net;
}

Network relu_identity_net(int d, int depth) {
  if (d < 1 || depth < 1) throw NetworkError("relu_identity_net: dimension and depth must be positive");
  if (depth == 1)
    return affine_net(SparseMatrix::identity(d), std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::vector<Layer> layers;
  Layer first;
  std::vector<Triplet> t;
  for (int i = 0; i < d; ++i) {
    t.push_back({2 * i, i, 1.0});
    t.push_back({2 * i + 1, i, -1.0});
  }
  first.weights = SparseMatrix::from_triplets(2 * d, d, std::move(t));
  first.bias.assign(static_cast<std::size_t>(2 * d), 0.0);
  first.acts.assign(static_cast<std::size_t>(2 * d), Activation::ReLU);
  layers.push_back(std::move(first));
  // Hidden values are nonnegative, so ReLU passes them through unchanged.
  for (int l = 2; l < depth; ++l) {
    Layer pass;
    pass.weights = SparseMatrix::identity(2 * d);
    pass.bias.assign(static_cast<std::size_t>(2 * d), 0.0);
    pass.acts.assign(static_cast<std::size_t>(2 * d), Activation::ReLU);
    layers.push_back(std::move(pass));
  }
  Layer out;
  std::vector<Triplet> o;
  for (int i = 0; i < d; ++i) {
    o.push_back({i, 2 * i, 1.0});
    o.push_back({i, 2 * i + 1, -1.0});
  }
  out.weights = SparseMatrix::from_triplets(d, 2 * d, std::move(o));
  out.bias.assign(static_cast<std::size_t>(d), 0.0);
  out.acts.assign(static_cast<std::size_t>(d), Activation::Identity);
  layers.push_back(std::move(out));
  return Network(d, std::move(layers));
}

Network product2() {
  Layer hidden;
  hidden.weights = SparseMatrix::from_triplets(
      4, 2,
      {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, -1.0}, {1, 1, -1.0}, {2, 0, 1.0}, {2, 1, -1.0}, {3, 0, -1.0}, {3, 1, 1.0}});
  hidden.bias.assign(4, 0.0);
  hidden.acts.assign(4, Activation::ReLUSquared);
  Layer out;
  out.weights = SparseMatrix::from_triplets(1, 4, {{0, 0, 0.25}, {0, 1, 0.25}, {0, 2, -0.25}, {0, 3, -0.25}});
  out.bias.assign(1, 0.0);
  out.acts.assign(1, Activation::Identity);
  return Network(2, {std::move(hidden), std::move(out)});
}

Network product_d(int d) {
  if (d < 2) throw NetworkError("product_d: fan-in must be at least 2, got " + std::to_string(d));
  if (d == 2) return product2();
  int padded = 8;
  while (padded < d) padded *= 8;
  Network net = octree(padded);
  if (padded == d) return net;
  std::vector<std::pair<int, double>> ones;
  for (int j = d; j < padded; ++j) ones.emplace_back(j, 1.0);
  return prune(fix_inputs(net, ones));
}

Network factor_poly_net(const std::vector<std::pair<double, double>>& factors) {
  if (factors.empty()) throw NetworkError("factor_poly_net: empty factor list");
  const int k = static_cast<int>(factors.size());
  std::vector<Triplet> t;
  std::vector<double> b;
  for (int j = 0; j < k; ++j) {
    t.push_back({j, 0, factors[static_cast<std::size_t>(j)].first});
    b.push_back(factors[static_cast<std::size_t>(j)].second);
  }
  Network affine = affine_net(SparseMatrix::from_triplets(k, 1, std::move(t)), std::move(b));
  if (k == 1) return affine;
  return concatenate(product_d(k), affine);
}

}  // namespace fem2nn
