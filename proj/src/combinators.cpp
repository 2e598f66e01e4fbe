#include "fem2nn/combinators.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "fem2nn/gadgets.hpp"

namespace fem2nn {

namespace {

void require_equal_depth(const std::vector<Network>& nets, const char* what) {
  if (nets.empty()) throw NetworkError(std::string(what) + ": no operands");
  for (const auto& n : nets)
    if (n.depth() != nets.front().depth())
      throw NetworkError(std::string(what) +
                         ": operands differ in depth; pad them with depth_align first");
}

SparseMatrix row_matrix(const std::vector<double>& row) {
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < row.size(); ++j)
    if (row[j] != 0.0) t.push_back({0, static_cast<int>(j), row[j]});
  return SparseMatrix::from_triplets(1, static_cast<int>(row.size()), std::move(t));
}

}  // namespace

Network parallelize(const std::vector<Network>& nets) {
  require_equal_depth(nets, "parallelize");
  const int d = nets.front().input_dim();
  for (const auto& n : nets)
    if (n.input_dim() != d) throw NetworkError("parallelize: operands differ in input dimension");
  const int depth = nets.front().depth();
  std::vector<Layer> layers(static_cast<std::size_t>(depth));
  for (int l = 0; l < depth; ++l) {
    std::vector<Triplet> t;
    int row_off = 0;
    int col_off = 0;
    Layer& out = layers[static_cast<std::size_t>(l)];
    for (const auto& n : nets) {
      const Layer& src = n.layer(l);
      for (auto e : src.weights.triplets()) t.push_back({e.row + row_off, e.col + (l == 0 ? 0 : col_off), e.value});
      out.bias.insert(out.bias.end(), src.bias.begin(), src.bias.end());
      out.acts.insert(out.acts.end(), src.acts.begin(), src.acts.end());
      row_off += src.out_dim();
      col_off += src.in_dim();
    }
    out.weights = SparseMatrix::from_triplets(row_off, l == 0 ? d : col_off, std::move(t));
  }
  return Network(d, std::move(layers));
}

Network full_parallelize(const std::vector<Network>& nets) {
  require_equal_depth(nets, "full_parallelize");
  const int depth = nets.front().depth();
  int d = 0;
  for (const auto& n : nets) d += n.input_dim();
  std::vector<Layer> layers(static_cast<std::size_t>(depth));
  for (int l = 0; l < depth; ++l) {
    std::vector<Triplet> t;
    int row_off = 0;
    int col_off = 0;
    Layer& out = layers[static_cast<std::size_t>(l)];
    for (const auto& n : nets) {
      const Layer& src = n.layer(l);
      for (auto e : src.weights.triplets()) t.push_back({e.row + row_off, e.col + col_off, e.value});
      out.bias.insert(out.bias.end(), src.bias.begin(), src.bias.end());
      out.acts.insert(out.acts.end(), src.acts.begin(), src.acts.end());
      row_off += src.out_dim();
      col_off += src.in_dim();
    }
    out.weights = SparseMatrix::from_triplets(row_off, col_off, std::move(t));
  }
  return Network(d, std::move(layers));
}

Network concatenate(const Network& outer, const Network& inner) {
  if (inner.output_dim() != outer.input_dim())
    throw NetworkError("concatenate: inner output dimension " + std::to_string(inner.output_dim()) +
                       " does not match outer input dimension " + std::to_string(outer.input_dim()));
  std::vector<Layer> layers(inner.layers().begin(), inner.layers().end() - 1);
  const Layer& last = inner.layers().back();
  const Layer& first = outer.layers().front();
  Layer merged;
  merged.weights = first.weights * last.weights;
  merged.bias = first.bias;
  std::vector<double> tmp(static_cast<std::size_t>(first.out_dim()), 0.0);
  first.weights.multiply(last.bias, tmp);
  for (std::size_t i = 0; i < tmp.size(); ++i) merged.bias[i] += tmp[i];
  merged.acts = first.acts;
  layers.push_back(std::move(merged));
  layers.insert(layers.end(), outer.layers().begin() + 1, outer.layers().end());
  return Network(inner.input_dim(), std::move(layers));
}

Network sparse_concat(const Network& outer, const Network& inner, Bridge bridge) {
  if (inner.output_dim() != outer.input_dim())
    throw NetworkError("sparse_concat: dimension mismatch");
  const int n = inner.output_dim();
  const Network id = bridge == Bridge::ReLUSquared ? identity_net(n, 2) : relu_identity_net(n, 2);
  return concatenate(outer, concatenate(id, inner));
}

Network pad_to_depth(const Network& net, int depth, Bridge bridge) {
  const int k = depth - net.depth();
  if (k < 0) throw NetworkError("pad_to_depth: network is deeper than the target");
  if (k == 0) return net;
  const int n = net.output_dim();
  if (bridge == Bridge::ReLUSquared) return sparse_concat(identity_net(n, k), net);
  return concatenate(relu_identity_net(n, k + 1), net);
}

std::vector<Network> depth_align(const std::vector<Network>& nets, Bridge bridge) {
  int target = 0;
  for (const auto& n : nets) target = std::max(target, n.depth());
  std::vector<Network> out;
  out.reserve(nets.size());
  for (const auto& n : nets) out.push_back(pad_to_depth(n, target, bridge));
  return out;
}

Network linear_output(const Network& net, const std::vector<double>& row) {
  if (static_cast<int>(row.size()) != net.output_dim())
    throw NetworkError("linear_output: row length does not match output dimension");
  return linear_output(net, row_matrix(row));
}

Network linear_output(const Network& net, const SparseMatrix& w) {
  if (w.cols() != net.output_dim())
    throw NetworkError("linear_output: matrix width does not match output dimension");
  return concatenate(affine_net(w, std::vector<double>(static_cast<std::size_t>(w.rows()), 0.0)), net);
}

Network fix_inputs(const Network& net, const std::vector<std::pair<int, double>>& values) {
  std::map<int, double> fixed(values.begin(), values.end());
  const int d = net.input_dim();
  std::vector<int> remap(static_cast<std::size_t>(d), -1);
  int kept = 0;
  for (int j = 0; j < d; ++j)
    if (!fixed.count(j)) remap[static_cast<std::size_t>(j)] = kept++;
  if (kept == 0) throw NetworkError("fix_inputs: no free inputs left");
  std::vector<Layer> layers = net.layers();
  Layer& first = layers.front();
  std::vector<Triplet> t;
  for (const auto& e : first.weights.triplets()) {
    auto it = fixed.find(e.col);
    if (it != fixed.end()) first.bias[static_cast<std::size_t>(e.row)] += e.value * it->second;
    else t.push_back({e.row, remap[static_cast<std::size_t>(e.col)], e.value});
  }
  first.weights = SparseMatrix::from_triplets(first.out_dim(), kept, std::move(t));
  return Network(kept, std::move(layers));
}

Network prune(const Network& net) {
  const int depth = net.depth();
  std::vector<std::vector<Triplet>> w(static_cast<std::size_t>(depth));
  std::vector<std::vector<double>> b(static_cast<std::size_t>(depth));
  std::vector<std::vector<Activation>> a(static_cast<std::size_t>(depth));
  std::vector<int> rows(static_cast<std::size_t>(depth));
  for (int l = 0; l < depth; ++l) {
    w[l] = net.layer(l).weights.triplets();
    b[l] = net.layer(l).bias;
    a[l] = net.layer(l).acts;
    rows[l] = net.layer(l).out_dim();
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (int l = 0; l + 1 < depth; ++l) {
      const int n = rows[l];
      std::vector<int> in(static_cast<std::size_t>(n), 0);
      std::vector<int> out(static_cast<std::size_t>(n), 0);
      for (const auto& e : w[l]) ++in[e.row];
      for (const auto& e : w[l + 1]) ++out[e.col];
      std::vector<int> remap(static_cast<std::size_t>(n), -1);
      int kept = 0;
      for (int i = 0; i < n; ++i)
        if (in[i] > 0 && out[i] > 0) remap[i] = kept++;
      if (kept == n) continue;
      changed = true;
      std::vector<Triplet> next;
      for (const auto& e : w[l + 1]) {
        if (remap[e.col] >= 0) {
          next.push_back({e.row, remap[e.col], e.value});
        } else {
          // No incoming weights: the neuron is the constant act(bias).
          b[l + 1][e.row] += e.value * activate(a[l][e.col], b[l][e.col]);
        }
      }
      w[l + 1] = std::move(next);
      std::vector<Triplet> cur;
      for (const auto& e : w[l])
        if (remap[e.row] >= 0) cur.push_back({remap[e.row], e.col, e.value});
      w[l] = std::move(cur);
      std::vector<double> nb;
      std::vector<Activation> na;
      for (int i = 0; i < n; ++i) {
        if (remap[i] >= 0) {
          nb.push_back(b[l][i]);
          na.push_back(a[l][i]);
        }
      }
      b[l] = std::move(nb);
      a[l] = std::move(na);
      rows[l] = kept;
    }
  }

  const bool collapsed = std::any_of(rows.begin(), rows.end() - 1, [](int r) { return r == 0; });
  if (collapsed) {
    const int out_dim = rows.back();
    return affine_net(SparseMatrix(out_dim, net.input_dim()), b.back());
  }
  std::vector<Layer> layers(static_cast<std::size_t>(depth));
  int cols = net.input_dim();
  for (int l = 0; l < depth; ++l) {
    layers[l].weights = SparseMatrix::from_triplets(rows[l], cols, std::move(w[l]));
    layers[l].bias = std::move(b[l]);
    layers[l].acts = std::move(a[l]);
    cols = rows[l];
  }
  return Network(net.input_dim(), std::move(layers));
}

}  // namespace fem2nn
