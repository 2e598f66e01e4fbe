#include "fem2nn/network.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace fem2nn {

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw NetworkError("negative matrix dimension");
  row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> entries) {
  SparseMatrix m(rows, cols);
  for (const auto& t : entries)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw NetworkError("triplet index out of range");
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::size_t i = 0;
  while (i < entries.size()) {
    const int r = entries[i].row;
    const int c = entries[i].col;
    double v = 0.0;
    while (i < entries.size() && entries[i].row == r && entries[i].col == c) v += entries[i++].value;
    if (v != 0.0) {
      m.col_idx_.push_back(c);
      m.values_.push_back(v);
      ++m.row_ptr_[static_cast<std::size_t>(r) + 1];
    }
  }
  for (int r = 0; r < rows; ++r)
    m.row_ptr_[static_cast<std::size_t>(r) + 1] += m.row_ptr_[static_cast<std::size_t>(r)];
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_idx_[k], values_[k]});
  return out;
}

SparseMatrix SparseMatrix::transpose() const {
  auto t = triplets();
  for (auto& e : t) std::swap(e.row, e.col);
  return from_triplets(cols_, rows_, std::move(t));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[r] = s;
  }
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& other) const {
  if (cols_ != other.rows_) throw NetworkError("matrix product dimension mismatch");
  std::vector<Triplet> out;
  std::vector<double> acc(static_cast<std::size_t>(other.cols_), 0.0);
  std::vector<char> used(static_cast<std::size_t>(other.cols_), 0);
  std::vector<int> touched;
  for (int r = 0; r < rows_; ++r) {
    touched.clear();
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int mid = col_idx_[k];
      for (int q = other.row_ptr_[mid]; q < other.row_ptr_[mid + 1]; ++q) {
        const int c = other.col_idx_[q];
        if (!used[c]) {
          used[c] = 1;
          touched.push_back(c);
        }
        acc[c] += values_[k] * other.values_[q];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int c : touched) {
      out.push_back({r, c, acc[c]});
      acc[c] = 0.0;
      used[c] = 0;
    }
  }
  return from_triplets(rows_, other.cols_, std::move(out));
}

double SparseMatrix::at(int r, int c) const {
  for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
    if (col_idx_[k] == c) return values_[k];
  return 0.0;
}

std::size_t Layer::bias_nnz() const {
  return static_cast<std::size_t>(std::count_if(bias.begin(), bias.end(), [](double b) { return b != 0.0; }));
}

Network::Network(int input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ < 1) throw NetworkError("network input dimension must be positive");
  if (layers_.empty()) throw NetworkError("network needs at least one layer");
  int prev = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const std::string where = "layer " + std::to_string(l + 1);
    if (layer.in_dim() != prev) throw NetworkError(where + ": input dimension mismatch");
    if (static_cast<int>(layer.bias.size()) != layer.out_dim())
      throw NetworkError(where + ": bias length mismatch");
    if (static_cast<int>(layer.acts.size()) != layer.out_dim())
      throw NetworkError(where + ": activation list length mismatch");
    for (double v : layer.weights.values())
      if (v == 0.0) throw NetworkError(where + ": stored zero weight");
    prev = layer.out_dim();
  }
  for (Activation a : layers_.back().acts)
    if (a != Activation::Identity) throw NetworkError("output layer must be affine");
}

std::size_t Network::size() const {
  std::size_t m = 0;
  for (const auto& l : layers_) m += l.size();
  return m;
}

std::vector<double> Network::realize(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_) throw NetworkError("input dimension mismatch");
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (const Layer& layer : layers_) {
    next.assign(static_cast<std::size_t>(layer.out_dim()), 0.0);
    layer.weights.multiply(cur, next);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = activate(layer.acts[i], next[i] + layer.bias[i]);
    cur.swap(next);
  }
  return cur;
}

std::vector<std::vector<double>> Network::realize_batch(
    const std::vector<std::vector<double>>& xs) const {
  std::vector<std::vector<double>> out(xs.size());
  const int threads = std::min<int>(worker_threads(), static_cast<int>(xs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = realize(xs[i]);
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = static_cast<std::size_t>(t); i < xs.size(); i += static_cast<std::size_t>(threads))
        out[i] = realize(xs[i]);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

SizeReport size_depth(const Network& net) {
  SizeReport rep;
  rep.depth = net.depth();
  for (const Layer& l : net.layers()) {
    rep.layer_sizes.push_back(l.size());
    rep.layer_widths.push_back(l.out_dim());
    rep.size += l.size();
    rep.neurons += static_cast<std::size_t>(l.out_dim());
    const bool relu = std::count(l.acts.begin(), l.acts.end(), Activation::ReLU) > 0;
    const bool relu2 = std::count(l.acts.begin(), l.acts.end(), Activation::ReLUSquared) > 0;
    if (relu && relu2) ++rep.mixed_layers;
    else if (relu) ++rep.relu_layers;
    else if (relu2) ++rep.relu2_layers;
  }
  return rep;
}

Network affine_net(SparseMatrix a, std::vector<double> b) {
  Layer l;
  const int rows = a.rows();
  const int cols = a.cols();
  l.weights = std::move(a);
  l.bias = std::move(b);
  l.acts.assign(static_cast<std::size_t>(rows), Activation::Identity);
  return Network(cols, {std::move(l)});
}

int worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FEM2NN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = n > 0 ? std::min(n, cap) : cap;
  }
  return std::max(n, 1);
}

}  // namespace fem2nn
