#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fem2nn {

class NetworkError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Activation : int { Identity = 0, ReLU = 1, ReLUSquared = 2 };

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::ReLU:
      return x > 0.0 ? x : 0.0;
    case Activation::ReLUSquared:
      return x > 0.0 ? x * x : 0.0;
    default:
      return x;
  }
}

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed-row sparse matrix.  Every stored entry is nonzero, so nnz() is
/// exactly the weight count entering the size accounting.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);

  /// Duplicates are summed; entries that end up exactly zero are dropped.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> entries);
  static SparseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  std::vector<Triplet> triplets() const;
  SparseMatrix transpose() const;

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;

  /// A * B.
  SparseMatrix operator*(const SparseMatrix& other) const;

  double at(int r, int c) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

struct Layer {
  SparseMatrix weights;
  std::vector<double> bias;
  std::vector<Activation> acts;

  int out_dim() const { return weights.rows(); }
  int in_dim() const { return weights.cols(); }
  std::size_t bias_nnz() const;
  std::size_t size() const { return weights.nnz() + bias_nnz(); }
};

/// Feedforward network x_l = act_l(A_l x_{l-1} + b_l); the last layer is affine.
class Network {
 public:
  Network() = default;
  Network(int input_dim, std::vector<Layer> layers);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return layers_.empty() ? input_dim_ : layers_.back().out_dim(); }
  int depth() const { return static_cast<int>(layers_.size()); }
  std::size_t size() const;
  std::size_t size_in() const { return layers_.front().size(); }
  std::size_t size_out() const { return layers_.back().size(); }

  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(int l) const { return layers_[static_cast<std::size_t>(l)]; }

  std::vector<double> realize(std::span<const double> x) const;

  /// Realization at many points (row-major, one point per row).  Uses up to
  /// FEM2NN_THREADS worker threads.
  std::vector<std::vector<double>> realize_batch(const std::vector<std::vector<double>>& xs) const;

 private:
  int input_dim_ = 0;
  std::vector<Layer> layers_;
};

struct SizeReport {
  int depth = 0;
  std::size_t size = 0;
  std::vector<std::size_t> layer_sizes;
  std::vector<int> layer_widths;
  std::size_t neurons = 0;
  int relu_layers = 0;
  int relu2_layers = 0;
  int mixed_layers = 0;
};

SizeReport size_depth(const Network& net);

/// One affine layer x -> A x + b.
Network affine_net(SparseMatrix a, std::vector<double> b);

/// Worker count from FEM2NN_THREADS (default: hardware concurrency, at least 1).
int worker_threads();

}  // namespace fem2nn
