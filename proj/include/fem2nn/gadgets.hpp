#pragma once

#include <utility>
#include <vector>

#include "fem2nn/network.hpp"

namespace fem2nn {

/// Exact identity on R^d with `depth` layers, ReLU^2 hidden layers.  Each
/// coordinate uses x = [r(x+1) + r(-x-1) - r(x-1) - r(-x+1)] / 4 with r = ReLU^2.
Network identity_net(int d, int depth);

/// Exact identity on R^d with `depth` layers, ReLU hidden layers (x = r(x) - r(-x)).
Network relu_identity_net(int d, int depth);

/// (x, y) -> x*y with four ReLU^2 neurons.
Network product2();

/// (x_1..x_d) -> prod x_j.  Octree of 8-fold products, padded with constant ones.
Network product_d(int d);

/// t -> prod_j (slope_j t + intercept_j).
Network factor_poly_net(const std::vector<std::pair<double, double>>& factors);

}  // namespace fem2nn
