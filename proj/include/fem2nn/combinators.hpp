#pragma once

#include <utility>
#include <vector>

#include "fem2nn/network.hpp"

namespace fem2nn {

/// Activation used for the inserted identity layer of sparse_concat and for
/// depth padding.
enum class Bridge { ReLUSquared, ReLU };

/// Shared input, stacked outputs in operand order.  All operands need equal depth.
Network parallelize(const std::vector<Network>& nets);

/// Concatenated inputs and outputs, block-diagonal in every layer.
Network full_parallelize(const std::vector<Network>& nets);

/// R(outer) o R(inner), merging the last layer of `inner` into the first of `outer`.
Network concatenate(const Network& outer, const Network& inner);

/// R(outer) o R(inner) with an exact identity layer in between so that sizes add.
Network sparse_concat(const Network& outer, const Network& inner,
                      Bridge bridge = Bridge::ReLUSquared);

/// Pad every net to the largest depth without changing its realization.
std::vector<Network> depth_align(const std::vector<Network>& nets,
                                 Bridge bridge = Bridge::ReLUSquared);

/// Pad one net to `depth` layers.
Network pad_to_depth(const Network& net, int depth, Bridge bridge = Bridge::ReLUSquared);

/// x -> row . R(net)(x).
Network linear_output(const Network& net, const std::vector<double>& row);

/// x -> W R(net)(x) for a sparse W with net.output_dim() columns.
Network linear_output(const Network& net, const SparseMatrix& w);

/// Fix selected inputs to constants, folding them into the first-layer bias.
/// `values` pairs input index with value; the result keeps the remaining inputs
/// in their original order.
Network fix_inputs(const Network& net, const std::vector<std::pair<int, double>>& values);

/// Drop neurons without outgoing weights and fold neurons without incoming
/// weights into the next bias, until nothing changes.  Inputs and outputs stay.
Network prune(const Network& net);

}  // namespace fem2nn
