#include "fem2nn/nodes.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace fem2nn {

namespace {

void enumerate(int slots, int remaining, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (slots == 1) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur.push_back(v);
    enumerate(slots - 1, remaining - v, cur, out);
    cur.pop_back();
  }
}

using NodeKey = std::pair<std::vector<int>, std::vector<int>>;

NodeKey node_key(const std::vector<int>& element, const std::vector<int>& beta) {
  std::vector<std::pair<int, int>> support;
  for (std::size_t k = 0; k < beta.size(); ++k)
    if (beta[k] > 0) support.emplace_back(element[k], beta[k]);
  std::sort(support.begin(), support.end());
  NodeKey key;
  for (auto [v, a] : support) {
    key.first.push_back(v);
    key.second.push_back(a);
  }
  return key;
}

}  // namespace

std::vector<std::vector<int>> local_multi_indices(int d, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate(d + 1, p, cur, out);
  return out;
}

LagrangeNodeSet interpolation_nodes(const Mesh& mesh, int p) {
  if (p < 1) throw MeshError("polynomial degree must be at least 1");
  const int d = mesh.dim();
  const auto betas = local_multi_indices(d, p);
  std::map<NodeKey, int> ids;
  for (const auto& el : mesh.elements())
    for (const auto& beta : betas) ids.emplace(node_key(el, beta), 0);

  LagrangeNodeSet set;
  set.p = p;
  set.dim = d;
  int next = 0;
  for (auto& [key, id] : ids) {
    id = next++;
    LagrangeNode node;
    node.vertices = key.first;
    node.alpha = key.second;
    node.x.assign(static_cast<std::size_t>(d), 0.0);
    for (std::size_t k = 0; k < node.vertices.size(); ++k)
      for (int c = 0; c < d; ++c) node.x[c] += node.alpha[k] * mesh.vertex(node.vertices[k])[c];
    for (double& c : node.x) c /= p;
    set.nodes.push_back(std::move(node));
  }
  for (const auto& el : mesh.elements()) {
    std::vector<int> local;
    local.reserve(betas.size());
    for (const auto& beta : betas) local.push_back(ids.at(node_key(el, beta)));
    set.element_nodes.push_back(std::move(local));
  }
  return set;
}

std::vector<bool> boundary_nodes(const Mesh& mesh, const LagrangeNodeSet& nodes) {
  std::set<std::vector<int>> faces(mesh.boundary_faces().begin(), mesh.boundary_faces().end());
  std::vector<bool> out;
  out.reserve(nodes.size());
  for (const auto& node : nodes.nodes) {
    // K' lies on the boundary iff it is a subset of some boundary face.
    bool on = false;
    for (const auto& f : faces) {
      if (std::includes(f.begin(), f.end(), node.vertices.begin(), node.vertices.end())) {
        on = true;
        break;
      }
    }
    out.push_back(on);
  }
  return out;
}

}  // namespace fem2nn
