#include "fem2nn/cpwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "fem2nn/combinators.hpp"
#include "fem2nn/gadgets.hpp"

namespace fem2nn {

namespace {

constexpr double kTol = 1e-10;

double hat_at_vertex(int w, int i) { return w == i ? 1.0 : 0.0; }

bool covers(const Mesh& mesh, const Affine& f, int element, int i) {
  for (int w : mesh.element(element))
    if (f(mesh.vertex(w)) > hat_at_vertex(w, i) + kTol) return false;
  return true;
}

// Candidate functions phi >= 0 on K, <= 0 on E: for each separating-axis
// direction n, the plane n.x = min_K n.x touching K, normalized on K and E.
std::vector<Affine> separators(const Mesh& mesh, int k, int e) {
  const int d = mesh.dim();
  const auto& ek = mesh.element(k);
  const auto& ee = mesh.element(e);
  std::vector<std::vector<double>> dirs;
  for (int j = 0; j <= d; ++j) {
    dirs.push_back(mesh.barycentric_affine(k, j).slope);
    auto g = mesh.barycentric_affine(e, j).slope;
    for (double& s : g) s = -s;
    dirs.push_back(std::move(g));
  }
  if (d == 3) {
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int g = c + 1; g < 4; ++g) {
            const Point& p0 = mesh.vertex(ek[a]);
            const Point& p1 = mesh.vertex(ek[b]);
            const Point& q0 = mesh.vertex(ee[c]);
            const Point& q1 = mesh.vertex(ee[g]);
            const double u[3] = {p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
            const double v[3] = {q1[0] - q0[0], q1[1] - q0[1], q1[2] - q0[2]};
            std::vector<double> n{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                                  u[0] * v[1] - u[1] * v[0]};
            dirs.push_back(n);
            for (double& s : n) s = -s;
            dirs.push_back(std::move(n));
          }
  }
  std::vector<Affine> out;
  for (auto& n : dirs) {
    Affine f{n, 0.0};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int w : ek) lo = std::min(lo, f(mesh.vertex(w)));
    for (int w : ee) hi = std::max(hi, f(mesh.vertex(w)));
    f.intercept = -lo;
    double scale = 0.0;
    for (int w : ek) scale = std::max(scale, std::abs(f(mesh.vertex(w))));
    for (int w : ee) scale = std::max(scale, std::abs(f(mesh.vertex(w))));
    if (scale < 1e-14 || hi - lo > kTol * scale) continue;
    for (double& s : f.slope) s /= scale;
    f.intercept /= scale;
    out.push_back(std::move(f));
  }
  return out;
}

// Smallest c >= 0 with lambda + c*phi below the hat at the vertices of E, if any.
bool barrier_coefficient(const Mesh& mesh, const Affine& lambda, const Affine& phi, int e, int i,
                         double& c) {
  c = 0.0;
  for (int w : mesh.element(e)) {
    const Point& x = mesh.vertex(w);
    const double excess = lambda(x) - hat_at_vertex(w, i);
    const double ph = phi(x);
    if (ph < -kTol) {
      c = std::max(c, excess / -ph);
    } else if (excess > kTol) {
      return false;
    }
  }
  return true;
}

Affine combine(const Affine& lambda, const Affine& phi, double c) {
  Affine f = lambda;
  for (std::size_t j = 0; j < f.slope.size(); ++j) f.slope[j] += c * phi.slope[j];
  f.intercept += c * phi.intercept;
  return f;
}

// Binary gadget layer: inputs n values, outputs ceil(n/2) values of max/min of pairs.
Network gadget_level(int n, bool is_max) {
  const int pairs = n / 2;
  const bool odd = n % 2 == 1;
  const int hidden = 4 * pairs + (odd ? 2 : 0);
  const int outs = pairs + (odd ? 1 : 0);
  std::vector<Triplet> h, o;
  const double s = is_max ? 0.5 : -0.5;
  for (int q = 0; q < pairs; ++q) {
    const int a = 2 * q, b = 2 * q + 1, r = 4 * q;
    h.push_back({r, a, 1.0});
    h.push_back({r, b, 1.0});
    h.push_back({r + 1, a, -1.0});
    h.push_back({r + 1, b, -1.0});
    h.push_back({r + 2, a, 1.0});
    h.push_back({r + 2, b, -1.0});
    h.push_back({r + 3, a, -1.0});
    h.push_back({r + 3, b, 1.0});
    o.push_back({q, r, 0.5});
    o.push_back({q, r + 1, -0.5});
    o.push_back({q, r + 2, s});
    o.push_back({q, r + 3, s});
  }
  if (odd) {
    const int r = 4 * pairs;
    h.push_back({r, n - 1, 1.0});
    h.push_back({r + 1, n - 1, -1.0});
    o.push_back({pairs, r, 1.0});
    o.push_back({pairs, r + 1, -1.0});
  }
  Layer l1, l2;
  l1.weights = SparseMatrix::from_triplets(hidden, n, std::move(h));
  l1.bias.assign(static_cast<std::size_t>(hidden), 0.0);
  l1.acts.assign(static_cast<std::size_t>(hidden), Activation::ReLU);
  l2.weights = SparseMatrix::from_triplets(outs, hidden, std::move(o));
  l2.bias.assign(static_cast<std::size_t>(outs), 0.0);
  l2.acts.assign(static_cast<std::size_t>(outs), Activation::Identity);
  return Network(n, {std::move(l1), std::move(l2)});
}

int ceil_log2(int k) {
  int l = 0;
  while ((1 << l) < k) ++l;
  return l;
}

}  // namespace

double LatticeForm::evaluate(std::span<const double> x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& set : sets) {
    double lo = std::numeric_limits<double>::infinity();
    for (int j : set) lo = std::min(lo, pieces[static_cast<std::size_t>(j)].f(x));
    best = std::max(best, lo);
  }
  return best;
}

std::size_t LatticeForm::total_items() const {
  std::size_t n = 0;
  for (const auto& s : sets) n += s.size();
  return n;
}

double hat_direct(const Mesh& mesh, int vertex, std::span<const double> x) {
  const auto k = mesh.locate(x);
  if (!k) return 0.0;
  const auto& el = mesh.element(*k);
  const auto lam = mesh.barycentric(*k, x);
  for (std::size_t j = 0; j < el.size(); ++j)
    if (el[j] == vertex) return lam[j];
  return 0.0;
}

LatticeForm hat_lattice(const Mesh& mesh, int i) {
  const int d = mesh.dim();
  const int ne = static_cast<int>(mesh.num_elements());
  LatticeForm form;
  form.dim = d;
  AffinePiece zero;
  zero.f.slope.assign(static_cast<std::size_t>(d), 0.0);
  form.pieces.push_back(zero);

  std::vector<int> patch;
  std::vector<int> piece_of;  // piece index of lambda_{i,K} per patch element
  for (int k = 0; k < ne; ++k) {
    const auto& el = mesh.element(k);
    const auto it = std::find(el.begin(), el.end(), i);
    if (it == el.end()) continue;
    if (mesh.is_degenerate(k)) throw MeshError("degenerate element " + std::to_string(k) + " in patch");
    AffinePiece p;
    p.kind = AffinePiece::Kind::Barycentric;
    p.vertex = i;
    p.element = k;
    p.f = mesh.barycentric_affine(k, static_cast<int>(it - el.begin()));
    patch.push_back(k);
    piece_of.push_back(static_cast<int>(form.pieces.size()));
    form.pieces.push_back(std::move(p));
  }
  if (patch.empty()) throw MeshError("vertex " + std::to_string(i) + " belongs to no element");

  auto dominates_on = [&](const Affine& f, const Affine& g, int k) {
    for (int w : mesh.element(k))
      if (f(mesh.vertex(w)) < g(mesh.vertex(w)) - kTol) return false;
    return true;
  };

  // Single-set form when min over all lambda_{i,K} already reproduces the hat.
  {
    bool ok = true;
    for (std::size_t a = 0; a < patch.size() && ok; ++a)
      for (std::size_t b = 0; b < patch.size() && ok; ++b)
        ok = dominates_on(form.pieces[piece_of[b]].f, form.pieces[piece_of[a]].f, patch[a]);
    for (int e = 0; e < ne && ok; ++e) {
      bool covered = false;
      for (int pi : piece_of)
        if (covers(mesh, form.pieces[static_cast<std::size_t>(pi)].f, e, i)) {
          covered = true;
          break;
        }
      ok = covered;
    }
    if (ok) {
      form.sets.push_back({0});
      form.sets.push_back(piece_of);
      return form;
    }
  }

  std::vector<std::vector<int>> sets;
  for (std::size_t a = 0; a < patch.size(); ++a) {
    const int k = patch[a];
    const Affine lambda = form.pieces[static_cast<std::size_t>(piece_of[a])].f;
    std::vector<int> set;
    for (std::size_t b = 0; b < patch.size(); ++b)
      if (dominates_on(form.pieces[piece_of[b]].f, lambda, k)) set.push_back(piece_of[b]);

    auto uncovered = [&]() {
      std::vector<int> out;
      for (int e = 0; e < ne; ++e) {
        bool covered = false;
        for (int pi : set)
          if (covers(mesh, form.pieces[static_cast<std::size_t>(pi)].f, e, i)) {
            covered = true;
            break;
          }
        if (!covered) out.push_back(e);
      }
      return out;
    };

    std::vector<int> open = uncovered();
    while (!open.empty()) {
      const int e0 = open.front();
      bool found = false;
      Affine best;
      std::size_t best_count = 0;
      double best_c = 0.0;
      for (const Affine& phi : separators(mesh, k, e0)) {
        double c = 0.0;
        if (!barrier_coefficient(mesh, lambda, phi, e0, i, c)) continue;
        const Affine f = combine(lambda, phi, c);
        if (!dominates_on(f, lambda, k) || !covers(mesh, f, e0, i)) continue;
        std::size_t count = 0;
        for (int e : open)
          if (covers(mesh, f, e, i)) ++count;
        if (!found || count > best_count || (count == best_count && c < best_c)) {
          found = true;
          best = f;
          best_count = count;
          best_c = c;
        }
      }
      if (!found)
        throw MeshError("no barrier piece separates elements " + std::to_string(k) + " and " +
                        std::to_string(e0) + " for vertex " + std::to_string(i));
      AffinePiece p;
      p.kind = AffinePiece::Kind::Barrier;
      p.vertex = i;
      p.element = k;
      p.f = std::move(best);
      set.push_back(static_cast<int>(form.pieces.size()));
      form.pieces.push_back(std::move(p));
      open = uncovered();
    }
    std::sort(set.begin(), set.end());
    sets.push_back(std::move(set));
  }

  sets.push_back({0});
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  // A superset has a smaller minimum, so it never attains the outer max.
  for (std::size_t a = 0; a < sets.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < sets.size() && !dominated; ++b)
      if (a != b && sets[b].size() < sets[a].size() &&
          std::includes(sets[a].begin(), sets[a].end(), sets[b].begin(), sets[b].end()))
        dominated = true;
    if (!dominated) form.sets.push_back(sets[a]);
  }
  return form;
}

Network reduction_tree(int k, bool is_max, int levels) {
  if (k < 1) throw NetworkError("reduction_tree: no inputs");
  if (levels < ceil_log2(k)) throw NetworkError("reduction_tree: too few levels");
  if (levels == 0)
    return affine_net(SparseMatrix::identity(1), {0.0});
  Network net = gadget_level(k, is_max);
  int n = (k + 1) / 2;
  for (int l = 1; l < levels; ++l) {
    net = concatenate(gadget_level(n, is_max), net);
    n = (n + 1) / 2;
  }
  return net;
}

Network lattice_to_relu(const LatticeForm& form) {
  if (form.sets.empty()) throw NetworkError("lattice_to_relu: empty form");
  const int d = form.dim;
  // One affine row per (set, item), in set order.
  std::vector<Triplet> t;
  std::vector<double> bias;
  int row = 0;
  int deepest = 0;
  for (const auto& set : form.sets) {
    deepest = std::max(deepest, ceil_log2(static_cast<int>(set.size())));
    for (int j : set) {
      const Affine& f = form.pieces[static_cast<std::size_t>(j)].f;
      for (int c = 0; c < d; ++c)
        if (f.slope[c] != 0.0) t.push_back({row, c, f.slope[c]});
      bias.push_back(f.intercept);
      ++row;
    }
  }
  const Network pieces = affine_net(SparseMatrix::from_triplets(row, d, std::move(t)), std::move(bias));
  std::vector<Network> mins;
  for (const auto& set : form.sets) mins.push_back(reduction_tree(static_cast<int>(set.size()), false, deepest));
  const int nsets = static_cast<int>(form.sets.size());
  Network net = concatenate(full_parallelize(mins), pieces);
  net = concatenate(reduction_tree(nsets, true, ceil_log2(nsets)), net);
  return prune(net);
}

Network hat_networks(const Mesh& mesh) {
  std::vector<Network> nets;
  for (int i = 0; i < static_cast<int>(mesh.num_vertices()); ++i)
    nets.push_back(lattice_to_relu(hat_lattice(mesh, i)));
  return parallelize(depth_align(nets, Bridge::ReLU));
}

Network cpwl_function_net(const Mesh& mesh, const std::vector<double>& nodal_values) {
  if (nodal_values.size() != mesh.num_vertices())
    throw NetworkError("cpwl_function_net: need one value per vertex");
  return linear_output(hat_networks(mesh), nodal_values);
}

}  // namespace fem2nn
