#include "fem2nn/study.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fem2nn/quadrature.hpp"
#include "fem2nn/refine.hpp"

namespace fem2nn {

FEFunction nodal_interpolant(std::shared_ptr<const FESpace> space, const ScalarField& u) {
  FEFunction v{space, {}};
  v.coeffs.reserve(space->dim());
  for (const auto& n : space->nodes().nodes) {
    const double value = u(n.x);
    if (!std::isfinite(value)) throw StudyError("non-finite sample of u at a node");
    v.coeffs.push_back(value);
  }
  return v;
}

ErrorNorms h1_error(const FEFunction& v, const ScalarField& u, const VectorField& grad_u, int order,
                    int singular_levels) {
  const FESpace& s = *v.space;
  const Mesh& mesh = s.mesh();
  const int p = s.p();
  const int d = mesh.dim();
  if (order < 2 * p + 2)
    throw StudyError("quadrature order " + std::to_string(order) + " below 2p+2 = " +
                     std::to_string(2 * p + 2));
  const QuadratureRule rule = gauss_simplex(d, order);
  const auto corner_ids = mesh.corner_vertices();

  double l2 = 0.0, h1 = 0.0;
  std::vector<Point> pts;
  std::vector<double> wts;
  for (int k = 0; k < static_cast<int>(mesh.num_elements()); ++k) {
    const auto& el = mesh.element(k);
    int apex = -1;
    for (std::size_t j = 0; j < el.size(); ++j)
      for (int c : corner_ids)
        if (el[j] == c) apex = static_cast<int>(j);
    std::vector<std::vector<Point>> cells;
    std::vector<Point> simplex;
    for (int w : el) simplex.push_back(mesh.vertex(w));
    if (apex >= 0 && d == 2) cells = split_toward(simplex, apex, singular_levels);
    else cells.push_back(simplex);

    const auto& ids = s.nodes().element_nodes[static_cast<std::size_t>(k)];
    for (const auto& cell : cells) {
      map_rule(cell, rule, pts, wts);
      for (std::size_t q = 0; q < pts.size(); ++q) {
        const auto lam = mesh.barycentric(k, pts[q]);
        const auto basis = local_basis(p, lam);
        const auto grads = local_basis_gradients(mesh, k, p, lam);
        double val = 0.0;
        std::vector<double> g(static_cast<std::size_t>(d), 0.0);
        for (std::size_t j = 0; j < ids.size(); ++j) {
          const double c = v.coeffs[ids[j]];
          val += c * basis[j];
          for (int t = 0; t < d; ++t) g[t] += c * grads[j][t];
        }
        const double e = u(pts[q]) - val;
        const auto gu = grad_u(pts[q]);
        double ge = 0.0;
        for (int t = 0; t < d; ++t) ge += (gu[t] - g[t]) * (gu[t] - g[t]);
        l2 += wts[q] * e * e;
        h1 += wts[q] * ge;
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

int coupled_levels(int p, double c_ell, double delta) {
  return static_cast<int>(std::ceil(c_ell * std::pow(static_cast<double>(p), 1.0 / delta) - 1e-12));
}

std::vector<Point> sample_domain(const Mesh& mesh, int count, std::uint64_t seed) {
  const int d = mesh.dim();
  Point lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
  for (const auto& v : mesh.vertices())
    for (int c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], v[c]);
      hi[c] = std::max(hi[c], v[c]);
    }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  while (static_cast<int>(out.size()) < count) {
    Point x(d);
    for (int c = 0; c < d; ++c) x[c] = lo[c] + (hi[c] - lo[c]) * unit(rng);
    if (mesh.locate(x)) out.push_back(std::move(x));
  }
  return out;
}

std::vector<Point> sample_boundary(const Mesh& mesh, int count, std::uint64_t seed) {
  const int d = mesh.dim();
  const auto& faces = mesh.boundary_faces();
  std::vector<double> measure;
  for (const auto& f : faces) {
    Eigen::MatrixXd e(d, d - 1);
    for (int j = 1; j < d; ++j)
      for (int c = 0; c < d; ++c) e(c, j - 1) = mesh.vertex(f[j])[c] - mesh.vertex(f[0])[c];
    measure.push_back(std::sqrt(std::max(0.0, (e.transpose() * e).determinant())));
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(measure.begin(), measure.end());
  std::exponential_distribution<double> expo(1.0);
  std::vector<Point> out;
  for (int s = 0; s < count; ++s) {
    const auto& f = faces[pick(rng)];
    std::vector<double> w(f.size());
    double sum = 0.0;
    for (double& x : w) sum += (x = expo(rng));
    Point x(d, 0.0);
    for (std::size_t j = 0; j < f.size(); ++j)
      for (int c = 0; c < d; ++c) x[c] += w[j] / sum * mesh.vertex(f[j])[c];
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<ConvergenceRecord> convergence_study(const SingularInstance& inst, const StudyOptions& opt) {
  if (opt.p_max < 2 || opt.p_min < 1 || opt.p_min > opt.p_max)
    throw StudyError("study needs 1 <= p_min <= p_max and p_max >= 2");
  const int max_level = coupled_levels(opt.p_max, opt.c_ell, opt.delta);
  const auto meshes = geometric_refine(
      GeometricMeshSpec{opt.sigma, inst.base_mesh.corners(), max_level, inst.base_mesh});
  std::vector<ConvergenceRecord> out;
  for (int p = opt.p_min; p <= opt.p_max; ++p) {
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceRecord rec;
    rec.p = p;
    rec.ell = coupled_levels(p, opt.c_ell, opt.delta);
    auto space = std::make_shared<const FESpace>(meshes[static_cast<std::size_t>(rec.ell)], p);
    const FEFunction v = nodal_interpolant(space, inst.u);
    const Network net = fe_function_net(compile_basis(space->mesh(), space->nodes()).net, v);
    rec.dofs = space->dim();
    rec.size = net.size();
    rec.depth = net.depth();

    double vmax = 1.0;
    for (double c : v.coeffs) vmax = std::max(vmax, std::abs(c));
    const auto pts = sample_domain(space->mesh(), opt.gate_points, opt.seed + static_cast<std::uint64_t>(p));
    const auto ys = net.realize_batch(pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
      rec.gate_error = std::max(rec.gate_error, std::abs(ys[i][0] - evaluate_fe_direct(v, pts[i])) / vmax);
    if (!(rec.gate_error <= opt.gate_tol)) {
      std::ostringstream msg;
      msg << "exactness gate failed at p=" << p << ": relative deviation " << rec.gate_error;
      throw StudyError(msg.str());
    }
    const ErrorNorms err = h1_error(v, inst.u, inst.grad_u, 2 * p + 2 + opt.extra_order, opt.singular_levels);
    rec.l2_error = err.l2;
    rec.h1_error = err.h1;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(rec);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.p < b.p; });
  return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

ExponentialFit fit_exponential(const std::vector<double>& dofs, const std::vector<double>& errors, int d,
                               double delta) {
  if (dofs.size() < 4 || dofs.size() != errors.size())
    throw StudyError("fit_exponential needs at least 4 records");
  ExponentialFit fit;
  fit.exponent = 1.0 / (1.0 + delta * d);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const double s = std::pow(dofs[i], fit.exponent);
    x.push_back(delta >= 1.0 ? s : (1.0 - delta) * std::lgamma(s));
    y.push_back(std::log(errors[i]));
  }
  const LineFit line = fit_line(x, y);
  fit.b = -line.slope;
  fit.log_c = line.intercept;
  fit.r2 = line.r2;
  return fit;
}

ExponentialFit fit_exponential(const std::vector<ConvergenceRecord>& records, int d, double delta) {
  std::vector<double> n, e;
  for (const auto& r : records) {
    n.push_back(static_cast<double>(r.dofs));
    e.push_back(r.h1_error);
  }
  return fit_exponential(n, e, d, delta);
}

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

std::string study_csv(const std::vector<ConvergenceRecord>& records, bool timing) {
  std::ostringstream out;
  out << "p,ell,N,M,L,l2_error,h1_error,seconds\n";
  for (const auto& r : records)
    out << r.p << ',' << r.ell << ',' << r.dofs << ',' << r.size << ',' << r.depth << ',' << num(r.l2_error)
        << ',' << num(r.h1_error) << ',' << (timing ? num(r.seconds) : "0") << '\n';
  return out.str();
}

std::string study_svg(const std::vector<ConvergenceRecord>& records, int d, double delta) {
  const double w = 640, h = 420, pad = 60;
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    xs.push_back(std::pow(static_cast<double>(r.dofs), 1.0 / (1.0 + delta * d)));
    ys.push_back(std::log10(r.h1_error));
  }
  const double x0 = *std::min_element(xs.begin(), xs.end()), x1 = *std::max_element(xs.begin(), xs.end());
  const double y0 = std::floor(*std::min_element(ys.begin(), ys.end())),
               y1 = std::ceil(*std::max_element(ys.begin(), ys.end()));
  auto sx = [&](double x) { return pad + (x - x0) / std::max(x1 - x0, 1e-12) * (w - 2 * pad); };
  auto sy = [&](double y) { return h - pad - (y - y0) / std::max(y1 - y0, 1e-12) * (h - 2 * pad); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\"" << h - pad
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
    << "\" stroke=\"black\"/>\n";
  for (double y = y0; y <= y1 + 1e-9; y += 1.0)
    s << "<text x=\"" << pad - 8 << "\" y=\"" << sy(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">1e"
      << static_cast<int>(y) << "</text>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"" << h - 15 << "\" font-size=\"12\" text-anchor=\"middle\">N^(1/"
    << num(1.0 + delta * d) << ")</text>\n";
  s << "<text x=\"15\" y=\"" << h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 15 " << h / 2
    << ")\" text-anchor=\"middle\">H1 error</text>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    s << "<circle cx=\"" << sx(xs[i]) << "\" cy=\"" << sy(ys[i]) << "\" r=\"4\" fill=\"steelblue\"/>\n";
  if (records.size() >= 4) {
    const ExponentialFit fit = fit_exponential(records, d, delta);
    if (delta >= 1.0) {
      const double ln10 = std::log(10.0);
      s << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy((fit.log_c - fit.b * x0) / ln10) << "\" x2=\"" << sx(x1)
        << "\" y2=\"" << sy((fit.log_c - fit.b * x1) / ln10) << "\" stroke=\"firebrick\"/>\n";
    }
    s << "<text x=\"" << w - pad << "\" y=\"" << pad - 10 << "\" font-size=\"12\" text-anchor=\"end\">b = "
      << num(fit.b) << ", R2 = " << num(fit.r2) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace fem2nn
