#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fem2nn/hofem.hpp"
#include "fem2nn/instances.hpp"

namespace fem2nn {

class StudyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficients u(node) for every node of the space.
FEFunction nodal_interpolant(std::shared_ptr<const FESpace> space, const ScalarField& u);

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;  // H^1 seminorm of u - v
};

/// Elementwise quadrature of (u - v)^2 and |grad u - grad v|^2.  Elements touching
/// a mesh corner are split `singular_levels` times toward it.  `order` must be at
/// least 2p + 2.
ErrorNorms h1_error(const FEFunction& v, const ScalarField& u, const VectorField& grad_u, int order,
                    int singular_levels = 4);

struct ConvergenceRecord {
  int p = 0;
  int ell = 0;
  std::size_t dofs = 0;
  std::size_t size = 0;
  int depth = 0;
  double l2_error = 0.0;
  double h1_error = 0.0;
  double seconds = 0.0;
  double gate_error = 0.0;  // max relative network-vs-interpolant deviation
};

struct StudyOptions {
  double sigma = 0.5;
  int p_min = 1;
  int p_max = 6;
  double delta = 1.0;
  double c_ell = 1.0;
  int gate_points = 100;
  double gate_tol = 1e-8;
  std::uint64_t seed = 0;
  int extra_order = 0;  // quadrature order 2p + 2 + extra_order
  int singular_levels = 4;
};

/// ell(p) = ceil(c_ell * p^(1/delta)).
int coupled_levels(int p, double c_ell, double delta);

/// For p = p_min..p_max: graded mesh, nodal interpolant, compiled network, errors.
/// Throws StudyError if the compiled network deviates from the interpolant.
std::vector<ConvergenceRecord> convergence_study(const SingularInstance& inst, const StudyOptions& opt);

struct ExponentialFit {
  double b = 0.0;
  double log_c = 0.0;
  double r2 = 0.0;
  double exponent = 0.0;  // 1 / (1 + delta d)
};

/// Least squares of log(error) against N^{1/(1+delta d)} (delta >= 1) or against
/// -(1-delta) log Gamma(N^{1/(1+delta d)}) (delta < 1).  `errors` and `dofs` align.
ExponentialFit fit_exponential(const std::vector<double>& dofs, const std::vector<double>& errors, int d,
                               double delta);
ExponentialFit fit_exponential(const std::vector<ConvergenceRecord>& records, int d, double delta);

/// Slope and R^2 of a straight-line least-squares fit.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

std::string study_csv(const std::vector<ConvergenceRecord>& records, bool timing = true);
std::string study_svg(const std::vector<ConvergenceRecord>& records, int d, double delta);

/// Uniform points in the domain (rejection sampling in the bounding box).
std::vector<Point> sample_domain(const Mesh& mesh, int count, std::uint64_t seed);

/// Uniform points on the domain boundary (random boundary facets, random barycentrics).
std::vector<Point> sample_boundary(const Mesh& mesh, int count, std::uint64_t seed);

}  // namespace fem2nn
