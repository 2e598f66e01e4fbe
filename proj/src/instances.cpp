#include "fem2nn/instances.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fem2nn/refine.hpp"

namespace fem2nn {

namespace {

constexpr double kPi = std::numbers::pi;

double polar_angle(double x, double y) {
  double phi = std::atan2(y, x);
  if (phi < 0.0) phi += 2.0 * kPi;
  return phi;
}

SingularInstance lshape_instance() {
  SingularInstance s{"lshape", lshape_mesh(), 2.0 / 3.0, 1.0, -1.0 - 1.0 / 3.0, {}, {}};
  s.u = [](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return 0.0;
    return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * polar_angle(x[0], x[1]) / 3.0);
  };
  s.grad_u = [](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return std::vector<double>{0.0, 0.0};
    const double phi = polar_angle(x[0], x[1]);
    const double c = 2.0 / 3.0 * std::pow(r, -1.0 / 3.0);
    const double ur = c * std::sin(2.0 * phi / 3.0);
    const double uphi = c * std::cos(2.0 * phi / 3.0);
    return std::vector<double>{ur * std::cos(phi) - uphi * std::sin(phi),
                               ur * std::sin(phi) + uphi * std::cos(phi)};
  };
  return s;
}

SingularInstance square_instance(double a) {
  SingularInstance s{"square", square_mesh(1, true), a, 1.0, -1.0 - a / 2.0, {}, {}};
  s.u = [a](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return 0.0;
    return std::pow(r, a) * (1.0 - x[0]) * (1.0 - x[1]);
  };
  s.grad_u = [a](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return std::vector<double>{0.0, 0.0};
    const double ra = std::pow(r, a);
    const double dr = a * std::pow(r, a - 2.0);
    const double cut = (1.0 - x[0]) * (1.0 - x[1]);
    return std::vector<double>{dr * x[0] * cut - ra * (1.0 - x[1]),
                               dr * x[1] * cut - ra * (1.0 - x[0])};
  };
  return s;
}

// g(phi) = exp(1 - 1/(1-t^2)), t = 4 phi/pi - 1, and its derivative in phi.
void bump(double phi, double& g, double& dg) {
  const double t = 4.0 * phi / kPi - 1.0;
  const double q = 1.0 - t * t;
  if (q <= 0.0) {
    g = dg = 0.0;
    return;
  }
  g = std::exp(1.0 - 1.0 / q);
  dg = g * (-2.0 * t / (q * q)) * (4.0 / kPi);
}

SingularInstance gevrey_instance(double a) {
  SingularInstance s{"gevrey", square_mesh(1, true), a, 2.0, -1.0 - a / 2.0, {}, {}};
  s.u = [a](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return 0.0;
    double g, dg;
    bump(polar_angle(x[0], x[1]), g, dg);
    return std::pow(r, a) * g;
  };
  s.grad_u = [a](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return std::vector<double>{0.0, 0.0};
    const double phi = polar_angle(x[0], x[1]);
    double g, dg;
    bump(phi, g, dg);
    const double ur = a * std::pow(r, a - 1.0) * g;
    const double uphi = std::pow(r, a - 1.0) * dg;
    return std::vector<double>{ur * std::cos(phi) - uphi * std::sin(phi),
                               ur * std::sin(phi) + uphi * std::cos(phi)};
  };
  return s;
}

}  // namespace

std::vector<SingularInstance> builtin_instances(double a) {
  return {lshape_instance(), square_instance(a), gevrey_instance(a)};
}

SingularInstance instance_by_name(const std::string& name, double a) {
  if (name == "lshape") return lshape_instance();
  if (name == "square") return square_instance(a);
  if (name == "gevrey") return gevrey_instance(a);
  throw std::invalid_argument("unknown instance '" + name + "' (expected lshape, square or gevrey)");
}

}  // namespace fem2nn
