// fem2nn: compile Lagrange finite element functions into ReLU/ReLU^2 networks.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "fem2nn/cpwl.hpp"
#include "fem2nn/hofem.hpp"
#include "fem2nn/instances.hpp"
#include "fem2nn/io.hpp"
#include "fem2nn/refine.hpp"
#include "fem2nn/study.hpp"

using namespace fem2nn;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Options {
  std::string domain = "lshape";
  double sigma = 0.5;
  int levels = 0;
  int n = 4;
  std::uint64_t seed = 0;
  std::string out;
  std::string mesh_path;
  std::string net_path;
  std::string coeffs_path;
  std::string function;
  int p = 1;
  int pmin = 1;
  int pmax = 6;
  int samples = 1000;
  double tol = 1e-9;
  std::optional<double> delta;
  double c_ell = 1.0;
  double a = 0.5;
  std::string instance = "lshape";
  std::string svg;
  bool no_timing = false;
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") std::cout << content;
  else write_file_atomic(path, content);
}

std::vector<double> load_coeffs(const Options& o, const std::shared_ptr<const FESpace>& space) {
  if (!o.coeffs_path.empty() && !o.function.empty())
    throw CLI::ValidationError("--coeffs and --function are mutually exclusive");
  if (!o.coeffs_path.empty()) {
    auto c = coeffs_from_json(read_json(o.coeffs_path));
    if (c.size() != space->dim())
      throw FormatError("coefficient file has " + std::to_string(c.size()) + " entries, the space has " +
                        std::to_string(space->dim()));
    return c;
  }
  return nodal_interpolant(space, instance_by_name(o.function, o.a).u).coeffs;
}

int cmd_mesh_build(const Options& o) {
  Mesh mesh = lshape_mesh();
  if (o.domain == "lshape") {
    const Mesh base = lshape_mesh();
    mesh = geometric_refine(GeometricMeshSpec{o.sigma, base.corners(), o.levels, base}).back();
  } else if (o.domain == "square") {
    const Mesh base = square_mesh(1, true);
    mesh = geometric_refine(GeometricMeshSpec{o.sigma, base.corners(), o.levels, base}).back();
  } else if (o.domain == "cube") {
    mesh = cube_tets();
  } else if (o.domain == "random-square") {
    mesh = random_mesh(0, o.n, o.seed);
  } else if (o.domain == "random-lshape") {
    mesh = random_mesh(1, o.n, o.seed);
  } else {
    throw CLI::ValidationError("unknown domain '" + o.domain + "'");
  }
  emit(o.out, dump(mesh_to_json(mesh)));
  std::cerr << "elements=" << mesh.num_elements() << " vertices=" << mesh.num_vertices() << "\n";
  return kOk;
}

int cmd_mesh_validate(const Options& o) {
  const Mesh mesh = mesh_from_json(read_json(o.mesh_path));
  const RegularityReport rep = validate_regularity(mesh);
  for (const auto& m : rep.messages) std::cout << m << "\n";
  std::cout << "elements=" << mesh.num_elements() << " vertices=" << mesh.num_vertices();
  if (rep.pass) {
    const ShapeReport shape = shape_regularity(mesh);
    const PatchIndex patch = patch_index(mesh);
    std::cout << " kappa=" << shape.kappa << " s_max=" << patch.s_max;
  }
  std::cout << "\n" << (rep.pass ? "regular" : "NOT regular") << "\n";
  return rep.pass ? kOk : kFail;
}

int cmd_nodes(const Options& o) {
  const Mesh mesh = mesh_from_json(read_json(o.mesh_path));
  emit(o.out, dump(nodes_to_json(interpolation_nodes(mesh, o.p))));
  return kOk;
}

int cmd_emulate(const Options& o) {
  auto space = std::make_shared<const FESpace>(mesh_from_json(read_json(o.mesh_path)), o.p);
  const BasisNetwork basis = compile_basis(space->mesh(), space->nodes());
  Network net = basis.net;
  if (!o.coeffs_path.empty() || !o.function.empty())
    net = fe_function_net(basis.net, FEFunction{space, load_coeffs(o, space)});
  emit(o.out, dump(network_to_json(net)));
  const SizeReport r = size_depth(net);
  std::cerr << "nodes=" << space->dim() << " M=" << r.size << " L=" << r.depth << " relu_layers=" << r.relu_layers
            << " relu2_layers=" << r.relu2_layers << "\n";
  return kOk;
}

int cmd_verify(const Options& o) {
  auto space = std::make_shared<const FESpace>(mesh_from_json(read_json(o.mesh_path)), o.p);
  const Network net = network_from_json(read_json(o.net_path));
  if (net.input_dim() != space->mesh().dim()) throw FormatError("network input dimension does not match the mesh");
  const auto pts = sample_domain(space->mesh(), o.samples, o.seed);
  const auto ys = net.realize_batch(pts);
  double err = 0.0, scale = 1.0;
  if (!o.coeffs_path.empty() || !o.function.empty()) {
    const FEFunction v{space, load_coeffs(o, space)};
    if (net.output_dim() != 1) throw FormatError("expected a scalar network");
    double vmax = 0.0;
    for (double c : v.coeffs) vmax = std::max(vmax, std::abs(c));
    scale = 1.0 + vmax;
    for (std::size_t i = 0; i < pts.size(); ++i) err = std::max(err, std::abs(ys[i][0] - evaluate_fe_direct(v, pts[i])));
  } else {
    if (net.output_dim() != static_cast<int>(space->dim()))
      throw FormatError("basis network must have one output per node");
    scale = 2.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const int k = *space->mesh().locate(pts[i]);
      const auto basis = local_basis(o.p, space->mesh().barycentric(k, pts[i]));
      std::vector<double> expect(space->dim(), 0.0);
      const auto& ids = space->nodes().element_nodes[static_cast<std::size_t>(k)];
      for (std::size_t j = 0; j < ids.size(); ++j) expect[ids[j]] = basis[j];
      for (std::size_t j = 0; j < expect.size(); ++j) err = std::max(err, std::abs(ys[i][j] - expect[j]));
    }
  }
  const double threshold = o.tol * scale;
  std::cout << "samples=" << pts.size() << " max_error=" << err << " threshold=" << threshold << "\n";
  const bool ok = err <= threshold;
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kOk : kFail;
}

int cmd_audit(const Options& o) {
  const Mesh mesh = mesh_from_json(read_json(o.mesh_path));
  std::ostringstream csv;
  csv << "p,|N|,M,L,M_over_N,relu_layers,relu2_layers\n";
  bool mixed = false;
  for (int p = 1; p <= o.pmax; ++p) {
    const SizeAuditRow r = size_audit(mesh, p);
    mixed = mixed || r.mixed_layers > 0 || !r.relu_before_relu2;
    csv << r.p << ',' << r.nodes << ',' << r.size << ',' << r.depth << ',' << r.size_per_node << ','
        << r.relu_layers << ',' << r.relu2_layers << '\n';
  }
  emit(o.out, csv.str());
  if (!o.out.empty() && o.out != "-") std::cout << csv.str();
  if (mixed) std::cerr << "layer typing violated\n";
  return mixed ? kFail : kOk;
}

int cmd_study(const Options& o) {
  const SingularInstance inst = instance_by_name(o.instance, o.a);
  StudyOptions so;
  so.sigma = o.sigma;
  so.p_min = o.pmin;
  so.p_max = o.pmax;
  so.delta = o.delta.value_or(inst.delta);
  so.c_ell = o.c_ell;
  so.seed = o.seed;
  std::vector<ConvergenceRecord> recs;
  try {
    recs = convergence_study(inst, so);
  } catch (const StudyError& e) {
    std::cerr << e.what() << "\n";
    return kFail;
  }
  emit(o.out, study_csv(recs, !o.no_timing));
  if (!o.svg.empty()) write_file_atomic(o.svg, study_svg(recs, 2, so.delta));
  if (recs.size() >= 4) {
    const ExponentialFit fit = fit_exponential(recs, 2, so.delta);
    std::cerr << "fit: b=" << fit.b << " logC=" << fit.log_c << " R2=" << fit.r2 << " exponent=" << fit.exponent
              << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile Lagrange finite element functions into exact ReLU/ReLU^2 networks"};
  app.require_subcommand(1);
  Options o;

  auto* mesh = app.add_subcommand("mesh", "Build or validate meshes");
  mesh->require_subcommand(1);
  auto* build = mesh->add_subcommand("build", "Build a mesh");
  build->add_option("--domain", o.domain, "lshape | square | cube | random-square | random-lshape");
  build->add_option("--sigma", o.sigma, "Grading ratio (only 0.5 is generated)");
  build->add_option("--levels", o.levels, "Geometric refinement levels")->check(CLI::NonNegativeNumber);
  build->add_option("--n", o.n, "Cells per unit length for random meshes")->check(CLI::PositiveNumber);
  build->add_option("--seed", o.seed, "Random seed");
  build->add_option("--out", o.out, "Output mesh JSON")->required();
  auto* validate = mesh->add_subcommand("validate", "Check regularity of a mesh");
  validate->add_option("mesh", o.mesh_path, "Mesh JSON")->required()->check(CLI::ExistingFile);

  auto* nodes = app.add_subcommand("nodes", "Export the Lagrange node set");
  nodes->add_option("--mesh", o.mesh_path)->required()->check(CLI::ExistingFile);
  nodes->add_option("--p", o.p)->required()->check(CLI::PositiveNumber);
  nodes->add_option("--out", o.out);

  auto* emulate = app.add_subcommand("emulate", "Compile a basis or FE function network");
  emulate->add_option("--mesh", o.mesh_path)->required()->check(CLI::ExistingFile);
  emulate->add_option("--p", o.p)->required()->check(CLI::PositiveNumber);
  emulate->add_option("--coeffs", o.coeffs_path, "Nodal coefficients JSON")->check(CLI::ExistingFile);
  emulate->add_option("--function", o.function, "Interpolate a built-in instance (lshape, square, gevrey)");
  emulate->add_option("--a", o.a, "Radial exponent for square/gevrey");
  emulate->add_option("--out", o.out, "Output network JSON")->required();

  auto* verify = app.add_subcommand("verify", "Compare a network against direct FE evaluation");
  verify->add_option("--net", o.net_path)->required()->check(CLI::ExistingFile);
  verify->add_option("--mesh", o.mesh_path)->required()->check(CLI::ExistingFile);
  verify->add_option("--p", o.p)->required()->check(CLI::PositiveNumber);
  verify->add_option("--coeffs", o.coeffs_path)->check(CLI::ExistingFile);
  verify->add_option("--function", o.function);
  verify->add_option("--a", o.a);
  verify->add_option("--samples", o.samples)->check(CLI::PositiveNumber);
  verify->add_option("--seed", o.seed);
  verify->add_option("--tol", o.tol, "Tolerance relative to 1 + max|v_i|");

  auto* audit = app.add_subcommand("audit", "Size and depth audit over p = 1..pmax");
  audit->add_option("--mesh", o.mesh_path)->required()->check(CLI::ExistingFile);
  audit->add_option("--pmax", o.pmax)->check(CLI::PositiveNumber);
  audit->add_option("--out", o.out);

  auto* study = app.add_subcommand("study", "hp convergence study on a graded mesh sequence");
  study->add_option("--instance", o.instance, "lshape | square | gevrey");
  study->add_option("--sigma", o.sigma);
  study->add_option("--pmin", o.pmin)->check(CLI::PositiveNumber);
  study->add_option("--pmax", o.pmax)->check(CLI::PositiveNumber);
  study->add_option("--delta", o.delta, "Gevrey index used for ell(p) and the fit");
  study->add_option("--c-ell", o.c_ell, "ell = ceil(c_ell * p^(1/delta))");
  study->add_option("--a", o.a);
  study->add_option("--seed", o.seed);
  study->add_option("--out", o.out);
  study->add_option("--svg", o.svg);
  study->add_flag("--no-timing", o.no_timing, "Write 0 in the seconds column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (build->parsed()) return cmd_mesh_build(o);
    if (validate->parsed()) return cmd_mesh_validate(o);
    if (nodes->parsed()) return cmd_nodes(o);
    if (emulate->parsed()) return cmd_emulate(o);
    if (verify->parsed()) return cmd_verify(o);
    if (audit->parsed()) return cmd_audit(o);
    if (study->parsed()) return cmd_study(o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
