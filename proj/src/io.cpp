#include "fem2nn/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fem2nn {

using nlohmann::json;

json mesh_to_json(const Mesh& mesh) {
  json j;
  j["dim"] = mesh.dim();
  j["vertices"] = mesh.vertices();
  j["elements"] = mesh.elements();
  if (!mesh.corners().empty()) j["corners"] = mesh.corners();
  return j;
}

Mesh mesh_from_json(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    auto vertices = j.at("vertices").get<std::vector<Point>>();
    auto elements = j.at("elements").get<std::vector<std::vector<int>>>();
    std::vector<Point> corners;
    if (j.contains("corners")) corners = j.at("corners").get<std::vector<Point>>();
    return Mesh(dim, std::move(vertices), std::move(elements), std::move(corners));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed mesh JSON: ") + e.what());
  }
}

json network_to_json(const Network& net) {
  json layers = json::array();
  for (const Layer& l : net.layers()) {
    json coo = json::array();
    for (const auto& t : l.weights.triplets()) coo.push_back(json::array({t.row, t.col, t.value}));
    json bias = json::array();
    for (std::size_t i = 0; i < l.bias.size(); ++i)
      if (l.bias[i] != 0.0) bias.push_back(json::array({static_cast<int>(i), l.bias[i]}));
    json acts = json::array();
    for (Activation a : l.acts) acts.push_back(static_cast<int>(a));
    layers.push_back({{"rows", l.out_dim()}, {"cols", l.in_dim()}, {"coo", coo}, {"bias", bias}, {"acts", acts}});
  }
  return {{"input_dim", net.input_dim()}, {"layers", layers}};
}

Network network_from_json(const json& j) {
  try {
    const int input_dim = j.at("input_dim").get<int>();
    std::vector<Layer> layers;
    for (const auto& jl : j.at("layers")) {
      const int rows = jl.at("rows").get<int>();
      const int cols = jl.at("cols").get<int>();
      std::vector<Triplet> t;
      for (const auto& e : jl.at("coo")) {
        const double v = e.at(2).get<double>();
        if (v == 0.0) throw FormatError("network JSON stores a zero weight");
        t.push_back({e.at(0).get<int>(), e.at(1).get<int>(), v});
      }
      Layer l;
      l.weights = SparseMatrix::from_triplets(rows, cols, std::move(t));
      l.bias.assign(static_cast<std::size_t>(rows), 0.0);
      for (const auto& e : jl.at("bias")) {
        const int i = e.at(0).get<int>();
        if (i < 0 || i >= rows) throw FormatError("bias index out of range");
        l.bias[static_cast<std::size_t>(i)] = e.at(1).get<double>();
      }
      for (const auto& a : jl.at("acts")) {
        const int code = a.get<int>();
        if (code < 0 || code > 2) throw FormatError("unknown activation code " + std::to_string(code));
        l.acts.push_back(static_cast<Activation>(code));
      }
      layers.push_back(std::move(l));
    }
    return Network(input_dim, std::move(layers));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed network JSON: ") + e.what());
  }
}

json nodes_to_json(const LagrangeNodeSet& nodes) {
  json arr = json::array();
  for (const auto& n : nodes.nodes)
    arr.push_back({{"x", n.x}, {"vertices", n.vertices}, {"alpha", n.alpha}});
  return {{"p", nodes.p}, {"dim", nodes.dim}, {"nodes", arr}, {"element_nodes", nodes.element_nodes}};
}

std::vector<double> coeffs_from_json(const json& j) {
  try {
    if (j.is_object()) return j.at("coeffs").get<std::vector<double>>();
    return j.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed coefficient JSON: ") + e.what());
  }
}

json coeffs_to_json(const std::vector<double>& c) { return {{"coeffs", c}}; }

std::string dump(const json& j) { return j.dump() + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw FormatError("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

}  // namespace fem2nn
