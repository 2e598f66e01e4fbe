#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fem2nn/mesh.hpp"
#include "fem2nn/network.hpp"
#include "fem2nn/nodes.hpp"

namespace fem2nn {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const nlohmann::json& j);

/// {"input_dim", "layers": [{"rows", "cols", "coo": [[i, j, v]], "bias": [[i, v]], "acts": [...]}]}
nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

nlohmann::json nodes_to_json(const LagrangeNodeSet& nodes);

/// Coefficients as a bare array or {"coeffs": [...]}.
std::vector<double> coeffs_from_json(const nlohmann::json& j);
nlohmann::json coeffs_to_json(const std::vector<double>& c);

/// Compact serialization with shortest round-trip numbers and a trailing newline.
std::string dump(const nlohmann::json& j);

std::string read_file(const std::string& path);
nlohmann::json read_json(const std::string& path);

/// Write to a temporary file in the same directory, then rename over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace fem2nn
