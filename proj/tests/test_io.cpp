#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "fem2nn/hofem.hpp"
#include "fem2nn/io.hpp"
#include "fem2nn/refine.hpp"
#include "fem2nn/study.hpp"
#include "support.hpp"

using namespace fem2nn;
using nlohmann::json;

TEST_CASE("mesh JSON round trip") {
  for (const Mesh& m : {lshape_geometric(3).back(), random_mesh(0, 3, 1), cube_tets()}) {
    const std::string a = dump(mesh_to_json(m));
    const Mesh back = mesh_from_json(json::parse(a));
    CHECK(back.vertices() == m.vertices());
    CHECK(back.elements() == m.elements());
    CHECK(back.corners() == m.corners());
    CHECK(dump(mesh_to_json(back)) == a);
  }
  CHECK_THROWS_AS(mesh_from_json(json::parse(R"({"dim": 2, "vertices": [[0, 0]]})")), FormatError);
}

TEST_CASE("network JSON round trip is byte identical") {
  auto space = std::make_shared<const FESpace>(random_mesh(1, 2, 2), 3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> c(space->dim());
  for (auto& x : c) x = u(rng) / 3.0;
  const Network net = fe_function_net(FEFunction{space, c});
  const std::string a = dump(network_to_json(net));
  const Network back = network_from_json(json::parse(a));
  CHECK(dump(network_to_json(back)) == a);
  CHECK(back.size() == net.size());
  for (const auto& x : sample_domain(space->mesh(), 100, 4)) CHECK(back.realize(x) == net.realize(x));
}

TEST_CASE("network JSON rejects invalid content") {
  const std::string ok =
      R"({"input_dim":1,"layers":[{"rows":1,"cols":1,"coo":[[0,0,2.5]],"bias":[[0,1]],"acts":[0]}]})";
  CHECK(network_from_json(json::parse(ok)).realize(std::vector<double>{2.0})[0] == 6.0);
  const std::string zero = R"({"input_dim":1,"layers":[{"rows":1,"cols":1,"coo":[[0,0,0]],"bias":[],"acts":[0]}]})";
  CHECK_THROWS_AS(network_from_json(json::parse(zero)), FormatError);
  const std::string act = R"({"input_dim":1,"layers":[{"rows":1,"cols":1,"coo":[[0,0,1]],"bias":[],"acts":[3]}]})";
  CHECK_THROWS_AS(network_from_json(json::parse(act)), FormatError);
  const std::string relu_out =
      R"({"input_dim":1,"layers":[{"rows":1,"cols":1,"coo":[[0,0,1]],"bias":[],"acts":[1]}]})";
  CHECK_THROWS_AS(network_from_json(json::parse(relu_out)), NetworkError);
  CHECK_THROWS_AS(network_from_json(json::parse(R"({"layers":[]})")), FormatError);
}

TEST_CASE("coefficient and node files") {
  const std::vector<double> c{0.1, -2.0, 1.0 / 3.0};
  CHECK(coeffs_from_json(json::parse(dump(coeffs_to_json(c)))) == c);
  CHECK(coeffs_from_json(json::parse("[1, 2.5]")) == std::vector<double>{1, 2.5});
  CHECK_THROWS_AS(coeffs_from_json(json::parse(R"({"values": [1]})")), FormatError);

  const auto nodes = interpolation_nodes(lshape_mesh(), 2);
  const json j = nodes_to_json(nodes);
  CHECK(j.at("nodes").size() == nodes.size());
  CHECK(j.at("p") == 2);
}

TEST_CASE("atomic writes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fem2nn_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "out.json").string();
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  CHECK(read_file(path) == "second\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));
  CHECK_THROWS_AS(read_file((dir / "missing.json").string()), FormatError);
  CHECK_THROWS_AS(write_file_atomic((dir / "no" / "such" / "dir.json").string(), "x"), FormatError);
  fs::remove_all(dir);
}
