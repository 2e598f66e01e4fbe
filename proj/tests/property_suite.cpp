// Standalone randomized properties.  FEM2NN_SEED overrides the default seed 0.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "properties.hpp"

namespace {

std::uint64_t seed() {
  const char* s = std::getenv("FEM2NN_SEED");
  return s ? std::strtoull(s, nullptr, 10) : 0;
}

void expect(const properties::Outcome& o) {
  INFO(o.detail);
  CHECK(o.ok);
}

}  // namespace

TEST_CASE("hat basis partition of unity") { expect(properties::hat_partition_of_unity(seed())); }
TEST_CASE("Lagrange basis partition of unity") { expect(properties::lagrange_partition_of_unity(seed())); }
TEST_CASE("hats reproduce affine functions") { expect(properties::hat_affine_reproduction(seed())); }
TEST_CASE("w_alpha values and roots") { expect(properties::w_alpha_roots()); }
TEST_CASE("prune preserves realization") { expect(properties::prune_preserves_realization(seed())); }
TEST_CASE("network JSON round trip") { expect(properties::network_json_round_trip(seed())); }
