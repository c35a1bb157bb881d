#include "doctest.h"
#include "properties.hpp"

TEST_SUITE("properties") {

TEST_CASE("invariants hold on random instances") {
  for (const auto& r : properties::run_all(2024, 10)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

}
