#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace properties {

struct Result {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Randomized invariant checks over every module; `trials` instances each.
std::vector<Result> run_all(std::uint64_t seed, std::size_t trials);

}  // namespace properties
