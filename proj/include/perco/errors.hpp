#pragma once

#include <stdexcept>
#include <string>

namespace perco {

// invalid inputs use std::invalid_argument directly

// configured resource limit hit (vertex budget, weight precision, enumeration caps)
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace perco
