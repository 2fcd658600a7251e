#pragma once

#include <stdexcept>
#include <string>

namespace lpp {

// Cell-update budget exceeded (or any other resource limit).
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// A Monte Carlo estimate cannot be formed at the requested precision
// (too many censored cells, too few hits in a denominator, ...).
class estimation_error : public std::runtime_error {
 public:
  explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lpp
