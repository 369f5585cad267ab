#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fh {

// Domain-level failures (violated preconditions, model limits). Exit code 1 territory.
struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input text. Exit code 2 territory.
struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// The requested level lacks the reduction property for the given sets.
// Carries a point exhibiting the conflict.
struct no_reduction : domain_error {
  std::size_t witness_point;
  no_reduction(const std::string& what, std::size_t point)
      : domain_error(what), witness_point(point) {}
};

struct budget_exceeded : domain_error {
  explicit budget_exceeded(const std::string& what) : domain_error(what) {}
};

}  // namespace fh
