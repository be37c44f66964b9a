#pragma once

#include <stdexcept>
#include <string>

namespace whittlekf {

// Thrown when a computation would exceed a configured resource cap
// (tree enumeration size, matrix-entry overflow, brute-force budget).
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a Moebius denominator vanishes at the evaluation point.
class singularity_error : public std::runtime_error {
 public:
  explicit singularity_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a truncated series cannot meet the requested tolerance,
// e.g. a denominator partial sum below its conditioning floor.
class conditioning_error : public std::runtime_error {
 public:
  explicit conditioning_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace whittlekf
