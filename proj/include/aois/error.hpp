#pragma once

#include <stdexcept>
#include <string>

namespace aois {

// Malformed input files (network, evidence, proposal, pseudo-tree).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Semantically invalid configuration: incompatible options, topology
// violations, out-of-range arguments.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An exact computation would exceed its enumeration or memory bound.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aois
