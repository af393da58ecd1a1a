#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace slice_embed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid topology, workload or experiment parameters.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A state mutation would break a resource invariant (e.g. over-commit).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// The LP layer could not reach a verified answer even after loosening
/// its tolerance.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Branch-and-bound stopped at its node cap. The instance status is unknown,
/// which is different from a proven infeasible result.
class ResourceLimitError : public Error {
 public:
  ResourceLimitError(const std::string& what, std::uint64_t nodes, bool had_incumbent)
      : Error(what), nodes_(nodes), had_incumbent_(had_incumbent) {}

  std::uint64_t nodes() const { return nodes_; }
  bool had_incumbent() const { return had_incumbent_; }

 private:
  std::uint64_t nodes_;
  bool had_incumbent_;
};

/// The brute-force oracle was asked to enumerate more candidates than its cap.
class OracleScopeError : public Error {
 public:
  using Error::Error;
};

/// Text input (config, LP file, request dump) failed to parse.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace slice_embed
