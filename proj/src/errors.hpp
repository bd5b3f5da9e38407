#pragma once

#include <stdexcept>
#include <string>

namespace gevreg {

enum class ErrorKind {
  Domain,         // non-finite or out-of-range numeric input
  Derivative,     // derivative requested on the truncation boundary
  Validation,     // dataset or configuration rejected
  Schema,         // CSV header / column problems
  Parse,          // CSV cell problems
  Io,
  Separation,     // MLE does not exist
  NonConvergence,
  Inference,      // inference requested on a non-converged fit
  InsufficientReplicates,
  UnreliableRun,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gevreg
