#include "errors.hpp"

namespace gevreg {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Derivative: return "derivative";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::Separation: return "separation";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Inference: return "inference";
    case ErrorKind::InsufficientReplicates: return "insufficient-replicates";
    case ErrorKind::UnreliableRun: return "unreliable-run";
  }
  return "unknown";
}

}  // namespace gevreg
