#pragma once

#include <stdexcept>
#include <string>

namespace bqds {

// Failure categories surfaced by the library.  The CLI maps a subset of
// these onto process exit codes, so the enumerators are part of the
// public contract.
enum class ErrorKind {
  InvalidConfig,    // malformed input, bad dimensions, unusable flags
  ShapeMismatch,    // matrix dimensions incompatible with the operation
  DimMismatch,      // module dimensions incompatible (tensor, maps)
  ParentMismatch,   // module vectors from different parent modules
  GradingMismatch,  // right algebra does not carry the requested 2x2 grading
  NotHermitian,     // eigensolver input fails the symmetry check
  EmptySpan,        // orthonormalization of an all-zero family
  NotCP,            // Choi matrix has a negative eigenvalue
  NotBlock,         // map leaks across the diagonal corners
  NotContraction,   // operator norm exceeds 1 beyond tolerance
  NotBilinear,      // map fails left-linearity / intertwining
  NotSubmodule,     // spanning set is not closed under the right action
  NotMorphism,      // family fails the composition identity
  NotRefinement,    // partition pair is not refinement-ordered
  Inconsistent,     // linear system for the contraction has no solution
  NormExceeded,     // solved contraction violates the norm bound
  HorizonExceeded,  // time index beyond the configured horizon
  NotUnital,        // operation requires a unital semigroup step
  SizeGuard,        // ambient dimension beyond the configured bound
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what_arg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what_arg),
        kind_(kind) {}
  Error(ErrorKind kind, const std::string& what_arg, double witness)
      : Error(kind, what_arg) {
    witness_ = witness;
    has_witness_ = true;
  }

  ErrorKind kind() const { return kind_; }
  bool has_witness() const { return has_witness_; }
  // For NotCP this is the offending eigenvalue, for NormExceeded the norm,
  // for SizeGuard the dimension that tripped the bound.
  double witness() const { return witness_; }

 private:
  ErrorKind kind_;
  double witness_ = 0.0;
  bool has_witness_ = false;
};

// Two-tier tolerance scheme used throughout: `build` guards exact algebraic
// identities evaluated in fresh arithmetic, `verify` guards quantities that
// accumulate error through compositions and solves.
struct Tolerances {
  double build = 1e-9;
  double verify = 1e-6;
};

}  // namespace bqds
