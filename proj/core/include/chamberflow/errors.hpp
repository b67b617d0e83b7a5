#pragma once

#include <stdexcept>
#include <string>

namespace chamberflow {

// Base class for all library-specific failures.  Plumbing-level precondition
// violations (bad determinant, evaluation at a pole, ...) throw the matching
// std exceptions instead; everything that a caller might want to branch on is
// a named type below.  Factor indices in messages are 1-based.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration file is syntactically or structurally unusable.
struct ConfigError : Error {
  using Error::Error;
};

// Group data failed construction-time or validation-time checks
// (overlapping disks, broken pairing, bad indices, ...).
struct ValidationError : Error {
  using Error::Error;
};

// An iterative routine failed to converge, or a numerical consistency
// cross-check was violated.
struct NumericalError : Error {
  using Error::Error;
};

// A boundary point lies in no open disk diameter of the given factor, so no
// branch of the coded map applies to it.
struct OutsideAllDisksError : Error {
  OutsideAllDisksError(int factor_1based, double pt)
      : Error("factor " + std::to_string(factor_1based) + ": point " +
              std::to_string(pt) + " lies in no open disk diameter"),
        factor(factor_1based),
        point(pt) {}
  int factor;
  double point;
};

// A point sits in a disk but falls outside every cover interval at the
// requested refinement depth: it is not (detectably) a limit point.
struct NotInCoverError : Error {
  NotInCoverError(int factor_1based, int cover_depth)
      : Error("factor " + std::to_string(factor_1based) +
              ": point escapes the limit-set cover at depth " +
              std::to_string(cover_depth)),
        factor(factor_1based),
        depth(cover_depth) {}
  int factor;
  int depth;
};

// Symbol-sequence generation left the coded domain after `step` applications
// of the map; `factor` is the component that escaped.
struct CodeTerminatedError : Error {
  CodeTerminatedError(int at_step, int factor_1based)
      : Error("orbit code terminated at step " + std::to_string(at_step) +
              " (factor " + std::to_string(factor_1based) + " left the coded domain)"),
        step(at_step),
        factor(factor_1based) {}
  int step;
  int factor;
};

// A factor geodesic has no future crossing with the section inside the
// requested horizon.
struct NoFutureIntersectionError : Error {
  explicit NoFutureIntersectionError(int factor_1based)
      : Error("factor " + std::to_string(factor_1based) +
              ": no future section crossing within the horizon"),
        factor(factor_1based) {}
  int factor;
};

// A geodesic meets a boundary circle tangentially (discriminant below
// tolerance), so the crossing letter is not well defined.
struct TangentCrossingError : NumericalError {
  explicit TangentCrossingError(double disc)
      : NumericalError("tangent circle crossing (discriminant " +
                       std::to_string(disc) + ")"),
        discriminant(disc) {}
  double discriminant;
};

}  // namespace chamberflow
