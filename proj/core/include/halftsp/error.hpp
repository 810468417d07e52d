#pragma once

#include <stdexcept>
#include <string>

namespace halftsp {

enum class ErrorKind {
  MalformedInput,
  InvalidX,
  NegativeCost,
  DegreeViolation,
  CutViolation,
  Disconnected,
  UnknownFamily,
  SizeTooSmall,
  InvalidArgument,
  NotDegreeCut,
  OutsidePolytope,
  NonConvergence,
  Infeasible,
  ResourceCap,
  Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit code for an error class: 2 invalid input, 3 infeasible, 4 resource cap, 1 otherwise.
int exit_code(ErrorKind kind);

}  // namespace halftsp
