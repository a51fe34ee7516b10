#pragma once

#include <stdexcept>
#include <string>

namespace dakns {

/// Operands of a binary operation disagree in matrix dimension or lattice step.
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A truncated series was read, or combined, outside its validity band.
struct validity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An identity that must hold by construction failed (e.g. a flow field with
/// positive-degree terms); signals an inconsistent state.
struct consistency_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed config or file, violated data invariants.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A value that cannot be represented exactly in the active scalar mode.
struct representation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dakns
