#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nqweb {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation requested at (or too close to) the singular hyperplane
// x_1 + ... + x_n + a = 0, or a division node collapsed during jet
// propagation.
struct SingularPointError : Error {
  using Error::Error;
};

// Rejection sampling hit its retry cap: the sampling box is glued to the
// singular locus.
struct SingularBoxError : SingularPointError {
  using SingularPointError::SingularPointError;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position(position) {}
  std::size_t position = 0;
};

struct InvalidStructureError : Error {
  using Error::Error;
};

struct NotAQuasigroupError : Error {
  using Error::Error;
};

struct NotReducibleBlockError : Error {
  using Error::Error;
};

struct NoRootsFoundError : Error {
  using Error::Error;
};

}  // namespace nqweb
