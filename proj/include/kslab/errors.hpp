#pragma once

#include <stdexcept>
#include <string>

namespace kslab {

// Caller supplied something that does not satisfy a documented precondition.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A computed quantity broke an identity that must hold for every physical
// input. Indicates a bug or a corrupted state, never bad user input.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace kslab
