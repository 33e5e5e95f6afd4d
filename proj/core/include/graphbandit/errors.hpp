#pragma once

#include <stdexcept>
#include <string>

namespace graphbandit {

// Bad caller-supplied argument (index out of range, eta outside (0,1], ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite or otherwise unusable numeric input.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant broke; signals a bug upstream of the throw site.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Caller violated an operation's documented contract.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An operation was invoked before the learner reached the phase it needs
// (e.g. q-hat before every in-edge has M samples).
class PhaseOrderError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// select/update called out of order or with feedback for another round.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class UnsupportedSize : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file. The message carries the file location.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace graphbandit
