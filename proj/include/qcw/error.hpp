#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcw {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A symbol or letter code that is not part of the alphabet in use.
class AlphabetError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Dehn reduction requested on a presentation that is not C'(1/6).
class UnsupportedPresentationError : public Error {
 public:
  using Error::Error;
};

// A bounded search ran out of room. `best_length` carries the best value seen
// so far when one exists (coset searches), otherwise it equals `cap`.
class CapExceededError : public Error {
 public:
  CapExceededError(std::string const& what, std::size_t cap, std::size_t best_length)
      : Error(what), cap_(cap), best_length_(best_length) {}

  std::size_t cap() const noexcept { return cap_; }
  std::size_t best_length() const noexcept { return best_length_; }

 private:
  std::size_t cap_;
  std::size_t best_length_;
};

// A ball enumeration stopped before reaching the requested radius.
class PartialBallError : public Error {
 public:
  PartialBallError(std::string const& what, std::size_t achieved)
      : Error(what), achieved_radius_(achieved) {}
  std::size_t achieved_radius() const noexcept { return achieved_radius_; }

 private:
  std::size_t achieved_radius_;
};

// Experiment inputs that violate the hypotheses the experiment relies on.
class HypothesisError : public Error {
 public:
  HypothesisError(std::string const& reason, std::string const& what)
      : Error(what), reason_(reason) {}
  std::string const& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

// Rejected configuration. `line` is 1-based, 0 when no line applies;
// `reason` is a hypothesis code when the rejection is a hypothesis failure.
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, std::string const& what, std::string reason = {})
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line),
        reason_(std::move(reason)) {}
  std::size_t line() const noexcept { return line_; }
  std::string const& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace qcw
