#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hyperlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands that cannot be combined (mismatched moduli, singular matrix, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero in F_p") {}
};

class NotAPrime : public Error {
 public:
  explicit NotAPrime(std::int64_t n)
      : Error("not an odd prime in [3, 2^61-1]: " + std::to_string(n)), n_(n) {}
  std::int64_t value() const noexcept { return n_; }

 private:
  std::int64_t n_;
};

/// Set-spec syntax or semantic error. position is a byte offset into the spec text.
class InvalidSpec : public Error {
 public:
  InvalidSpec(const std::string& what, std::size_t position)
      : Error("invalid set spec at position " + std::to_string(position) + ": " + what),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written; path() names it.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Raised when a computation would exceed its configured budget.
/// required() is the estimate that tripped the limit, in the unit named by what().
class ResourceLimit : public Error {
 public:
  ResourceLimit(const std::string& what, std::uint64_t required, std::uint64_t limit)
      : Error("resource limit: " + what + " requires " + std::to_string(required) +
              ", limit is " + std::to_string(limit)),
        required_(required),
        limit_(limit) {}
  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t required_;
  std::uint64_t limit_;
};

}  // namespace hyperlab
