#ifndef MONOSHRINK_ERROR_HPP
#define MONOSHRINK_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monoshrink {

/// Precondition violated by caller-supplied data (empty input, NaN, bad length...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Design matrix does not have full column rank.
class RankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Design matrix failed the X^T X = I check.
class NotOrthonormalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimated noise variance collapsed to zero.
class DegenerateVarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace monoshrink

#endif  // MONOSHRINK_ERROR_HPP
