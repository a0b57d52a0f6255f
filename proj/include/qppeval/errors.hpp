#ifndef QPPEVAL_ERRORS_HPP
#define QPPEVAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qpp {

// Input could not be tokenized or decoded (bad field counts, non-numeric values).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input decoded but violates a data invariant (duplicates, missing cells,
// non-finite values, degenerate sample sizes).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: unknown keys, out-of-range settings, missing files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qpp

#endif  // QPPEVAL_ERRORS_HPP
