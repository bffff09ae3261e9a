#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dmln {

// Hard rules carry the distinguished weight +infinity. Negative infinite
// weights are rejected at parse time.
constexpr double kHardWeight = std::numeric_limits<double>::infinity();

inline bool is_hard(double w) { return std::isinf(w) && w > 0; }

struct ParseError : std::runtime_error {
  int line = 0;
  int column = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) +
                           ", column " + std::to_string(col_) + ")"),
        line(line_), column(col_) {}
};

struct SemanticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hard constraints cannot be satisfied (conflicting forced values, a hard
// clause falsified by evidence, ...).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Brute-force oracles refuse instances beyond their enumeration bound.
struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace dmln
