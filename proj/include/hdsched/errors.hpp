#pragma once

#include <stdexcept>
#include <string>

namespace hdsched {

// Thrown when an adaptive integral cannot reach its tolerance within the
// subdivision budget.  The message names the integrand so callers can tell
// which expectation failed.
class quadrature_error : public std::runtime_error {
 public:
  explicit quadrature_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a policy hands the simulator an allocation outside [0, backlog]
// or leaves bits unserved at the deadline.
class contract_violation : public std::runtime_error {
 public:
  explicit contract_violation(const std::string& what) : std::runtime_error(what) {}
};

inline void check_arg(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

inline void check_domain(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace hdsched
