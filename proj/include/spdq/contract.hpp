#pragma once

#include <stdexcept>
#include <string>

namespace spdq {

// Raised when a caller breaks a documented precondition. These are programming
// errors, distinct from bad user input (std::invalid_argument).
class contract_violation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace spdq

#define SPDQ_EXPECTS(cond, what)                                          \
  do {                                                                    \
    if (!(cond)) throw ::spdq::contract_violation(std::string(what) +    \
                                                  " [" #cond "]");        \
  } while (0)
