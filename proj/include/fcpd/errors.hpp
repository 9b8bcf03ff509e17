#pragma once

#include <stdexcept>
#include <string>

namespace fcpd {

/// Raised when the data cannot support the requested computation
/// (zero covariance operator, rank deficiency, eigenvalues far below zero).
/// The CLI maps this to exit code 3; ordinary input problems use
/// std::invalid_argument and map to exit code 2.
class degeneracy_error : public std::runtime_error {
 public:
  explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fcpd
