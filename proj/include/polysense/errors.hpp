#pragma once

#include <stdexcept>

namespace polysense {

/// File or stream failure (CLI exit code 4).
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A solve step could not reach a feasible solution (CLI exit code 3).
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace polysense
