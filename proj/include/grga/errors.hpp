#pragma once

#include <stdexcept>

namespace grga {

// Invalid parameters, malformed configuration, or contract violations.
// The CLI maps this category to exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem and parse failures.  Exit code 3.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failures raised while an evolutionary run is in progress.  Exit code 4.
struct run_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace grga
