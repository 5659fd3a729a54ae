#pragma once

#include <stdexcept>
#include <string>

namespace wskit {

enum class errc {
  parse_error,
  empty_trace,
  empty_input,
  too_few_records,
  too_few_samples,
  degenerate_series,
  unsupported_regime,
  numerical_failure,
  insufficient_tail,
  degenerate_fit,
  length_mismatch,
  trace_too_short,
  empty_span,
  bad_argument,
};

// Single exception type for the whole library. `numerical()` splits the two
// CLI exit classes: validation problems (exit 2) vs numerical/model failures
// (exit 3).
class error : public std::runtime_error {
 public:
  error(errc code, std::string module, const std::string& msg)
      : std::runtime_error(module + ": " + msg),
        code_(code),
        module_(std::move(module)) {}

  errc code() const { return code_; }
  const std::string& module() const { return module_; }

  bool numerical() const {
    switch (code_) {
      case errc::unsupported_regime:
      case errc::numerical_failure:
      case errc::degenerate_series:
      case errc::degenerate_fit:
        return true;
      default:
        return false;
    }
  }

 private:
  errc code_;
  std::string module_;
};

}  // namespace wskit
