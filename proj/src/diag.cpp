#include "wskit/diag.hpp"

#include <cstdio>

namespace wskit {

void diag(diag_level level, const std::string& module, const std::string& msg) {
  const char* tag = level == diag_level::info    ? "info"
                    : level == diag_level::warn ? "warn"
                                                : "error";
  std::fprintf(stderr, "%s,%s,%s\n", tag, module.c_str(), msg.c_str());
}

}  // namespace wskit
