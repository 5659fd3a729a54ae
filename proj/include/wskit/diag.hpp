#pragma once

#include <string>

namespace wskit {

enum class diag_level { info, warn, error };

// Diagnostics go to stderr as one machine-readable line each:
//   level,module,message
// Reports and traces on stdout/files stay clean of them.
void diag(diag_level level, const std::string& module, const std::string& msg);

}  // namespace wskit
