#pragma once

#include <string>
#include <vector>

namespace kmismatch {

/// Non-fatal finding from one of the frontends. Unsupported constructs,
/// dangling references and bail-outs are reported this way instead of
/// aborting the run.
struct Diagnostic {
    std::string origin;  // "kconfig", "kbuild", "code", "effects"
    std::string file;
    int line = 0;
    std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace kmismatch
