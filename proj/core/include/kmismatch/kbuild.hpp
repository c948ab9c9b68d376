#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmismatch/diagnostics.hpp"
#include "kmismatch/formula.hpp"
#include "kmismatch/vm_compile.hpp"

namespace kmismatch::kbuild {

/// One recognized variability-bearing line of a Kbuild makefile.
struct BuildRule {
    enum class Kind : std::uint8_t { ObjectList, CompositeObject, SubdirDescent };
    Kind kind = Kind::ObjectList;
    /// Bare Kconfig variable name (CONFIG_ stripped); absent for the literal
    /// obj-y / obj-m forms, which are unconditionally present.
    std::optional<std::string> guard;
    std::string guard_text;  // "y", "m" or the CONFIG_... reference, for provenance
    std::string composite;   // CompositeObject only: the composite object name
    std::vector<std::string> targets;  // object names or directory names
    std::string file;
    int line = 0;
};

/// Extraction result for one makefile. `reliable` drops when a
/// variability-bearing line could not be parsed (computed names, $(eval),
/// make conditionals); the paper's pipeline excluded such results manually.
struct DirectoryRules {
    std::vector<BuildRule> rules;
    Diagnostics diagnostics;
    bool reliable = true;
};

/// Heuristic, text-level rule extraction; recognizes obj-/lib- object lists,
/// composite objects, subdirectory descent, line continuations and comments.
/// Unrecognized variability-bearing lines become bail-out diagnostics.
DirectoryRules extract_build_rules(const std::string &makefile_path,
                                   const std::string &content);

/// Disk convenience wrapper; throws Error when the file cannot be read.
DirectoryRules extract_build_rules(const std::string &makefile_path);

/// Presence condition of one compilation unit derived from the build system.
struct FilePresence {
    std::string source_file;  // root-relative path of the .c file
    prop::Formula condition;
    std::vector<std::string> provenance;  // contributing "makefile:line" rules
};

struct BuildExtraction {
    std::vector<FilePresence> files;  // sorted by path
    Diagnostics diagnostics;
    std::vector<std::string> unreliable_dirs;
};

/// Folds rules over the directory tree: a file's condition is its own guard,
/// composite-parent guards, and every subdirectory guard on the path from
/// the root, conjoined. Tristate guards expand to X_y || X_m; files never
/// mentioned by any rule get the condition false. Throws SubdirCycleError
/// on cyclic descent.
BuildExtraction compose_file_presence(
    const std::map<std::string, DirectoryRules> &rules_by_dir,
    kconfig::AtomResolver &resolver, const std::string &root);

/// Directory -> makefile discovery for a source tree (Kbuild preferred over
/// Makefile), rooted at `root`; keys are root-relative directory paths with
/// "" for the root itself.
std::map<std::string, DirectoryRules> extract_tree_rules(const std::string &root,
                                                         Diagnostics &diagnostics);

}  // namespace kmismatch::kbuild
