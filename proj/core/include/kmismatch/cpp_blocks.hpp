#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "kmismatch/diagnostics.hpp"
#include "kmismatch/formula.hpp"
#include "kmismatch/kbuild.hpp"
#include "kmismatch/vm_compile.hpp"

namespace kmismatch::cppcond {

/// One branch of a conditional-compilation construct. Every #if/#elif/#else
/// arm yields a block; nested arms yield nested blocks.
struct CodeBlock {
    std::string file;
    int start_line = 0;  // line of the opening directive
    int end_line = 0;    // line of the directive that closes this branch
    prop::Formula local_condition;  // this branch, corrected for earlier arms
    prop::Formula full_condition;   // conjunction over the nesting stack
};

struct BlockExtraction {
    std::vector<CodeBlock> blocks;
    /// CONFIG variables whose conditions the analysis could not fully parse
    /// (foreign identifiers, arithmetic); they must not be trusted.
    std::set<std::string> unparsed_marks;
    Diagnostics diagnostics;
};

/// Extracts #ifdef/#ifndef/#if/#elif/#else/#endif structure from one C file.
/// Expressions over defined(CONFIG_X), CONFIG_X, !, &&, || and parentheses
/// are translated exactly (CONFIG_X -> X or X_y, CONFIG_X_MODULE -> X_m);
/// anything else degrades to an opaque atom plus unparsed marks. Throws
/// ParseError on unbalanced directives.
class BlockExtractor {
public:
    explicit BlockExtractor(kconfig::AtomResolver &resolver,
                            const kconfig::PropositionalVM &vm)
        : resolver_(resolver), vm_(vm) {}

    BlockExtraction extract_blocks(const std::string &path, const std::string &content);
    BlockExtraction extract_blocks_file(const std::string &root, const std::string &rel_path);

private:
    kconfig::AtomResolver &resolver_;
    const kconfig::PropositionalVM &vm_;
};

enum class UnreliableReason : std::uint8_t {
    HeaderUsage,
    NonConditionalUsage,
    UnparsedExpression,
};

std::string_view to_string(UnreliableReason r);

/// Variables the feature-effect analysis must skip, with the reasons.
struct UnreliableVarSet {
    std::map<std::string, std::set<UnreliableReason>> reasons;

    bool contains(const std::string &name) const { return reasons.count(name) != 0; }
    void add(const std::string &name, UnreliableReason r) { reasons[name].insert(r); }
    void merge(const UnreliableVarSet &other) {
        for (const auto &[name, rs] : other.reasons)
            reasons[name].insert(rs.begin(), rs.end());
    }
};

/// Token scan over sources: a variable becomes unreliable when CONFIG_<name>
/// appears in any .h file, or in a .c file outside the conditional
/// directives (macro expansions, code usage).
UnreliableVarSet scan_unreliable(const std::string &root,
                                 const std::vector<std::string> &rel_paths,
                                 const kconfig::PropositionalVM &vm);

enum class Space : std::uint8_t { Code, Build };

std::string_view to_string(Space s);

/// A presence condition ready for the effect analysis: a formula over VM
/// atoms (plus opaque atoms) tagged with where it came from.
struct PresenceCondition {
    prop::Formula condition;
    Space space = Space::Build;
    std::string file;
    int start_line = 0;
    int end_line = 0;
};

/// Per block: file presence AND block condition (space=code); additionally
/// one build-space condition per file, so variables used only in Kbuild
/// still get feature effects.
std::vector<PresenceCondition> combine_presence(
    const std::vector<kbuild::FilePresence> &file_pcs,
    const std::vector<CodeBlock> &blocks, Diagnostics &diagnostics);

}  // namespace kmismatch::cppcond
