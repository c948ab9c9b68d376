#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmismatch/diagnostics.hpp"

namespace kmismatch::kconfig {

/// Leaf of a Kconfig expression: a config-symbol name or a literal
/// (y/m/n, a quoted string, or a number).
struct KTerm {
    enum class Kind : std::uint8_t { Symbol, Literal };
    Kind kind = Kind::Symbol;
    std::string text;

    friend bool operator==(const KTerm &, const KTerm &) = default;
};

/// Expression over Kconfig symbols as written in the model, before the
/// tristate split assigns atoms. Immutable; copies share nodes.
class KExpr {
public:
    enum class Kind : std::uint8_t { Term, Eq, Neq, Not, And, Or };

    static KExpr term(KTerm t);
    static KExpr compare(KTerm lhs, KTerm rhs, bool equal);
    static KExpr negate(KExpr e);
    static KExpr conj(KExpr a, KExpr b);
    static KExpr disj(KExpr a, KExpr b);

    /// Parses the usual Kconfig condition grammar: !, &&, ||, =, !=,
    /// parentheses. Throws ParseError on malformed input.
    static KExpr parse(std::string_view text, const std::string &file, int line);

    Kind kind() const { return node_->kind; }
    const KTerm &lhs() const { return node_->lhs; }
    const KTerm &rhs() const { return node_->rhs; }
    const KExpr &child(std::size_t i) const { return node_->kids[i]; }
    std::size_t child_count() const { return node_->kids.size(); }

    std::string to_string() const;

private:
    struct Node {
        Kind kind;
        KTerm lhs, rhs;
        std::vector<KExpr> kids;
    };
    explicit KExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Conjunction of two optional conditions; absent means unconditional.
std::optional<KExpr> conjoin(const std::optional<KExpr> &a, const std::optional<KExpr> &b);

enum class OptionType : std::uint8_t { Bool, Tristate, String, Hex, Int };

std::string_view to_string(OptionType t);

struct Prompt {
    std::string text;
    std::optional<KExpr> condition;
};

struct DefaultEntry {
    KExpr value;  // literal y/m/n, a symbol, or an expression
    std::optional<KExpr> condition;
};

struct SelectEdge {
    std::string target;
    std::optional<KExpr> condition;
};

struct ConfigOption {
    std::string name;  // without the CONFIG_ prefix
    OptionType type = OptionType::Bool;
    std::vector<Prompt> prompts;
    std::vector<DefaultEntry> defaults;
    std::optional<KExpr> depends_on;  // accumulated conjunctively
    std::vector<SelectEdge> selects;
    std::string help_text;
    std::string declaring_file;
    int declaring_line = 0;

    /// A config option without a prompt is invisible and only set via
    /// constraints and defaults.
    bool visible() const { return !prompts.empty(); }
};

struct ChoiceGroup {
    std::vector<std::string> members;  // declaration order, pairwise distinct
    bool optional_flag = false;
    std::optional<KExpr> condition;
    std::string file;
    int line = 0;
};

struct KconfigModel {
    std::map<std::string, ConfigOption> options;
    std::vector<std::string> option_order;  // names in first-declaration order
    std::vector<ChoiceGroup> choices;
    std::string entry_file;
    Diagnostics diagnostics;

    const ConfigOption *find(const std::string &name) const {
        auto it = options.find(name);
        return it == options.end() ? nullptr : &it->second;
    }
};

/// Read access to model input files; lets tests run from memory.
class FileProvider {
public:
    virtual ~FileProvider() = default;
    virtual std::optional<std::string> read_file(const std::string &path) const = 0;
};

class DiskFileProvider final : public FileProvider {
public:
    explicit DiskFileProvider(std::string root) : root_(std::move(root)) {}
    std::optional<std::string> read_file(const std::string &path) const override;

private:
    std::string root_;
};

class MemoryFileProvider final : public FileProvider {
public:
    void add(std::string path, std::string content) {
        files_[std::move(path)] = std::move(content);
    }
    std::optional<std::string> read_file(const std::string &path) const override {
        auto it = files_.find(path);
        if (it == files_.end())
            return std::nullopt;
        return it->second;
    }

private:
    std::map<std::string, std::string> files_;
};

/// Parses the model starting at `entry`; `source` directives resolve through
/// the provider. Unknown directives degrade to diagnostics, malformed
/// expressions and unresolvable sources throw ParseError.
KconfigModel parse_kconfig(const std::string &entry, const FileProvider &provider);

/// True iff the option has at least one prompt. Throws UnknownOptionError.
bool visibility_of(const KconfigModel &m, const std::string &name);

/// Names are stored bare; solution-space frontends strip the prefix on entry.
std::string strip_config_prefix(std::string_view name);

}  // namespace kmismatch::kconfig
