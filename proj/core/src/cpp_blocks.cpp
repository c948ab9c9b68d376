#include "kmismatch/cpp_blocks.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "kmismatch/errors.hpp"

namespace kmismatch::cppcond {

using prop::Formula;

namespace {

// Blanks comments, string literals and char literals, preserving newlines so
// line numbers survive.
std::string strip_comments_and_strings(const std::string &in) {
    std::string out;
    out.reserve(in.size());
    enum class S { Code, Line, Block, Str, Chr } s = S::Code;
    for (std::size_t i = 0; i < in.size(); ++i) {
        char c = in[i];
        char next = i + 1 < in.size() ? in[i + 1] : '\0';
        switch (s) {
        case S::Code:
            if (c == '/' && next == '/') {
                s = S::Line;
                out += "  ";
                ++i;
            } else if (c == '/' && next == '*') {
                s = S::Block;
                out += "  ";
                ++i;
            } else if (c == '"') {
                s = S::Str;
                out += ' ';
            } else if (c == '\'') {
                s = S::Chr;
                out += ' ';
            } else {
                out += c;
            }
            break;
        case S::Line:
            if (c == '\n') {
                s = S::Code;
                out += '\n';
            } else if (c == '\\' && next == '\n') {
                // comment continues across the splice
                out += " \n";
                ++i;
            } else {
                out += ' ';
            }
            break;
        case S::Block:
            if (c == '*' && next == '/') {
                s = S::Code;
                out += "  ";
                ++i;
            } else {
                out += c == '\n' ? '\n' : ' ';
            }
            break;
        case S::Str:
        case S::Chr:
            if (c == '\\' && next != '\0') {
                out += "  ";
                ++i;
            } else if ((s == S::Str && c == '"') || (s == S::Chr && c == '\'')) {
                s = S::Code;
                out += ' ';
            } else {
                out += c == '\n' ? '\n' : ' ';
            }
            break;
        }
    }
    return out;
}

struct LogicalLine {
    std::string text;
    int line = 0;
};

std::vector<LogicalLine> logical_lines(const std::string &stripped) {
    std::vector<LogicalLine> out;
    std::istringstream in(stripped);
    std::string raw;
    int line_no = 0;
    bool pending = false;
    while (std::getline(in, raw)) {
        ++line_no;
        bool continues = !raw.empty() && raw.back() == '\\';
        if (continues)
            raw.pop_back();
        if (pending && !out.empty()) {
            out.back().text += ' ';
            out.back().text += raw;
        } else {
            out.push_back({raw, line_no});
        }
        pending = continues;
    }
    return out;
}

std::string_view ltrim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    return s;
}

// "#  ifdef X" -> ("ifdef", "X"); empty directive name when not a directive
std::pair<std::string, std::string> directive_of(std::string_view line) {
    std::string_view s = ltrim(line);
    if (s.empty() || s.front() != '#')
        return {"", ""};
    s = ltrim(s.substr(1));
    std::size_t we = 0;
    while (we < s.size() && std::isalpha(static_cast<unsigned char>(s[we])))
        ++we;
    return {std::string(s.substr(0, we)), std::string(ltrim(s.substr(we)))};
}

const std::regex kConfigTokenRe("\\bCONFIG_[A-Za-z0-9_]+\\b");

// Maps a CONFIG_... token to the variable it refers to: CONFIG_X_MODULE
// refers to tristate X.
std::string token_variable(const std::string &token, const kconfig::PropositionalVM &vm) {
    std::string name = kconfig::strip_config_prefix(token);
    if (name.ends_with("_MODULE")) {
        std::string base = name.substr(0, name.size() - 7);
        auto it = vm.type_map.find(base);
        if (it != vm.type_map.end() && it->second == kconfig::OptionType::Tristate)
            return base;
    }
    return name;
}

// Recursive-descent parser for the supported #if subset. Throws
// Unsupported on anything outside it.
class CondParser {
public:
    struct Unsupported {};

    CondParser(std::string_view text, kconfig::AtomResolver &resolver,
               const kconfig::PropositionalVM &vm, const std::string &file, int line)
        : s_(text), resolver_(resolver), vm_(vm), file_(file), line_(line) {}

    Formula parse(std::set<std::string> &config_vars, bool &foreign) {
        Formula f = parse_or();
        skip_ws();
        if (pos_ != s_.size())
            throw Unsupported{};
        config_vars = config_vars_;
        foreign = foreign_;
        return f;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool eat2(const char *op) {
        skip_ws();
        if (pos_ + 1 < s_.size() && s_[pos_] == op[0] && s_[pos_ + 1] == op[1]) {
            pos_ += 2;
            return true;
        }
        return false;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        if (start == pos_)
            throw Unsupported{};
        std::string name(s_.substr(start, pos_ - start));
        if (std::isdigit(static_cast<unsigned char>(name.front())))
            throw Unsupported{};  // numbers mean arithmetic, out of subset
        return name;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (eat2("||"))
            f = f || parse_and();
        return f;
    }

    Formula parse_and() {
        Formula f = parse_not();
        while (eat2("&&"))
            f = f && parse_not();
        return f;
    }

    Formula parse_not() {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '!' &&
            (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '=')) {
            ++pos_;
            return !parse_not();
        }
        return parse_primary();
    }

    Formula parse_primary() {
        skip_ws();
        if (eat('(')) {
            Formula f = parse_or();
            if (!eat(')'))
                throw Unsupported{};
            return f;
        }
        std::string name = ident();
        if (name == "defined") {
            std::string arg;
            if (eat('(')) {
                arg = ident();
                if (!eat(')'))
                    throw Unsupported{};
            } else {
                arg = ident();
            }
            return atom_test(arg);
        }
        return atom_test(name);
    }

    Formula atom_test(const std::string &token) {
        if (token.rfind("CONFIG_", 0) != 0) {
            foreign_ = true;
            return Formula::var(resolver_.opaque(token));
        }
        std::string name = kconfig::strip_config_prefix(token);
        if (name.ends_with("_MODULE")) {
            std::string base = name.substr(0, name.size() - 7);
            auto it = vm_.type_map.find(base);
            if (it != vm_.type_map.end() && it->second == kconfig::OptionType::Tristate) {
                config_vars_.insert(base);
                return resolver_.level_mod(base, file_, line_);
            }
        }
        config_vars_.insert(name);
        return resolver_.level_yes(name, file_, line_);
    }

    std::string_view s_;
    kconfig::AtomResolver &resolver_;
    const kconfig::PropositionalVM &vm_;
    std::string file_;
    int line_;
    std::size_t pos_ = 0;
    std::set<std::string> config_vars_;
    bool foreign_ = false;
};

}  // namespace

std::string_view to_string(UnreliableReason r) {
    switch (r) {
    case UnreliableReason::HeaderUsage:
        return "header-usage";
    case UnreliableReason::NonConditionalUsage:
        return "non-conditional-usage";
    case UnreliableReason::UnparsedExpression:
        return "unparsed-expression";
    }
    return "?";
}

std::string_view to_string(Space s) {
    return s == Space::Code ? "code" : "build";
}

BlockExtraction BlockExtractor::extract_blocks(const std::string &path,
                                               const std::string &content) {
    BlockExtraction out;

    struct OpenLevel {
        Formula parent_full;
        std::vector<Formula> prior_branches;  // raw conditions of earlier arms
        std::size_t open_block = 0;           // index into out.blocks
        bool else_seen = false;
    };
    std::vector<OpenLevel> stack;

    auto parse_condition = [&](const std::string &expr, int line) -> Formula {
        std::set<std::string> vars;
        bool foreign = false;
        try {
            CondParser parser(expr, resolver_, vm_, path, line);
            Formula f = parser.parse(vars, foreign);
            if (foreign)
                out.unparsed_marks.insert(vars.begin(), vars.end());
            return f;
        } catch (const CondParser::Unsupported &) {
            // whole expression becomes a black box; every CONFIG variable in
            // it is tainted
            auto begin = std::sregex_iterator(expr.begin(), expr.end(), kConfigTokenRe);
            for (auto it = begin; it != std::sregex_iterator(); ++it)
                out.unparsed_marks.insert(token_variable(it->str(), vm_));
            out.diagnostics.push_back(
                {"code", path, line, "condition outside the subset: '" + expr + "'"});
            return Formula::var(resolver_.opaque("expr{" + path + ":" +
                                                 std::to_string(line) + "}"));
        }
    };

    for (const auto &ll : logical_lines(strip_comments_and_strings(content))) {
        auto [dir, rest] = directive_of(ll.text);
        if (dir.empty())
            continue;
        if (dir == "ifdef" || dir == "ifndef" || dir == "if") {
            Formula cond;
            if (dir == "if") {
                cond = parse_condition(rest, ll.line);
            } else {
                std::string name(rest.substr(0, rest.find_first_of(" \t")));
                std::set<std::string> vars;
                bool foreign = false;
                try {
                    CondParser parser(name, resolver_, vm_, path, ll.line);
                    cond = parser.parse(vars, foreign);
                    if (foreign)
                        out.unparsed_marks.insert(vars.begin(), vars.end());
                } catch (const CondParser::Unsupported &) {
                    cond = Formula::var(resolver_.opaque(name.empty() ? "?" : name));
                }
                if (dir == "ifndef")
                    cond = !cond;
            }
            Formula parent = stack.empty()
                                 ? Formula::constant(true)
                                 : out.blocks[stack.back().open_block].full_condition;
            CodeBlock block;
            block.file = path;
            block.start_line = ll.line;
            block.local_condition = cond;
            block.full_condition = parent && cond;
            out.blocks.push_back(std::move(block));
            stack.push_back({parent, {cond}, out.blocks.size() - 1, false});
        } else if (dir == "elif") {
            if (stack.empty())
                throw ParseError(path, ll.line, "#elif without #if");
            if (stack.back().else_seen)
                throw ParseError(path, ll.line, "#elif after #else");
            out.blocks[stack.back().open_block].end_line = ll.line;
            Formula cond = parse_condition(rest, ll.line);
            std::vector<Formula> parts;
            for (const auto &prior : stack.back().prior_branches)
                parts.push_back(!prior);
            parts.push_back(cond);
            Formula local = Formula::conj(std::move(parts));
            CodeBlock block;
            block.file = path;
            block.start_line = ll.line;
            block.local_condition = local;
            block.full_condition = stack.back().parent_full && local;
            out.blocks.push_back(std::move(block));
            stack.back().prior_branches.push_back(cond);
            stack.back().open_block = out.blocks.size() - 1;
        } else if (dir == "else") {
            if (stack.empty())
                throw ParseError(path, ll.line, "#else without #if");
            if (stack.back().else_seen)
                throw ParseError(path, ll.line, "duplicate #else");
            out.blocks[stack.back().open_block].end_line = ll.line;
            std::vector<Formula> parts;
            for (const auto &prior : stack.back().prior_branches)
                parts.push_back(!prior);
            Formula local = Formula::conj(std::move(parts));
            CodeBlock block;
            block.file = path;
            block.start_line = ll.line;
            block.local_condition = local;
            block.full_condition = stack.back().parent_full && local;
            out.blocks.push_back(std::move(block));
            stack.back().open_block = out.blocks.size() - 1;
            stack.back().else_seen = true;
        } else if (dir == "endif") {
            if (stack.empty())
                throw ParseError(path, ll.line, "#endif without #if");
            out.blocks[stack.back().open_block].end_line = ll.line;
            stack.pop_back();
        }
        // other directives (#define, #include, ...) are not conditional
    }
    if (!stack.empty())
        throw ParseError(path, out.blocks[stack.back().open_block].start_line,
                         "unterminated conditional block");
    return out;
}

BlockExtraction BlockExtractor::extract_blocks_file(const std::string &root,
                                                    const std::string &rel_path) {
    std::ifstream in(std::filesystem::path(root) / rel_path, std::ios::binary);
    if (!in)
        throw Error("cannot read source file: " + rel_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return extract_blocks(rel_path, buf.str());
}

UnreliableVarSet scan_unreliable(const std::string &root,
                                 const std::vector<std::string> &rel_paths,
                                 const kconfig::PropositionalVM &vm) {
    UnreliableVarSet set;
    for (const auto &rel : rel_paths) {
        bool header = rel.ends_with(".h") || rel.ends_with(".hpp");
        bool source = rel.ends_with(".c");
        if (!header && !source)
            continue;
        std::ifstream in(std::filesystem::path(root) / rel, std::ios::binary);
        if (!in)
            continue;
        std::ostringstream buf;
        buf << in.rdbuf();
        for (const auto &ll : logical_lines(strip_comments_and_strings(buf.str()))) {
            auto [dir, rest] = directive_of(ll.text);
            bool conditional = dir == "if" || dir == "ifdef" || dir == "ifndef" ||
                               dir == "elif";
            if (source && conditional)
                continue;  // the reliable place for variability
            auto begin =
                std::sregex_iterator(ll.text.begin(), ll.text.end(), kConfigTokenRe);
            for (auto it = begin; it != std::sregex_iterator(); ++it)
                set.add(token_variable(it->str(), vm),
                        header ? UnreliableReason::HeaderUsage
                               : UnreliableReason::NonConditionalUsage);
        }
    }
    return set;
}

std::vector<PresenceCondition> combine_presence(
    const std::vector<kbuild::FilePresence> &file_pcs,
    const std::vector<CodeBlock> &blocks, Diagnostics &diagnostics) {
    std::map<std::string, const kbuild::FilePresence *> by_file;
    for (const auto &fp : file_pcs)
        by_file[fp.source_file] = &fp;

    std::vector<PresenceCondition> out;
    for (const auto &fp : file_pcs)
        out.push_back({fp.condition, Space::Build, fp.source_file, 0, 0});

    for (const auto &block : blocks) {
        auto it = by_file.find(block.file);
        Formula file_cond = Formula::constant(false);
        if (it == by_file.end()) {
            diagnostics.push_back({"code", block.file, block.start_line,
                                   "block has no file presence condition; treated as "
                                   "never compiled"});
        } else {
            file_cond = it->second->condition;
        }
        out.push_back({prop::simplify(file_cond && block.full_condition), Space::Code,
                       block.file, block.start_line, block.end_line});
    }
    return out;
}

}  // namespace kmismatch::cppcond
