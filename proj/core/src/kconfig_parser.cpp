#include "kmismatch/kconfig_model.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kmismatch/errors.hpp"

namespace kmismatch::kconfig {

// ---------------------------------------------------------------- KExpr ----

KExpr KExpr::term(KTerm t) {
    return KExpr(std::make_shared<const Node>(Node{Kind::Term, std::move(t), {}, {}}));
}

KExpr KExpr::compare(KTerm lhs, KTerm rhs, bool equal) {
    return KExpr(std::make_shared<const Node>(
        Node{equal ? Kind::Eq : Kind::Neq, std::move(lhs), std::move(rhs), {}}));
}

KExpr KExpr::negate(KExpr e) {
    return KExpr(std::make_shared<const Node>(Node{Kind::Not, {}, {}, {std::move(e)}}));
}

KExpr KExpr::conj(KExpr a, KExpr b) {
    return KExpr(std::make_shared<const Node>(Node{Kind::And, {}, {}, {std::move(a), std::move(b)}}));
}

KExpr KExpr::disj(KExpr a, KExpr b) {
    return KExpr(std::make_shared<const Node>(Node{Kind::Or, {}, {}, {std::move(a), std::move(b)}}));
}

std::optional<KExpr> conjoin(const std::optional<KExpr> &a, const std::optional<KExpr> &b) {
    if (!a)
        return b;
    if (!b)
        return a;
    return KExpr::conj(*a, *b);
}

namespace {

std::string term_str(const KTerm &t) {
    if (t.kind == KTerm::Kind::Literal) {
        bool bare = t.text == "y" || t.text == "m" || t.text == "n" ||
                    (!t.text.empty() && std::isdigit(static_cast<unsigned char>(t.text.front())));
        if (!bare)
            return '"' + t.text + '"';
    }
    return t.text;
}

void expr_str(const KExpr &e, int parent_prec, std::string &out) {
    // precedence: || (1) < && (2) < ! (3) < compare/term
    switch (e.kind()) {
    case KExpr::Kind::Term:
        out += term_str(e.lhs());
        break;
    case KExpr::Kind::Eq:
    case KExpr::Kind::Neq:
        out += term_str(e.lhs());
        out += e.kind() == KExpr::Kind::Eq ? " = " : " != ";
        out += term_str(e.rhs());
        break;
    case KExpr::Kind::Not:
        out += '!';
        expr_str(e.child(0), 3, out);
        break;
    case KExpr::Kind::And: {
        bool parens = parent_prec > 2;
        if (parens)
            out += '(';
        expr_str(e.child(0), 2, out);
        out += " && ";
        expr_str(e.child(1), 2, out);
        if (parens)
            out += ')';
        break;
    }
    case KExpr::Kind::Or: {
        bool parens = parent_prec > 1;
        if (parens)
            out += '(';
        expr_str(e.child(0), 1, out);
        out += " || ";
        expr_str(e.child(1), 1, out);
        if (parens)
            out += ')';
        break;
    }
    }
}

struct Token {
    enum class Kind { Ident, Quoted, Op, End };
    Kind kind = Kind::End;
    std::string text;
};

class ExprLexer {
public:
    ExprLexer(std::string_view s, const std::string &file, int line)
        : s_(s), file_(file), line_(line) {
        advance();
    }

    const Token &peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string &msg) const {
        throw ParseError(file_, line_, msg + " in expression '" + std::string(s_) + "'");
    }

private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ >= s_.size()) {
            tok_ = {Token::Kind::End, ""};
            return;
        }
        char c = s_[pos_];
        if (c == '(' || c == ')') {
            tok_ = {Token::Kind::Op, std::string(1, c)};
            ++pos_;
            return;
        }
        if (c == '!') {
            if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '=') {
                tok_ = {Token::Kind::Op, "!="};
                pos_ += 2;
            } else {
                tok_ = {Token::Kind::Op, "!"};
                ++pos_;
            }
            return;
        }
        if (c == '=') {
            tok_ = {Token::Kind::Op, "="};
            ++pos_;
            return;
        }
        if (c == '&' || c == '|') {
            if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != c)
                fail(std::string("stray '") + c + "'");
            tok_ = {Token::Kind::Op, std::string(2, c)};
            pos_ += 2;
            return;
        }
        if (c == '"' || c == '\'') {
            char quote = c;
            std::string text;
            ++pos_;
            while (pos_ < s_.size() && s_[pos_] != quote) {
                if (s_[pos_] == '\\' && pos_ + 1 < s_.size())
                    ++pos_;
                text += s_[pos_++];
            }
            if (pos_ >= s_.size())
                fail("unterminated string");
            ++pos_;
            tok_ = {Token::Kind::Quoted, std::move(text)};
            return;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                        s_[pos_] == '_'))
                ++pos_;
            tok_ = {Token::Kind::Ident, std::string(s_.substr(start, pos_ - start))};
            return;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view s_;
    std::string file_;
    int line_;
    std::size_t pos_ = 0;
    Token tok_;
};

class ExprParser {
public:
    ExprParser(std::string_view s, const std::string &file, int line)
        : lex_(s, file, line) {}

    KExpr parse() {
        KExpr e = parse_or();
        if (lex_.peek().kind != Token::Kind::End)
            lex_.fail("trailing tokens");
        return e;
    }

private:
    KExpr parse_or() {
        KExpr e = parse_and();
        while (lex_.peek().kind == Token::Kind::Op && lex_.peek().text == "||") {
            lex_.take();
            e = KExpr::disj(std::move(e), parse_and());
        }
        return e;
    }

    KExpr parse_and() {
        KExpr e = parse_not();
        while (lex_.peek().kind == Token::Kind::Op && lex_.peek().text == "&&") {
            lex_.take();
            e = KExpr::conj(std::move(e), parse_not());
        }
        return e;
    }

    KExpr parse_not() {
        if (lex_.peek().kind == Token::Kind::Op && lex_.peek().text == "!") {
            lex_.take();
            return KExpr::negate(parse_not());
        }
        return parse_primary();
    }

    KTerm parse_term() {
        Token t = lex_.take();
        if (t.kind == Token::Kind::Quoted)
            return KTerm{KTerm::Kind::Literal, t.text};
        if (t.kind != Token::Kind::Ident)
            lex_.fail("expected symbol or literal");
        if (t.text == "y" || t.text == "m" || t.text == "n" ||
            std::isdigit(static_cast<unsigned char>(t.text.front())))
            return KTerm{KTerm::Kind::Literal, t.text};
        return KTerm{KTerm::Kind::Symbol, strip_config_prefix(t.text)};
    }

    KExpr parse_primary() {
        if (lex_.peek().kind == Token::Kind::Op && lex_.peek().text == "(") {
            lex_.take();
            KExpr e = parse_or();
            if (lex_.peek().text != ")")
                lex_.fail("expected ')'");
            lex_.take();
            return e;
        }
        KTerm lhs = parse_term();
        if (lex_.peek().kind == Token::Kind::Op &&
            (lex_.peek().text == "=" || lex_.peek().text == "!=")) {
            bool eq = lex_.take().text == "=";
            KTerm rhs = parse_term();
            return KExpr::compare(std::move(lhs), std::move(rhs), eq);
        }
        return KExpr::term(std::move(lhs));
    }

    ExprLexer lex_;
};

}  // namespace

KExpr KExpr::parse(std::string_view text, const std::string &file, int line) {
    return ExprParser(text, file, line).parse();
}

std::string KExpr::to_string() const {
    std::string out;
    expr_str(*this, 0, out);
    return out;
}

std::string_view to_string(OptionType t) {
    switch (t) {
    case OptionType::Bool:
        return "bool";
    case OptionType::Tristate:
        return "tristate";
    case OptionType::String:
        return "string";
    case OptionType::Hex:
        return "hex";
    case OptionType::Int:
        return "int";
    }
    return "?";
}

std::string strip_config_prefix(std::string_view name) {
    if (name.rfind("CONFIG_", 0) == 0)
        return std::string(name.substr(7));
    return std::string(name);
}

// -------------------------------------------------------------- provider ----

std::optional<std::string> DiskFileProvider::read_file(const std::string &path) const {
    std::filesystem::path p = std::filesystem::path(root_) / path;
    std::ifstream in(p, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------- parser ----

namespace {

constexpr int kMaxSourceDepth = 32;

int indent_width(std::string_view line) {
    int col = 0;
    for (char c : line) {
        if (c == ' ')
            ++col;
        else if (c == '\t')
            col = (col / 8 + 1) * 8;
        else
            break;
    }
    return col;
}

std::string_view ltrim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    return s;
}

std::string_view rtrim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

// Strips a trailing comment, respecting quoted strings.
std::string_view strip_comment(std::string_view s) {
    bool in_quote = false;
    char quote = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (in_quote) {
            if (c == '\\')
                ++i;
            else if (c == quote)
                in_quote = false;
        } else if (c == '"' || c == '\'') {
            in_quote = true;
            quote = c;
        } else if (c == '#') {
            return s.substr(0, i);
        }
    }
    return s;
}

// Splits "<head> if <cond>" at an unquoted, unparenthesised `if` word.
std::pair<std::string, std::optional<std::string>> split_if_clause(std::string_view rest) {
    bool in_quote = false;
    char quote = 0;
    int paren = 0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        char c = rest[i];
        if (in_quote) {
            if (c == '\\')
                ++i;
            else if (c == quote)
                in_quote = false;
            continue;
        }
        if (c == '"' || c == '\'') {
            in_quote = true;
            quote = c;
        } else if (c == '(') {
            ++paren;
        } else if (c == ')') {
            --paren;
        } else if (paren == 0 && c == 'i' && i + 1 < rest.size() && rest[i + 1] == 'f') {
            bool left_ok = i == 0 || std::isspace(static_cast<unsigned char>(rest[i - 1]));
            bool right_ok =
                i + 2 >= rest.size() || std::isspace(static_cast<unsigned char>(rest[i + 2]));
            if (left_ok && right_ok) {
                return {std::string(rtrim(rest.substr(0, i))),
                        std::string(ltrim(rest.substr(i + 2)))};
            }
        }
    }
    return {std::string(rtrim(rest)), std::nullopt};
}

class Parser {
public:
    Parser(const FileProvider &provider) : provider_(provider) {}

    KconfigModel run(const std::string &entry) {
        model_.entry_file = entry;
        parse_file(entry, 0);
        if (!if_stack_.empty())
            diag(entry, 0, "unterminated 'if' block at end of model");
        return std::move(model_);
    }

private:
    void diag(const std::string &file, int line, std::string message) {
        model_.diagnostics.push_back({"kconfig", file, line, std::move(message)});
    }

    void parse_file(const std::string &path, int depth) {
        if (depth > kMaxSourceDepth)
            throw ParseError(path, 0, "source nesting too deep");
        auto content = provider_.read_file(path);
        if (!content)
            throw ParseError(path, 0, "cannot read sourced file");
        std::istringstream in(*content);
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            if (!raw.empty() && raw.back() == '\r')
                raw.pop_back();
            handle_line(path, line_no, raw, depth);
        }
        end_help();
    }

    // ---- help capture ----

    void begin_help() {
        in_help_ = true;
        help_base_ = -1;
        help_lines_.clear();
    }

    void end_help() {
        if (!in_help_)
            return;
        in_help_ = false;
        while (!help_lines_.empty() && help_lines_.back().empty())
            help_lines_.pop_back();
        if (current_) {
            std::string text;
            for (const auto &l : help_lines_) {
                if (!text.empty())
                    text += '\n';
                text += l;
            }
            if (!current_->help_text.empty() && !text.empty())
                current_->help_text += '\n';
            current_->help_text += text;
        }
    }

    // Returns true when the line was consumed as help text.
    bool handle_help_line(const std::string &raw) {
        if (!in_help_)
            return false;
        std::string_view trimmed = rtrim(raw);
        if (trimmed.empty()) {
            if (help_base_ >= 0)
                help_lines_.emplace_back();
            return true;
        }
        int ind = indent_width(raw);
        if (help_base_ < 0) {
            if (ind == 0) {  // directly dedented: empty help block
                end_help();
                return false;
            }
            help_base_ = ind;
        } else if (ind < help_base_) {
            end_help();
            return false;
        }
        // strip the base indentation, verbatim otherwise
        std::string_view s = raw;
        int col = 0;
        std::size_t i = 0;
        while (i < s.size() && col < help_base_) {
            if (s[i] == ' ')
                ++col;
            else if (s[i] == '\t')
                col = (col / 8 + 1) * 8;
            else
                break;
            ++i;
        }
        help_lines_.emplace_back(rtrim(s.substr(i)));
        return true;
    }

    // ---- option/choice plumbing ----

    std::optional<KExpr> if_conjunction() const {
        std::optional<KExpr> c;
        for (const auto &e : if_stack_)
            c = conjoin(c, e);
        return c;
    }

    ConfigOption &open_option(const std::string &file, int line, const std::string &name) {
        auto it = model_.options.find(name);
        if (it == model_.options.end()) {
            ConfigOption opt;
            opt.name = name;
            opt.declaring_file = file;
            opt.declaring_line = line;
            it = model_.options.emplace(name, std::move(opt)).first;
            model_.option_order.push_back(name);
            type_set_.erase(name);
        } else {
            diag(file, line, "duplicate definition of '" + name + "' merged");
        }
        ConfigOption &opt = it->second;
        opt.depends_on = conjoin(opt.depends_on, if_conjunction());
        if (choice_index_ >= 0) {
            ChoiceGroup &g = model_.choices[static_cast<std::size_t>(choice_index_)];
            if (std::find(g.members.begin(), g.members.end(), name) == g.members.end())
                g.members.push_back(name);
            opt.depends_on = conjoin(opt.depends_on, g.condition);
        }
        return opt;
    }

    std::optional<KExpr> parse_opt_cond(const std::optional<std::string> &text,
                                        const std::string &file, int line) {
        if (!text || text->empty())
            return std::nullopt;
        return conjoin(KExpr::parse(*text, file, line), std::nullopt);
    }

    // Attribute conditions also absorb the enclosing if-block conditions.
    std::optional<KExpr> attr_cond(const std::optional<std::string> &text,
                                   const std::string &file, int line) {
        return conjoin(parse_opt_cond(text, file, line), if_conjunction());
    }

    void set_type(const std::string &file, int line, OptionType type,
                  std::string_view rest_after_keyword) {
        if (!current_) {
            diag(file, line, "type line outside a config block");
            return;
        }
        if (type_set_.count(current_->name) && current_->type != type) {
            diag(file, line, "conflicting type for '" + current_->name + "', keeping " +
                                 std::string(to_string(current_->type)));
        } else {
            current_->type = type;
            type_set_.insert(current_->name);
        }
        std::string_view rest = ltrim(rest_after_keyword);
        if (rest.empty())
            return;
        // inline prompt: quoted string, optionally followed by `if <cond>`
        auto [head, cond] = split_if_clause(rest);
        std::string_view h = ltrim(head);
        if (h.empty())
            return;
        if (h.front() == '"' || h.front() == '\'') {
            std::string text(h.substr(1, h.size() >= 2 ? h.size() - 2 : 0));
            current_->prompts.push_back({text, attr_cond(cond, file, line)});
        } else {
            diag(file, line, "unexpected tokens after type keyword");
        }
    }

    void handle_line(const std::string &file, int line, const std::string &raw, int depth) {
        if (handle_help_line(raw))
            return;
        std::string_view stripped = ltrim(rtrim(strip_comment(raw)));
        if (stripped.empty())
            return;

        // first word
        std::size_t we = 0;
        while (we < stripped.size() && !std::isspace(static_cast<unsigned char>(stripped[we])))
            ++we;
        std::string word(stripped.substr(0, we));
        std::string rest(ltrim(stripped.substr(we)));

        if (word == "config" || word == "menuconfig") {
            end_help();
            if (rest.empty())
                throw ParseError(file, line, "missing option name after '" + word + "'");
            current_ = &open_option(file, line, strip_config_prefix(rest));
            return;
        }
        if (word == "choice") {
            end_help();
            current_ = nullptr;
            if (choice_index_ >= 0)
                diag(file, line, "nested 'choice' not supported, starting a new group");
            ChoiceGroup g;
            g.file = file;
            g.line = line;
            g.condition = if_conjunction();
            model_.choices.push_back(std::move(g));
            choice_index_ = static_cast<int>(model_.choices.size()) - 1;
            return;
        }
        if (word == "endchoice") {
            end_help();
            current_ = nullptr;
            if (choice_index_ < 0)
                diag(file, line, "'endchoice' without 'choice'");
            choice_index_ = -1;
            return;
        }
        if (word == "if") {
            end_help();
            current_ = nullptr;
            if_stack_.push_back(KExpr::parse(rest, file, line));
            return;
        }
        if (word == "endif") {
            end_help();
            current_ = nullptr;
            if (if_stack_.empty())
                diag(file, line, "'endif' without 'if'");
            else
                if_stack_.pop_back();
            return;
        }
        if (word == "source" || word == "include") {
            end_help();
            current_ = nullptr;
            std::string path = rest;
            if (!path.empty() && (path.front() == '"' || path.front() == '\''))
                path = path.substr(1, path.size() >= 2 ? path.size() - 2 : 0);
            if (path.empty())
                throw ParseError(file, line, "missing path after 'source'");
            if (!provider_.read_file(path))
                throw ParseError(file, line, "cannot resolve sourced file '" + path + "'");
            parse_file(path, depth + 1);
            return;
        }
        if (word == "bool" || word == "boolean") {
            set_type(file, line, OptionType::Bool, rest);
            return;
        }
        if (word == "tristate") {
            set_type(file, line, OptionType::Tristate, rest);
            return;
        }
        if (word == "string") {
            set_type(file, line, OptionType::String, rest);
            return;
        }
        if (word == "hex") {
            set_type(file, line, OptionType::Hex, rest);
            return;
        }
        if (word == "int") {
            set_type(file, line, OptionType::Int, rest);
            return;
        }
        if (word == "def_bool" || word == "def_tristate") {
            set_type(file, line, word == "def_bool" ? OptionType::Bool : OptionType::Tristate,
                     "");
            if (current_) {
                auto [value, cond] = split_if_clause(rest);
                current_->defaults.push_back(
                    {KExpr::parse(value, file, line), attr_cond(cond, file, line)});
            }
            return;
        }
        if (word == "prompt") {
            if (!current_) {
                diag(file, line, "'prompt' outside a config block");
                return;
            }
            auto [head, cond] = split_if_clause(rest);
            std::string_view h = ltrim(head);
            std::string text;
            if (!h.empty() && (h.front() == '"' || h.front() == '\''))
                text = std::string(h.substr(1, h.size() >= 2 ? h.size() - 2 : 0));
            current_->prompts.push_back({text, attr_cond(cond, file, line)});
            return;
        }
        if (word == "default") {
            if (!current_) {
                diag(file, line, "'default' outside a config block");
                return;
            }
            auto [value, cond] = split_if_clause(rest);
            current_->defaults.push_back(
                {KExpr::parse(value, file, line), attr_cond(cond, file, line)});
            return;
        }
        if (word == "depends") {
            std::string_view r = rest;
            if (r.rfind("on", 0) == 0)
                r = ltrim(r.substr(2));
            KExpr cond = KExpr::parse(r, file, line);
            if (current_) {
                current_->depends_on = conjoin(current_->depends_on, cond);
            } else if (choice_index_ >= 0) {
                ChoiceGroup &g = model_.choices[static_cast<std::size_t>(choice_index_)];
                g.condition = conjoin(g.condition, cond);
            } else {
                diag(file, line, "'depends on' outside a config block");
            }
            return;
        }
        if (word == "select") {
            if (!current_) {
                diag(file, line, "'select' outside a config block");
                return;
            }
            auto [target, cond] = split_if_clause(rest);
            if (target.empty())
                throw ParseError(file, line, "missing target after 'select'");
            current_->selects.push_back(
                {strip_config_prefix(target), attr_cond(cond, file, line)});
            return;
        }
        if (word == "optional") {
            if (choice_index_ >= 0)
                model_.choices[static_cast<std::size_t>(choice_index_)].optional_flag = true;
            else
                diag(file, line, "'optional' outside a choice block");
            return;
        }
        if (word == "help" || word == "---help---") {
            begin_help();
            return;
        }
        diag(file, line, "unsupported construct '" + word + "' ignored");
    }

    const FileProvider &provider_;
    KconfigModel model_;
    std::vector<KExpr> if_stack_;
    ConfigOption *current_ = nullptr;
    int choice_index_ = -1;
    std::set<std::string> type_set_;

    bool in_help_ = false;
    int help_base_ = -1;
    std::vector<std::string> help_lines_;
};

}  // namespace

KconfigModel parse_kconfig(const std::string &entry, const FileProvider &provider) {
    Parser parser(provider);
    return parser.run(entry);
}

bool visibility_of(const KconfigModel &m, const std::string &name) {
    const ConfigOption *opt = m.find(name);
    if (!opt)
        throw UnknownOptionError(name);
    return opt->visible();
}

}  // namespace kmismatch::kconfig
