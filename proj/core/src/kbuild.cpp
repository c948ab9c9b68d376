#include "kmismatch/kbuild.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "kmismatch/errors.hpp"

namespace fs = std::filesystem;

namespace kmismatch::kbuild {

using prop::Formula;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

struct LogicalLine {
    std::string text;
    int line = 0;
};

// Joins backslash continuations and strips comments.
std::vector<LogicalLine> logical_lines(const std::string &content) {
    std::vector<LogicalLine> out;
    std::istringstream in(content);
    std::string raw;
    int line_no = 0;
    bool pending = false;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        if (auto pos = raw.find('#'); pos != std::string::npos)
            raw.erase(pos);
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

const std::regex kAssignRe(R"(^\s*([^:+?=\s]+)\s*(\+=|:=|\?=|=)\s*(.*)$)");
const std::regex kObjListRe(R"(^(obj|lib)-(y|m|\$\(CONFIG_([A-Za-z0-9_]+)\))$)");
const std::regex kCompositeRe(R"(^([A-Za-z0-9_.]+)-(y|m|objs|\$\(CONFIG_([A-Za-z0-9_]+)\))$)");
const std::regex kFlagVarRe(R"(^(subdir-)?(cc|as|ld|a|c)flags-.*$|^(CFLAGS|AFLAGS|EXTRA_CFLAGS)_.*$)");

}  // namespace

DirectoryRules extract_build_rules(const std::string &makefile_path,
                                   const std::string &content) {
    DirectoryRules result;
    auto bail = [&](int line, const std::string &msg) {
        result.diagnostics.push_back({"kbuild", makefile_path, line, msg});
        result.reliable = false;
    };

    for (const auto &ll : logical_lines(content)) {
        std::string_view line = trim(ll.text);
        if (line.empty())
            continue;

        std::string first_word(line.substr(0, line.find_first_of(" \t")));
        if (first_word == "ifeq" || first_word == "ifneq" || first_word == "ifdef" ||
            first_word == "ifndef") {
            bail(ll.line, "make conditional '" + first_word + "' is outside the subset");
            continue;
        }
        if (first_word == "else" || first_word == "endif" || first_word == "include" ||
            first_word == "-include")
            continue;
        if (line.find("$(eval") != std::string::npos) {
            bail(ll.line, "$(eval ...) is outside the subset");
            continue;
        }

        std::smatch m;
        std::string text(line);
        if (!std::regex_match(text, m, kAssignRe)) {
            if (text.find("$(CONFIG_") != std::string::npos)
                bail(ll.line, "variability-bearing line not recognized");
            continue;
        }
        std::string lhs = m[1].str();
        std::string rhs = m[3].str();

        if (std::regex_match(lhs, kFlagVarRe)) {
            if (lhs.find("$(CONFIG_") != std::string::npos ||
                rhs.find("$(CONFIG_") != std::string::npos)
                bail(ll.line, "compiler flags depend on the configuration");
            continue;
        }

        std::smatch lm;
        bool is_objlist = std::regex_match(lhs, lm, kObjListRe);
        bool is_composite = !is_objlist && std::regex_match(lhs, lm, kCompositeRe);
        if (!is_objlist && !is_composite) {
            if (lhs.find("$(") != std::string::npos)
                bail(ll.line, "computed variable name '" + lhs + "'");
            else if (text.find("$(CONFIG_") != std::string::npos)
                bail(ll.line, "variability-bearing line not recognized");
            continue;
        }

        std::string guard_text = lm[2].str();
        std::optional<std::string> guard;
        if (lm[3].matched)
            guard = lm[3].str();

        std::vector<std::string> objects, dirs;
        std::istringstream targets(rhs);
        std::string target;
        while (targets >> target) {
            if (target.find("$(") != std::string::npos) {
                bail(ll.line, "computed target '" + target + "'");
                continue;
            }
            if (target.back() == '/')
                dirs.push_back(target.substr(0, target.size() - 1));
            else if (target.size() > 2 && target.ends_with(".o"))
                objects.push_back(target);
            else
                result.diagnostics.push_back(
                    {"kbuild", makefile_path, ll.line, "ignored target '" + target + "'"});
        }

        if (is_composite) {
            std::string name = lm[1].str();
            if (!dirs.empty())
                bail(ll.line, "directory target in composite '" + name + "'");
            if (!objects.empty())
                result.rules.push_back({BuildRule::Kind::CompositeObject, guard, guard_text,
                                        name, std::move(objects), makefile_path, ll.line});
            continue;
        }
        if (!objects.empty())
            result.rules.push_back({BuildRule::Kind::ObjectList, guard, guard_text, "",
                                    std::move(objects), makefile_path, ll.line});
        if (!dirs.empty())
            result.rules.push_back({BuildRule::Kind::SubdirDescent, guard, guard_text, "",
                                    std::move(dirs), makefile_path, ll.line});
    }
    return result;
}

DirectoryRules extract_build_rules(const std::string &makefile_path) {
    std::ifstream in(makefile_path, std::ios::binary);
    if (!in)
        throw Error("cannot read makefile: " + makefile_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return extract_build_rules(makefile_path, buf.str());
}

namespace {

std::string join_path(const std::string &dir, const std::string &leaf) {
    if (dir.empty())
        return leaf;
    return dir + "/" + leaf;
}

std::string rule_loc(const BuildRule &r) {
    return r.file + ":" + std::to_string(r.line);
}

struct Composer {
    const std::map<std::string, DirectoryRules> &rules_by_dir;
    kconfig::AtomResolver &resolver;
    const std::string &root;
    BuildExtraction out;

    // source path -> (condition disjuncts, provenance)
    std::map<std::string, std::pair<std::vector<Formula>, std::vector<std::string>>> found;
    std::vector<std::string> stack;
    std::set<std::string> done;

    void diag(const std::string &file, int line, std::string msg) {
        out.diagnostics.push_back({"kbuild", file, line, std::move(msg)});
    }

    Formula guard_condition(const BuildRule &r) {
        if (!r.guard)
            return Formula::constant(true);
        return resolver.enabled(*r.guard, r.file, r.line);
    }

    void walk(const std::string &dir, Formula path_condition,
              std::vector<std::string> path_provenance) {
        if (std::find(stack.begin(), stack.end(), dir) != stack.end()) {
            std::string cycle;
            for (const auto &d : stack)
                cycle += (d.empty() ? "." : d) + " -> ";
            cycle += dir.empty() ? "." : dir;
            throw SubdirCycleError(cycle);
        }
        if (done.count(dir)) {
            diag("", 0, "directory '" + dir + "' reached from more than one parent; "
                        "second path ignored");
            return;
        }
        done.insert(dir);
        auto it = rules_by_dir.find(dir);
        if (it == rules_by_dir.end())
            return;  // no makefile here
        stack.push_back(dir);

        const DirectoryRules &dr = it->second;
        // composite parts defined in this directory
        std::map<std::string, std::vector<const BuildRule *>> composites;
        for (const auto &r : dr.rules)
            if (r.kind == BuildRule::Kind::CompositeObject)
                composites[r.composite].push_back(&r);

        for (const auto &r : dr.rules) {
            if (r.kind == BuildRule::Kind::ObjectList) {
                Formula rule_guard = guard_condition(r);
                for (const auto &obj : r.targets) {
                    std::string stem = obj.substr(0, obj.size() - 2);
                    auto comp = composites.find(stem);
                    if (comp != composites.end()) {
                        // multi-file object: parts inherit the parent's guard,
                        // so module-ness follows the parent
                        for (const BuildRule *part : comp->second) {
                            Formula part_guard = guard_condition(*part);
                            for (const auto &pobj : part->targets) {
                                std::string src =
                                    join_path(dir, pobj.substr(0, pobj.size() - 2) + ".c");
                                auto prov = path_provenance;
                                prov.push_back(rule_loc(r));
                                prov.push_back(rule_loc(*part));
                                record(src, path_condition && rule_guard && part_guard,
                                       std::move(prov));
                            }
                        }
                    } else {
                        std::string src = join_path(dir, stem + ".c");
                        auto prov = path_provenance;
                        prov.push_back(rule_loc(r));
                        record(src, path_condition && rule_guard, std::move(prov));
                    }
                }
            } else if (r.kind == BuildRule::Kind::SubdirDescent) {
                Formula rule_guard = guard_condition(r);
                for (const auto &sub : r.targets) {
                    std::string child = join_path(dir, sub);
                    auto prov = path_provenance;
                    prov.push_back(rule_loc(r));
                    if (!rules_by_dir.count(child))
                        diag(r.file, r.line, "no makefile in subdirectory '" + child + "'");
                    walk(child, path_condition && rule_guard, std::move(prov));
                }
            }
        }
        stack.pop_back();
    }

    void record(std::string src, Formula condition, std::vector<std::string> provenance) {
        auto &entry = found[std::move(src)];
        entry.first.push_back(std::move(condition));
        for (auto &p : provenance)
            if (std::find(entry.second.begin(), entry.second.end(), p) == entry.second.end())
                entry.second.push_back(std::move(p));
    }

    BuildExtraction finish() {
        // every .c file in the tree gets a presence entry; unmentioned ones
        // are never compiled
        std::set<std::string> all_sources;
        std::error_code ec;
        for (fs::recursive_directory_iterator it(root, ec), end; it != end;
             it.increment(ec)) {
            if (ec)
                break;
            if (!it->is_regular_file())
                continue;
            fs::path p = it->path();
            if (p.extension() == ".c")
                all_sources.insert(fs::relative(p, root).generic_string());
        }
        for (const auto &[src, data] : found) {
            FilePresence fp;
            fp.source_file = src;
            fp.condition = prop::simplify(Formula::disj(data.first));
            fp.provenance = data.second;
            if (!all_sources.count(src))
                diag("", 0, "rule references '" + src + "' but no such source exists");
            all_sources.erase(src);
            out.files.push_back(std::move(fp));
        }
        for (const auto &src : all_sources) {
            FilePresence fp;
            fp.source_file = src;
            fp.condition = Formula::constant(false);
            out.files.push_back(std::move(fp));
        }
        std::sort(out.files.begin(), out.files.end(),
                  [](const FilePresence &a, const FilePresence &b) {
                      return a.source_file < b.source_file;
                  });
        return std::move(out);
    }
};

}  // namespace

BuildExtraction compose_file_presence(
    const std::map<std::string, DirectoryRules> &rules_by_dir,
    kconfig::AtomResolver &resolver, const std::string &root) {
    Composer composer{rules_by_dir, resolver, root, {}, {}, {}, {}};
    for (const auto &[dir, dr] : rules_by_dir) {
        for (const auto &d : dr.diagnostics)
            composer.out.diagnostics.push_back(d);
        if (!dr.reliable)
            composer.out.unreliable_dirs.push_back(dir.empty() ? "." : dir);
    }
    composer.walk("", Formula::constant(true), {});
    return composer.finish();
}

std::map<std::string, DirectoryRules> extract_tree_rules(const std::string &root,
                                                         Diagnostics &diagnostics) {
    std::map<std::string, DirectoryRules> rules;
    std::vector<std::string> dirs{""};
    std::error_code ec;
    for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
        if (ec)
            break;
        if (it->is_directory())
            dirs.push_back(fs::relative(it->path(), root).generic_string());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto &dir : dirs) {
        fs::path base = fs::path(root) / dir;
        fs::path kbuild = base / "Kbuild";
        fs::path makefile = base / "Makefile";
        bool has_kbuild = fs::exists(kbuild);
        bool has_makefile = fs::exists(makefile);
        if (!has_kbuild && !has_makefile)
            continue;
        if (has_kbuild && has_makefile)
            diagnostics.push_back({"kbuild", (base / "Kbuild").generic_string(), 0,
                                   "both Kbuild and Makefile present; using Kbuild"});
        fs::path chosen = has_kbuild ? kbuild : makefile;
        std::string rel = fs::relative(chosen, root).generic_string();
        std::ifstream in(chosen, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        rules[dir] = extract_build_rules(rel, buf.str());
    }
    return rules;
}

}  // namespace kmismatch::kbuild
