#include "doctest.h"

#include "kmismatch/kconfig_model.hpp"
#include "kmismatch/solver.hpp"
#include "kmismatch/vm_compile.hpp"
#include "testutil.hpp"

using namespace kmismatch;
using namespace kmismatch::kconfig;
using prop::Formula;

namespace {

KconfigModel parse_text(const std::string &text) {
    MemoryFileProvider files;
    files.add("Kconfig", text);
    return parse_kconfig("Kconfig", files);
}

bool sat_with(const PropositionalVM &vm, Formula extra) {
    Formula f = vm.vm_formula && std::move(extra);
    auto r = prop::is_satisfiable(prop::to_cnf(f));
    REQUIRE(r.status != prop::SolveStatus::BudgetExceeded);
    return r.sat();
}

Formula var_y(const PropositionalVM &vm, const std::string &name) {
    return Formula::var(vm.atom_map.at(name).yes);
}

Formula var_m(const PropositionalVM &vm, const std::string &name) {
    return Formula::var(*vm.atom_map.at(name).mod);
}

}  // namespace

TEST_CASE("minimal visible bool option") {
    KconfigModel m = parse_text("config FOO\n\tbool \"foo\"\n");
    REQUIRE(m.options.count("FOO"));
    const ConfigOption &foo = m.options.at("FOO");
    CHECK(foo.type == OptionType::Bool);
    CHECK(foo.visible());
    CHECK_FALSE(foo.depends_on.has_value());
    CHECK(visibility_of(m, "FOO"));

    PropositionalVM vm = compile_vm(m);
    CHECK(vm.vm_formula.kind() == prop::Kind::True);  // no constraints
    CHECK(vm.atom_map.count("FOO") == 1);
}

TEST_CASE("ATH5K fixture parses to three options with the conditional select") {
    KconfigModel m = parse_text(
        "config ATH5K\n"
        "\ttristate \"Atheros 5xxx wireless cards support\"\n"
        "\tselect ATH_PCI if !ATH_25\n"
        "\n"
        "config ATH_PCI\n"
        "\tbool \"Atheros driver PCI support\"\n"
        "\n"
        "config ATH_25\n"
        "\tbool\n");
    CHECK(m.options.size() == 3);
    CHECK(visibility_of(m, "ATH_PCI"));
    CHECK_FALSE(visibility_of(m, "ATH_25"));
    const ConfigOption &ath5k = m.options.at("ATH5K");
    REQUIRE(ath5k.selects.size() == 1);
    CHECK(ath5k.selects[0].target == "ATH_PCI");
    REQUIRE(ath5k.selects[0].condition.has_value());
    CHECK(ath5k.selects[0].condition->to_string() == "!ATH_25");
}

TEST_CASE("if/endif wraps depends_on") {
    KconfigModel m = parse_text(
        "config BAR\n\tbool \"bar\"\n"
        "if BAR\n"
        "config BAZ\n\tbool \"baz\"\n"
        "endif\n");
    const ConfigOption &baz = m.options.at("BAZ");
    REQUIRE(baz.depends_on.has_value());
    CHECK(baz.depends_on->to_string() == "BAR");

    PropositionalVM vm = compile_vm(m);
    CHECK_FALSE(sat_with(vm, var_y(vm, "BAZ") && !var_y(vm, "BAR")));
    CHECK(sat_with(vm, var_y(vm, "BAZ") && var_y(vm, "BAR")));
}

TEST_CASE("prompt under an if-condition stays visible with the condition recorded") {
    KconfigModel m = parse_text(
        "config GATE\n\tbool \"gate\"\n"
        "if GATE\n"
        "config OPT\n\tbool \"opt\" if GATE\n"
        "endif\n");
    const ConfigOption &opt = m.options.at("OPT");
    CHECK(opt.visible());
    REQUIRE(opt.prompts.size() == 1);
    REQUIRE(opt.prompts[0].condition.has_value());
    CHECK(opt.prompts[0].condition->to_string() == "GATE && GATE");
}

TEST_CASE("help blocks end at dedent and capture verbatim") {
    KconfigModel m = parse_text(
        "config HELPME\n"
        "\tbool \"h\"\n"
        "\thelp\n"
        "\t  First line.\n"
        "\t  Second line with CONFIG_WORDS.\n"
        "\n"
        "\t  After a blank.\n"
        "config NEXT\n"
        "\tbool \"n\"\n");
    const ConfigOption &h = m.options.at("HELPME");
    CHECK(h.help_text ==
          "First line.\nSecond line with CONFIG_WORDS.\n\nAfter a blank.");
    CHECK(m.options.count("NEXT") == 1);
}

TEST_CASE("duplicate definitions merge attribute-wise with a diagnostic") {
    KconfigModel m = parse_text(
        "config DUP\n\tbool \"first\"\n\tselect A\n"
        "config A\n\tbool\n"
        "config DUP\n\tbool\n\tdefault y\n");
    const ConfigOption &dup = m.options.at("DUP");
    CHECK(dup.prompts.size() == 1);
    CHECK(dup.selects.size() == 1);
    CHECK(dup.defaults.size() == 1);
    bool saw = false;
    for (const auto &d : m.diagnostics)
        saw = saw || d.message.find("duplicate definition") != std::string::npos;
    CHECK(saw);
}

TEST_CASE("source directive resolves through the provider") {
    MemoryFileProvider files;
    files.add("Kconfig", "config TOP\n\tbool \"top\"\nsource \"sub/Kconfig\"\n");
    files.add("sub/Kconfig", "config SUB\n\tbool \"sub\"\n");
    KconfigModel m = parse_kconfig("Kconfig", files);
    CHECK(m.options.count("TOP") == 1);
    CHECK(m.options.count("SUB") == 1);

    files.add("bad.txt", "source \"missing/Kconfig\"\n");
    CHECK_THROWS_AS(parse_kconfig("bad.txt", files), ParseError);
}

TEST_CASE("tristate split with MODULES gating") {
    KconfigModel m = parse_text(
        "config MODULES\n\tbool \"Enable loadable module support\"\n"
        "config X\n\ttristate \"x\"\n");
    PropositionalVM vm = compile_vm(m);
    REQUIRE(vm.atom_map.at("X").mod.has_value());
    CHECK(vm.atoms->name_of(vm.atom_map.at("X").yes) == "X_y");
    CHECK(vm.atoms->name_of(*vm.atom_map.at("X").mod) == "X_m");

    CHECK_FALSE(sat_with(vm, var_y(vm, "X") && var_m(vm, "X")));
    CHECK_FALSE(sat_with(vm, var_m(vm, "X") && !var_y(vm, "MODULES")));
    CHECK(sat_with(vm, var_m(vm, "X") && var_y(vm, "MODULES")));
    CHECK(sat_with(vm, var_y(vm, "X") && !var_y(vm, "MODULES")));
}

TEST_CASE("bool depends becomes an implication") {
    KconfigModel m = parse_text(
        "config B\n\tbool \"b\"\n"
        "config A\n\tbool \"a\"\n\tdepends on B\n");
    PropositionalVM vm = compile_vm(m);
    CHECK_FALSE(sat_with(vm, var_y(vm, "A") && !var_y(vm, "B")));
}

TEST_CASE("select overrides depends on") {
    // the 8250_MID/HSU_DMA_PCI shape: a select forces the target even when
    // the target's own dependency is violated
    KconfigModel m = parse_text(
        "config SERIAL_8250_MID\n"
        "\tbool \"Support for serial ports on Intel MID platforms\"\n"
        "\tselect HSU_DMA_PCI\n"
        "\n"
        "config HSU_DMA\n"
        "\tbool \"HSU DMA engine\"\n"
        "\n"
        "config HSU_DMA_PCI\n"
        "\tbool\n"
        "\tdepends on HSU_DMA\n");
    PropositionalVM vm = compile_vm(m);
    CHECK_FALSE(vm.visibility.at("HSU_DMA_PCI"));

    // the illegal configuration the kernel documentation warns about
    CHECK(sat_with(vm, var_y(vm, "HSU_DMA_PCI") && !var_y(vm, "HSU_DMA") &&
                           var_y(vm, "SERIAL_8250_MID")));
    // selecting the source forces the target
    CHECK_FALSE(sat_with(vm, var_y(vm, "SERIAL_8250_MID") && !var_y(vm, "HSU_DMA_PCI")));
    // without the select source the dependency binds again
    CHECK_FALSE(sat_with(vm, var_y(vm, "HSU_DMA_PCI") && !var_y(vm, "HSU_DMA") &&
                             !var_y(vm, "SERIAL_8250_MID")));
}

TEST_CASE("tristate select propagates the source level") {
    KconfigModel m = parse_text(
        "config MODULES\n\tbool \"mods\"\n"
        "config SRC\n\ttristate \"src\"\n\tselect TGT\n"
        "config TGT\n\ttristate \"tgt\"\n");
    PropositionalVM vm = compile_vm(m);
    // y forces y
    CHECK_FALSE(sat_with(vm, var_y(vm, "SRC") && !var_y(vm, "TGT")));
    // m forces at least m
    CHECK_FALSE(
        sat_with(vm, var_m(vm, "SRC") && !var_m(vm, "TGT") && !var_y(vm, "TGT")));
    CHECK(sat_with(vm, var_m(vm, "SRC") && var_y(vm, "TGT")));

    // bool source forces y on a tristate target
    KconfigModel m2 = parse_text(
        "config MODULES\n\tbool \"mods\"\n"
        "config BSRC\n\tbool \"bsrc\"\n\tselect TGT\n"
        "config TGT\n\ttristate \"tgt\"\n");
    PropositionalVM vm2 = compile_vm(m2);
    CHECK_FALSE(sat_with(vm2, var_y(vm2, "BSRC") && !var_y(vm2, "TGT")));
}

TEST_CASE("choice exclusivity") {
    KconfigModel m = parse_text(
        "choice\n\tprompt \"pick one\"\n"
        "config C1\n\tbool \"c1\"\n"
        "config C2\n\tbool \"c2\"\n"
        "config C3\n\tbool \"c3\"\n"
        "endchoice\n");
    REQUIRE(m.choices.size() == 1);
    CHECK(m.choices[0].members == std::vector<std::string>{"C1", "C2", "C3"});

    PropositionalVM vm = compile_vm(m);
    CHECK_FALSE(sat_with(vm, var_y(vm, "C1") && var_y(vm, "C2")));
    CHECK_FALSE(sat_with(vm, !var_y(vm, "C1") && !var_y(vm, "C2") && !var_y(vm, "C3")));
    CHECK(sat_with(vm, var_y(vm, "C2")));
}

TEST_CASE("optional choice allows the empty selection") {
    KconfigModel m = parse_text(
        "choice\n\toptional\n"
        "config O1\n\tbool \"o1\"\n"
        "config O2\n\tbool \"o2\"\n"
        "endchoice\n");
    PropositionalVM vm = compile_vm(m);
    CHECK(sat_with(vm, !var_y(vm, "O1") && !var_y(vm, "O2")));
    CHECK_FALSE(sat_with(vm, var_y(vm, "O1") && var_y(vm, "O2")));
}

TEST_CASE("invisible option without defaults is pinned to n") {
    KconfigModel m = parse_text("config HIDDEN\n\tbool\n");
    PropositionalVM vm = compile_vm(m);
    CHECK_FALSE(sat_with(vm, var_y(vm, "HIDDEN")));
}

TEST_CASE("invisible option takes its first applicable default") {
    KconfigModel m = parse_text(
        "config A\n\tbool \"a\"\n"
        "config B\n\tbool \"b\"\n"
        "config PINNED\n\tbool\n\tdefault y if A\n\tdefault B\n");
    PropositionalVM vm = compile_vm(m);
    // A holds: pinned true regardless of B
    CHECK_FALSE(sat_with(vm, var_y(vm, "A") && !var_y(vm, "PINNED")));
    // A false: pinned follows B
    CHECK_FALSE(sat_with(vm, !var_y(vm, "A") && var_y(vm, "B") && !var_y(vm, "PINNED")));
    CHECK_FALSE(sat_with(vm, !var_y(vm, "A") && !var_y(vm, "B") && var_y(vm, "PINNED")));
}

TEST_CASE("select-targeted invisible option is not pinned") {
    KconfigModel m = parse_text(
        "config S\n\tbool \"s\"\n\tselect T\n"
        "config T\n\tbool\n");
    PropositionalVM vm = compile_vm(m);
    CHECK(sat_with(vm, var_y(vm, "T") && !var_y(vm, "S")));  // free upward
    CHECK_FALSE(sat_with(vm, var_y(vm, "S") && !var_y(vm, "T")));
}

TEST_CASE("string options are parsed but not propositionalized") {
    KconfigModel m = parse_text(
        "config NAME\n\tstring \"name\"\n\tdefault \"anon\"\n"
        "config USES\n\tbool \"uses\"\n\tdepends on NAME = \"special\"\n");
    PropositionalVM vm = compile_vm(m);
    CHECK(vm.atom_map.count("NAME") == 0);
    CHECK(vm.type_map.at("NAME") == OptionType::String);
    // the equality became an opaque atom: USES can be on or off either way
    CHECK(sat_with(vm, var_y(vm, "USES")));
    CHECK(sat_with(vm, !var_y(vm, "USES")));
}

TEST_CASE("dangling select target produces a diagnostic, not an abort") {
    KconfigModel m = parse_text("config S\n\tbool \"s\"\n\tselect NOWHERE\n");
    PropositionalVM vm = compile_vm(m);
    bool saw = false;
    for (const auto &d : vm.diagnostics)
        saw = saw || d.message.find("NOWHERE") != std::string::npos;
    CHECK(saw);
}

TEST_CASE("tristate equality conditions") {
    KconfigModel m = parse_text(
        "config MODULES\n\tbool \"mods\"\n"
        "config T\n\ttristate \"t\"\n"
        "config W\n\tbool \"w\"\n\tdepends on T = m\n");
    PropositionalVM vm = compile_vm(m);
    CHECK(sat_with(vm, var_y(vm, "W") && var_m(vm, "T")));
    CHECK_FALSE(sat_with(vm, var_y(vm, "W") && var_y(vm, "T")));
    CHECK_FALSE(sat_with(vm, var_y(vm, "W") && !var_y(vm, "T") && !var_m(vm, "T")));
}

TEST_CASE("visibility_of rejects unknown options") {
    KconfigModel m = parse_text("config KNOWN\n\tbool \"k\"\n");
    CHECK_THROWS_AS(visibility_of(m, "UNKNOWN"), UnknownOptionError);
}

TEST_CASE("compilation is total over propositional options") {
    KconfigModel m = parse_text(
        "config MODULES\n\tbool \"mods\"\n"
        "config A\n\tbool \"a\"\n"
        "config T\n\ttristate \"t\"\n"
        "config S\n\tstring \"s\"\n"
        "config H\n\thex \"h\"\n\tdefault 0x10\n"
        "config I\n\tint \"i\"\n\tdefault 5\n");
    PropositionalVM vm = compile_vm(m);
    CHECK(vm.atom_map.size() == 3);  // MODULES, A, T
    CHECK(vm.type_map.size() == 6);
    for (const auto &[name, opt] : m.options) {
        if (opt.type == OptionType::Bool || opt.type == OptionType::Tristate) {
            REQUIRE(vm.atom_map.count(name) == 1);
            CHECK((vm.atom_map.at(name).mod.has_value() ==
                   (opt.type == OptionType::Tristate)));
        } else {
            CHECK(vm.atom_map.count(name) == 0);
        }
    }
}
