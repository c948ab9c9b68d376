#include "kmismatch/atoms.hpp"

#include <cctype>

namespace kmismatch::prop {

Atom AtomTable::intern(std::string_view name) {
    auto it = ids_.find(std::string(name));
    if (it != ids_.end())
        return Atom{it->second};
    if (name.empty())
        throw Error("atom name must be non-empty");
    for (char c : name)
        if (std::isspace(static_cast<unsigned char>(c)))
            throw Error("atom name contains whitespace: '" + std::string(name) + "'");
    std::uint32_t id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return Atom{id};
}

std::optional<Atom> AtomTable::find(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end())
        return std::nullopt;
    return Atom{it->second};
}

const std::string &AtomTable::name_of(Atom a) const {
    if (a.id >= names_.size())
        throw Error("atom id out of range: " + std::to_string(a.id));
    return names_[a.id];
}

void PartialAssignment::bind(Atom a, bool value) {
    auto [it, inserted] = bindings_.emplace(a.id, value);
    if (!inserted)
        throw DuplicateBindingError("#" + std::to_string(a.id));
}

std::optional<bool> PartialAssignment::value(Atom a) const {
    auto it = bindings_.find(a.id);
    if (it == bindings_.end())
        return std::nullopt;
    return it->second;
}

}  // namespace kmismatch::prop
