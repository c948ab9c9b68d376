#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kmismatch/errors.hpp"

namespace kmismatch::prop {

/// Interned propositional variable. Ids are dense and stable within one
/// AtomTable, which lives for a whole analysis run.
struct Atom {
    std::uint32_t id = 0;

    friend bool operator==(const Atom &a, const Atom &b) { return a.id == b.id; }
    friend bool operator!=(const Atom &a, const Atom &b) { return a.id != b.id; }
    friend bool operator<(const Atom &a, const Atom &b) { return a.id < b.id; }
};

/// Name-to-id dictionary shared by every formula of a run. Built single-threaded;
/// read-only lookups are safe to share afterwards.
class AtomTable {
public:
    /// Returns the atom for `name`, creating it on first use.
    /// Names must be non-empty and free of whitespace.
    Atom intern(std::string_view name);

    std::optional<Atom> find(std::string_view name) const;

    const std::string &name_of(Atom a) const;

    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

/// Map from atoms to truth values. An atom may be bound at most once.
class PartialAssignment {
public:
    PartialAssignment() = default;

    /// Throws DuplicateBindingError when `a` is already bound.
    void bind(Atom a, bool value);

    /// Re-binds silently; used where callers construct variants of a base assignment.
    void set(Atom a, bool value) { bindings_[a.id] = value; }

    bool contains(Atom a) const { return bindings_.count(a.id) != 0; }

    std::optional<bool> value(Atom a) const;

    std::size_t size() const { return bindings_.size(); }
    bool empty() const { return bindings_.empty(); }

    /// Bindings in ascending atom-id order.
    const std::map<std::uint32_t, bool> &bindings() const { return bindings_; }

    friend bool operator==(const PartialAssignment &a, const PartialAssignment &b) {
        return a.bindings_ == b.bindings_;
    }
    friend bool operator<(const PartialAssignment &a, const PartialAssignment &b) {
        return a.bindings_ < b.bindings_;
    }

private:
    std::map<std::uint32_t, bool> bindings_;
};

}  // namespace kmismatch::prop
