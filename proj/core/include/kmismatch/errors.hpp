#pragma once

#include <stdexcept>
#include <string>

namespace kmismatch {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// evaluate() hit an atom that the assignment does not bind.
class UnboundAtomError : public Error {
public:
    explicit UnboundAtomError(const std::string &atom_name)
        : Error("unbound atom: " + atom_name), atom_name(atom_name) {}
    std::string atom_name;
};

class DuplicateBindingError : public Error {
public:
    explicit DuplicateBindingError(const std::string &atom_name)
        : Error("atom bound twice: " + atom_name), atom_name(atom_name) {}
    std::string atom_name;
};

/// Syntax error in an input file (Kconfig, Kbuild, or C source).
class ParseError : public Error {
public:
    ParseError(std::string file, int line, const std::string &message)
        : Error(file + ":" + std::to_string(line) + ": " + message),
          file(std::move(file)), line(line) {}
    std::string file;
    int line;
};

/// A satisfiability or enumeration query exceeded its decision budget.
class ResourceLimitError : public Error {
public:
    explicit ResourceLimitError(const std::string &what) : Error(what) {}
};

/// Model enumeration was asked to project onto more variables than the cap allows.
class EnumerationExplosionError : public Error {
public:
    EnumerationExplosionError(std::size_t projection_size, std::size_t cap)
        : Error("projection over " + std::to_string(projection_size) +
                " atoms exceeds enumeration cap of " + std::to_string(cap)),
          projection_size(projection_size), cap(cap) {}
    std::size_t projection_size;
    std::size_t cap;
};

class UnknownOptionError : public Error {
public:
    explicit UnknownOptionError(const std::string &name)
        : Error("unknown config option: " + name), name(name) {}
    std::string name;
};

class SubdirCycleError : public Error {
public:
    explicit SubdirCycleError(const std::string &cycle)
        : Error("cycle in subdirectory descent: " + cycle) {}
};

/// The brute-force oracle refuses instances above its exhaustive-enumeration limit.
class OracleSizeError : public Error {
public:
    OracleSizeError(std::size_t atoms, std::size_t limit)
        : Error("oracle limit exceeded: " + std::to_string(atoms) + " atoms > " +
                std::to_string(limit)) {}
};

}  // namespace kmismatch
