#pragma once

#include <stdexcept>
#include <string>

namespace ftb {

// Invalid geometry: singular lattice, overlapping disks, disks outside tile.
class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string &msg) : std::runtime_error(msg) {}
};

// alpha coincides with a dual-lattice point; the k = 0 Green's function
// does not exist there.
class SingularQuasimomentumError : public std::runtime_error {
public:
    explicit SingularQuasimomentumError(const std::string &msg)
        : std::runtime_error(msg) {}
};

// Linear solve / eigensolve / integrator failure, with diagnostic.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string &msg) : std::runtime_error(msg) {}
};

// File format or invariant violation when parsing external inputs.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string &msg) : std::runtime_error(msg) {}
};

// Config file problems (unknown keys, out-of-range values).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace ftb
