#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace morrey {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometry
struct DomainError : Error { using Error::Error; };
struct NotConvex : Error { using Error::Error; };
struct ZeroDirection : Error { using Error::Error; };
struct MeshResolutionError : Error { using Error::Error; };
struct PoleTooCloseToBoundary : Error { using Error::Error; };
struct MeshError : Error { using Error::Error; };

// solver
struct NoPole : Error { using Error::Error; };
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, std::vector<double> best, double best_energy)
        : Error(msg), best_iterate(std::move(best)), energy(best_energy) {}
    std::vector<double> best_iterate;
    double energy{0.0};
};

// extremal engine
struct InvalidRegime : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };

// shape calculus
struct NotQuasiconcave : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// io / config
struct ConfigError : Error { using Error::Error; };

}  // namespace morrey
