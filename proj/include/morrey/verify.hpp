#pragma once

#include <string>
#include <vector>

namespace morrey {

struct CheckResult {
    std::string name;
    bool passed{false};
    std::string detail;
    double seconds{0.0};
};

struct BatteryOptions {
    std::vector<std::string> only;  // empty = every check
    double slack_scale{1.0};        // scales every pass tolerance
    int jobs{2};
    bool quick{false};              // coarser meshes; used by the CLI smoke path
};

/// Names of every check in the battery, in execution order.
std::vector<std::string> battery_check_names();

/// Runs the verification battery: ball constants, Green duality, asymptotic
/// rates, Holder sandwich, symmetry/uniqueness consequences, annulus and
/// bow-tie nonuniqueness signatures, Minkowski level-set identity, radial
/// support ODE, Steiner suite, whole-space constant, numerics hygiene.
std::vector<CheckResult> run_battery(const BatteryOptions& opts);

}  // namespace morrey
