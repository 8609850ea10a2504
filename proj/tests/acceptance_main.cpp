// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "morrey/verify.hpp"

int main(int argc, char** argv) {
    morrey::BatteryOptions opts;
    opts.jobs = 2;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            opts.only.push_back(argv[++i]);
        } else if (arg == "--slack-scale" && i + 1 < argc) {
            opts.slack_scale = std::stod(argv[++i]);
        } else if (arg == "--jobs" && i + 1 < argc) {
            opts.jobs = std::stoi(argv[++i]);
        } else if (arg == "--list") {
            for (const auto& name : morrey::battery_check_names()) std::cout << name << "\n";
            return 0;
        } else {
            std::cerr << "usage: acceptance_tests [--only NAME]... [--slack-scale S] [--jobs N]\n";
            return 2;
        }
    }

    const auto results = morrey::run_battery(opts);
    if (results.empty()) {
        std::cerr << "no checks matched the selection\n";
        return 2;
    }
    int failures = 0;
    for (const auto& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.seconds << "s)"
                  << (r.detail.empty() ? "" : " |") << r.detail << "\n";
        failures += r.passed ? 0 : 1;
    }
    return failures;
}
