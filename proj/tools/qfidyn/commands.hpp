#pragma once

// qfidyn command-line front end. run_cli() is the whole program minus argv
// handling so tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace qfidyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct TemperaturePoint {
    double temperature = 0.0;  // 0 for the ground state, inf for beta = 0
    double beta = 0.0;
};

// "min:max:count", log- or linearly spaced, ascending. Throws
// std::invalid_argument on malformed input or nonpositive temperatures.
std::vector<TemperaturePoint> parse_temperature_grid(const std::string& spec, bool log_scale);

}  // namespace qfidyn::cli
