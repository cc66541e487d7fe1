#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sl2orbit {

// Command-line entry point, separated from main() so tests can drive it
// with captured streams. Returns the process exit code:
//   0 success
//   2 input / usage error (bad flags, bad grammar, unusable indexes)
//   3 interval precision exhausted
//   4 a certified bound failed (internal-consistency alarm)
//   5 not enough data for an estimate
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

} // namespace sl2orbit
