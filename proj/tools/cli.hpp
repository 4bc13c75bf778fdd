#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fkpp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< an experiment assertion failed
inline constexpr int kExitConfig = 2;   ///< bad command line or config

/// Entry point behind the `fkpp` executable; writes human-readable lines to
/// `out` and diagnostics (including the error JSON) to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SeedCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Small built-in oracle suite, runnable from the command line.
std::vector<SeedCheck> run_seed_checks();

}  // namespace fkpp::cli
