#ifndef MEMBRANE_SCENARIO_HPP
#define MEMBRANE_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "membrane/walk1d.hpp"

// Command-line front end. A Scenario holds everything needed to re-run a `dist` or
// `moments` request; it round-trips through JSON, and command-line flags override
// the values read from a scenario file.

namespace membrane::cli {

inline constexpr std::size_t kDefaultOrder = 64;

struct Scenario {
    std::string model = "line";  ///< "line" or "torus"
    std::string p = "1/2";       ///< "num/den" selects the exact field, a decimal the float field
    std::vector<walk1d::Site> receptors{0};
    std::vector<walk1d::Site> starts{0};
    std::size_t n = 0;
    std::int64_t period = 0;  ///< N, torus only
    std::string method = "gf";
    std::size_t order = kDefaultOrder;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 1;
    std::string format = "csv";

    bool operator==(const Scenario&) const = default;
};

nlohmann::json to_json(const Scenario& s);
/// Missing keys keep their defaults; unknown keys and ill-typed values throw DomainError.
Scenario scenario_from_json(const nlohmann::json& j);

/// True when `p` selects the exact field.
bool is_exact(const std::string& p);

/// Comma-separated integers, e.g. "0,3,-2".
std::vector<walk1d::Site> parse_sites(const std::string& text);

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitVerify = 4;

/// Runs one subcommand (dist, moments, hitting, verify). Reports go to `out` (or to
/// --out PATH), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace membrane::cli

#endif  // MEMBRANE_SCENARIO_HPP
