#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lienard/averaging.hpp"
#include "lienard/design.hpp"
#include "lienard/exactnum.hpp"
#include "lienard/pipeline.hpp"
#include "lienard/simulator.hpp"

namespace lienard {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a subcommand may need. Only n and m are always required;
/// f and g may be omitted when a design block is present.
struct RunConfig {
    int n = 1;
    int m = 1;
    std::optional<std::vector<PiExt>> f;
    std::optional<std::vector<PiExt>> g;
    std::optional<double> epsilon;
    IntegratorConfig integrator;
    std::optional<ScanWindow> scan;
    std::optional<DesignProblem> design;
    std::optional<double> match_tol;
    std::optional<std::string> out;
    std::optional<State> seed;
    unsigned threads = 0;

    bool has_system() const noexcept { return f.has_value() && g.has_value(); }
    /// Throws ConfigError when f or g is missing.
    LienardSystem system() const;
};

/// Reads and validates a JSON config. Unknown keys are rejected.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");

/// Coefficient entry: JSON number (exact binary value), "p/q", "p/q/pi",
/// or {"rat": ..., "pi_inv": ...}.
PiExt parse_coefficient(const nlohmann::json& entry, const std::string& where);

/// "p/q" or "p/q/pi" (the latter lands in the 1/pi slot).
PiExt parse_pi_ext_text(std::string_view text);

nlohmann::ordered_json to_json(const Rational& value);
nlohmann::ordered_json to_json(const PiExt& value);
/// n, m, f, g; epsilon only when include_epsilon is set.
nlohmann::ordered_json to_json(const LienardSystem& sys, bool include_epsilon);
nlohmann::ordered_json to_json(const AveragedFunction& p);
nlohmann::ordered_json to_json(const RootRecord& root);
nlohmann::ordered_json to_json(const CycleRecord& cycle);
nlohmann::ordered_json to_json(const VerificationReport& report);

/// Human-readable rendering such as "(1/450 + ...)" of F0 in r.
std::string describe(const AveragedFunction& p);

} // namespace lienard
