#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lienard/averaging.hpp"
#include "lienard/simulator.hpp"

namespace lienard {

struct Match {
    std::size_t root_index = 0;
    std::size_t cycle_index = 0;
    double distance = 0.0;
    /// degree_sign +1 paired with a Stable cycle, -1 with Unstable.
    bool stability_consistent = false;
};

struct VerificationReport {
    LienardSystem system;
    AveragedFunction averaged;
    std::vector<RootRecord> averaged_roots;
    ScanWindow scan;
    ScanResult simulation;
    std::vector<Match> matches;
    std::vector<std::size_t> unmatched_roots;
    std::vector<std::size_t> unmatched_cycles;
    double epsilon_used = 0.0;
    double match_tol = 0.1;
    IntegratorConfig integrator;

    const std::vector<CycleRecord>& simulated_cycles() const noexcept { return simulation.cycles; }
    bool all_matched() const noexcept { return unmatched_roots.empty(); }
};

struct VerificationOptions {
    double match_tol = 0.1;
    /// Replaces the default window [0.5 min root, 1.5 max root].
    std::optional<ScanWindow> scan;
    std::size_t scan_count = 200;
    ScanOptions threads;
};

/// Averaged prediction, simulated cycles and a greedy nearest pairing.
/// Requires sys.epsilon != 0.
VerificationReport run_verification(const LienardSystem& sys, const IntegratorConfig& cfg,
                                    const VerificationOptions& options = {});

struct ManifestEntry {
    std::string path; ///< relative to the output directory
    std::size_t bytes = 0;
    std::string sha256;
};

/// Writes poincare.csv, cycles.csv, trajectories/*.csv, poincare.svg and
/// manifest.json under out_dir. Returns the manifest (also on disk).
std::vector<ManifestEntry> emit_plot_data(const VerificationReport& report, const std::filesystem::path& out_dir);

/// "%.17g"
std::string format_real(double value);

/// t,x,y rows with a header.
std::string trajectory_csv(const std::vector<State>& states);

/// x0,P,D rows with a header.
std::string poincare_csv(const std::vector<ScanSample>& samples);

/// Hand-written SVG of D(x) with one circle per detected cycle.
std::string poincare_svg(const ScanResult& scan);

} // namespace lienard
