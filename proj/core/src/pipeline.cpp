#include "lienard/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace lienard {

VerificationReport run_verification(const LienardSystem& sys, const IntegratorConfig& cfg,
                                    const VerificationOptions& options)
{
    if (sys.epsilon == 0.0) {
        throw std::invalid_argument("run_verification: epsilon must be nonzero");
    }
    cfg.validate();

    VerificationReport report;
    report.system = sys;
    report.epsilon_used = sys.epsilon;
    report.match_tol = options.match_tol;
    report.integrator = cfg;
    report.averaged = averaged_function(sys);
    if (!report.averaged.is_zero()) report.averaged_roots = positive_roots(report.averaged, 1e-12);

    if (options.scan) {
        report.scan = *options.scan;
    } else if (!report.averaged_roots.empty()) {
        report.scan.lo = 0.5 * report.averaged_roots.front().value;
        report.scan.hi = 1.5 * report.averaged_roots.back().value;
        report.scan.count = options.scan_count;
    } else {
        report.scan.count = options.scan_count;
    }

    const PiecewiseField field(sys);
    report.simulation = find_limit_cycles(field, cfg, report.scan, options.threads);

    const auto& roots = report.averaged_roots;
    const auto& cycles = report.simulation.cycles;
    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = 0; j < cycles.size(); ++j) {
            const double distance = std::fabs(roots[i].value - cycles[j].radius);
            if (distance < options.match_tol) candidates.emplace_back(distance, i, j);
        }
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<bool> root_used(roots.size(), false);
    std::vector<bool> cycle_used(cycles.size(), false);
    for (const auto& [distance, i, j] : candidates) {
        if (root_used[i] || cycle_used[j]) continue;
        root_used[i] = cycle_used[j] = true;
        const bool stable = cycles[j].stability == Stability::Stable;
        report.matches.push_back({i, j, distance, (roots[i].degree_sign > 0) == stable});
    }
    std::sort(report.matches.begin(), report.matches.end(),
              [](const Match& a, const Match& b) { return a.root_index < b.root_index; });
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (!root_used[i]) report.unmatched_roots.push_back(i);
    }
    for (std::size_t j = 0; j < cycles.size(); ++j) {
        if (!cycle_used[j]) report.unmatched_cycles.push_back(j);
    }
    return report;
}

std::string format_real(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string trajectory_csv(const std::vector<State>& states)
{
    std::string out = "t,x,y\n";
    for (const auto& s : states) {
        out += format_real(s.t) + "," + format_real(s.x) + "," + format_real(s.y) + "\n";
    }
    return out;
}

std::string poincare_csv(const std::vector<ScanSample>& samples)
{
    std::string out = "x0,P,D\n";
    for (const auto& s : samples) {
        out += format_real(s.x0) + "," + format_real(s.p) + "," + format_real(s.d) + "\n";
    }
    return out;
}

std::string poincare_svg(const ScanResult& scan)
{
    constexpr double width = 720, height = 400, margin = 40;
    double x_lo = 0, x_hi = 1, d_max = 0;
    bool any = false;
    for (const auto& s : scan.samples) {
        if (!std::isfinite(s.d)) continue;
        if (!any) x_lo = x_hi = s.x0;
        any = true;
        x_lo = std::min(x_lo, s.x0);
        x_hi = std::max(x_hi, s.x0);
        d_max = std::max(d_max, std::fabs(s.d));
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1;
    if (d_max == 0) d_max = 1;
    auto px = [&](double x) { return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin); };
    auto py = [&](double d) { return height / 2 - d / d_max * (height / 2 - margin); };

    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << height / 2 << "\" x2=\"" << width - margin << "\" y2=\""
        << height / 2 << "\" stroke=\"gray\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << margin / 2 << "\" font-size=\"14\">P(x) - x</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& s : scan.samples) {
        if (!std::isfinite(s.d)) continue;
        svg << (first ? "" : " ") << px(s.x0) << "," << py(s.d);
        first = false;
    }
    svg << "\"/>\n";
    for (const auto& c : scan.cycles) {
        const char* colour = c.stability == Stability::Stable ? "green" : "red";
        svg << "<circle class=\"zero-crossing\" cx=\"" << px(c.radius) << "\" cy=\"" << py(0) << "\" r=\"4\" fill=\""
            << colour << "\"/>\n";
    }
    svg << "<text x=\"" << margin << "\" y=\"" << height - margin / 3 << "\" font-size=\"12\">x from "
        << format_real(x_lo) << " to " << format_real(x_hi) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

namespace {

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << content;
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

} // namespace

std::vector<ManifestEntry> emit_plot_data(const VerificationReport& report, const std::filesystem::path& out_dir)
{
    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("poincare.csv", poincare_csv(report.simulation.samples));

    std::string cycles = "radius,stability,period\n";
    for (const auto& c : report.simulation.cycles) {
        cycles += format_real(c.radius) + "," + to_string(c.stability) + "," + format_real(c.period) + "\n";
    }
    files.emplace_back("cycles.csv", cycles);

    // One loop on each detected cycle, plus seeds between neighbouring cycles.
    const PiecewiseField field(report.system);
    const auto& found = report.simulation.cycles;
    for (std::size_t i = 0; i < found.size(); ++i) {
        const auto states = simulate_trajectory(State{found[i].radius, 0.0, 0.0}, field, report.integrator, 2);
        files.emplace_back("trajectories/cycle_" + std::to_string(i) + ".csv", trajectory_csv(states));
    }
    std::vector<double> seeds;
    if (!found.empty()) {
        seeds.push_back(0.5 * found.front().radius);
        for (std::size_t i = 0; i + 1 < found.size(); ++i) seeds.push_back(0.5 * (found[i].radius + found[i + 1].radius));
        seeds.push_back(1.1 * found.back().radius);
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto states =
            simulate_trajectory(State{seeds[i], 0.0, 0.0}, field, report.integrator, report.integrator.max_transits);
        files.emplace_back("trajectories/seed_" + std::to_string(i) + ".csv", trajectory_csv(states));
    }
    files.emplace_back("poincare.svg", poincare_svg(report.simulation));

    std::vector<ManifestEntry> manifest;
    nlohmann::ordered_json doc;
    doc["files"] = nlohmann::ordered_json::array();
    for (const auto& [name, content] : files) {
        write_file(out_dir / name, content);
        manifest.push_back({name, content.size(), sha256_hex(content)});
        doc["files"].push_back({{"path", name}, {"bytes", content.size()}, {"sha256", manifest.back().sha256}});
    }
    write_file(out_dir / "manifest.json", doc.dump(2) + "\n");
    return manifest;
}

} // namespace lienard
