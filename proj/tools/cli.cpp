#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lienard/averaging.hpp"
#include "lienard/config.hpp"
#include "lienard/design.hpp"
#include "lienard/pipeline.hpp"
#include "lienard/simulator.hpp"

namespace lienard::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::string epsilon;
    std::string targets;
    std::vector<std::string> pins;
    std::vector<std::string> zeroed;
    std::string scan;
    std::string out;
    std::optional<double> rtol, atol, event_tol;
    std::optional<int> n, m;
    std::optional<double> x0;
    double y0 = 0.0;
    std::optional<int> transits;
    std::optional<double> match_tol;
    double tol = 1e-12;
    std::optional<double> r_max;
    unsigned threads = 0;
};

double parse_real(const std::string& text, const char* flag)
{
    try {
        return Rational::parse(text).to_double();
    } catch (const std::invalid_argument&) {
        throw UsageError(std::string(flag) + ": not a number: " + text);
    }
}

ScanWindow parse_scan(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw UsageError("--scan expects LO:HI:N");
    ScanWindow window;
    window.lo = parse_real(parts[0], "--scan");
    window.hi = parse_real(parts[1], "--scan");
    try {
        window.count = static_cast<std::size_t>(std::stoul(parts[2]));
    } catch (const std::exception&) {
        throw UsageError("--scan: N must be a positive integer");
    }
    if (!(window.lo > 0) || !(window.hi > window.lo) || window.count < 2) {
        throw UsageError("--scan needs 0 < LO < HI and N >= 2");
    }
    return window;
}

RunConfig load(const Options& opt, bool need_config)
{
    RunConfig cfg;
    if (!opt.config.empty()) {
        cfg = parse_config(opt.config);
    } else if (need_config) {
        throw UsageError("--config is required");
    }
    if (!opt.epsilon.empty()) cfg.epsilon = parse_real(opt.epsilon, "--epsilon");
    if (opt.rtol) cfg.integrator.rtol = *opt.rtol;
    if (opt.atol) cfg.integrator.atol = *opt.atol;
    if (opt.event_tol) cfg.integrator.event_tol = *opt.event_tol;
    if (opt.transits) cfg.integrator.max_transits = *opt.transits;
    if (!opt.scan.empty()) cfg.scan = parse_scan(opt.scan);
    if (!opt.out.empty()) cfg.out = opt.out;
    if (opt.match_tol) cfg.match_tol = *opt.match_tol;
    if (opt.threads != 0) cfg.threads = opt.threads;
    cfg.integrator.validate();
    return cfg;
}

LienardSystem system_with_epsilon(const RunConfig& cfg)
{
    LienardSystem sys = cfg.system();
    if (!cfg.epsilon) throw UsageError("epsilon is required (--epsilon or config field \"epsilon\")");
    sys.epsilon = *cfg.epsilon;
    return sys;
}

DesignProblem design_problem(const Options& opt, const RunConfig& cfg)
{
    DesignProblem problem;
    if (cfg.design) problem = *cfg.design;
    if (opt.n) problem.n = *opt.n;
    else if (!opt.config.empty()) problem.n = cfg.n;
    if (opt.m) problem.m = *opt.m;
    else if (!opt.config.empty()) problem.m = cfg.m;
    if (opt.config.empty() && (!opt.n || !opt.m)) throw UsageError("design needs --n and --m or --config");

    if (!opt.targets.empty()) {
        problem.targets.clear();
        std::stringstream ss(opt.targets);
        for (std::string item; std::getline(ss, item, ',');) {
            try {
                problem.targets.push_back(Rational::parse(item));
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--targets: ") + e.what());
            }
        }
    }
    if (problem.targets.empty()) throw UsageError("design needs --targets or a design block in the config");
    for (const auto& pin : opt.pins) {
        const auto eq = pin.find('=');
        if (eq == std::string::npos) throw UsageError("--pin expects NAME=VALUE, got " + pin);
        try {
            problem.fixed.emplace_back(CoefficientId::parse(pin.substr(0, eq)), parse_pi_ext_text(pin.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--pin: ") + e.what());
        }
    }
    for (const auto& id : opt.zeroed) {
        try {
            problem.zeroed.push_back(CoefficientId::parse(id));
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--zero: ") + e.what());
        }
    }
    return problem;
}

void write_or_print(const std::optional<std::string>& path, const std::string& content, std::ostream& out)
{
    if (!path) {
        out << content;
        return;
    }
    std::ofstream os(*path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + *path + " for writing");
    os << content;
}

void diagnostic(std::ostream& err, const std::string& kind, const std::string& message)
{
    err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Averaging predictions and simulations for discontinuous Lienard systems"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON config file");
        sub->add_option("--epsilon", opt.epsilon, "Perturbation size (number or p/q)");
        sub->add_option("--rtol", opt.rtol, "Relative integration tolerance");
        sub->add_option("--atol", opt.atol, "Absolute integration tolerance");
        sub->add_option("--event-tol", opt.event_tol, "|y| tolerance at section hits");
        sub->add_option("--threads", opt.threads, "Scan worker threads (0 = all cores)");
    };

    auto* average = app.add_subcommand("average", "Print the averaged function F0 exactly and in decimal");
    add_common(average);

    auto* bound = app.add_subcommand("bound", "Descartes bound and floor(n/2)+floor(m/2)+1");
    add_common(bound);
    bound->add_option("--n", opt.n, "Degree of f");
    bound->add_option("--m", opt.m, "Degree of g");

    auto* roots = app.add_subcommand("roots", "Positive roots of F0 as JSON");
    add_common(roots);
    roots->add_option("--tol", opt.tol, "Root enclosure width");
    roots->add_option("--r-max", opt.r_max, "Search radius (default from the Cauchy bound)");

    auto* design = app.add_subcommand("design", "Solve for coefficients placing F0 roots at targets");
    add_common(design);
    design->add_option("--n", opt.n, "Degree of f");
    design->add_option("--m", opt.m, "Degree of g");
    design->add_option("--targets", opt.targets, "Comma-separated target radii");
    design->add_option("--pin", opt.pins, "NAME=VALUE, e.g. b2=1 or a4=1/pi");
    design->add_option("--zero", opt.zeroed, "Coefficient forced to zero, e.g. a1");
    design->add_option("--out", opt.out, "Write the system JSON here instead of stdout");

    auto* simulate = app.add_subcommand("simulate", "Trajectory CSV (t,x,y) from a seed state");
    add_common(simulate);
    simulate->add_option("--x0", opt.x0, "Seed x");
    simulate->add_option("--y0", opt.y0, "Seed y");
    simulate->add_option("--transits", opt.transits, "Section crossings to follow");
    simulate->add_option("--out", opt.out, "Write the CSV here instead of stdout");

    auto* poincare = app.add_subcommand("poincare", "Poincare scan CSV (x0,P,D)");
    add_common(poincare);
    poincare->add_option("--scan", opt.scan, "LO:HI:N");
    poincare->add_option("--out", opt.out, "Write the CSV here instead of stdout");

    auto* verify = app.add_subcommand("verify", "Compare averaged roots with simulated limit cycles");
    add_common(verify);
    verify->add_option("--scan", opt.scan, "LO:HI:N (default: around the averaged roots)");
    verify->add_option("--match-tol", opt.match_tol, "Largest accepted |root - cycle|");
    verify->add_option("--out", opt.out, "Directory for plot data (default: verify_out)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return kUsageError;
    }

    try {
        if (*bound) {
            if (opt.config.empty()) {
                if (!opt.n || !opt.m) throw UsageError("bound needs --n and --m, or --config");
                out << predicted_cycle_count(*opt.n, *opt.m) << "\n";
                return kOk;
            }
            const RunConfig cfg = load(opt, true);
            const LienardSystem sys = cfg.system();
            nlohmann::ordered_json doc;
            doc["descartes_bound"] = descartes_bound(averaged_function(sys));
            doc["predicted_cycle_count"] = predicted_cycle_count(sys.n, sys.m);
            out << doc.dump(2) << "\n";
            return kOk;
        }
        if (*average) {
            const RunConfig cfg = load(opt, true);
            const AveragedFunction p = averaged_function(cfg.system());
            out << "F0(r) = " << describe(p) << "\n";
            out << "F0(r) ~";
            const auto decimal = p.numeric();
            for (std::size_t k = 0; k < decimal.size(); ++k) {
                if (decimal[k] == 0.0) continue;
                out << " " << (decimal[k] < 0 ? "- " : "+ ") << format_real(std::fabs(decimal[k]));
                if (k > 0) out << "*r" << (k > 1 ? "^" + std::to_string(k) : "");
            }
            out << "\n";
            return kOk;
        }
        if (*roots) {
            const RunConfig cfg = load(opt, true);
            const AveragedFunction p = averaged_function(cfg.system());
            const auto found = opt.r_max ? positive_roots(p, *opt.r_max, opt.tol) : positive_roots(p, opt.tol);
            nlohmann::ordered_json doc = nlohmann::ordered_json::array();
            for (const auto& r : found) doc.push_back(to_json(r));
            out << doc.dump(2) << "\n";
            return kOk;
        }
        if (*design) {
            const RunConfig cfg = load(opt, false);
            const DesignSolution solution = design_cycles(design_problem(opt, cfg));
            for (const auto& w : solution.warnings) err << "warning: " << w << "\n";
            write_or_print(cfg.out, to_json(solution.system, false).dump(2) + "\n", out);
            return kOk;
        }
        if (*simulate) {
            const RunConfig cfg = load(opt, true);
            const LienardSystem sys = system_with_epsilon(cfg);
            State seed;
            if (opt.x0) {
                seed = State{*opt.x0, opt.y0, 0.0};
            } else if (cfg.seed) {
                seed = *cfg.seed;
            } else {
                throw UsageError("simulate needs --x0 or a seed block in the config");
            }
            const auto states =
                simulate_trajectory(seed, PiecewiseField(sys), cfg.integrator, cfg.integrator.max_transits);
            write_or_print(cfg.out, trajectory_csv(states), out);
            return kOk;
        }
        if (*poincare) {
            const RunConfig cfg = load(opt, true);
            const LienardSystem sys = system_with_epsilon(cfg);
            const ScanResult scan =
                find_limit_cycles(PiecewiseField(sys), cfg.integrator, cfg.scan.value_or(ScanWindow{}), {cfg.threads});
            write_or_print(cfg.out, poincare_csv(scan.samples), out);
            return kOk;
        }
        if (*verify) {
            const RunConfig cfg = load(opt, true);
            const LienardSystem sys = system_with_epsilon(cfg);
            VerificationOptions options;
            options.match_tol = cfg.match_tol.value_or(0.1);
            options.scan = cfg.scan;
            options.threads.threads = cfg.threads;
            const VerificationReport report = run_verification(sys, cfg.integrator, options);
            emit_plot_data(report, cfg.out.value_or("verify_out"));
            out << to_json(report).dump(2) << "\n";
            return report.all_matched() ? kOk : kUnmatched;
        }
    } catch (const UsageError& e) {
        err << e.what() << "\n";
        return kUsageError;
    } catch (const ConfigError& e) {
        diagnostic(err, "ConfigError", e.what());
        return kUsageError;
    } catch (const SimulationError& e) {
        diagnostic(err, to_string(e.kind()), e.what());
        return kComputationError;
    } catch (const DesignError& e) {
        diagnostic(err, "DesignError", e.what());
        return kComputationError;
    } catch (const RootError& e) {
        diagnostic(err, "RootError", e.what());
        return kComputationError;
    } catch (const FieldError& e) {
        diagnostic(err, "FieldError", e.what());
        return kComputationError;
    } catch (const std::exception& e) {
        diagnostic(err, "Error", e.what());
        return kComputationError;
    }
    return kUsageError;
}

} // namespace lienard::cli
