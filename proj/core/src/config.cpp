#include "lienard/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace lienard {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, value] : object.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("schema: unknown key \"" + where + key + "\"");
        }
    }
}

const json& require(const json& object, const std::string& key, const std::string& where)
{
    const auto it = object.find(key);
    if (it == object.end()) throw ConfigError("schema: missing required key \"" + where + key + "\"");
    return *it;
}

Rational parse_rational_entry(const json& entry, const std::string& where)
{
    try {
        if (entry.is_number_integer()) return Rational(static_cast<long>(entry.get<long long>()));
        if (entry.is_number_unsigned()) return Rational{mpq_class(mpz_class(entry.dump(), 10))};
        if (entry.is_number_float()) return Rational::from_double(entry.get<double>());
        if (entry.is_string()) return Rational::parse(entry.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("schema: \"" + where + "\": " + e.what());
    }
    throw ConfigError("schema: \"" + where + "\" must be a number or a \"p/q\" string");
}

double parse_real(const json& entry, const std::string& where) { return parse_rational_entry(entry, where).to_double(); }

long parse_positive_integer(const json& entry, const std::string& where)
{
    if (!entry.is_number_integer() || entry.get<long long>() <= 0) {
        throw ConfigError("schema: \"" + where + "\" must be a positive integer");
    }
    return static_cast<long>(entry.get<long long>());
}

std::vector<PiExt> parse_coefficients(const json& entry, const std::string& key)
{
    if (!entry.is_array()) throw ConfigError("schema: \"" + key + "\" must be an array of coefficients");
    std::vector<PiExt> out;
    for (std::size_t i = 0; i < entry.size(); ++i) {
        out.push_back(parse_coefficient(entry[i], key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::string position_of(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

} // namespace

PiExt parse_pi_ext_text(std::string_view text)
{
    std::string_view body = text;
    for (std::string_view suffix : {"/pi", "/π"}) {
        if (body.size() > suffix.size() && body.substr(body.size() - suffix.size()) == suffix) {
            return PiExt::over_pi(Rational::parse(body.substr(0, body.size() - suffix.size())));
        }
    }
    return PiExt{Rational::parse(body)};
}

PiExt parse_coefficient(const json& entry, const std::string& where)
{
    if (entry.is_object()) {
        reject_unknown(entry, {"rat", "pi_inv"}, where + ".");
        PiExt out;
        if (entry.contains("rat")) out.rat = parse_rational_entry(entry["rat"], where + ".rat");
        if (entry.contains("pi_inv")) out.pi_inv = parse_rational_entry(entry["pi_inv"], where + ".pi_inv");
        return out;
    }
    if (entry.is_string()) {
        try {
            return parse_pi_ext_text(entry.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError("schema: \"" + where + "\": " + e.what());
        }
    }
    return PiExt{parse_rational_entry(entry, where)};
}

LienardSystem RunConfig::system() const
{
    if (!f) throw ConfigError("schema: missing required key \"f\"");
    if (!g) throw ConfigError("schema: missing required key \"g\"");
    LienardSystem sys;
    sys.n = n;
    sys.m = m;
    sys.f = *f;
    sys.g = *g;
    sys.epsilon = epsilon.value_or(0.0);
    return sys;
}

RunConfig parse_config_text(std::string_view text, std::string_view origin)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error in " + std::string(origin) + " at " + position_of(text, e.byte) + ": " +
                          e.what());
    }
    if (!doc.is_object()) throw ConfigError("schema: top level must be a JSON object");
    reject_unknown(doc,
                   {"n", "m", "f", "g", "epsilon", "integrator", "scan", "design", "match_tol", "out", "seed",
                    "threads"},
                   "");

    RunConfig cfg;
    cfg.n = static_cast<int>(parse_positive_integer(require(doc, "n", ""), "n"));
    cfg.m = static_cast<int>(parse_positive_integer(require(doc, "m", ""), "m"));

    if (doc.contains("design")) {
        const json& block = doc["design"];
        if (!block.is_object()) throw ConfigError("schema: \"design\" must be an object");
        reject_unknown(block, {"targets", "pins", "zeroed"}, "design.");
        DesignProblem problem;
        problem.n = cfg.n;
        problem.m = cfg.m;
        const json& targets = require(block, "targets", "design.");
        if (!targets.is_array()) throw ConfigError("schema: \"design.targets\" must be an array");
        for (std::size_t i = 0; i < targets.size(); ++i) {
            problem.targets.push_back(parse_rational_entry(targets[i], "design.targets[" + std::to_string(i) + "]"));
        }
        if (block.contains("pins")) {
            if (!block["pins"].is_object()) throw ConfigError("schema: \"design.pins\" must be an object");
            for (const auto& [key, value] : block["pins"].items()) {
                try {
                    problem.fixed.emplace_back(CoefficientId::parse(key), parse_coefficient(value, "design.pins." + key));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError("schema: \"design.pins." + key + "\": " + e.what());
                }
            }
        }
        if (block.contains("zeroed")) {
            if (!block["zeroed"].is_array()) throw ConfigError("schema: \"design.zeroed\" must be an array");
            for (const auto& id : block["zeroed"]) {
                if (!id.is_string()) throw ConfigError("schema: \"design.zeroed\" entries must be strings");
                try {
                    problem.zeroed.push_back(CoefficientId::parse(id.get<std::string>()));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(std::string("schema: \"design.zeroed\": ") + e.what());
                }
            }
        }
        cfg.design = std::move(problem);
    }

    if (doc.contains("f")) cfg.f = parse_coefficients(doc["f"], "f");
    if (doc.contains("g")) cfg.g = parse_coefficients(doc["g"], "g");
    if (!cfg.design) {
        require(doc, "f", "");
        require(doc, "g", "");
    }
    if (cfg.f && cfg.f->size() != static_cast<std::size_t>(cfg.n) + 1) {
        throw ConfigError("length mismatch: \"f\" has " + std::to_string(cfg.f->size()) +
                          " entries but n+1 = " + std::to_string(cfg.n + 1));
    }
    if (cfg.g && cfg.g->size() != static_cast<std::size_t>(cfg.m) + 1) {
        throw ConfigError("length mismatch: \"g\" has " + std::to_string(cfg.g->size()) +
                          " entries but m+1 = " + std::to_string(cfg.m + 1));
    }
    if (cfg.has_system()) {
        try {
            cfg.system().validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("schema: ") + e.what());
        }
    }

    if (doc.contains("epsilon")) cfg.epsilon = parse_real(doc["epsilon"], "epsilon");
    if (doc.contains("match_tol")) cfg.match_tol = parse_real(doc["match_tol"], "match_tol");
    if (doc.contains("out")) {
        if (!doc["out"].is_string()) throw ConfigError("schema: \"out\" must be a string");
        cfg.out = doc["out"].get<std::string>();
    }
    if (doc.contains("threads")) {
        if (!doc["threads"].is_number_unsigned()) throw ConfigError("schema: \"threads\" must be a non-negative integer");
        cfg.threads = doc["threads"].get<unsigned>();
    }

    if (doc.contains("integrator")) {
        const json& block = doc["integrator"];
        if (!block.is_object()) throw ConfigError("schema: \"integrator\" must be an object");
        reject_unknown(block, {"rtol", "atol", "event_tol", "max_step", "max_transits", "max_steps"}, "integrator.");
        auto& ic = cfg.integrator;
        if (block.contains("rtol")) ic.rtol = parse_real(block["rtol"], "integrator.rtol");
        if (block.contains("atol")) ic.atol = parse_real(block["atol"], "integrator.atol");
        if (block.contains("event_tol")) ic.event_tol = parse_real(block["event_tol"], "integrator.event_tol");
        if (block.contains("max_step")) ic.max_step = parse_real(block["max_step"], "integrator.max_step");
        if (block.contains("max_transits")) {
            ic.max_transits = static_cast<int>(parse_positive_integer(block["max_transits"], "integrator.max_transits"));
        }
        if (block.contains("max_steps")) ic.max_steps = parse_positive_integer(block["max_steps"], "integrator.max_steps");
        try {
            ic.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("schema: ") + e.what());
        }
    }

    if (doc.contains("scan")) {
        const json& block = doc["scan"];
        if (!block.is_object()) throw ConfigError("schema: \"scan\" must be an object");
        reject_unknown(block, {"lo", "hi", "count"}, "scan.");
        ScanWindow window;
        window.lo = parse_real(require(block, "lo", "scan."), "scan.lo");
        window.hi = parse_real(require(block, "hi", "scan."), "scan.hi");
        if (block.contains("count")) {
            window.count = static_cast<std::size_t>(parse_positive_integer(block["count"], "scan.count"));
        }
        if (!(window.lo > 0) || !(window.hi > window.lo) || window.count < 2) {
            throw ConfigError("schema: \"scan\" needs 0 < lo < hi and count >= 2");
        }
        cfg.scan = window;
    }

    if (doc.contains("seed")) {
        const json& block = doc["seed"];
        if (!block.is_object()) throw ConfigError("schema: \"seed\" must be an object");
        reject_unknown(block, {"x", "y"}, "seed.");
        State seed;
        seed.x = parse_real(require(block, "x", "seed."), "seed.x");
        if (block.contains("y")) seed.y = parse_real(block["y"], "seed.y");
        cfg.seed = seed;
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

ordered_json to_json(const Rational& value) { return value.to_string(); }

ordered_json to_json(const PiExt& value)
{
    return ordered_json{{"rat", value.rat.to_string()}, {"pi_inv", value.pi_inv.to_string()}};
}

ordered_json to_json(const LienardSystem& sys, bool include_epsilon)
{
    ordered_json out;
    out["n"] = sys.n;
    out["m"] = sys.m;
    out["f"] = ordered_json::array();
    for (const auto& c : sys.f) out["f"].push_back(to_json(c));
    out["g"] = ordered_json::array();
    for (const auto& c : sys.g) out["g"].push_back(to_json(c));
    if (include_epsilon) out["epsilon"] = sys.epsilon;
    return out;
}

ordered_json to_json(const AveragedFunction& p)
{
    ordered_json out;
    out["coeffs"] = ordered_json::array();
    out["decimal"] = ordered_json::array();
    for (const auto& c : p.coeffs()) {
        out["coeffs"].push_back(to_json(c));
        out["decimal"].push_back(pi_ext_to_real(c));
    }
    out["text"] = describe(p);
    return out;
}

ordered_json to_json(const RootRecord& root)
{
    return ordered_json{{"value", root.value},
                        {"enclosure", {root.lo, root.hi}},
                        {"simple", root.simple},
                        {"degree_sign", root.degree_sign}};
}

ordered_json to_json(const CycleRecord& cycle)
{
    return ordered_json{{"radius", cycle.radius},
                        {"stability", to_string(cycle.stability)},
                        {"period", cycle.period},
                        {"bracket", {cycle.bracket.first, cycle.bracket.second}},
                        {"bracket_d", {cycle.bracket_d.first, cycle.bracket_d.second}},
                        {"multiplier", cycle.multiplier}};
}

ordered_json to_json(const VerificationReport& report)
{
    ordered_json out;
    out["system"] = to_json(report.system, false);
    out["epsilon_used"] = report.epsilon_used;
    out["averaged_function"] = to_json(report.averaged);
    out["averaged_roots"] = ordered_json::array();
    for (const auto& r : report.averaged_roots) out["averaged_roots"].push_back(to_json(r));
    out["scan"] = {{"lo", report.scan.lo}, {"hi", report.scan.hi}, {"count", report.scan.count}};
    out["simulated_cycles"] = ordered_json::array();
    for (const auto& c : report.simulation.cycles) out["simulated_cycles"].push_back(to_json(c));
    out["matches"] = ordered_json::array();
    for (const auto& m : report.matches) {
        out["matches"].push_back({{"root_index", m.root_index},
                                  {"cycle_index", m.cycle_index},
                                  {"distance", m.distance},
                                  {"stability_consistent", m.stability_consistent}});
    }
    out["unmatched_roots"] = report.unmatched_roots;
    out["unmatched_cycles"] = report.unmatched_cycles;
    out["match_tol"] = report.match_tol;
    out["degenerate_scan"] = report.simulation.degenerate;
    out["section_hits_checked"] = report.simulation.hits_checked;
    out["crossing_violations"] = report.simulation.certificate_violations;
    ordered_json failures = ordered_json::array();
    for (const auto& s : report.simulation.samples) {
        if (s.error) failures.push_back({{"x0", s.x0}, {"error", *s.error}});
    }
    out["sample_errors"] = std::move(failures);
    out["all_matched"] = report.all_matched();
    return out;
}

std::string describe(const AveragedFunction& p)
{
    std::ostringstream out;
    bool first = true;
    for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
        const PiExt& c = p.coeffs()[k];
        if (c.is_zero()) continue;
        out << (first ? "" : " + ") << "(";
        if (!c.rat.is_zero()) out << c.rat.to_string();
        if (!c.rat.is_zero() && !c.pi_inv.is_zero()) out << " + ";
        if (!c.pi_inv.is_zero()) out << c.pi_inv.to_string() << "/pi";
        out << ")";
        if (k == 1) out << "*r";
        if (k > 1) out << "*r^" << k;
        first = false;
    }
    return first ? "0" : out.str();
}

} // namespace lienard
