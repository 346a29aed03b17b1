#pragma once

// Batch front-end: JSON run configurations, parameter sweeps, CSV datasets with a JSON sidecar,
// and two-quantity comparison reports. Header-only so that the test suite can drive it directly.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "vdw/errors.hpp"
#include "vdw/oracle.hpp"
#include "vdw/params.hpp"
#include "vdw/potentials.hpp"
#include "vdw/tensor.hpp"
#include "vdw/units.hpp"

namespace vdw::cli {

using json = nlohmann::json;

inline constexpr const char* version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_convergence = 2, exit_tolerance = 3 };

/// Malformed or inconsistent configuration. The message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class UnitSystem { natural, si };
enum class SweepAxis { R, t, Omega };

struct Sweep {
    SweepAxis axis = SweepAxis::R;
    double min = 1.0;  // natural units
    double max = 2.0;
    int points = 2;
    bool log = false;

    std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(points - 1);
            v[static_cast<std::size_t>(i)] =
                log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min))) : min + f * (max - min);
        }
        v.front() = min;
        v.back() = max;
        return v;
    }
};

inline const char* axis_name(SweepAxis a) {
    switch (a) {
    case SweepAxis::R: return "R";
    case SweepAxis::t: return "t";
    case SweepAxis::Omega: return "Omega";
    }
    return "?";
}

struct ForceOptions {
    Atom atom = Atom::A;
    std::string potential = "w_a_qs";
    std::optional<double> step;  // natural length; default 1e-3 min(R, 1/k_A)
};

struct AverageOptions {
    std::optional<double> window;  // natural time; default 20 periods of 2 pi / |Delta|
    int samples_per_period = 64;
};

struct RunConfig {
    std::vector<std::string> quantities;
    UnitSystem units = UnitSystem::natural;
    AtomPair pair;
    ThreeLevelConfig ladder;
    std::optional<PulseParams> pulse;
    std::optional<double> t;
    Sweep sweep;
    std::optional<QuadratureSpec> quadrature;
    ForceOptions force;
    AverageOptions average;
    std::string output;
    double tolerance = 1e-2;
    json input;  // the document as given
};

// ---------------------------------------------------------------------------
// Quantity registry.
// ---------------------------------------------------------------------------

enum class Needs { pair, ladder };

struct QuantityInfo {
    const char* name;
    Needs needs;
    bool time_dependent;
    bool pulse;
    bool oracle;
    bool force_kind = false;
};

inline const std::vector<QuantityInfo>& quantity_table() {
    static const std::vector<QuantityInfo> table = {
        {"w_a_farfield", Needs::pair, true, false, false},
        {"w_b_farfield", Needs::pair, true, false, false},
        {"w_a_qs", Needs::pair, false, false, false},
        {"w_b_qs", Needs::pair, false, false, false},
        {"w_a_qs_farfield", Needs::pair, false, false, false},
        {"avg_w_a_farfield", Needs::pair, true, false, false},
        {"avg_w_b_farfield", Needs::pair, true, false, false},
        {"w_a_pulse", Needs::pair, true, true, false},
        {"w_b_pulse", Needs::pair, true, true, false},
        {"w_a_pulse_resonant", Needs::pair, true, true, false},
        {"w_b_pulse_resonant", Needs::pair, true, true, false},
        {"e0", Needs::ladder, false, false, false},
        {"eprime", Needs::ladder, false, false, false},
        {"e0_farfield", Needs::ladder, false, false, false},
        {"eprime_farfield", Needs::ladder, false, false, false},
        {"identical_im_im", Needs::ladder, false, false, false},
        {"force", Needs::pair, false, false, false, true},
        {"oracle_w_a_sudden", Needs::pair, true, false, true},
        {"oracle_w_b_sudden", Needs::pair, true, false, true},
        {"oracle_w_pulse_a", Needs::pair, true, true, true},
        {"oracle_w_pulse_b", Needs::pair, true, true, true},
        {"oracle_e0", Needs::ladder, false, false, true},
        {"oracle_eprime", Needs::ladder, false, false, true},
        {"oracle_pole_imim_excited", Needs::pair, false, false, true},
        {"oracle_pole_imim_ground", Needs::pair, false, false, true},
    };
    return table;
}

inline const QuantityInfo* find_quantity(const std::string& name) {
    for (const auto& q : quantity_table())
        if (name == q.name) return &q;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Parsing.
// ---------------------------------------------------------------------------

enum class Dim { length, frequency, time, rate, dipole };

namespace detail {

inline double si_scale(Dim dim, const std::string& unit, const std::string& field) {
    static const double debye = 3.33564095198152e-30;  // C m
    switch (dim) {
    case Dim::length:
        if (unit == "m") return 1.0;
        if (unit == "nm") return 1e-9;
        if (unit == "um") return 1e-6;
        break;
    case Dim::frequency:
    case Dim::rate:
        if (unit == "rad/s" || unit == "1/s") return units::frequency_to_natural(1.0);
        if (unit == "Hz") return units::frequency_to_natural(2.0 * pi);
        break;
    case Dim::time:
        if (unit == "s") return units::time_to_natural(1.0);
        if (unit == "ns") return units::time_to_natural(1e-9);
        if (unit == "fs") return units::time_to_natural(1e-15);
        break;
    case Dim::dipole:
        if (unit == "C m") return units::dipole_to_natural(1.0);
        if (unit == "D") return units::dipole_to_natural(debye);
        break;
    }
    throw ConfigError("field '" + field + "': unit '" + unit + "' is not valid for this quantity");
}

/// Scale factor and payload of a possibly annotated value.
inline std::pair<double, json> unwrap(const json& j, Dim dim, UnitSystem units, const std::string& field) {
    if (j.is_object()) {
        if (!j.contains("value") || !j.contains("unit") || !j["unit"].is_string())
            throw ConfigError("field '" + field + "': annotated values need 'value' and 'unit'");
        const std::string unit = j["unit"].get<std::string>();
        if (unit == "natural") {
            if (units == UnitSystem::si)
                throw ConfigError("field '" + field + "': natural units given in an SI config");
            return {1.0, j["value"]};
        }
        if (units == UnitSystem::natural)
            throw ConfigError("field '" + field + "': SI unit '" + unit + "' given in a natural-unit config");
        return {si_scale(dim, unit, field), j["value"]};
    }
    if (units == UnitSystem::si)
        throw ConfigError("field '" + field + "': SI configs require {\"value\", \"unit\"} annotations");
    return {1.0, j};
}

inline double to_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError("field '" + field + "': expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError("field '" + field + "': value is not finite");
    return v;
}

inline double physical(const json& j, Dim dim, UnitSystem units, const std::string& field) {
    const auto [scale, payload] = unwrap(j, dim, units, field);
    return scale * to_number(payload, field);
}

inline Vec3 physical_vector(const json& j, Dim dim, UnitSystem units, const std::string& field) {
    const auto [scale, payload] = unwrap(j, dim, units, field);
    if (!payload.is_array() || payload.size() != 3) throw ConfigError("field '" + field + "': expected [x, y, z]");
    Vec3 v{};
    for (std::size_t i = 0; i < 3; ++i)
        v[i] = scale * to_number(payload[i], field + "[" + std::to_string(i) + "]");
    return v;
}

/// A separation is either a magnitude along z or a vector.
inline Separation separation(const json& j, UnitSystem units, const std::string& field) {
    const json& payload = j.is_object() ? j.value("value", json()) : j;
    try {
        if (payload.is_array()) return Separation(physical_vector(j, Dim::length, units, field));
        const double r = physical(j, Dim::length, units, field);
        if (!(r > 0.0)) throw ConfigError("field '" + field + "': separation must be > 0");
        return Separation::along_z(r);
    } catch (const DomainError& e) {
        throw ConfigError("field '" + field + "': " + e.what());
    }
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("field '" + where + it.key() + "': unknown key");
    }
}

inline AtomPair parse_pair(const json& j, UnitSystem u) {
    if (!j.is_object()) throw ConfigError("field 'pair': expected an object");
    reject_unknown(j, {"omega_a", "omega_b", "gamma_a", "gamma_b", "mu_a", "mu_b", "R"}, "pair.");
    AtomPair p;
    if (j.contains("omega_a")) p.omega_a = physical(j["omega_a"], Dim::frequency, u, "pair.omega_a");
    if (j.contains("omega_b")) p.omega_b = physical(j["omega_b"], Dim::frequency, u, "pair.omega_b");
    if (j.contains("gamma_a")) p.gamma_a = physical(j["gamma_a"], Dim::rate, u, "pair.gamma_a");
    if (j.contains("gamma_b")) p.gamma_b = physical(j["gamma_b"], Dim::rate, u, "pair.gamma_b");
    if (j.contains("mu_a")) p.mu_a = physical_vector(j["mu_a"], Dim::dipole, u, "pair.mu_a");
    if (j.contains("mu_b")) p.mu_b = physical_vector(j["mu_b"], Dim::dipole, u, "pair.mu_b");
    if (j.contains("R")) p.sep = separation(j["R"], u, "pair.R");
    try {
        validate(p);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("field 'pair': ") + e.what());
    }
    return p;
}

inline ThreeLevelConfig parse_ladder(const json& j, UnitSystem u) {
    if (!j.is_object()) throw ConfigError("field 'three_level': expected an object");
    reject_unknown(j, {"omega_minus", "omega_0", "omega_plus", "mu_minus", "mu_plus", "R"}, "three_level.");
    ThreeLevelConfig c;
    if (j.contains("omega_minus"))
        c.omega_minus = physical(j["omega_minus"], Dim::frequency, u, "three_level.omega_minus");
    if (j.contains("omega_0")) c.omega_0 = physical(j["omega_0"], Dim::frequency, u, "three_level.omega_0");
    if (j.contains("omega_plus"))
        c.omega_plus = physical(j["omega_plus"], Dim::frequency, u, "three_level.omega_plus");
    if (j.contains("mu_minus")) c.mu_minus = physical_vector(j["mu_minus"], Dim::dipole, u, "three_level.mu_minus");
    if (j.contains("mu_plus")) c.mu_plus = physical_vector(j["mu_plus"], Dim::dipole, u, "three_level.mu_plus");
    if (j.contains("R")) c.sep = separation(j["R"], u, "three_level.R");
    try {
        validate(c);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("field 'three_level': ") + e.what());
    }
    return c;
}

inline QuadratureSpec parse_quadrature(const json& j, UnitSystem u, double detuning) {
    if (!j.is_object()) throw ConfigError("field 'quadrature': expected an object");
    reject_unknown(j,
                   {"eta", "eta_sequence", "k_window", "grid_points", "cutoff_factor", "cutoff_transition",
                    "panel_wavelengths", "panel_order", "tolerance", "max_refinements", "apply_causality_step"},
                   "quadrature.");
    QuadratureSpec s = default_quadrature_spec(detuning);
    if (j.contains("eta")) {
        s.eta = physical(j["eta"], Dim::frequency, u, "quadrature.eta");
        s.eta_sequence.clear();
    }
    if (j.contains("eta_sequence")) {
        const json& seq = j["eta_sequence"];
        if (!seq.is_array()) throw ConfigError("field 'quadrature.eta_sequence': expected an array");
        s.eta_sequence.clear();
        for (std::size_t i = 0; i < seq.size(); ++i)
            s.eta_sequence.push_back(
                physical(seq[i], Dim::frequency, u, "quadrature.eta_sequence[" + std::to_string(i) + "]"));
        if (!s.eta_sequence.empty()) s.eta = s.eta_sequence.back();
    }
    auto num = [&](const char* key, auto& target) {
        if (!j.contains(key)) return;
        const double v = to_number(j[key], std::string("quadrature.") + key);
        if constexpr (std::is_same_v<std::decay_t<decltype(target)>, int>) {
            if (v != std::floor(v)) throw ConfigError(std::string("field 'quadrature.") + key + "': expected an integer");
            target = static_cast<int>(v);
        } else {
            target = v;
        }
    };
    num("k_window", s.k_window);
    num("grid_points", s.grid_points);
    num("cutoff_factor", s.cutoff_factor);
    num("cutoff_transition", s.cutoff_transition);
    num("panel_wavelengths", s.panel_wavelengths);
    num("panel_order", s.panel_order);
    num("tolerance", s.tolerance);
    num("max_refinements", s.max_refinements);
    if (j.contains("apply_causality_step")) {
        if (!j["apply_causality_step"].is_boolean())
            throw ConfigError("field 'quadrature.apply_causality_step': expected a boolean");
        s.apply_causality_step = j["apply_causality_step"].get<bool>();
    }
    try {
        validate(s);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("field 'quadrature': ") + e.what());
    }
    return s;
}

inline Dim axis_dim(SweepAxis a) {
    switch (a) {
    case SweepAxis::R: return Dim::length;
    case SweepAxis::t: return Dim::time;
    case SweepAxis::Omega: return Dim::frequency;
    }
    return Dim::length;
}

inline Sweep parse_sweep(const json& j, UnitSystem u) {
    if (!j.is_object()) throw ConfigError("field 'sweep': expected an object");
    reject_unknown(j, {"axis", "min", "max", "points", "scale"}, "sweep.");
    for (const char* key : {"axis", "min", "max", "points"})
        if (!j.contains(key)) throw ConfigError(std::string("field 'sweep.") + key + "': missing");
    Sweep s;
    if (!j["axis"].is_string()) throw ConfigError("field 'sweep.axis': expected a string");
    const std::string axis = j["axis"].get<std::string>();
    if (axis == "R") s.axis = SweepAxis::R;
    else if (axis == "t") s.axis = SweepAxis::t;
    else if (axis == "Omega") s.axis = SweepAxis::Omega;
    else throw ConfigError("field 'sweep.axis': must be one of R, t, Omega");
    s.min = physical(j["min"], axis_dim(s.axis), u, "sweep.min");
    s.max = physical(j["max"], axis_dim(s.axis), u, "sweep.max");
    if (!j["points"].is_number_integer()) throw ConfigError("field 'sweep.points': expected an integer");
    s.points = j["points"].get<int>();
    if (s.points < 2) throw ConfigError("field 'sweep.points': must be >= 2");
    if (!(s.min < s.max)) throw ConfigError("field 'sweep.min': must be < sweep.max");
    const std::string scale = j.value("scale", std::string("linear"));
    if (scale == "log") s.log = true;
    else if (scale != "linear") throw ConfigError("field 'sweep.scale': must be linear or log");
    if (s.axis != SweepAxis::t && !(s.min > 0.0)) throw ConfigError("field 'sweep.min': must be > 0");
    if (s.log && !(s.min > 0.0)) throw ConfigError("field 'sweep.min': log sweeps need min > 0");
    return s;
}

} // namespace detail

/// Parses and validates a configuration document. Throws ConfigError.
inline RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    detail::reject_unknown(doc,
                           {"quantity", "quantities", "units", "pair", "three_level", "pulse", "t", "sweep",
                            "quadrature", "force", "average", "output", "tolerance"},
                           "");
    RunConfig cfg;
    cfg.input = doc;

    const std::string units = doc.value("units", std::string("natural"));
    if (units == "SI") cfg.units = UnitSystem::si;
    else if (units != "natural") throw ConfigError("field 'units': must be natural or SI");
    const UnitSystem u = cfg.units;

    if (doc.contains("quantity") == doc.contains("quantities"))
        throw ConfigError("field 'quantity': give exactly one of 'quantity' or 'quantities'");
    if (doc.contains("quantity")) {
        if (!doc["quantity"].is_string()) throw ConfigError("field 'quantity': expected a string");
        cfg.quantities.push_back(doc["quantity"].get<std::string>());
    } else {
        if (!doc["quantities"].is_array() || doc["quantities"].empty())
            throw ConfigError("field 'quantities': expected a non-empty array");
        for (const auto& q : doc["quantities"]) {
            if (!q.is_string()) throw ConfigError("field 'quantities': entries must be strings");
            cfg.quantities.push_back(q.get<std::string>());
        }
    }

    bool need_pair = false, need_ladder = false, need_time = false, need_pulse = false;
    for (const auto& name : cfg.quantities) {
        const QuantityInfo* q = find_quantity(name);
        if (!q) throw ConfigError("field 'quantity': unknown quantity '" + name + "'");
        need_pair = need_pair || q->needs == Needs::pair;
        need_ladder = need_ladder || q->needs == Needs::ladder;
        need_time = need_time || q->time_dependent;
        need_pulse = need_pulse || q->pulse;
    }

    if (doc.contains("pair")) cfg.pair = detail::parse_pair(doc["pair"], u);
    else if (need_pair) throw ConfigError("field 'pair': required by the selected quantity");
    if (doc.contains("three_level")) cfg.ladder = detail::parse_ladder(doc["three_level"], u);
    else if (need_ladder) throw ConfigError("field 'three_level': required by the selected quantity");

    if (doc.contains("pulse")) {
        const json& p = doc["pulse"];
        if (!p.is_object() || !p.contains("rabi")) throw ConfigError("field 'pulse.rabi': missing");
        detail::reject_unknown(p, {"rabi"}, "pulse.");
        PulseParams pp;
        pp.rabi = detail::physical(p["rabi"], Dim::frequency, u, "pulse.rabi");
        if (!(pp.rabi > 0.0)) throw ConfigError("field 'pulse.rabi': must be > 0");
        cfg.pulse = pp;
    }
    if (doc.contains("t")) {
        cfg.t = detail::physical(doc["t"], Dim::time, u, "t");
        if (!(*cfg.t >= 0.0)) throw ConfigError("field 't': must be >= 0");
    }

    if (!doc.contains("sweep")) throw ConfigError("field 'sweep': missing");
    cfg.sweep = detail::parse_sweep(doc["sweep"], u);
    if (cfg.sweep.axis == SweepAxis::t) {
        if (!need_time) throw ConfigError("field 'sweep.axis': t sweep over time-independent quantities");
        if (!(cfg.sweep.min >= 0.0)) throw ConfigError("field 'sweep.min': times must be >= 0");
    } else if (need_time && !cfg.t) {
        throw ConfigError("field 't': required by the selected quantity");
    }
    if (cfg.sweep.axis == SweepAxis::Omega && !need_pulse)
        throw ConfigError("field 'sweep.axis': Omega sweep needs a pulse quantity");
    if (need_pulse && !cfg.pulse && cfg.sweep.axis != SweepAxis::Omega)
        throw ConfigError("field 'pulse': required by the selected quantity");
    if (!cfg.pulse && cfg.sweep.axis == SweepAxis::Omega) cfg.pulse = PulseParams{};

    if (doc.contains("quadrature")) {
        const double delta = need_ladder && !need_pair ? cfg.ladder.delta_pm() : cfg.pair.detuning();
        cfg.quadrature = detail::parse_quadrature(doc["quadrature"], u, delta);
    }

    if (doc.contains("force")) {
        const json& f = doc["force"];
        if (!f.is_object()) throw ConfigError("field 'force': expected an object");
        detail::reject_unknown(f, {"atom", "potential", "step"}, "force.");
        const std::string atom = f.value("atom", std::string("A"));
        if (atom == "A") cfg.force.atom = Atom::A;
        else if (atom == "B") cfg.force.atom = Atom::B;
        else throw ConfigError("field 'force.atom': must be A or B");
        cfg.force.potential = f.value("potential", cfg.force.potential);
        const QuantityInfo* q = find_quantity(cfg.force.potential);
        if (!q || q->oracle || q->force_kind || q->needs != Needs::pair)
            throw ConfigError("field 'force.potential': must be a closed-form pair potential");
        if (q->time_dependent && !cfg.t && cfg.sweep.axis != SweepAxis::t)
            throw ConfigError("field 't': required by force.potential");
        if (q->pulse && !cfg.pulse) throw ConfigError("field 'pulse': required by force.potential");
        if (f.contains("step")) {
            cfg.force.step = detail::physical(f["step"], Dim::length, u, "force.step");
            if (!(*cfg.force.step > 0.0)) throw ConfigError("field 'force.step': must be > 0");
        }
    }

    if (doc.contains("average")) {
        const json& a = doc["average"];
        if (!a.is_object()) throw ConfigError("field 'average': expected an object");
        detail::reject_unknown(a, {"window", "samples_per_period"}, "average.");
        if (a.contains("window")) cfg.average.window = detail::physical(a["window"], Dim::time, u, "average.window");
        if (a.contains("samples_per_period")) {
            if (!a["samples_per_period"].is_number_integer() || a["samples_per_period"].get<int>() < 8)
                throw ConfigError("field 'average.samples_per_period': expected an integer >= 8");
            cfg.average.samples_per_period = a["samples_per_period"].get<int>();
        }
    }

    if (doc.contains("output")) {
        if (!doc["output"].is_string()) throw ConfigError("field 'output': expected a path string");
        cfg.output = doc["output"].get<std::string>();
    }
    if (doc.contains("tolerance")) {
        cfg.tolerance = detail::to_number(doc["tolerance"], "tolerance");
        if (!(cfg.tolerance > 0.0)) throw ConfigError("field 'tolerance': must be > 0");
    }
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

struct PointResult {
    double value = 0.0;
    Warnings warnings;
    bool oracle = false;
    bool converged = true;
    double eta_final = 0.0;
    int refine_steps = 0;
    double imag_residual = 0.0;
};

/// Parameters at one sweep point, in natural units.
struct PointParams {
    AtomPair pair;
    ThreeLevelConfig ladder;
    PulseParams pulse;
    double t = 0.0;
};

inline PointParams point_params(const RunConfig& cfg, double x) {
    PointParams p{cfg.pair, cfg.ladder, cfg.pulse.value_or(PulseParams{}), cfg.t.value_or(0.0)};
    switch (cfg.sweep.axis) {
    case SweepAxis::R:
        p.pair = p.pair.with_separation(p.pair.sep.with_magnitude(x));
        p.ladder = p.ladder.with_separation(p.ladder.sep.with_magnitude(x));
        break;
    case SweepAxis::t: p.t = x; break;
    case SweepAxis::Omega: p.pulse.rabi = x; break;
    }
    return p;
}

namespace detail {

inline Warnings pulse_warnings(const PointParams& p, bool resonant_branch) {
    Warnings w = validate(p.pulse, p.pair);
    const double ratio = std::abs(p.pulse.rabi / p.pair.detuning());
    if (!resonant_branch && std::abs(ratio - 1.0) < 1e-2) w |= Warning::near_resonant_pulse;
    return w;
}

inline double time_averaged(const RunConfig& cfg, const PointParams& p, double (*f)(const AtomPair&, double)) {
    const double period = 2.0 * pi / std::abs(p.pair.detuning());
    const double window = cfg.average.window.value_or(20.0 * period);
    const double periods = std::max(1.0, std::round(window / period));
    const auto n = static_cast<std::size_t>(periods * cfg.average.samples_per_period);
    const double dt = periods * period / static_cast<double>(n);
    std::vector<std::pair<double, double>> samples(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double ti = p.t + dt * static_cast<double>(i);
        samples[i] = {ti, f(p.pair, ti)};
    }
    return time_average(samples, periods * period, p.pair.detuning());
}

inline QuadratureSpec spec_for(const RunConfig& cfg, double detuning) {
    return cfg.quadrature ? *cfg.quadrature : default_quadrature_spec(detuning);
}

inline PointResult from_report(const OracleReport& r) {
    PointResult out;
    out.value = r.value;
    out.warnings = r.warnings;
    out.oracle = true;
    out.converged = r.converged;
    out.eta_final = r.eta_final;
    out.refine_steps = r.refine_steps;
    out.imag_residual = r.imag_residual;
    return out;
}

} // namespace detail

/// Closed-form pair potential by name at the given parameters.
inline double closed_form_pair(const RunConfig& cfg, const std::string& name, const PointParams& p) {
    if (name == "w_a_farfield") return w_a_farfield(p.pair, p.t);
    if (name == "w_b_farfield") return w_b_farfield(p.pair, p.t);
    if (name == "w_a_qs") return w_a_quasistationary(p.pair);
    if (name == "w_b_qs") return w_b_quasistationary(p.pair);
    if (name == "w_a_qs_farfield") return w_a_quasistationary_farfield(p.pair);
    if (name == "avg_w_a_farfield") return detail::time_averaged(cfg, p, &w_a_farfield);
    if (name == "avg_w_b_farfield") return detail::time_averaged(cfg, p, &w_b_farfield);
    if (name == "w_a_pulse") return w_a_pulse(p.pair, p.pulse, p.t);
    if (name == "w_b_pulse") return w_b_pulse(p.pair, p.pulse, p.t);
    if (name == "w_a_pulse_resonant") return w_a_pulse_resonant(p.pair, p.pulse, p.t);
    if (name == "w_b_pulse_resonant") return w_b_pulse_resonant(p.pair, p.pulse, p.t);
    throw ConfigError("quantity '" + name + "' is not a closed-form pair potential");
}

/// Evaluates one quantity at one sweep value. Library errors propagate.
inline PointResult evaluate(const RunConfig& cfg, const std::string& name, double x) {
    const QuantityInfo* q = find_quantity(name);
    if (!q) throw ConfigError("field 'quantity': unknown quantity '" + name + "'");
    const PointParams p = point_params(cfg, x);
    PointResult out;

    if (q->oracle) {
        if (name == "oracle_w_a_sudden")
            return detail::from_report(oracle_w_a_sudden(p.pair, p.t, detail::spec_for(cfg, p.pair.detuning())));
        if (name == "oracle_w_b_sudden")
            return detail::from_report(oracle_w_b_sudden(p.pair, p.t, detail::spec_for(cfg, p.pair.detuning())));
        if (name == "oracle_w_pulse_a" || name == "oracle_w_pulse_b") {
            auto r = detail::from_report(oracle_w_pulse(p.pair, p.pulse, p.t,
                                                        name == "oracle_w_pulse_a" ? WhichAtom::A : WhichAtom::B,
                                                        detail::spec_for(cfg, p.pair.detuning())));
            r.warnings |= detail::pulse_warnings(p, true);
            return r;
        }
        if (name == "oracle_e0" || name == "oracle_eprime")
            return detail::from_report(oracle_identical(p.ladder,
                                                        name == "oracle_e0" ? IdenticalShift::e0 : IdenticalShift::eprime,
                                                        detail::spec_for(cfg, p.ladder.delta_pm())));
        const PoleKind kind = name == "oracle_pole_imim_excited" ? PoleKind::excited : PoleKind::ground;
        const PoleSignReport rep = oracle_pole_imim(p.pair, kind, detail::spec_for(cfg, p.pair.detuning()));
        auto r = detail::from_report(rep.q_report);
        r.value = rep.imim_coefficient;
        r.warnings |= validate(p.pair);
        return r;
    }

    if (q->needs == Needs::ladder) {
        out.warnings = validate(p.ladder);
        if (name == "e0") out.value = shift_identical_e0(p.ladder);
        else if (name == "eprime") out.value = shift_identical_eprime(p.ladder);
        else if (name == "identical_im_im") out.value = identical_im_im(p.ladder);
        else {
            const double kr = p.ladder.lower_gap() * p.ladder.r();
            if (kr < 10.0) out.warnings |= Warning::not_far_field;
            out.value = name == "e0_farfield" ? shift_identical_e0_farfield(p.ladder)
                                              : shift_identical_eprime_farfield(p.ladder);
        }
        return out;
    }

    if (q->force_kind) {
        const std::string& pot = cfg.force.potential;
        const double h = cfg.force.step.value_or(1e-3 * std::min(p.pair.r(), 1.0 / p.pair.k_a()));
        const ForceResult f = vdw_force(
            cfg.force.atom, p.pair, [&](const AtomPair& moved) {
                PointParams pm = p;
                pm.pair = moved;
                return closed_form_pair(cfg, pot, pm);
            },
            h);
        out.value = dot(f.force, p.pair.sep.unit());
        out.warnings = validate(p.pair);
        if (pot.find("farfield") != std::string::npos) out.warnings |= far_field_warning(p.pair);
        return out;
    }

    out.warnings = validate(p.pair);
    if (name.find("farfield") != std::string::npos) out.warnings |= far_field_warning(p.pair);
    if (q->pulse) out.warnings |= detail::pulse_warnings(p, name.find("resonant") != std::string::npos);
    out.value = closed_form_pair(cfg, name, p);
    return out;
}

// ---------------------------------------------------------------------------
// Datasets.
// ---------------------------------------------------------------------------

struct Row {
    std::string sweep_name;
    double sweep_value = 0.0;
    std::string quantity;
    double value = 0.0;
    std::string warn_flags = "-";
    bool oracle = false;
    double eta_final = 0.0;
    int refine_steps = 0;
    double imag_residual = 0.0;
};

struct Dataset {
    bool oracle_columns = false;
    std::vector<Row> rows;
};

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) {
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan" || s == "-nan") return NAN;
        throw std::runtime_error("dataset: cannot parse number '" + s + "'");
    }
    return v;
}

inline std::string csv_header(bool oracle_columns) {
    std::string h = "sweep_name,sweep_value,quantity,value,warn_flags";
    if (oracle_columns) h += ",eta_final,refine_steps,imag_residual";
    return h;
}

inline std::string to_csv(const Dataset& d) {
    std::string out = csv_header(d.oracle_columns) + "\n";
    for (const auto& r : d.rows) {
        out += r.sweep_name + "," + format_double(r.sweep_value) + "," + r.quantity + "," + format_double(r.value) +
               "," + r.warn_flags;
        if (d.oracle_columns) {
            if (r.oracle)
                out += "," + format_double(r.eta_final) + "," + std::to_string(r.refine_steps) + "," +
                       format_double(r.imag_residual);
            else
                out += ",,,";
        }
        out += "\n";
    }
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

/// Inverse of to_csv.
inline Dataset from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("dataset: empty input");
    Dataset d;
    if (line == csv_header(true)) d.oracle_columns = true;
    else if (line != csv_header(false)) throw std::runtime_error("dataset: unexpected header '" + line + "'");
    const std::size_t ncols = d.oracle_columns ? 8 : 5;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() != ncols) throw std::runtime_error("dataset: wrong column count in '" + line + "'");
        Row r;
        r.sweep_name = c[0];
        r.sweep_value = parse_double(c[1]);
        r.quantity = c[2];
        r.value = parse_double(c[3]);
        r.warn_flags = c[4];
        if (d.oracle_columns && !c[5].empty()) {
            r.oracle = true;
            r.eta_final = parse_double(c[5]);
            r.refine_steps = std::stoi(c[6]);
            r.imag_residual = parse_double(c[7]);
        }
        d.rows.push_back(r);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Sweeps.
// ---------------------------------------------------------------------------

/// Sweep value expressed in the configured unit system (SI: m, s or rad/s).
inline double report_sweep_value(const RunConfig& cfg, double x) {
    if (cfg.units == UnitSystem::natural) return x;
    switch (cfg.sweep.axis) {
    case SweepAxis::R: return x;
    case SweepAxis::t: return x / units::c;
    case SweepAxis::Omega: return x * units::c;
    }
    return x;
}

/// Quantity value expressed in the configured unit system (SI: J, or N for force).
inline double report_value(const RunConfig& cfg, const std::string& quantity, double v) {
    if (cfg.units == UnitSystem::natural) return v;
    return quantity == "force" ? units::force_to_si(v) : units::energy_to_si(v);
}

struct PointOutcome {
    PointResult result;
    std::string error;   // non-empty when evaluation threw
    bool config_error = false;
};

struct SweepResult {
    std::vector<double> sweep;                       // natural units
    std::vector<std::vector<PointOutcome>> values;   // [quantity][point]
};

/// Evaluates every (quantity, point) pair. Work is spread over `threads` workers; results are
/// stored by index so the output does not depend on scheduling.
inline SweepResult evaluate_sweep(const RunConfig& cfg, int threads) {
    SweepResult out;
    out.sweep = cfg.sweep.values();
    const std::size_t nq = cfg.quantities.size(), np = out.sweep.size();
    out.values.assign(nq, std::vector<PointOutcome>(np));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < nq * np; job = next++) {
            const std::size_t qi = job / np, pi_ = job % np;
            PointOutcome& o = out.values[qi][pi_];
            try {
                o.result = evaluate(cfg, cfg.quantities[qi], out.sweep[pi_]);
            } catch (const ConvergenceError& e) {
                o.result.converged = false;
                o.result.oracle = find_quantity(cfg.quantities[qi])->oracle;
                o.result.value = NAN;
                o.error = e.what();
            } catch (const ConfigError& e) {
                o.error = e.what();
                o.config_error = true;
            } catch (const std::exception& e) {
                o.error = e.what();
                o.config_error = true;
            }
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(nq * np)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

struct RunOutcome {
    Dataset dataset;
    int exit_code = exit_ok;
    std::vector<std::string> messages;  // warnings and errors, in sweep order
};

inline std::string point_label(const RunConfig& cfg, const std::string& quantity, double x) {
    return quantity + " at " + axis_name(cfg.sweep.axis) + " = " + format_double(report_sweep_value(cfg, x));
}

inline RunOutcome run(const RunConfig& cfg, int threads = 1) {
    const SweepResult s = evaluate_sweep(cfg, threads);
    RunOutcome out;
    for (const auto& q : cfg.quantities) out.dataset.oracle_columns |= find_quantity(q)->oracle;
    for (std::size_t qi = 0; qi < cfg.quantities.size(); ++qi) {
        const std::string& q = cfg.quantities[qi];
        for (std::size_t i = 0; i < s.sweep.size(); ++i) {
            const PointOutcome& o = s.values[qi][i];
            if (o.config_error) {
                out.messages.push_back("error: " + point_label(cfg, q, s.sweep[i]) + ": " + o.error);
                out.exit_code = exit_config;
                continue;
            }
            Row r;
            r.sweep_name = axis_name(cfg.sweep.axis);
            r.sweep_value = report_sweep_value(cfg, s.sweep[i]);
            r.quantity = q;
            r.value = report_value(cfg, q, o.result.value);
            r.warn_flags = o.result.warnings.to_string();
            r.oracle = o.result.oracle;
            r.eta_final = cfg.units == UnitSystem::si ? o.result.eta_final * units::c : o.result.eta_final;
            r.refine_steps = o.result.refine_steps;
            r.imag_residual = o.result.imag_residual;
            out.dataset.rows.push_back(r);
            if (o.result.warnings.any())
                out.messages.push_back("warning: " + point_label(cfg, q, s.sweep[i]) + ": " + r.warn_flags);
            if (!o.result.converged) {
                out.messages.push_back("error: " + point_label(cfg, q, s.sweep[i]) + ": not converged" +
                                       (o.error.empty() ? "" : ": " + o.error));
                if (out.exit_code == exit_ok) out.exit_code = exit_convergence;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Comparison.
// ---------------------------------------------------------------------------

struct ComparisonRow {
    double sweep_value = 0.0;
    double a = 0.0, b = 0.0;
    double difference = 0.0;  // a - b
    double abs_dev = 0.0;
    double rel_dev = 0.0;     // |a - b| / max(|a|, |b|); 0 when both vanish
    std::string warn_flags = "-";
};

struct ComparisonReport {
    std::string sweep_name;
    std::string quantity_a, quantity_b;
    std::vector<ComparisonRow> rows;
    double max_abs = 0.0, mean_abs = 0.0, max_rel = 0.0, mean_rel = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    int exit_code = exit_ok;
    std::vector<std::string> messages;
};

inline double relative_deviation(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

/// Evaluates the two configured quantities on the shared sweep and reports deviations against
/// `tolerance` (relative, on the maximum over points).
inline ComparisonReport compare(const RunConfig& cfg, double tolerance, int threads = 1) {
    if (cfg.quantities.size() != 2)
        throw ConfigError("field 'quantities': compare needs exactly two quantities");
    const bool ladder_a = find_quantity(cfg.quantities[0])->needs == Needs::ladder;
    const bool ladder_b = find_quantity(cfg.quantities[1])->needs == Needs::ladder;
    if (ladder_a != ladder_b)
        throw ConfigError("field 'quantities': the two quantities are defined on different systems");

    const SweepResult s = evaluate_sweep(cfg, threads);
    ComparisonReport rep;
    rep.sweep_name = axis_name(cfg.sweep.axis);
    rep.quantity_a = cfg.quantities[0];
    rep.quantity_b = cfg.quantities[1];
    rep.tolerance = tolerance;
    for (std::size_t i = 0; i < s.sweep.size(); ++i) {
        bool skip = false;
        for (std::size_t qi = 0; qi < 2; ++qi) {
            const PointOutcome& o = s.values[qi][i];
            if (o.config_error) {
                rep.messages.push_back("error: " + point_label(cfg, cfg.quantities[qi], s.sweep[i]) + ": " + o.error);
                rep.exit_code = exit_config;
                skip = true;
            } else if (!o.result.converged) {
                rep.messages.push_back("error: " + point_label(cfg, cfg.quantities[qi], s.sweep[i]) +
                                       ": not converged");
                if (rep.exit_code == exit_ok) rep.exit_code = exit_convergence;
                skip = true;
            }
        }
        if (skip) continue;
        ComparisonRow r;
        r.sweep_value = report_sweep_value(cfg, s.sweep[i]);
        r.a = report_value(cfg, rep.quantity_a, s.values[0][i].result.value);
        r.b = report_value(cfg, rep.quantity_b, s.values[1][i].result.value);
        r.difference = r.a - r.b;
        r.abs_dev = std::abs(r.difference);
        r.rel_dev = relative_deviation(r.a, r.b);
        r.warn_flags = (s.values[0][i].result.warnings | s.values[1][i].result.warnings).to_string();
        if (r.warn_flags != "-")
            rep.messages.push_back("warning: " + rep.sweep_name + " = " + format_double(r.sweep_value) + ": " +
                                   r.warn_flags);
        rep.rows.push_back(r);
    }
    for (const auto& r : rep.rows) {
        rep.max_abs = std::max(rep.max_abs, r.abs_dev);
        rep.max_rel = std::max(rep.max_rel, r.rel_dev);
        rep.mean_abs += r.abs_dev;
        rep.mean_rel += r.rel_dev;
    }
    if (!rep.rows.empty()) {
        rep.mean_abs /= static_cast<double>(rep.rows.size());
        rep.mean_rel /= static_cast<double>(rep.rows.size());
    }
    rep.pass = rep.exit_code == exit_ok && rep.max_rel <= tolerance;
    if (rep.exit_code == exit_ok && !rep.pass) rep.exit_code = exit_tolerance;
    return rep;
}

inline std::string to_csv(const ComparisonReport& rep) {
    std::string out =
        "sweep_name,sweep_value,quantity_a,value_a,quantity_b,value_b,difference,abs_dev,rel_dev,warn_flags\n";
    for (const auto& r : rep.rows)
        out += rep.sweep_name + "," + format_double(r.sweep_value) + "," + rep.quantity_a + "," +
               format_double(r.a) + "," + rep.quantity_b + "," + format_double(r.b) + "," +
               format_double(r.difference) + "," + format_double(r.abs_dev) + "," + format_double(r.rel_dev) + "," +
               r.warn_flags + "\n";
    return out;
}

inline json summary_json(const ComparisonReport& rep) {
    return json{{"quantity_a", rep.quantity_a}, {"quantity_b", rep.quantity_b},
                {"points", rep.rows.size()},    {"max_abs_dev", rep.max_abs},
                {"mean_abs_dev", rep.mean_abs}, {"max_rel_dev", rep.max_rel},
                {"mean_rel_dev", rep.mean_rel}, {"tolerance", rep.tolerance},
                {"pass", rep.pass}};
}

// ---------------------------------------------------------------------------
// Provenance sidecar.
// ---------------------------------------------------------------------------

inline json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

inline json to_json(const QuadratureSpec& s) {
    return json{{"eta", s.eta},
                {"eta_sequence", resolved_eta_sequence(s)},
                {"k_window", s.k_window},
                {"grid_points", s.grid_points},
                {"cutoff_factor", s.cutoff_factor},
                {"cutoff_transition", s.cutoff_transition},
                {"panel_wavelengths", s.panel_wavelengths},
                {"panel_order", s.panel_order},
                {"tolerance", s.tolerance},
                {"max_refinements", s.max_refinements},
                {"apply_causality_step", s.apply_causality_step}};
}

/// Fully resolved configuration in natural units, plus the input document and library version.
inline json resolved_config(const RunConfig& cfg, const std::string& mode, double tolerance) {
    json r;
    r["version"] = version;
    r["mode"] = mode;
    r["units"] = cfg.units == UnitSystem::si ? "SI" : "natural";
    r["internal_units"] = "natural (hbar = c = epsilon_0 = 1, lengths in the input length unit)";
    r["quantities"] = cfg.quantities;
    r["pair"] = {{"omega_a", cfg.pair.omega_a}, {"omega_b", cfg.pair.omega_b}, {"gamma_a", cfg.pair.gamma_a},
                 {"gamma_b", cfg.pair.gamma_b}, {"mu_a", to_json(cfg.pair.mu_a)},  {"mu_b", to_json(cfg.pair.mu_b)},
                 {"R", to_json(cfg.pair.sep.vector())}};
    r["three_level"] = {{"omega_minus", cfg.ladder.omega_minus}, {"omega_0", cfg.ladder.omega_0},
                        {"omega_plus", cfg.ladder.omega_plus},   {"mu_minus", to_json(cfg.ladder.mu_minus)},
                        {"mu_plus", to_json(cfg.ladder.mu_plus)}, {"R", to_json(cfg.ladder.sep.vector())}};
    r["pulse"] = cfg.pulse ? json{{"rabi", cfg.pulse->rabi}} : json(nullptr);
    r["t"] = cfg.t ? json(*cfg.t) : json(nullptr);
    r["sweep"] = {{"axis", axis_name(cfg.sweep.axis)}, {"min", cfg.sweep.min},
                  {"max", cfg.sweep.max},             {"points", cfg.sweep.points},
                  {"scale", cfg.sweep.log ? "log" : "linear"}};
    if (cfg.quadrature) r["quadrature"] = to_json(*cfg.quadrature);
    else r["quadrature"] = "default: eta = 1e-3 |Delta| per point";
    r["force"] = {{"atom", cfg.force.atom == Atom::A ? "A" : "B"},
                  {"potential", cfg.force.potential},
                  {"step", cfg.force.step ? json(*cfg.force.step) : json("default")}};
    r["average"] = {{"window", cfg.average.window ? json(*cfg.average.window) : json("default")},
                    {"samples_per_period", cfg.average.samples_per_period}};
    r["tolerance"] = tolerance;
    r["input"] = cfg.input;
    return r;
}

/// Sidecar path: the output path with its extension replaced by .json.
inline std::string sidecar_path(const std::string& out) {
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return out.substr(0, dot) + ".json";
    return out + ".json";
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
    if (!f) throw std::runtime_error("error writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Command entry points shared by the executable and the tests.
// ---------------------------------------------------------------------------

struct Invocation {
    std::string command;  // run | compare
    std::string config_path;
    std::optional<double> tolerance;
    int threads = 1;
    std::optional<std::string> out;
};

/// Executes a command; data goes to the output file (or `data` when no path is configured),
/// diagnostics to `diag`. Returns the process exit code.
inline int execute(const Invocation& inv, std::ostream& data, std::ostream& diag) {
    RunConfig cfg;
    try {
        cfg = load_config(inv.config_path);
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << "\n";
        return exit_config;
    }
    if (inv.threads < 1) {
        diag << "config error: --threads must be >= 1\n";
        return exit_config;
    }
    if (inv.tolerance && !(*inv.tolerance > 0.0)) {
        diag << "config error: --tolerance must be > 0\n";
        return exit_config;
    }
    const double tolerance = inv.tolerance.value_or(cfg.tolerance);
    const std::string out_path = inv.out.value_or(cfg.output);

    std::string csv;
    json sidecar = resolved_config(cfg, inv.command, tolerance);
    int code = exit_ok;
    try {
        if (inv.command == "run") {
            const RunOutcome r = run(cfg, inv.threads);
            for (const auto& m : r.messages) diag << m << "\n";
            csv = to_csv(r.dataset);
            code = r.exit_code;
        } else if (inv.command == "compare") {
            const ComparisonReport rep = compare(cfg, tolerance, inv.threads);
            for (const auto& m : rep.messages) diag << m << "\n";
            csv = to_csv(rep);
            sidecar["summary"] = summary_json(rep);
            diag << "compare " << rep.quantity_a << " vs " << rep.quantity_b << ": max_rel_dev "
                 << format_double(rep.max_rel) << ", mean_rel_dev " << format_double(rep.mean_rel)
                 << ", max_abs_dev " << format_double(rep.max_abs) << ", tolerance " << format_double(tolerance)
                 << ": " << (rep.pass ? "PASS" : "FAIL") << "\n";
            code = rep.exit_code;
        } else {
            diag << "config error: unknown command '" << inv.command << "'\n";
            return exit_config;
        }
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << "\n";
        return exit_config;
    }

    if (out_path.empty()) {
        data << csv;
    } else {
        try {
            write_file(out_path, csv);
            write_file(sidecar_path(out_path), sidecar.dump(2) + "\n");
        } catch (const std::exception& e) {
            diag << "config error: " << e.what() << "\n";
            return exit_config;
        }
    }
    return code;
}

} // namespace vdw::cli
