#ifndef SPREADFRACT_REPORT_HPP
#define SPREADFRACT_REPORT_HPP

// JSON encodings of generator specs, fits and multifractal summaries.

#include <string>

#include <json.hpp>

#include "error.hpp"
#include "fluctuation.hpp"
#include "multifractal.hpp"
#include "synth.hpp"

namespace spreadfract {

using json = nlohmann::ordered_json;

inline json to_json(const GeneratorSpec& spec)
{
    json params = json::object();
    for (const auto& [name, value] : spec.params)
        params[name] = value;
    return {{"kind", to_string(spec.kind)},
            {"length", spec.length},
            {"seed", spec.seed},
            {"params", params}};
}

inline GeneratorSpec generator_spec_from_json(const json& j)
{
    GeneratorSpec spec;
    try {
        const auto kind = parse_generator_kind(j.at("kind").get<std::string>());
        if (!kind)
            fail(ErrorKind::config, "unknown generator kind " + j.at("kind").dump());
        spec.kind = *kind;
        spec.length = j.at("length").get<std::size_t>();
        spec.seed = j.value("seed", std::uint64_t{1});
        if (j.contains("params")) {
            for (const auto& [name, value] : j.at("params").items())
                spec.params[name] = value.get<double>();
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::format, std::string("generator spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

inline json to_json(const Crossover& c)
{
    return {{"t_break", c.t_break},
            {"exponent_left", c.exponent_left},
            {"exponent_right", c.exponent_right},
            {"intercept_left", c.intercept_left},
            {"intercept_right", c.intercept_right},
            {"left_points", c.left_points},
            {"right_points", c.right_points},
            {"residual", c.residual},
            {"improvement", c.improvement},
            {"detected", c.detected}};
}

inline json to_json(const PowerLawFit& fit)
{
    json j = {{"exponent", fit.exponent},
              {"intercept", fit.intercept},
              {"fit_range", {fit.t_min, fit.t_max}},
              {"residual", fit.residual},
              {"points", fit.points},
              {"excluded_points", fit.excluded}};
    j["crossover"] = fit.crossover ? to_json(*fit.crossover) : json(nullptr);
    return j;
}

/// Flooring diagnostics of one curve.
inline json flooring_json(const FluctuationCurve& curve)
{
    std::size_t floored = 0;
    json unreliable = json::array();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        floored += curve.floored[i];
        if (!curve.reliable[i])
            unreliable.push_back(curve.t[i]);
    }
    return {{"q", curve.q}, {"floored_windows", floored}, {"unreliable_t", unreliable}};
}

inline json to_json(const MultifractalSummary& s)
{
    return {{"fractal_dimension", s.fractal_dimension},
            {"delta_h", s.delta_h},
            {"h_range", s.h_range},
            {"delta_alpha", s.delta_alpha},
            {"concave", s.concave},
            {"monotone", s.monotone},
            {"q", s.q},
            {"h", s.h},
            {"tau", s.tau},
            {"alpha", s.alpha},
            {"f_alpha", s.f_alpha},
            {"warnings", s.warnings}};
}

} // namespace spreadfract

#endif // SPREADFRACT_REPORT_HPP
