// spreadfract: command-line front end for the spread analysis pipeline.
//
// Subcommands: ingest, acf, dfa, mfdfa, synth, surrogate. Every run writes
// its data files plus plot.json and manifest.json into --out. Files are
// staged in memory and land via write-to-temp-then-rename, so a failed run
// leaves nothing behind.
//
// Exit codes: 0 success, 1 I/O or configuration, 2 numerical or degenerate
// data, 3 internal invariant breach.

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <CLI11.hpp>

#include "spreadfract/report.hpp"
#include "spreadfract/spreadfract.hpp"

namespace fs = std::filesystem;
using namespace spreadfract;

namespace {

struct RunConfig {
    std::string input;
    std::string calendar = "09:30-11:30,13:00-15:00";
    int delta_t = 1;
    std::string q_grid = "-6:6:25";
    std::string windows; // empty: default logarithmic grid
    std::string fit_range;
    bool crossover = false;
    bool bridge_gaps = false;
    bool bidirectional = false;
    int detrend_order = 1;
    std::uint64_t seed = 1;
    std::string out = ".";

    // subcommand-specific
    std::string series = "adjusted_return";
    std::size_t max_lag = 0; // 0: default
    std::string kind = "white_noise";
    std::size_t length = 0; // 0: kind default
    std::vector<std::string> params;
    bool strict = false;
    bool sort_ticks = false;
};

// ---------------------------------------------------------------------------
// Output staging

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        fail(ErrorKind::invariant, "SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content)
    {
        files_.emplace_back(name, std::move(content));
    }

    /// Writes every staged file, then the manifest, under an exclusive lock.
    void commit(json manifest)
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec)
            fail(ErrorKind::io, "cannot create output directory " + dir_.string() + ": " + ec.message());

        const fs::path lock = dir_ / ".spreadfract.lock";
        const int fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0)
            fail(ErrorKind::io, "output directory " + dir_.string() + " is locked by another run ("
                                    + lock.string() + ")");
        ::close(fd);
        try {
            json outputs = json::array();
            for (const auto& [name, content] : files_) {
                write_atomic(name, content);
                outputs.push_back({{"file", name}, {"bytes", content.size()},
                                   {"sha256", sha256_hex(content)}});
            }
            manifest["outputs"] = outputs;
            write_atomic("manifest.json", manifest.dump(2) + "\n");
        } catch (...) {
            fs::remove(lock, ec);
            throw;
        }
        fs::remove(lock, ec);
    }

private:
    void write_atomic(const std::string& name, const std::string& content)
    {
        const fs::path target = dir_ / name;
        const fs::path temp = dir_ / ("." + name + ".tmp." + std::to_string(::getpid()));
        {
            std::ofstream out(temp, std::ios::binary | std::ios::trunc);
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            out.flush();
            if (!out)
                fail(ErrorKind::io, "cannot write " + temp.string());
        }
        std::error_code ec;
        fs::rename(temp, target, ec);
        if (ec) {
            fs::remove(temp, ec);
            fail(ErrorKind::io, "cannot move " + temp.string() + " into place");
        }
    }

    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

template<class Fn>
std::string render(Fn&& fn)
{
    std::ostringstream out;
    fn(out);
    return out.str();
}

// ---------------------------------------------------------------------------
// Option parsing

std::vector<double> parse_q_grid(const std::string& spec)
{
    std::vector<double> q;
    const auto colon = detail::split(spec, ':');
    if (colon.size() == 3) {
        const auto lo = detail::parse_double(colon[0]);
        const auto hi = detail::parse_double(colon[1]);
        const auto count = detail::parse_int<std::size_t>(colon[2]);
        if (!lo || !hi || !count || *count < 2 || !(*hi > *lo))
            fail(ErrorKind::config, "bad --q-grid '" + spec + "' (want lo:hi:count)");
        for (std::size_t i = 0; i < *count; ++i)
            q.push_back(*lo + (*hi - *lo) * static_cast<double>(i) / static_cast<double>(*count - 1));
    } else {
        for (auto field : detail::split(spec, ',')) {
            const auto v = detail::parse_double(field);
            if (!v || !std::isfinite(*v))
                fail(ErrorKind::config, "bad --q-grid entry '" + std::string(field) + "'");
            q.push_back(*v);
        }
    }
    for (std::size_t i = 1; i < q.size(); ++i) {
        if (!(q[i] > q[i - 1]))
            fail(ErrorKind::config, "--q-grid must be strictly increasing");
    }
    return q;
}

WindowGrid parse_windows(const std::string& spec, std::size_t length, int order)
{
    if (spec.empty())
        return WindowGrid::logarithmic(length, order);
    const auto parts = detail::split(spec, ':');
    if (parts[0] == "log") {
        if (parts.size() == 2) {
            const auto count = detail::parse_int<std::size_t>(parts[1]);
            if (!count || *count < 3)
                fail(ErrorKind::config, "bad --windows '" + spec + "'");
            return WindowGrid::logarithmic(length, order, *count);
        }
        if (parts.size() == 4) {
            const auto lo = detail::parse_int<std::size_t>(parts[1]);
            const auto hi = detail::parse_int<std::size_t>(parts[2]);
            const auto count = detail::parse_int<std::size_t>(parts[3]);
            if (!lo || !hi || !count)
                fail(ErrorKind::config, "bad --windows '" + spec + "'");
            return WindowGrid::logarithmic_range(*lo, *hi, *count);
        }
        fail(ErrorKind::config, "bad --windows '" + spec + "' (want log:count or log:lo:hi:count)");
    }
    std::vector<std::size_t> sizes;
    for (auto field : detail::split(spec, ',')) {
        const auto t = detail::parse_int<std::size_t>(field);
        if (!t)
            fail(ErrorKind::config, "bad --windows entry '" + std::string(field) + "'");
        sizes.push_back(*t);
    }
    return WindowGrid::from_sizes(std::move(sizes));
}

std::optional<std::pair<double, double>> parse_fit_range(const std::string& spec)
{
    if (spec.empty())
        return std::nullopt;
    const auto parts = detail::split(spec, ':');
    const auto lo = parts.size() == 2 ? detail::parse_double(parts[0]) : std::nullopt;
    const auto hi = parts.size() == 2 ? detail::parse_double(parts[1]) : std::nullopt;
    if (!lo || !hi || !(*lo > 0.0) || !(*hi > *lo))
        fail(ErrorKind::config, "bad --fit-range '" + spec + "' (want tmin:tmax)");
    return std::pair(*lo, *hi);
}

void validate(const RunConfig& c)
{
    if (c.delta_t < 1)
        fail(ErrorKind::config, "--delta-t must be a positive number of minutes");
    if (c.detrend_order < 1 || c.detrend_order > 3)
        fail(ErrorKind::config, "--detrend-order must be 1, 2 or 3");
    SessionCalendar::parse(c.calendar);
    parse_q_grid(c.q_grid);
    parse_fit_range(c.fit_range);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::io, "cannot open input '" + path + "': " + std::strerror(errno));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json base_config(const RunConfig& c, const std::string& command)
{
    return {{"command", command},
            {"input", c.input},
            {"calendar", c.calendar},
            {"delta_t", c.delta_t},
            {"q_grid", c.q_grid},
            {"windows", c.windows.empty() ? "default" : c.windows},
            {"fit_range", c.fit_range.empty() ? "full" : c.fit_range},
            {"crossover", c.crossover},
            {"bridge_gaps", c.bridge_gaps},
            {"bidirectional", c.bidirectional},
            {"detrend_order", c.detrend_order},
            {"seed", c.seed}};
}

json manifest_for(const RunConfig& c, const std::string& command, json config_extra, json diagnostics)
{
    json config = base_config(c, command);
    for (auto& [k, v] : config_extra.items())
        config[k] = v;
    return {{"tool", "spreadfract"},
            {"version", version},
            {"config", config},
            {"diagnostics", diagnostics}};
}

// ---------------------------------------------------------------------------
// Inputs

struct TickPipeline {
    SpreadSeries spreads;
    SignalSeries raw_return;
    SignalSeries raw_volatility;
    AdjustedSignal adjusted_return;
    AdjustedSignal adjusted_volatility;
    json diagnostics;
};

SpreadSeries load_spreads(const RunConfig& c, const std::string& text, json& diagnostics)
{
    TickFormat format;
    format.strict = c.strict;
    format.ordering = c.sort_ticks ? OrderingPolicy::stable_sort : OrderingPolicy::reject;
    TickParseResult parsed;
    try {
        parsed = parse_ticks(std::string_view(text), format);
    } catch (const Error& e) {
        throw Error(e.kind(), c.input + ": " + e.what());
    }
    json lines = json::array();
    for (const auto& d : parsed.diagnostics) {
        lines.push_back(d.line ? c.input + ":" + std::to_string(d.line) + ": " + d.message
                               : c.input + ": " + d.message);
        std::cerr << "warning: " << lines.back().get<std::string>() << '\n';
    }
    RescaleOptions options;
    options.delta_t = c.delta_t;
    auto spreads = rescale_to_minutes(parsed.ticks, SessionCalendar::parse(c.calendar), options);
    diagnostics["ticks"] = parsed.ticks.size();
    diagnostics["rejected_lines"] = parsed.rejected;
    diagnostics["parse_messages"] = lines;
    diagnostics["trading_days"] = spreads.day_count;
    diagnostics["intervals"] = spreads.size();
    diagnostics["empty_minutes"] = spreads.empty_minutes;
    diagnostics["zero_spread_minutes"] = spreads.zero_spread_minutes;
    diagnostics["ticks_outside_sessions"] = spreads.dropped_ticks;
    diagnostics["partial_days"] = spreads.partial_days.size();
    return spreads;
}

TickPipeline run_tick_pipeline(const RunConfig& c, const std::string& text)
{
    TickPipeline p;
    p.diagnostics = json::object();
    p.spreads = load_spreads(c, text, p.diagnostics);
    GapOptions gaps;
    gaps.bridge_gaps = c.bridge_gaps;
    p.raw_return = spread_return(p.spreads, gaps);
    p.raw_volatility = spread_volatility(p.raw_return);
    p.adjusted_return = remove_intraday_pattern(p.raw_return, intraday_pattern(p.raw_return));
    p.adjusted_volatility =
        remove_intraday_pattern(p.raw_volatility, intraday_pattern(p.raw_volatility));
    p.diagnostics["skipped_adjusted_return"] = p.adjusted_return.skipped;
    p.diagnostics["skipped_adjusted_volatility"] = p.adjusted_volatility.skipped;
    if (p.adjusted_return.skipped > 0)
        std::cerr << "note: " << p.adjusted_return.skipped
                  << " return elements skipped (|intraday pattern| < 1e-12)\n";
    if (p.adjusted_volatility.skipped > 0)
        std::cerr << "note: " << p.adjusted_volatility.skipped
                  << " volatility elements skipped (zero intraday pattern)\n";
    return p;
}

GeneratorSpec parse_generator(const std::string& kind_text, std::size_t length, std::uint64_t seed,
                              const std::vector<std::string>& params)
{
    GeneratorSpec spec;
    const auto kind = parse_generator_kind(kind_text);
    if (!kind)
        fail(ErrorKind::config, "unknown generator kind '" + kind_text + "'");
    spec.kind = *kind;
    spec.seed = seed;
    spec.length = length ? length
                         : (spec.kind == GeneratorKind::binomial_cascade ? std::size_t{1} << 14
                                                                         : std::size_t{1} << 16);
    for (const auto& p : params) {
        const auto eq = p.find('=');
        const auto value = eq == std::string::npos ? std::nullopt
                                                   : detail::parse_double(std::string_view(p).substr(eq + 1));
        if (!value)
            fail(ErrorKind::config, "bad generator parameter '" + p + "' (want name=value)");
        spec.params[p.substr(0, eq)] = *value;
    }
    spec.validate();
    return spec;
}

/// `synth:<kind>[:name=value,...]`, a signal CSV, or a tick CSV (the series
/// named by --series is derived).
SignalSeries load_signal(const RunConfig& c, json& diagnostics)
{
    if (c.input.rfind("synth:", 0) == 0) {
        const auto parts = detail::split(std::string_view(c.input).substr(6), ':');
        std::vector<std::string> params(c.params);
        if (parts.size() > 1) {
            for (auto p : detail::split(parts[1], ','))
                params.emplace_back(p);
        }
        const auto spec = parse_generator(std::string(parts[0]), c.length, c.seed, params);
        diagnostics["generator"] = to_json(spec);
        return generate(spec);
    }
    const auto text = read_file(c.input);
    const auto first_line = text.substr(0, text.find('\n'));
    if (first_line.find("timestamp") != std::string::npos) {
        auto p = run_tick_pipeline(c, text);
        diagnostics = p.diagnostics;
        const auto kind = parse_signal_kind(c.series);
        if (!kind || *kind == SignalKind::generic)
            fail(ErrorKind::config, "bad --series '" + c.series + "'");
        switch (*kind) {
        case SignalKind::raw_return: return p.raw_return;
        case SignalKind::raw_volatility: return p.raw_volatility;
        case SignalKind::adjusted_return: return p.adjusted_return.series;
        default: return p.adjusted_volatility.series;
        }
    }
    try {
        return read_signal_csv(text);
    } catch (const Error& e) {
        throw Error(e.kind(), c.input + ": " + e.what());
    }
}

FluctuationOptions fluctuation_options(const RunConfig& c)
{
    FluctuationOptions o;
    o.detrend.detrend_order = c.detrend_order;
    o.detrend.bidirectional = c.bidirectional;
    o.fit_range = parse_fit_range(c.fit_range);
    return o;
}

json plot_description(const std::string& title, json panels)
{
    return {{"title", title}, {"panels", panels}};
}

// ---------------------------------------------------------------------------
// Commands

void cmd_ingest(const RunConfig& c)
{
    json diagnostics = json::object();
    const auto spreads = load_spreads(c, read_file(c.input), diagnostics);
    OutputSet out(c.out);
    out.add("spread.csv", render([&](std::ostream& o) { write_spread_csv(o, spreads); }));
    out.add("plot.json", plot_description("Rescaled spread",
                                          json::array({{{"file", "spread.csv"}, {"x", "minute"},
                                                        {"y", "spread"}, {"log_x", false},
                                                        {"log_y", false}}}))
                             .dump(2) + "\n");
    out.commit(manifest_for(c, "ingest", json::object(), diagnostics));
}

void cmd_acf(const RunConfig& c)
{
    const auto text = read_file(c.input);
    OutputSet out(c.out);
    AcfOptions options;
    options.bridge_gaps = c.bridge_gaps;
    json diagnostics;
    json panels = json::array();

    auto emit = [&](const std::string& name, const SignalSeries& s, bool log_axes) {
        const std::size_t lag = c.max_lag ? c.max_lag : default_max_lag(s);
        const auto curve = autocorrelation(s, lag, options);
        out.add(name, render([&](std::ostream& o) { write_acf_csv(o, curve); }));
        panels.push_back({{"file", name}, {"x", "lag"}, {"y", "acf"}, {"log_x", log_axes},
                          {"log_y", log_axes}, {"series", to_string(s.kind)}});
        diagnostics["max_lag_" + std::string(to_string(s.kind))] = lag;
        diagnostics["clamped_" + std::string(to_string(s.kind))] = curve.clamped;
    };

    const auto first_line = text.substr(0, text.find('\n'));
    if (first_line.find("timestamp") != std::string::npos) {
        auto p = run_tick_pipeline(c, text);
        diagnostics = p.diagnostics;
        emit("acf_raw_return.csv", p.raw_return, false);
        emit("acf_raw_volatility.csv", p.raw_volatility, true);
        emit("acf_adjusted_volatility.csv", p.adjusted_volatility.series, true);
    } else {
        diagnostics = json::object();
        emit("acf.csv", read_signal_csv(text), false);
    }
    out.add("plot.json", plot_description("Autocorrelation", panels).dump(2) + "\n");
    out.commit(manifest_for(c, "acf", {{"max_lag", c.max_lag}}, diagnostics));
}

void cmd_dfa(const RunConfig& c)
{
    json diagnostics = json::object();
    const auto signal = load_signal(c, diagnostics);
    const auto grid = parse_windows(c.windows, signal.size(), c.detrend_order);
    const auto options = fluctuation_options(c);
    auto result = dfa(signal, grid, options);
    if (c.crossover)
        result.fit = detect_crossover(result.curve, options.fit_range);

    json report = {{"q", 2}, {"series", to_string(signal.kind)}, {"length", signal.size()}};
    report["fit"] = to_json(result.fit);
    report["memory"] = to_string(result.memory);
    report["flooring"] = flooring_json(result.curve);

    OutputSet out(c.out);
    const std::vector<FluctuationCurve> curves{result.curve};
    out.add("fluctuation.csv", render([&](std::ostream& o) { write_fluctuation_csv(o, curves); }));
    out.add("fit.json", report.dump(2) + "\n");
    out.add("plot.json", plot_description("DFA fluctuation function",
                                          json::array({{{"file", "fluctuation.csv"}, {"x", "t"},
                                                        {"y", "F"}, {"log_x", true},
                                                        {"log_y", true}}}))
                             .dump(2) + "\n");
    out.commit(manifest_for(c, "dfa", {{"series", c.series}}, diagnostics));

    std::cout << "H = " << detail::format_double(result.fit.exponent) << " ("
              << to_string(result.memory) << ")\n";
    if (result.fit.crossover) {
        const auto& x = *result.fit.crossover;
        std::cout << "crossover at t = " << detail::format_double(x.t_break) << ": "
                  << detail::format_double(x.exponent_left) << " -> "
                  << detail::format_double(x.exponent_right)
                  << (x.detected ? "" : " (no crossover warranted)") << '\n';
    }
}

void cmd_mfdfa(const RunConfig& c)
{
    json diagnostics = json::object();
    const auto signal = load_signal(c, diagnostics);
    const auto grid = parse_windows(c.windows, signal.size(), c.detrend_order);
    const auto q = parse_q_grid(c.q_grid);
    const auto options = fluctuation_options(c);
    const auto result = mfdfa(signal, grid, q, options);
    const auto summary = summarize_multifractal(q, result.fits);
    for (const auto& w : summary.warnings)
        std::cerr << "warning: " << w << '\n';

    json flooring = json::array();
    for (const auto& curve : result.curves)
        flooring.push_back(flooring_json(curve));
    json fits = json::array();
    for (std::size_t i = 0; i < q.size(); ++i)
        fits.push_back({{"q", q[i]}, {"fit", result.fits[i] ? to_json(*result.fits[i]) : json(nullptr)}});
    json report = to_json(summary);
    report["series"] = to_string(signal.kind);
    report["length"] = signal.size();
    report["fits"] = fits;
    report["flooring"] = flooring;
    report["diagnostics"] = result.diagnostics;

    OutputSet out(c.out);
    out.add("fluctuation.csv",
            render([&](std::ostream& o) { write_fluctuation_csv(o, result.curves); }));
    out.add("scaling.csv", render([&](std::ostream& o) { write_scaling_csv(o, summary); }));
    out.add("spectrum.csv", render([&](std::ostream& o) { write_spectrum_csv(o, summary); }));
    out.add("summary.json", report.dump(2) + "\n");
    out.add("plot.json",
            plot_description("MF-DFA",
                             json::array({{{"file", "fluctuation.csv"}, {"x", "t"}, {"y", "F"},
                                           {"group", "q"}, {"log_x", true}, {"log_y", true}},
                                          {{"file", "scaling.csv"}, {"x", "q"}, {"y", "h"}},
                                          {{"file", "scaling.csv"}, {"x", "q"}, {"y", "tau"}},
                                          {{"file", "spectrum.csv"}, {"x", "alpha"}, {"y", "f_alpha"}}}))
                    .dump(2) + "\n");
    out.commit(manifest_for(c, "mfdfa", {{"series", c.series}}, diagnostics));

    std::cout << "delta_h = " << detail::format_double(summary.delta_h)
              << ", delta_alpha = " << detail::format_double(summary.delta_alpha) << '\n';
}

void cmd_synth(const RunConfig& c)
{
    const auto spec = parse_generator(c.kind, c.length, c.seed, c.params);
    const auto signal = generate(spec);
    OutputSet out(c.out);
    out.add("signal.csv", render([&](std::ostream& o) { write_signal_csv(o, signal); }));
    out.add("spec.json", to_json(spec).dump(2) + "\n");
    out.commit(manifest_for(c, "synth", {{"generator", to_json(spec)}}, json::object()));
}

void cmd_surrogate(const RunConfig& c)
{
    json diagnostics = json::object();
    const auto signal = load_signal(c, diagnostics);
    if (signal.size() == 0)
        fail(ErrorKind::insufficient_data, "surrogate needs a non-empty series");
    const auto surrogate = shuffle_surrogate(signal, c.seed);
    OutputSet out(c.out);
    out.add("surrogate.csv", render([&](std::ostream& o) { write_signal_csv(o, surrogate); }));
    out.commit(manifest_for(c, "surrogate", json::object(), diagnostics));
}

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::format:
    case ErrorKind::ordering:
    case ErrorKind::io:
    case ErrorKind::config: return 1;
    case ErrorKind::insufficient_data:
    case ErrorKind::degenerate: return 2;
    case ErrorKind::type_misuse:
    case ErrorKind::invariant: return 3;
    }
    return 3;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bid-ask spread memory and multifractality analysis"};
    app.require_subcommand(1);
    RunConfig c;

    auto common = [&](CLI::App* sub, bool needs_input) {
        auto* in = sub->add_option("--input", c.input,
                                   "tick CSV, signal CSV, or synth:<kind>[:name=value,...]");
        if (needs_input)
            in->required();
        sub->add_option("--calendar", c.calendar, "trading sessions, HH:MM-HH:MM[,...]");
        sub->add_option("--delta-t", c.delta_t, "minutes per interval");
        sub->add_option("--q-grid", c.q_grid, "lo:hi:count or comma list");
        sub->add_option("--windows", c.windows, "log:count, log:lo:hi:count or comma list");
        sub->add_option("--fit-range", c.fit_range, "tmin:tmax");
        sub->add_flag("--crossover", c.crossover, "also fit two power-law regimes");
        sub->add_flag("--bridge-gaps", c.bridge_gaps, "join series across excluded intervals");
        sub->add_flag("--bidirectional", c.bidirectional, "add windows cut from the series end");
        sub->add_option("--detrend-order", c.detrend_order, "polynomial order (1 is linear)");
        sub->add_option("--seed", c.seed, "generator / shuffle seed");
        sub->add_option("--out", c.out, "output directory");
        sub->add_option("--series", c.series,
                        "series derived from tick input: raw_return, raw_volatility, "
                        "adjusted_return, adjusted_volatility");
        sub->add_option("--length", c.length, "length of synth: inputs");
        sub->add_option("--param", c.params, "generator parameter name=value");
        sub->add_flag("--strict", c.strict, "fail on the first malformed tick line");
        sub->add_flag("--sort-ticks", c.sort_ticks, "stable-sort out-of-order ticks");
    };

    auto* ingest = app.add_subcommand("ingest", "tick CSV to per-minute rescaled spread");
    common(ingest, true);
    auto* acf = app.add_subcommand("acf", "autocorrelation of return and volatility");
    common(acf, true);
    acf->add_option("--max-lag", c.max_lag, "largest lag in intervals");
    auto* dfa_cmd = app.add_subcommand("dfa", "detrended fluctuation analysis");
    common(dfa_cmd, true);
    auto* mfdfa_cmd = app.add_subcommand("mfdfa", "multifractal DFA and singularity spectrum");
    common(mfdfa_cmd, true);
    auto* synth = app.add_subcommand("synth", "write a synthetic series");
    common(synth, false);
    synth->add_option("--kind", c.kind,
                      "white_noise, fgn, binomial_cascade, piecewise_power_law, shuffle_surrogate");
    auto* surrogate = app.add_subcommand("surrogate", "shuffle a series");
    common(surrogate, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        validate(c);
        if (*ingest)
            cmd_ingest(c);
        else if (*acf)
            cmd_acf(c);
        else if (*dfa_cmd)
            cmd_dfa(c);
        else if (*mfdfa_cmd)
            cmd_mfdfa(c);
        else if (*synth)
            cmd_synth(c);
        else if (*surrogate)
            cmd_surrogate(c);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
