#pragma once

// Drivers behind the opdkit command-line tool. Each command writes its
// artifacts plus a manifest.json describing how it was run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "opdkit/analysis.hpp"
#include "opdkit/corpus.hpp"
#include "opdkit/enhance.hpp"
#include "opdkit/errors.hpp"
#include "opdkit/metrics.hpp"
#include "opdkit/opd.hpp"
#include "opdkit/parallel.hpp"
#include "opdkit/report.hpp"
#include "opdkit/self_test.hpp"
#include "opdkit/wav_io.hpp"

namespace opdkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kToolName = "opdkit";
inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kNumericalFailure = 2 };

struct RunOptions {
    std::size_t max_delay = 512;
    std::size_t workers = 1;
    fs::path out = ".";
    wav::SampleFormat wav_format = wav::SampleFormat::Float64;
    std::vector<std::string> argv;
};

/// "a:b:step" (inclusive range) or "a,b,c".
inline std::vector<double> parse_grid(const std::string& text) {
    const auto to_double = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw ValidationError("invalid grid value '" + s + "' in '" + text + "'");
        }
        if (used != s.size() || !std::isfinite(v)) throw ValidationError("invalid grid value '" + s + "' in '" + text + "'");
        return v;
    };
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string::npos) throw ValidationError("grid range must be start:stop:step, got '" + text + "'");
        const double start = to_double(text.substr(0, a));
        const double stop = to_double(text.substr(a + 1, b - a - 1));
        const double step = to_double(text.substr(b + 1));
        if (step <= 0.0 || stop < start) throw ValidationError("empty or descending grid range '" + text + "'");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) values.push_back(std::round((start + i * step) * 1e12) / 1e12);
    } else {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto comma = text.find(',', pos);
            const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (!item.empty()) values.push_back(to_double(item));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (values.empty()) throw ValidationError("grid '" + text + "' is empty");
    for (double v : values) {
        if (v < 0.0) throw ValidationError("grid values must be non-negative");
    }
    return values;
}

inline std::vector<double> default_dsa_grid() { return {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5}; }
inline std::vector<double> default_oa_grid() { return parse_grid("0:1.5:0.1"); }

inline json run_manifest(const std::string& command, const RunOptions& opts, json extra = json::object()) {
    json j{{"tool", kToolName},
           {"version", kVersion},
           {"command", command},
           {"argv", opts.argv},
           {"max_delay", opts.max_delay},
           {"workers", opts.workers},
           {"wav_format", wav::to_string(opts.wav_format)},
           {"delay_convention", "zero-pad-head"},
           {"amplitude_normalization", "none"},
           {"snr_convention", to_string(NoiseScaling::FullSignalPower)}};
    for (auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

inline json events_to_json(const std::vector<RegularizationEvent>& events, const std::string& utterance) {
    json out = json::array();
    for (const auto& e : events) {
        auto j = report::regularization_to_json(e);
        j["utterance_id"] = utterance;
        out.push_back(std::move(j));
    }
    return out;
}

inline json enhance_config_json(const EnhanceConfig& cfg) {
    return json{{"method", to_string(cfg.method)},
                {"frame_len", cfg.frame_len},
                {"hop", cfg.hop},
                {"oversubtraction", cfg.oversubtraction},
                {"mask_threshold_db", cfg.mask_threshold_db},
                {"noise_estimate_frames", cfg.noise_estimate_frames}};
}

inline Waveform enhanced_or_stub(const Utterance& u, const std::optional<EnhanceConfig>& cfg) {
    if (u.enhanced) return *u.enhanced;
    if (!cfg) throw ValidationError("utterance " + u.id + " has no enhanced signal and no --method was given");
    return enhance(add(u.speech, u.noise), u.speech, u.noise, *cfg);
}

// --- decompose ---------------------------------------------------------------

struct DecomposeInputs {
    std::string utterance_id = "utt";
    UtteranceTriplet triplet;
    std::optional<EnhanceConfig> enhance;
};

inline MetricsReport cmd_decompose(const DecomposeInputs& in, const RunOptions& opts) {
    UtteranceTriplet t = in.triplet;
    t.utterance_id = in.utterance_id;
    const Utterance u = load_utterance(t);
    const Waveform s_hat = enhanced_or_stub(u, in.enhance);

    const Decomposer decomposer(u.speech, u.noise, opts.max_delay);
    const Decomposition d = decomposer(s_hat);
    const MetricsReport m = compute_metrics(d);
    const Prop1Result cond = prop1_condition(s_hat, decomposer.observation());

    fs::create_directories(opts.out);
    const auto stem = opts.out / u.id;
    wav::write(stem.string() + ".target.wav", d.target, opts.wav_format);
    wav::write(stem.string() + ".enoise.wav", d.noise_error, opts.wav_format);
    wav::write(stem.string() + ".eartif.wav", d.artifact_error, opts.wav_format);

    json metrics = report::metrics_to_json(m);
    metrics["utterance_id"] = u.id;
    metrics["inner_s_hat_y"] = cond.inner_value;
    metrics["prop1_condition"] = cond.holds;
    metrics["max_delay"] = opts.max_delay;
    report::write_json(opts.out / "metrics.json", metrics);

    json extra{{"speech", t.speech_path.string()},
               {"noise", t.noise_path.string()},
               {"enhanced", t.enhanced_path ? json(t.enhanced_path->string()) : json(nullptr)},
               {"regularization_events", events_to_json(d.regularization_events, u.id)}};
    if (!t.enhanced_path && in.enhance) extra["enhance"] = enhance_config_json(*in.enhance);
    report::write_json(opts.out / "manifest.json", run_manifest("decompose", opts, extra));
    return m;
}

// --- sweeps ------------------------------------------------------------------

struct SweepOutcome {
    SweepResult result;
    std::vector<report::SummaryRow> summary;
    int exit_code = kSuccess;
};

namespace detail {

struct UtteranceOutcome {
    std::vector<SweepRow> rows;
    std::vector<RegularizationEvent> events;
    int severity = kSuccess;
};

inline SweepRow error_row(const std::string& id, const std::string& what) {
    SweepRow r;
    r.utterance_id = id;
    r.error = what;
    return r;
}

template <typename PerUtterance>
SweepOutcome run_sweep(const std::string& command, const fs::path& manifest, const std::vector<double>& grid,
                       const RunOptions& opts, const std::optional<EnhanceConfig>& cfg, PerUtterance&& per_utterance) {
    const auto triplets = read_manifest(manifest);
    std::vector<UtteranceOutcome> outcomes(triplets.size());
    parallel_for(triplets.size(), opts.workers, [&](std::size_t i) {
        auto& o = outcomes[i];
        const auto& id = triplets[i].utterance_id;
        try {
            const Utterance u = load_utterance(triplets[i]);
            const Decomposer decomposer(u.speech, u.noise, opts.max_delay);
            o.events = decomposer.regularization_events();
            SweepResult r = per_utterance(decomposer, enhanced_or_stub(u, cfg), id);
            o.rows = std::move(r.rows);
        } catch (const NumericalError& e) {
            o.rows = {error_row(id, std::string("numerical: ") + e.what())};
            o.severity = kNumericalFailure;
        } catch (const std::exception& e) {
            o.rows = {error_row(id, std::string("validation: ") + e.what())};
            o.severity = kValidationFailure;
        }
    });

    SweepOutcome out;
    out.result.aggregation = Aggregation::PerUtterance;
    json events = json::array();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto& o = outcomes[i];
        for (auto& r : o.rows) out.result.rows.push_back(std::move(r));
        for (auto& e : events_to_json(o.events, triplets[i].utterance_id)) events.push_back(std::move(e));
        out.exit_code = std::max(out.exit_code, o.severity);
    }
    out.summary = report::summarize(out.result.rows);

    fs::create_directories(opts.out);
    report::write_text(opts.out / "results.csv", report::sweep_csv(out.result.rows));
    report::write_text(opts.out / "summary.csv", report::summary_csv(out.summary));

    json extra{{"manifest", manifest.string()},
               {"grid", grid},
               {"aggregation", "mean-of-per-utterance-db"},
               {"utterances", triplets.size()},
               {"regularization_events", events},
               {"exit_code", out.exit_code}};
    if (cfg) extra["enhance"] = enhance_config_json(*cfg);
    report::write_json(opts.out / "manifest.json", run_manifest(command, opts, extra));
    return out;
}

inline std::vector<std::string> utterance_ids(const std::vector<SweepRow>& rows) {
    std::vector<std::string> ids;
    for (const auto& r : rows) {
        if (!r.error && std::find(ids.begin(), ids.end(), r.utterance_id) == ids.end()) ids.push_back(r.utterance_id);
    }
    return ids;
}

using MetricGetter = double (*)(const MetricsReport&);

struct MetricSpec {
    const char* name;
    MetricGetter get;
    double (*summary)(const report::SummaryRow&);
};

inline const std::vector<MetricSpec>& metric_specs() {
    static const std::vector<MetricSpec> specs{
        {"SDR", [](const MetricsReport& m) { return m.sdr_db; }, [](const report::SummaryRow& s) { return s.sdr_db; }},
        {"SNR", [](const MetricsReport& m) { return m.snr_db; }, [](const report::SummaryRow& s) { return s.snr_db; }},
        {"SAR", [](const MetricsReport& m) { return m.sar_db; }, [](const report::SummaryRow& s) { return s.sar_db; }},
    };
    return specs;
}

/// One panel per metric: faint per-utterance curves plus the corpus mean.
template <typename XOf, typename Keep>
std::vector<report::Panel> metric_panels(const SweepOutcome& out, const std::string& x_label, const std::string& suffix,
                                         XOf x_of, Keep keep) {
    std::vector<report::Panel> panels;
    const auto ids = utterance_ids(out.result.rows);
    for (const auto& spec : metric_specs()) {
        report::Panel panel{std::string(spec.name) + suffix, x_label, std::string(spec.name) + " [dB]", {}};
        for (const auto& id : ids) {
            report::Series s{id, {}, "#999999", 1.0, 0.5};
            for (const auto& r : out.result.rows) {
                if (!r.error && r.utterance_id == id && keep(r.omega_noise, r.omega_artif, r.omega_obs)) {
                    s.points.emplace_back(x_of(r.omega_noise, r.omega_artif, r.omega_obs), spec.get(r.metrics));
                }
            }
            panel.series.push_back(std::move(s));
        }
        report::Series mean{"corpus mean", {}, "#d62728", 2.5, 1.0};
        for (const auto& row : out.summary) {
            if (keep(row.omega_noise, row.omega_artif, row.omega_obs)) {
                mean.points.emplace_back(x_of(row.omega_noise, row.omega_artif, row.omega_obs), spec.summary(row));
            }
        }
        panel.series.push_back(std::move(mean));
        for (auto& s : panel.series) std::sort(s.points.begin(), s.points.end());
        panels.push_back(std::move(panel));
    }
    return panels;
}

} // namespace detail

inline SweepOutcome cmd_oa(const fs::path& manifest, const std::vector<double>& grid, const RunOptions& opts,
                           const std::optional<EnhanceConfig>& cfg = std::nullopt) {
    std::vector<OaPoint> points;
    for (double w : grid) points.push_back(OaPoint::make(w));
    auto out = detail::run_sweep("oa", manifest, grid, opts, cfg,
                                 [&](const Decomposer& dec, const Waveform& s_hat, const std::string& id) {
                                     return oa_sweep(dec, s_hat, points, id);
                                 });
    using O = std::optional<double>;
    const auto panels = detail::metric_panels(
        out, "omega_obs", " vs omega_obs", [](O, O, O obs) { return *obs; }, [](O, O, O obs) { return obs.has_value(); });
    report::write_text(opts.out / "oa_metrics.svg", report::render_svg(panels, 3));
    return out;
}

inline SweepOutcome cmd_dsa(const fs::path& manifest, const std::vector<double>& grid, const RunOptions& opts,
                            const std::optional<EnhanceConfig>& cfg = std::nullopt) {
    std::vector<DsaPoint> points;
    for (double wn : grid) {
        for (double wa : grid) points.push_back(DsaPoint::make(wn, wa));
    }
    auto out = detail::run_sweep("dsa", manifest, grid, opts, cfg,
                                 [&](const Decomposer& dec, const Waveform& s_hat, const std::string& id) {
                                     return dsa_sweep(dec, dec(s_hat), points, id);
                                 });
    using O = std::optional<double>;
    auto artif_slice = detail::metric_panels(
        out, "omega_artif (omega_noise = 1)", " vs omega_artif", [](O, O a, O) { return *a; },
        [](O n, O a, O) { return n && a && *n == 1.0; });
    auto noise_slice = detail::metric_panels(
        out, "omega_noise (omega_artif = 1)", " vs omega_noise", [](O n, O, O) { return *n; },
        [](O n, O a, O) { return n && a && *a == 1.0; });
    artif_slice.insert(artif_slice.end(), noise_slice.begin(), noise_slice.end());
    report::write_text(opts.out / "dsa_slices.svg", report::render_svg(artif_slice, 3));
    return out;
}

// --- mix ---------------------------------------------------------------------

struct MixOutcome {
    std::vector<UtteranceTriplet> entries;
    std::vector<double> measured_snr_db;
};

inline std::vector<fs::path> list_wavs(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Pairs every speech file with a seeded random noise file (and random
/// offset, looping short noise), scales the noise to the requested SNR and
/// writes speech, scaled noise and mixture plus a corpus manifest.
inline MixOutcome cmd_mix(const fs::path& speech_dir, const fs::path& noise_dir, double snr_db, std::uint64_t seed,
                          const RunOptions& opts) {
    const auto speech_files = list_wavs(speech_dir);
    const auto noise_files = list_wavs(noise_dir);
    if (speech_files.empty()) throw ValidationError("no .wav files in speech directory " + speech_dir.string());
    if (noise_files.empty()) throw ValidationError("no .wav files in noise directory " + noise_dir.string());

    fs::create_directories(opts.out);
    std::mt19937_64 rng(seed);
    MixOutcome out;
    json pairs = json::array();
    for (const auto& sp : speech_files) {
        const Waveform speech = wav::read(sp);
        const auto& np = noise_files[rng() % noise_files.size()];
        const Waveform noise_full = wav::read(np);
        if (noise_full.sample_rate() != speech.sample_rate()) {
            throw ValidationError("sample rate mismatch between " + sp.string() + " and " + np.string());
        }
        const std::size_t T = speech.size();
        const std::size_t offset = noise_full.size() > T ? rng() % (noise_full.size() - T + 1) : 0;
        std::vector<double> segment(T);
        for (std::size_t t = 0; t < T; ++t) segment[t] = noise_full[(offset + t) % noise_full.size()];
        const Mixture m = mix_at_snr(speech, Waveform(std::move(segment), speech.sample_rate()), MixtureSpec{snr_db});

        const std::string id = sp.stem().string();
        UtteranceTriplet t{id, opts.out / (id + ".speech.wav"), opts.out / (id + ".noise.wav"), std::nullopt,
                           opts.out / (id + ".mix.wav")};
        wav::write(t.speech_path, speech, opts.wav_format);
        wav::write(t.noise_path, m.scaled_noise, opts.wav_format);
        wav::write(*t.mixture_path, m.mixture, opts.wav_format);

        const double measured = 10.0 * std::log10(energy(speech) / energy(m.scaled_noise));
        out.measured_snr_db.push_back(measured);
        pairs.push_back(json{{"id", id},
                             {"speech_source", sp.string()},
                             {"noise_source", np.string()},
                             {"noise_offset", offset},
                             {"noise_gain", m.noise_gain},
                             {"measured_snr_db", measured}});
        out.entries.push_back(std::move(t));
    }
    write_manifest(opts.out / "corpus.jsonl", out.entries);
    report::write_json(opts.out / "manifest.json",
                       run_manifest("mix", opts,
                                    json{{"speech_dir", speech_dir.string()},
                                         {"noise_dir", noise_dir.string()},
                                         {"snr_db", snr_db},
                                         {"seed", seed},
                                         {"pairs", pairs}}));
    return out;
}

// --- enhance -----------------------------------------------------------------

/// Runs a stub enhancer over every utterance of a manifest and writes a new
/// manifest that points at the enhanced files.
inline std::vector<UtteranceTriplet> cmd_enhance(const fs::path& manifest, const EnhanceConfig& cfg, const RunOptions& opts) {
    auto triplets = read_manifest(manifest);
    fs::create_directories(opts.out);
    parallel_for(triplets.size(), opts.workers, [&](std::size_t i) {
        auto& t = triplets[i];
        t.enhanced_path.reset();
        const Utterance u = load_utterance(t);
        const Waveform y = t.mixture_path ? wav::read(*t.mixture_path) : add(u.speech, u.noise);
        require_same_shape(u.speech, y, ("utterance " + u.id + " speech/mixture").c_str());
        const fs::path path = opts.out / (u.id + ".enhanced.wav");
        wav::write(path, enhance(y, u.speech, u.noise, cfg), opts.wav_format);
        t.enhanced_path = path;
    });
    write_manifest(opts.out / "corpus.jsonl", triplets);
    report::write_json(opts.out / "manifest.json",
                       run_manifest("enhance", opts, json{{"manifest", manifest.string()}, {"enhance", enhance_config_json(cfg)}}));
    return triplets;
}

// --- self test ---------------------------------------------------------------

inline int cmd_self_test(std::size_t cases, std::uint64_t seed, std::size_t workers, std::ostream& os) {
    const PropertyReport report = run_property_suite(cases, seed, workers);
    os << report;
    os << (report.passed() ? "self-test passed\n" : "self-test FAILED\n");
    return report.passed() ? kSuccess : kNumericalFailure;
}

} // namespace opdkit::cli
