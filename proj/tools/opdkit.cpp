// opdkit: orthogonal-projection error decomposition of enhanced speech.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "opdkit/commands.hpp"

namespace {

using namespace opdkit;
namespace fs = std::filesystem;

struct Args {
    std::size_t max_delay = 512;
    std::size_t workers = 1;
    std::string out = "out";
    std::string wav_format = "float64";
    std::string grid;
    std::string method;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    std::size_t frame_len = 512;
    std::size_t hop = 256;
    double oversubtraction = 1.5;
    double mask_threshold_db = 0.0;

    std::string manifest;
    std::string speech;
    std::string noise;
    std::string enhanced;
    std::string id = "utt";
    std::string speech_dir;
    std::string noise_dir;

    bool self_test = false;
    std::size_t cases = 200;
};

void add_common(CLI::App* app, Args& a) {
    app->add_option("-L,--max-delay", a.max_delay, "Number of delay taps L")->check(CLI::PositiveNumber);
    app->add_option("--workers", a.workers, "Worker threads (utterance-level)")->check(CLI::PositiveNumber);
    app->add_option("--out", a.out, "Output directory");
    app->add_option("--wav-format", a.wav_format, "Output WAV format: pcm16, float32, float64");
}

void add_enhance_options(CLI::App* app, Args& a) {
    app->add_option("--method", a.method, "Stub enhancer: spectral-subtraction, oracle-wiener, ideal-binary-mask");
    app->add_option("--frame-len", a.frame_len, "STFT frame length (power of two)");
    app->add_option("--hop", a.hop, "STFT hop");
    app->add_option("--oversubtraction", a.oversubtraction, "Spectral subtraction factor");
    app->add_option("--mask-threshold-db", a.mask_threshold_db, "Binary mask local SNR threshold");
}

std::optional<EnhanceConfig> enhance_config(const Args& a) {
    if (a.method.empty()) return std::nullopt;
    EnhanceConfig cfg;
    cfg.method = parse_enhance_method(a.method);
    cfg.frame_len = a.frame_len;
    cfg.hop = a.hop;
    cfg.oversubtraction = a.oversubtraction;
    cfg.mask_threshold_db = a.mask_threshold_db;
    return cfg;
}

cli::RunOptions run_options(const Args& a, int argc, char** argv) {
    cli::RunOptions o;
    o.max_delay = a.max_delay;
    o.workers = a.workers;
    o.out = a.out;
    o.wav_format = wav::parse_sample_format(a.wav_format);
    o.argv.assign(argv, argv + argc);
    return o;
}

void print_summary(const cli::SweepOutcome& out) {
    std::cout << report::summary_csv(out.summary);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthogonal projection decomposition of speech-enhancement errors"};
    app.set_version_flag("--version", std::string(cli::kVersion));
    Args a;
    app.add_flag("--self-test", a.self_test, "Run the randomized property suite and exit");
    app.add_option("--cases", a.cases, "Self-test case count")->check(CLI::PositiveNumber);
    app.add_option("--seed", a.seed, "Self-test seed");
    app.add_option("--workers", a.workers, "Self-test worker threads")->check(CLI::PositiveNumber);

    auto* decompose = app.add_subcommand("decompose", "Decompose one enhanced signal into target/noise/artifact");
    add_common(decompose, a);
    add_enhance_options(decompose, a);
    decompose->add_option("--speech", a.speech, "Reference speech WAV")->required();
    decompose->add_option("--noise", a.noise, "Reference noise WAV")->required();
    decompose->add_option("--enhanced", a.enhanced, "Enhanced WAV (or use --method)");
    decompose->add_option("--id", a.id, "Utterance id used for output file names");

    auto* dsa = app.add_subcommand("dsa", "Direct scaling analysis over a corpus");
    add_common(dsa, a);
    add_enhance_options(dsa, a);
    dsa->add_option("manifest", a.manifest, "Corpus manifest (JSON lines)")->required();
    dsa->add_option("--grid", a.grid, "Weights for both axes: start:stop:step or a,b,c");

    auto* oa = app.add_subcommand("oa", "Observation adding sweep over a corpus");
    add_common(oa, a);
    add_enhance_options(oa, a);
    oa->add_option("manifest", a.manifest, "Corpus manifest (JSON lines)")->required();
    oa->add_option("--grid", a.grid, "omega_obs values: start:stop:step or a,b,c");

    auto* mix = app.add_subcommand("mix", "Mix speech and noise directories at a target SNR");
    add_common(mix, a);
    mix->add_option("speech_dir", a.speech_dir)->required();
    mix->add_option("noise_dir", a.noise_dir)->required();
    mix->add_option("--snr", a.snr_db, "Target SNR in dB (full-signal power)");
    mix->add_option("--seed", a.seed, "Pairing seed");

    auto* enh = app.add_subcommand("enhance", "Run a stub enhancer over a corpus");
    add_common(enh, a);
    add_enhance_options(enh, a);
    enh->add_option("manifest", a.manifest, "Corpus manifest (JSON lines)")->required();

    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kSuccess : cli::kValidationFailure;
    }

    try {
        if (a.self_test) return cli::cmd_self_test(a.cases, a.seed, a.workers, std::cout);

        if (*decompose) {
            cli::DecomposeInputs in;
            in.utterance_id = a.id;
            in.triplet.speech_path = a.speech;
            in.triplet.noise_path = a.noise;
            if (!a.enhanced.empty()) in.triplet.enhanced_path = fs::path(a.enhanced);
            in.enhance = enhance_config(a);
            const auto m = cli::cmd_decompose(in, run_options(a, argc, argv));
            std::cout << report::metrics_to_json(m).dump(2) << '\n';
            return cli::kSuccess;
        }
        if (*dsa) {
            const auto grid = a.grid.empty() ? cli::default_dsa_grid() : cli::parse_grid(a.grid);
            const auto out = cli::cmd_dsa(a.manifest, grid, run_options(a, argc, argv), enhance_config(a));
            print_summary(out);
            return out.exit_code;
        }
        if (*oa) {
            const auto grid = a.grid.empty() ? cli::default_oa_grid() : cli::parse_grid(a.grid);
            const auto out = cli::cmd_oa(a.manifest, grid, run_options(a, argc, argv), enhance_config(a));
            print_summary(out);
            return out.exit_code;
        }
        if (*mix) {
            const auto out = cli::cmd_mix(a.speech_dir, a.noise_dir, a.snr_db, a.seed, run_options(a, argc, argv));
            for (std::size_t i = 0; i < out.entries.size(); ++i) {
                std::cout << out.entries[i].utterance_id << " " << report::format_db(out.measured_snr_db[i]) << " dB\n";
            }
            return cli::kSuccess;
        }
        if (*enh) {
            const auto cfg = enhance_config(a);
            if (!cfg) throw ValidationError("enhance requires --method");
            const auto triplets = cli::cmd_enhance(a.manifest, *cfg, run_options(a, argc, argv));
            std::cout << "enhanced " << triplets.size() << " utterances\n";
            return cli::kSuccess;
        }
        std::cout << app.help();
        return cli::kValidationFailure;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return cli::kNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kValidationFailure;
    }
}
