// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "opdkit/commands.hpp"
#include "opdkit/dense_oracle.hpp"
#include "opdkit/synth.hpp"
#include "../test_support.hpp"

using namespace opdkit;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kCases = 200;
constexpr std::uint64_t kSeed = 0xC0FFEE;
constexpr std::size_t kDelays[] = {1, 4, 16};

struct Criterion {
    int id;
    std::string name;
    bool passed;
    std::string detail;
};

std::vector<Criterion> results;

void report(int id, const std::string& name, bool passed, const std::string& detail) {
    results.push_back({id, name, passed, detail});
    std::printf("[%s] %d. %s: %s\n", passed ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct PreparedCase {
    synth::OracleCase c;
    std::unique_ptr<Decomposer> dec;
    Decomposition d;
};

double max_corr(const Waveform& e, const std::vector<Waveform>& refs, std::size_t L) {
    double worst = 0.0;
    const double ne = norm(e);
    if (ne == 0.0) return 0.0;
    for (const auto& r : refs) {
        for (std::size_t tau = 0; tau < L; ++tau) {
            const auto d = delayed(r, tau);
            worst = std::max(worst, std::abs(inner(e, d)) / (ne * norm(d)));
        }
    }
    return worst;
}

void randomized_criteria() {
    std::vector<PreparedCase> cases;
    cases.reserve(kCases);

    // 1. Reconstruction
    const auto t0 = std::chrono::steady_clock::now();
    double worst_recon = 0.0;
    for (std::size_t i = 0; i < kCases; ++i) {
        auto c = synth::make_oracle_case(kSeed + i, kDelays[i % 3]);
        auto dec = std::make_unique<Decomposer>(c.speech, c.noise, c.max_delay);
        auto d = (*dec)(c.enhanced);
        worst_recon = std::max(worst_recon, relative_error(recompose(d), c.enhanced));
        cases.push_back({std::move(c), std::move(dec), std::move(d)});
    }
    const double recon_time = seconds_since(t0);
    report(1, "Reconstruction", worst_recon <= 1e-10 && recon_time <= 30.0,
           fmt("max rel err %.3e (tol 1e-10), %.2f s (limit 30 s)", worst_recon, recon_time));

    // 2. Oracle equivalence
    double worst_dense = 0.0;
    for (const auto& pc : cases) {
        const auto& c = pc.c;
        worst_dense = std::max(worst_dense, relative_error(pc.d.target, project_dense_oracle({c.speech}, c.max_delay, c.enhanced)));
        worst_dense = std::max(worst_dense, relative_error(pc.d.projected(),
                                                           project_dense_oracle({c.speech, c.noise}, c.max_delay, c.enhanced)));
    }
    report(2, "Oracle equivalence (fast vs dense projection)", worst_dense <= 1e-8, fmt("max rel err %.3e (tol 1e-8)", worst_dense));

    // 3. Orthogonality
    double worst_orth = 0.0;
    for (const auto& pc : cases) {
        worst_orth = std::max(worst_orth, max_corr(pc.d.artifact_error, {pc.c.speech, pc.c.noise}, pc.c.max_delay));
        worst_orth = std::max(worst_orth, max_corr(pc.d.noise_error, {pc.c.speech}, pc.c.max_delay));
    }
    report(3, "Orthogonality of error components", worst_orth <= 1e-8,
           fmt("max normalized inner product %.3e (tol 1e-8)", worst_orth));

    // 4, 5. Observation adding
    std::size_t condition_cases = 0, monotone_violations = 0;
    double worst_sari = 0.0, worst_invariance = 0.0;
    for (const auto& pc : cases) {
        const auto y = pc.dec->observation();
        const auto base = compute_metrics(pc.d);
        const bool condition = prop1_condition(pc.c.enhanced, y).holds;
        condition_cases += condition;
        double previous = base.sar_db;
        for (int k = 1; k <= 15; ++k) {
            const double w = 0.1 * k;
            const auto dw = (*pc.dec)(oa_apply(pc.c.enhanced, y, OaPoint::make(w)));
            worst_invariance = std::max(worst_invariance, relative_error(dw.artifact_error, pc.d.artifact_error));
            const auto mw = compute_metrics(dw);
            if (condition) {
                if (!(mw.sar_db > previous)) ++monotone_violations;
                previous = mw.sar_db;
                worst_sari = std::max(worst_sari, std::abs(sar_improvement_closed_form(pc.d, y, w) - (mw.sar_db - base.sar_db)));
            }
        }
    }
    report(4, "SAR strictly increasing under observation adding, closed-form SARi",
           condition_cases > 0 && monotone_violations == 0 && worst_sari <= 1e-6,
           fmt("%.0f cases with <s_hat,y> > 0, %.0f monotonicity violations, max |SARi diff| %.3e dB (tol 1e-6)",
               static_cast<double>(condition_cases), static_cast<double>(monotone_violations), worst_sari));
    report(5, "OA artifact invariance", worst_invariance <= 1e-8, fmt("max rel err %.3e (tol 1e-8)", worst_invariance));

    // 6. DSA linearity and SNR law
    double worst_linear = 0.0, worst_snr = 0.0;
    for (const auto& pc : cases) {
        const auto base = compute_metrics(pc.d);
        for (double wn : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0}) {
            for (double wa : {0.0, 0.5, 1.0, 1.5}) {
                const auto dw = (*pc.dec)(dsa_synthesize(pc.d, DsaPoint::make(wn, wa)));
                worst_linear = std::max({worst_linear, relative_error(dw.target, pc.d.target),
                                         norm(subtract(dw.noise_error, scale(pc.d.noise_error, wn))) / norm(pc.d.noise_error),
                                         norm(subtract(dw.artifact_error, scale(pc.d.artifact_error, wa))) /
                                             norm(pc.d.artifact_error)});
                if (wa == 1.0 && (wn == 0.25 || wn == 0.5 || wn == 2.0)) {
                    worst_snr = std::max(worst_snr, std::abs(compute_metrics(dw).snr_db - base.snr_db + 20.0 * std::log10(wn)));
                }
            }
        }
    }
    report(6, "DSA linearity and SNR law", worst_linear <= 1e-8 && worst_snr <= 1e-6,
           fmt("max component rel err %.3e (tol 1e-8), max SNR shift err %.3e dB (tol 1e-6)", worst_linear, worst_snr));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool non_increasing_after_peak(const std::vector<double>& v) {
    const auto peak = std::max_element(v.begin(), v.end()) - v.begin();
    for (auto i = peak + 1; i < static_cast<std::ptrdiff_t>(v.size()); ++i) {
        if (v[i] > v[i - 1]) return false;
    }
    return true;
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) return false;
    }
    return true;
}

void figure_shape_criterion() {
    const auto t0 = std::chrono::steady_clock::now();
    opdkit::testing::TempDir dir;
    fs::create_directories(dir / "speech");
    fs::create_directories(dir / "noise");
    synth::Rng rng(kSeed);
    constexpr int kRate = 16000;
    constexpr std::size_t kLength = 16000;
    for (int i = 0; i < 20; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "utt%02d.wav", i);
        wav::write(dir / "speech" / name, synth::speech_like(kLength, kRate, rng), wav::SampleFormat::Float64);
    }
    for (int i = 0; i < 4; ++i) {
        wav::write(dir / "noise" / ("noise" + std::to_string(i) + ".wav"), synth::noise_like(3 * kLength, kRate, rng),
                   wav::SampleFormat::Float64);
    }

    cli::RunOptions opts;
    opts.workers = std::max(1u, std::thread::hardware_concurrency());
    opts.out = dir / "mix";
    cli::cmd_mix(dir / "speech", dir / "noise", 0.0, 7, opts);
    opts.out = dir / "enh";
    EnhanceConfig cfg; // spectral subtraction, 512/256 sqrt-Hann
    cli::cmd_enhance(dir / "mix" / "corpus.jsonl", cfg, opts);

    const auto grid = cli::default_oa_grid();
    opts.out = dir / "oa1";
    const auto out = cli::cmd_oa(dir / "enh" / "corpus.jsonl", grid, opts);
    opts.out = dir / "oa2";
    cli::cmd_oa(dir / "enh" / "corpus.jsonl", grid, opts);
    const double elapsed = seconds_since(t0);

    std::vector<double> sdr, snr, sar;
    for (const auto& s : out.summary) {
        sdr.push_back(s.sdr_db);
        snr.push_back(s.snr_db);
        sar.push_back(s.sar_db);
    }
    std::map<std::string, std::vector<double>> per_utt;
    std::map<std::string, bool> condition;
    for (const auto& r : out.result.rows) {
        if (r.error) continue;
        per_utt[r.utterance_id].push_back(r.metrics.sar_db);
        condition[r.utterance_id] = r.inner_s_hat_y > 0.0;
    }
    std::size_t utt_monotone = 0, utt_condition = 0;
    for (const auto& [id, v] : per_utt) {
        if (!condition[id]) continue;
        ++utt_condition;
        utt_monotone += strictly_increasing(v);
    }

    const bool deterministic = slurp(dir / "oa1" / "results.csv") == slurp(dir / "oa2" / "results.csv") &&
                               slurp(dir / "oa1" / "summary.csv") == slurp(dir / "oa2" / "summary.csv") &&
                               slurp(dir / "oa1" / "oa_metrics.svg") == slurp(dir / "oa2" / "oa_metrics.svg") &&
                               fs::file_size(dir / "oa1" / "oa_metrics.svg") > 0;
    const bool rows_ok = out.exit_code == cli::kSuccess && out.result.rows.size() == 20 * grid.size() &&
                         out.summary.size() == grid.size();

    const bool ok = rows_ok && deterministic && non_increasing_after_peak(sdr) && non_increasing_after_peak(snr) &&
                    strictly_increasing(sar) && utt_monotone == utt_condition && utt_condition > 0 && elapsed <= 120.0;
    std::ostringstream detail;
    detail.precision(4);
    detail << "mean SDR " << sdr.front() << "->" << sdr.back() << " dB (peak-unimodal " << non_increasing_after_peak(sdr)
           << "), mean SNR " << snr.front() << "->" << snr.back() << " dB (peak-unimodal " << non_increasing_after_peak(snr)
           << "), mean SAR " << sar.front() << "->" << sar.back() << " dB (increasing " << strictly_increasing(sar)
           << "), per-utterance SAR increasing " << utt_monotone << "/" << utt_condition << ", deterministic "
           << deterministic << ", rows ok " << rows_ok << ", " << elapsed << " s (limit 120 s)";
    report(7, "OA sweep shape on 20-utterance spectral-subtraction corpus", ok, detail.str());
}

void hand_worked_criterion() {
    using namespace opdkit::testing;
    const RunningExample ex;
    const auto d = decompose(ex.enhanced, ex.speech, ex.noise, 1);
    const auto m = compute_metrics(d);
    const double sari = sar_improvement_closed_form(d, ex.observation, 0.5);
    const double err = std::max({std::abs(m.sar_db - kRunningSarDb), std::abs(m.snr_db - kRunningSnrDb),
                                 std::abs(m.sdr_db - kRunningSdrDb), std::abs(sari - kRunningSariHalfDb)});
    std::ostringstream detail;
    detail.precision(6);
    detail << std::fixed << "SAR " << m.sar_db << ", SNR " << m.snr_db << ", SDR " << m.sdr_db << ", SARi(0.5) " << sari
           << " dB; max deviation from oracle " << std::scientific << err << " dB (tol 1e-3)";
    report(8, "Hand-worked 4-sample example", err <= 1e-3, detail.str());
}

} // namespace

int main() {
    randomized_criteria();
    figure_shape_criterion();
    hand_worked_criterion();
    const auto failed = std::count_if(results.begin(), results.end(), [](const auto& c) { return !c.passed; });
    std::printf("%zu/%zu acceptance criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
}
