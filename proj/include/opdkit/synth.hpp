#pragma once

// Seeded synthetic signals for property tests and demo corpora.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "opdkit/waveform.hpp"

namespace opdkit::synth {

using Rng = std::mt19937_64;

/// Gaussian noise through a one-pole lowpass x[t] = pole·x[t−1] + g[t].
inline std::vector<double> filtered_gaussian(std::size_t length, Rng& rng, double pole = 0.9, double gain = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> out(length);
    double state = 0.0;
    for (auto& v : out) {
        state = pole * state + gauss(rng);
        v = gain * state;
    }
    return out;
}

/// Causal FIR filter truncated to the input length.
inline std::vector<double> fir(const std::vector<double>& x, const std::vector<double>& taps) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
        for (std::size_t k = 0; k < taps.size() && k <= t; ++k) out[t] += taps[k] * x[t - k];
    }
    return out;
}

/// Voiced-speech-like test signal: a few harmonics of a slowly gliding f0
/// under a syllable-rate envelope, with a little breath noise.
inline Waveform speech_like(std::size_t length, int sample_rate, Rng& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double fs = sample_rate;
    const double f0 = 100.0 + 120.0 * uni(rng);
    const double glide = (uni(rng) - 0.5) * 0.4;
    const double syllable_rate = 3.0 + 3.0 * uni(rng);
    const double env_phase = 2.0 * std::numbers::pi * uni(rng);
    const int harmonics = 8;
    std::vector<double> amps(harmonics);
    for (int h = 0; h < harmonics; ++h) amps[h] = (0.5 + 0.5 * uni(rng)) / (1.0 + h);

    const auto breath = filtered_gaussian(length, rng, 0.3, 0.01);
    std::vector<double> out(length);
    double phase = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        const double time = static_cast<double>(t) / fs;
        const double f = f0 * (1.0 + glide * time);
        phase += 2.0 * std::numbers::pi * f / fs;
        double v = 0.0;
        for (int h = 0; h < harmonics; ++h) v += amps[h] * std::sin((h + 1) * phase);
        const double env = std::max(0.0, std::sin(2.0 * std::numbers::pi * syllable_rate * time + env_phase));
        out[t] = 0.2 * env * v + breath[t];
    }
    return Waveform(std::move(out), sample_rate);
}

/// Stationary colored noise with a random spectral tilt.
inline Waveform noise_like(std::size_t length, int sample_rate, Rng& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    return Waveform(filtered_gaussian(length, rng, 0.5 + 0.45 * uni(rng), 0.05), sample_rate);
}

/// One randomized decomposition problem: references s, n and an "enhanced"
/// signal mixing filtered speech, leaked noise and an independent artifact.
struct OracleCase {
    std::uint64_t seed = 0;
    std::size_t max_delay = 1;
    Waveform speech;
    Waveform noise;
    Waveform enhanced;
};

inline constexpr int kOracleSampleRate = 16000;

inline OracleCase make_oracle_case(std::uint64_t seed, std::size_t max_delay, std::size_t max_length = 1024) {
    Rng rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const std::size_t min_length = std::max<std::size_t>(64, max_delay);
    const std::size_t T = min_length + static_cast<std::size_t>(uni(rng) * static_cast<double>(max_length - min_length));

    auto s = filtered_gaussian(T, rng);
    auto n = filtered_gaussian(T, rng, 0.9, 0.3 + 1.2 * uni(rng));
    auto artifact = filtered_gaussian(T, rng);

    std::vector<double> speech_taps(std::max<std::size_t>(1, max_delay));
    speech_taps[0] = 0.7 + 0.3 * uni(rng);
    for (std::size_t k = 1; k < speech_taps.size(); ++k) speech_taps[k] = 0.2 * (uni(rng) - 0.5);
    const double leak = 0.4 * (uni(rng) - 0.5);
    const double artifact_gain = 0.05 + 0.3 * uni(rng);
    const double nonlinear = 0.1 * uni(rng);

    const auto shaped = fir(s, speech_taps);
    std::vector<double> enhanced(T);
    for (std::size_t t = 0; t < T; ++t) {
        enhanced[t] = shaped[t] + leak * n[t] + artifact_gain * artifact[t] + nonlinear * std::tanh(s[t]);
    }
    return OracleCase{seed, max_delay, Waveform(std::move(s), kOracleSampleRate),
                      Waveform(std::move(n), kOracleSampleRate), Waveform(std::move(enhanced), kOracleSampleRate)};
}

} // namespace opdkit::synth
