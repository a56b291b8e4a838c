#pragma once

// Classical single-channel enhancers used as stand-ins for SE(y): spectral
// subtraction, an oracle Wiener gain and an ideal binary mask, all run
// through a square-root-Hann STFT with exact overlap-add reconstruction.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "opdkit/errors.hpp"
#include "opdkit/fft.hpp"
#include "opdkit/waveform.hpp"

namespace opdkit {

enum class EnhanceMethod { SpectralSubtraction, OracleWiener, IdealBinaryMask };

inline EnhanceMethod parse_enhance_method(const std::string& name) {
    if (name == "spectral-subtraction") return EnhanceMethod::SpectralSubtraction;
    if (name == "oracle-wiener") return EnhanceMethod::OracleWiener;
    if (name == "ideal-binary-mask") return EnhanceMethod::IdealBinaryMask;
    throw ValidationError("unknown enhancement method '" + name +
                          "' (expected spectral-subtraction, oracle-wiener or ideal-binary-mask)");
}

inline const char* to_string(EnhanceMethod m) {
    switch (m) {
    case EnhanceMethod::SpectralSubtraction: return "spectral-subtraction";
    case EnhanceMethod::OracleWiener: return "oracle-wiener";
    case EnhanceMethod::IdealBinaryMask: return "ideal-binary-mask";
    }
    return "unknown";
}

struct EnhanceConfig {
    EnhanceMethod method = EnhanceMethod::SpectralSubtraction;
    std::size_t frame_len = 512;
    std::size_t hop = 256;
    double oversubtraction = 1.5;
    double mask_threshold_db = 0.0;
    /// Leading frames of y treated as noise-only when spectral subtraction
    /// runs without a noise reference.
    std::size_t noise_estimate_frames = 6;
};

/// Short-time Fourier transform with periodic square-root Hann analysis and
/// synthesis windows. The signal is padded with frame_len − hop zeros at the
/// head so every original sample is covered by a full set of frames.
class Stft {
public:
    Stft(std::size_t frame_len, std::size_t hop) : frame_len_(frame_len), hop_(hop), fft_(checked(frame_len, hop)) {
        window_.resize(frame_len_);
        for (std::size_t i = 0; i < frame_len_; ++i) {
            const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                     static_cast<double>(frame_len_));
            window_[i] = std::sqrt(hann);
        }
        // w² summed over all frame shifts must be constant.
        std::vector<double> overlap(hop_, 0.0);
        for (std::size_t i = 0; i < frame_len_; ++i) overlap[i % hop_] += window_[i] * window_[i];
        const auto [lo, hi] = std::minmax_element(overlap.begin(), overlap.end());
        if (*lo <= 0.0 || *hi - *lo > 1e-10 * *hi) {
            throw ValidationError("STFT configuration is not COLA (frame " + std::to_string(frame_len_) + ", hop " +
                                  std::to_string(hop_) + ")");
        }
        overlap_gain_ = *hi;
    }

    std::size_t frame_len() const noexcept { return frame_len_; }
    std::size_t hop() const noexcept { return hop_; }
    std::size_t bins() const noexcept { return fft_.bins(); }

    std::size_t frame_count(std::size_t length) const { return (head_pad() + length - 1) / hop_ + 1; }

    std::vector<Spectrum> analyze(std::span<const double> x) const {
        const std::size_t frames = frame_count(x.size());
        std::vector<Spectrum> out;
        out.reserve(frames);
        std::vector<double> buf(frame_len_);
        for (std::size_t m = 0; m < frames; ++m) {
            for (std::size_t i = 0; i < frame_len_; ++i) {
                const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(m * hop_ + i) - static_cast<std::ptrdiff_t>(head_pad());
                const bool inside = t >= 0 && static_cast<std::size_t>(t) < x.size();
                buf[i] = inside ? x[static_cast<std::size_t>(t)] * window_[i] : 0.0;
            }
            out.push_back(fft_.forward(buf));
        }
        return out;
    }

    std::vector<double> synthesize(const std::vector<Spectrum>& frames, std::size_t length) const {
        if (frames.size() != frame_count(length)) throw ValidationError("STFT frame count does not match length");
        std::vector<double> out(length, 0.0);
        for (std::size_t m = 0; m < frames.size(); ++m) {
            const auto frame = fft_.inverse(frames[m]);
            for (std::size_t i = 0; i < frame_len_; ++i) {
                const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(m * hop_ + i) - static_cast<std::ptrdiff_t>(head_pad());
                if (t >= 0 && static_cast<std::size_t>(t) < length) out[static_cast<std::size_t>(t)] += frame[i] * window_[i];
            }
        }
        for (double& v : out) v /= overlap_gain_;
        return out;
    }

private:
    static std::size_t checked(std::size_t frame_len, std::size_t hop) {
        if (frame_len < 2 || (frame_len & (frame_len - 1)) != 0) {
            throw ValidationError("frame length must be a power of two, got " + std::to_string(frame_len));
        }
        if (hop == 0 || hop > frame_len) throw ValidationError("hop must be in [1, frame_len]");
        return frame_len;
    }

    std::size_t head_pad() const noexcept { return frame_len_ - hop_; }

    std::size_t frame_len_;
    std::size_t hop_;
    RealFft fft_;
    std::vector<double> window_;
    double overlap_gain_ = 1.0;
};

/// Per-bin real gain applied to frame m, bin k of the mixture STFT.
using GainFunction = std::function<double(std::size_t frame, std::size_t bin)>;

inline Waveform apply_gains(const Waveform& y, const Stft& stft, const GainFunction& gain) {
    auto frames = stft.analyze(y.samples());
    for (std::size_t m = 0; m < frames.size(); ++m) {
        for (std::size_t k = 0; k < frames[m].size(); ++k) frames[m][k] *= gain(m, k);
    }
    return Waveform(stft.synthesize(frames, y.size()), y.sample_rate());
}

inline Waveform enhance(const Waveform& y, const std::optional<Waveform>& speech, const std::optional<Waveform>& noise,
                        const EnhanceConfig& cfg) {
    const Stft stft(cfg.frame_len, cfg.hop);
    if (speech) require_same_shape(y, *speech, "enhance");
    if (noise) require_same_shape(y, *noise, "enhance");
    const auto Y = stft.analyze(y.samples());

    switch (cfg.method) {
    case EnhanceMethod::SpectralSubtraction: {
        if (!std::isfinite(cfg.oversubtraction) || cfg.oversubtraction < 0.0) {
            throw ValidationError("oversubtraction must be finite and non-negative");
        }
        std::vector<double> noise_psd(stft.bins(), 0.0);
        const auto average = [&](const std::vector<Spectrum>& frames, std::size_t count) {
            if (count == 0) throw ValidationError("spectral subtraction: empty noise estimate");
            for (std::size_t m = 0; m < count; ++m) {
                for (std::size_t k = 0; k < noise_psd.size(); ++k) noise_psd[k] += std::norm(frames[m][k]);
            }
            for (double& p : noise_psd) p /= static_cast<double>(count);
        };
        if (noise) {
            const auto N = stft.analyze(noise->samples());
            average(N, N.size());
        } else {
            if (cfg.noise_estimate_frames == 0) {
                throw ValidationError("spectral subtraction needs a noise reference or a noise-estimate segment");
            }
            average(Y, std::min(cfg.noise_estimate_frames, Y.size()));
        }
        return apply_gains(y, stft, [&](std::size_t m, std::size_t k) {
            const double power = std::norm(Y[m][k]);
            if (power <= 0.0) return 0.0;
            return std::sqrt(std::max(0.0, 1.0 - cfg.oversubtraction * noise_psd[k] / power));
        });
    }
    case EnhanceMethod::OracleWiener: {
        if (!speech || !noise) throw ValidationError("oracle-wiener requires speech and noise references");
        const auto S = stft.analyze(speech->samples());
        const auto N = stft.analyze(noise->samples());
        return apply_gains(y, stft, [&](std::size_t m, std::size_t k) {
            const double ps = std::norm(S[m][k]);
            const double pn = std::norm(N[m][k]);
            return ps + pn > 0.0 ? ps / (ps + pn) : 1.0;
        });
    }
    case EnhanceMethod::IdealBinaryMask: {
        if (!speech || !noise) throw ValidationError("ideal-binary-mask requires speech and noise references");
        const auto S = stft.analyze(speech->samples());
        const auto N = stft.analyze(noise->samples());
        const double threshold = std::pow(10.0, cfg.mask_threshold_db / 10.0);
        return apply_gains(y, stft, [&](std::size_t m, std::size_t k) {
            const double ps = std::norm(S[m][k]);
            const double pn = std::norm(N[m][k]);
            return (pn == 0.0 || ps > threshold * pn) ? 1.0 : 0.0;
        });
    }
    }
    throw ValidationError("unhandled enhancement method");
}

} // namespace opdkit
