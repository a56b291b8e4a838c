#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opdkit/errors.hpp"

namespace opdkit {

/// Mono real-valued signal with a sample rate. Samples are always double
/// precision, whatever the on-disk format was. Immutable once constructed.
class Waveform {
public:
    Waveform(std::vector<double> samples, int sample_rate)
        : samples_(std::move(samples)), sample_rate_(sample_rate) {
        if (samples_.empty()) {
            throw ValidationError("waveform must contain at least one sample");
        }
        if (sample_rate_ <= 0) {
            throw ValidationError("sample rate must be positive, got " + std::to_string(sample_rate_));
        }
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            if (!std::isfinite(samples_[i])) {
                throw ValidationError("non-finite sample at index " + std::to_string(i));
            }
        }
    }

    static Waveform zeros(std::size_t length, int sample_rate) {
        return Waveform(std::vector<double>(length, 0.0), sample_rate);
    }

    std::size_t size() const noexcept { return samples_.size(); }
    int sample_rate() const noexcept { return sample_rate_; }
    std::span<const double> samples() const noexcept { return samples_; }
    double operator[](std::size_t i) const noexcept { return samples_[i]; }

    const std::vector<double>& vector() const noexcept { return samples_; }

    friend bool operator==(const Waveform&, const Waveform&) = default;

private:
    std::vector<double> samples_;
    int sample_rate_;
};

inline void require_same_shape(const Waveform& a, const Waveform& b, const char* what) {
    if (a.size() != b.size()) {
        throw ValidationError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()) + ")");
    }
    if (a.sample_rate() != b.sample_rate()) {
        throw ValidationError(std::string(what) + ": sample rate mismatch (" +
                              std::to_string(a.sample_rate()) + " vs " +
                              std::to_string(b.sample_rate()) + ")");
    }
}

inline Waveform add(const Waveform& a, const Waveform& b) {
    require_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return Waveform(std::move(out), a.sample_rate());
}

inline Waveform subtract(const Waveform& a, const Waveform& b) {
    require_same_shape(a, b, "subtract");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
    return Waveform(std::move(out), a.sample_rate());
}

inline Waveform scale(const Waveform& a, double c) {
    if (!std::isfinite(c)) throw ValidationError("scale factor must be finite");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * a[i];
    return Waveform(std::move(out), a.sample_rate());
}

/// a + c * b
inline Waveform add_scaled(const Waveform& a, const Waveform& b, double c) {
    require_same_shape(a, b, "add_scaled");
    if (!std::isfinite(c)) throw ValidationError("scale factor must be finite");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + c * b[i];
    return Waveform(std::move(out), a.sample_rate());
}

inline double inner(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("inner: length mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double inner(const Waveform& a, const Waveform& b) {
    if (a.size() != b.size()) {
        throw ValidationError("inner: length mismatch (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
    return inner(a.samples(), b.samples());
}

inline double energy(const Waveform& a) { return inner(a, a); }

inline double norm(const Waveform& a) { return std::sqrt(energy(a)); }

/// ‖a − b‖ / ‖b‖, or ‖a − b‖ when b is the zero signal.
inline double relative_error(const Waveform& a, const Waveform& b) {
    const double diff = norm(subtract(a, b));
    const double ref = norm(b);
    return ref > 0.0 ? diff / ref : diff;
}

enum class NoiseScaling { FullSignalPower };

inline const char* to_string(NoiseScaling mode) {
    switch (mode) {
    case NoiseScaling::FullSignalPower: return "full-signal-power";
    }
    return "unknown";
}

struct MixtureSpec {
    double target_snr_db = 0.0;
    NoiseScaling noise_scaling = NoiseScaling::FullSignalPower;
};

struct Mixture {
    Waveform mixture;
    Waveform scaled_noise;
    double noise_gain;
};

/// y = s + c·n with c chosen so that 10·log10(‖s‖² / ‖c·n‖²) hits the target.
inline Mixture mix_at_snr(const Waveform& speech, const Waveform& noise, const MixtureSpec& spec) {
    require_same_shape(speech, noise, "mix_at_snr");
    if (!std::isfinite(spec.target_snr_db)) throw ValidationError("target SNR must be finite");
    const double es = energy(speech);
    const double en = energy(noise);
    if (es <= 0.0) throw ValidationError("mix_at_snr: speech has zero energy");
    if (en <= 0.0) throw ValidationError("mix_at_snr: noise has zero energy");
    const double gain = std::sqrt(es / (en * std::pow(10.0, spec.target_snr_db / 10.0)));
    Waveform scaled = scale(noise, gain);
    Waveform y = add(speech, scaled);
    return Mixture{std::move(y), std::move(scaled), gain};
}

} // namespace opdkit
