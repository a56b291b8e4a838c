#pragma once

#include <cmath>
#include <limits>

#include "opdkit/errors.hpp"
#include "opdkit/opd.hpp"
#include "opdkit/waveform.hpp"

namespace opdkit {

struct ComponentEnergies {
    double target = 0.0;         // ‖s_target‖²
    double noise_error = 0.0;    // ‖e_noise‖²
    double artifact_error = 0.0; // ‖e_artif‖²
    double projected = 0.0;      // ‖P_{s,n} ŝ‖²
};

/// SDR/SNR/SAR in dB. +inf when the error term vanishes; NaN (with
/// no_target set) when the target component vanishes.
struct MetricsReport {
    double sdr_db = 0.0;
    double snr_db = 0.0;
    double sar_db = 0.0;
    ComponentEnergies energies;
    bool artifact_free = false;
    bool no_target = false;
};

namespace detail {

inline double ratio_db(double num, double den, double floor) {
    if (den <= floor) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(num / den);
}

} // namespace detail

inline MetricsReport compute_metrics(const Decomposition& d) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const Waveform projected = d.projected();
    const Waveform distortion = add(d.noise_error, d.artifact_error);
    const double total = energy(recompose(d));

    MetricsReport m;
    m.energies = {energy(d.target), energy(d.noise_error), energy(d.artifact_error), energy(projected)};
    m.artifact_free = d.artifact_free;

    const double floor = Decomposition::kArtifactFreeRatio * total;
    if (total <= 0.0) {
        m.sdr_db = m.snr_db = m.sar_db = nan;
        m.no_target = true;
        return m;
    }

    m.sar_db = d.artifact_free ? std::numeric_limits<double>::infinity()
                               : detail::ratio_db(m.energies.projected, m.energies.artifact_error, -1.0);

    m.no_target = m.energies.target <= floor;
    if (m.no_target) {
        m.sdr_db = m.snr_db = nan;
    } else {
        m.snr_db = detail::ratio_db(m.energies.target, m.energies.noise_error, floor);
        m.sdr_db = detail::ratio_db(m.energies.target, energy(distortion), floor);
    }
    return m;
}

/// Closed-form SAR gain of observation adding ŝ → ŝ + ω·y:
///   10·log10(1 + (ω²‖y‖² + 2ω⟨P_{s,n}ŝ, y⟩) / ‖P_{s,n}ŝ‖²).
inline double sar_improvement_closed_form(const Decomposition& d, const Waveform& observation, double omega_obs) {
    if (!std::isfinite(omega_obs) || omega_obs < 0.0) {
        throw ValidationError("omega_obs must be finite and non-negative");
    }
    const Waveform projected = d.projected();
    const double projected_energy = energy(projected);
    if (projected_energy <= Decomposition::kArtifactFreeRatio * energy(recompose(d))) throw ValidationError("SAR improvement undefined: zero projected energy");
    const double cross = inner(projected, observation);
    const double gain =
        (omega_obs * omega_obs * energy(observation) + 2.0 * omega_obs * cross) / projected_energy;
    return 10.0 * std::log10(1.0 + gain);
}

} // namespace opdkit
