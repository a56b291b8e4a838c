#pragma once

// Direct scaling analysis (DSA) and observation adding (OA).

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "opdkit/errors.hpp"
#include "opdkit/metrics.hpp"
#include "opdkit/opd.hpp"
#include "opdkit/waveform.hpp"

namespace opdkit {

struct DsaPoint {
    double omega_noise = 1.0;
    double omega_artif = 1.0;

    static DsaPoint make(double omega_noise, double omega_artif) {
        if (!std::isfinite(omega_noise) || !std::isfinite(omega_artif) || omega_noise < 0.0 || omega_artif < 0.0) {
            throw ValidationError("DSA weights must be finite and non-negative");
        }
        return {omega_noise, omega_artif};
    }

    friend auto operator<=>(const DsaPoint&, const DsaPoint&) = default;
};

struct OaPoint {
    double omega_obs = 0.0;

    static OaPoint make(double omega_obs) {
        if (!std::isfinite(omega_obs) || omega_obs < 0.0) {
            throw ValidationError("omega_obs must be finite and non-negative");
        }
        return {omega_obs};
    }

    friend auto operator<=>(const OaPoint&, const OaPoint&) = default;
};

/// ŝ_ω = s_target + ω_noise·e_noise + ω_artif·e_artif
inline Waveform dsa_synthesize(const Decomposition& d, const DsaPoint& p) {
    return add_scaled(add_scaled(d.target, d.noise_error, p.omega_noise), d.artifact_error, p.omega_artif);
}

/// s̄ = ŝ + ω_obs·y
inline Waveform oa_apply(const Waveform& s_hat, const Waveform& observation, const OaPoint& p) {
    return add_scaled(s_hat, observation, p.omega_obs);
}

struct Prop1Result {
    bool holds = false;
    double inner_value = 0.0;
};

/// OA is guaranteed to raise SAR when ⟨ŝ, y⟩ > 0.
inline Prop1Result prop1_condition(const Waveform& s_hat, const Waveform& observation) {
    const double v = inner(s_hat, observation);
    return {v > 0.0, v};
}

enum class Aggregation { PerUtterance, CorpusMean };

inline const char* to_string(Aggregation a) {
    return a == Aggregation::PerUtterance ? "per-utterance" : "corpus-mean-of-db";
}

struct SweepRow {
    std::string utterance_id;
    std::optional<double> omega_noise;
    std::optional<double> omega_artif;
    std::optional<double> omega_obs;
    MetricsReport metrics;
    double inner_s_hat_y = 0.0;
    std::optional<double> sari_closed_form_db;
    std::optional<std::string> error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    Aggregation aggregation = Aggregation::PerUtterance;
};

/// Maximum |closed-form SARi − re-decomposed SAR difference| tolerated by
/// oa_sweep before it refuses to report.
inline constexpr double kSariToleranceDb = 1e-6;

namespace detail {

template <typename Point>
void require_unique_grid(const std::vector<Point>& grid) {
    if (grid.empty()) throw ValidationError("sweep grid is empty");
    std::set<Point> seen(grid.begin(), grid.end());
    if (seen.size() != grid.size()) throw ValidationError("sweep grid contains duplicate points");
}

} // namespace detail

/// Synthesizes ŝ_ω for every grid point and re-decomposes it.
inline SweepResult dsa_sweep(const Decomposer& decomposer, const Decomposition& base, const std::vector<DsaPoint>& grid,
                             const std::string& utterance_id = {}) {
    detail::require_unique_grid(grid);
    const Waveform y = decomposer.observation();
    const double inner_base = inner(recompose(base), y);
    SweepResult result;
    result.rows.reserve(grid.size());
    for (const auto& p : grid) {
        const Waveform modified = dsa_synthesize(base, p);
        SweepRow row;
        row.utterance_id = utterance_id;
        row.omega_noise = p.omega_noise;
        row.omega_artif = p.omega_artif;
        row.metrics = compute_metrics(decomposer(modified));
        row.inner_s_hat_y = inner_base;
        result.rows.push_back(std::move(row));
    }
    return result;
}

/// Applies OA at every grid point, re-decomposes s̄ and cross-checks the SAR
/// change against the closed form. Throws NumericalError on disagreement.
inline SweepResult oa_sweep(const Decomposer& decomposer, const Waveform& s_hat, const std::vector<OaPoint>& grid,
                            const std::string& utterance_id = {}) {
    detail::require_unique_grid(grid);
    const Waveform y = decomposer.observation();
    const Decomposition base = decomposer(s_hat);
    const MetricsReport base_metrics = compute_metrics(base);
    const Prop1Result cond = prop1_condition(s_hat, y);

    SweepResult result;
    result.rows.reserve(grid.size());
    for (const auto& p : grid) {
        const Decomposition d = decomposer(oa_apply(s_hat, y, p));
        SweepRow row;
        row.utterance_id = utterance_id;
        row.omega_obs = p.omega_obs;
        row.metrics = compute_metrics(d);
        row.inner_s_hat_y = cond.inner_value;
        const double closed = sar_improvement_closed_form(base, y, p.omega_obs);
        row.sari_closed_form_db = closed;
        if (std::isfinite(base_metrics.sar_db) && std::isfinite(row.metrics.sar_db)) {
            const double measured = row.metrics.sar_db - base_metrics.sar_db;
            if (std::abs(measured - closed) > kSariToleranceDb) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "closed-form SARi " << closed << " dB disagrees with re-decomposition " << measured
                    << " dB at omega_obs=" << p.omega_obs;
                throw NumericalError(msg.str());
            }
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

inline SweepResult oa_sweep(const Waveform& s_hat, const Waveform& observation, const Waveform& speech,
                            const Waveform& noise, std::size_t max_delay, const std::vector<OaPoint>& grid) {
    const Decomposer decomposer(speech, noise, max_delay);
    if (relative_error(observation, decomposer.observation()) > 1e-12) {
        throw ValidationError("observation must equal speech + noise");
    }
    return oa_sweep(decomposer, s_hat, grid);
}

inline SweepResult dsa_sweep(const Decomposition& base, const Waveform& speech, const Waveform& noise,
                             const std::vector<DsaPoint>& grid) {
    const Decomposer decomposer(speech, noise, base.max_delay);
    return dsa_sweep(decomposer, base, grid);
}

} // namespace opdkit
