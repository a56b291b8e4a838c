#pragma once

#include <cstddef>
#include <vector>

#include "opdkit/projection.hpp"
#include "opdkit/waveform.hpp"

namespace opdkit {

/// ŝ = s_target + e_noise + e_artif.
struct Decomposition {
    Waveform target;
    Waveform noise_error;
    Waveform artifact_error;
    std::size_t max_delay = 0;
    std::vector<RegularizationEvent> regularization_events;
    /// ‖e_artif‖² < kArtifactFreeRatio · ‖ŝ‖².
    bool artifact_free = false;

    static constexpr double kArtifactFreeRatio = 1e-12;

    /// P_{s,n} ŝ = s_target + e_noise.
    Waveform projected() const { return add(target, noise_error); }
};

inline Waveform recompose(const Decomposition& d) {
    return add(add(d.target, d.noise_error), d.artifact_error);
}

/// Holds the P_s and P_{s,n} bases for one utterance so that several
/// enhanced variants can be decomposed against the same references.
class Decomposer {
public:
    Decomposer(const Waveform& speech, const Waveform& noise, std::size_t max_delay)
        : speech_(speech),
          noise_(noise),
          speech_basis_(checked({speech}, noise), max_delay, "s"),
          joint_basis_({speech, noise}, max_delay, "s,n") {}

    Decomposition operator()(const Waveform& s_hat) const {
        require_same_shape(s_hat, speech_, "decompose");
        Waveform target = speech_basis_.project(s_hat);
        Waveform joint = joint_basis_.project(s_hat);
        Waveform noise_error = subtract(joint, target);
        Waveform artifact_error = subtract(s_hat, joint);
        const bool artifact_free = energy(artifact_error) < Decomposition::kArtifactFreeRatio * energy(s_hat);
        return Decomposition{std::move(target), std::move(noise_error), std::move(artifact_error),
                             max_delay(),       regularization_events(), artifact_free};
    }

    std::size_t max_delay() const noexcept { return joint_basis_.max_delay(); }
    const Waveform& speech() const noexcept { return speech_; }
    const Waveform& noise() const noexcept { return noise_; }
    /// y = s + n.
    Waveform observation() const { return add(speech_, noise_); }
    const ProjectionBasis& speech_basis() const noexcept { return speech_basis_; }
    const ProjectionBasis& joint_basis() const noexcept { return joint_basis_; }

    std::vector<RegularizationEvent> regularization_events() const {
        std::vector<RegularizationEvent> events;
        if (speech_basis_.regularization()) events.push_back(*speech_basis_.regularization());
        if (joint_basis_.regularization()) events.push_back(*joint_basis_.regularization());
        return events;
    }

private:
    static std::vector<Waveform> checked(std::vector<Waveform> speech, const Waveform& noise) {
        require_same_shape(speech.front(), noise, "decompose references");
        return speech;
    }

    Waveform speech_;
    Waveform noise_;
    ProjectionBasis speech_basis_;
    ProjectionBasis joint_basis_;
};

inline Decomposition decompose(const Waveform& s_hat, const Waveform& speech, const Waveform& noise, std::size_t max_delay) {
    return Decomposer(speech, noise, max_delay)(s_hat);
}

} // namespace opdkit
