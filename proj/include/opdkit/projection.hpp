#pragma once

// Orthogonal projection onto the span of delayed copies of reference signals.
//
// For references r_1..r_k of length T and max delay L, the basis matrix is
// A = [r_1^0 .. r_1^{L-1} .. r_k^0 .. r_k^{L-1}] (T x kL), where r^τ is r
// delayed by τ samples with zeros shifted in at the head and truncated to T.
// A is never materialized. Correlations (A^T A and A^T x) and the synthesis
// A c are all computed with FFTs of length >= T + L - 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "opdkit/errors.hpp"
#include "opdkit/fft.hpp"
#include "opdkit/waveform.hpp"

namespace opdkit {

/// How delayed copies are formed. Only head zero-padding over the original
/// length is supported: r^τ[t] = r[t − τ] for t ≥ τ, 0 otherwise.
struct DelayConvention {
    enum class Padding { ZeroPadHead };
    Padding padding = Padding::ZeroPadHead;
    std::size_t effective_length = 0;
};

inline const char* to_string(DelayConvention::Padding) { return "zero-pad-head"; }

inline Waveform delayed(const Waveform& ref, std::size_t tau) {
    std::vector<double> out(ref.size(), 0.0);
    for (std::size_t t = tau; t < ref.size(); ++t) out[t] = ref[t - tau];
    return Waveform(std::move(out), ref.sample_rate());
}

/// Recorded whenever the Gram matrix needed diagonal loading.
struct RegularizationEvent {
    std::string basis;         // e.g. "s" or "s,n"
    double lambda = 0.0;       // relative loading factor
    double diagonal_shift = 0.0;
    double rcond_before = 0.0; // reciprocal condition estimate of the raw Gram (0 if LLT failed)
};

class ProjectionBasis {
public:
    static constexpr double kRegularizationLambda = 1e-10;
    static constexpr double kMinRcond = 1e-14;

    ProjectionBasis(std::vector<Waveform> references, std::size_t max_delay, std::string label = {})
        : references_(std::move(references)), max_delay_(max_delay), label_(std::move(label)) {
        validate();
        const std::size_t T = length();
        const std::size_t L = max_delay_;
        const std::size_t k = references_.size();

        fft_.emplace(next_pow2(T + L - 1));
        spectra_.reserve(k);
        for (const auto& r : references_) spectra_.push_back(fft_->forward(r.samples()));

        gram_.resize(static_cast<Eigen::Index>(k * L), static_cast<Eigen::Index>(k * L));
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i; j < k; ++j) fill_block(i, j);
        }
        factorize();
    }

    std::size_t length() const noexcept { return references_.front().size(); }
    int sample_rate() const noexcept { return references_.front().sample_rate(); }
    std::size_t max_delay() const noexcept { return max_delay_; }
    std::size_t reference_count() const noexcept { return references_.size(); }
    std::size_t dimension() const noexcept { return references_.size() * max_delay_; }
    std::size_t fft_size() const noexcept { return fft_->size(); }
    const std::vector<Waveform>& references() const noexcept { return references_; }
    const std::string& label() const noexcept { return label_; }
    DelayConvention delay_convention() const noexcept { return {DelayConvention::Padding::ZeroPadHead, length()}; }

    /// A^T A, entry (iL+τ, jL+τ') = ⟨r_i^τ, r_j^τ'⟩.
    const Eigen::MatrixXd& gram() const noexcept { return gram_; }
    const std::optional<RegularizationEvent>& regularization() const noexcept { return regularization_; }

    /// A^T x: correlations of x with every delayed reference.
    Eigen::VectorXd correlate(const Waveform& x) const {
        require_compatible(x);
        const std::size_t L = max_delay_;
        const Spectrum X = fft_->forward(x.samples());
        Eigen::VectorXd out(static_cast<Eigen::Index>(dimension()));
        Spectrum prod(X.size());
        for (std::size_t i = 0; i < references_.size(); ++i) {
            for (std::size_t b = 0; b < X.size(); ++b) prod[b] = X[b] * std::conj(spectra_[i][b]);
            const auto c = fft_->inverse(prod);
            for (std::size_t tau = 0; tau < L; ++tau) out[static_cast<Eigen::Index>(i * L + tau)] = c[tau];
        }
        return out;
    }

    /// Solves the Gram system for the least-squares coefficients of x.
    Eigen::VectorXd coefficients(const Waveform& x) const { return llt_.solve(correlate(x)); }

    /// A c: linear combination of delayed references.
    Waveform synthesize(const Eigen::VectorXd& coeffs) const {
        if (static_cast<std::size_t>(coeffs.size()) != dimension()) {
            throw ValidationError("coefficient vector has wrong dimension");
        }
        const std::size_t L = max_delay_;
        Spectrum acc(fft_->bins(), {0.0, 0.0});
        std::vector<double> taps(L);
        for (std::size_t i = 0; i < references_.size(); ++i) {
            for (std::size_t tau = 0; tau < L; ++tau) taps[tau] = coeffs[static_cast<Eigen::Index>(i * L + tau)];
            const Spectrum C = fft_->forward(taps);
            for (std::size_t b = 0; b < acc.size(); ++b) acc[b] += C[b] * spectra_[i][b];
        }
        auto full = fft_->inverse(acc);
        full.resize(length());
        return Waveform(std::move(full), sample_rate());
    }

    /// P x = A (A^T A)^{-1} A^T x.
    Waveform project(const Waveform& x) const { return synthesize(coefficients(x)); }

private:
    void validate() const {
        if (references_.empty()) throw ValidationError("projection basis needs at least one reference");
        const auto& first = references_.front();
        for (const auto& r : references_) require_same_shape(first, r, "projection basis");
        if (max_delay_ < 1) throw ValidationError("max delay L must be at least 1");
        if (max_delay_ > first.size()) {
            throw ValidationError("max delay L=" + std::to_string(max_delay_) + " exceeds signal length T=" +
                                  std::to_string(first.size()));
        }
        for (std::size_t i = 0; i < references_.size(); ++i) {
            if (energy(references_[i]) <= 0.0) {
                throw ValidationError("reference " + std::to_string(i) + " is all zeros");
            }
        }
    }

    void require_compatible(const Waveform& x) const {
        if (x.size() != length()) {
            throw ValidationError("signal length " + std::to_string(x.size()) + " does not match basis length " +
                                  std::to_string(length()));
        }
        if (x.sample_rate() != sample_rate()) throw ValidationError("signal sample rate does not match basis");
    }

    // Block (i, j) of the Gram matrix. The first row and column are plain
    // cross-correlation lags; moving one step down the diagonal drops exactly
    // one product from the truncated tail:
    //   G[τ+1][τ'+1] = G[τ][τ'] − r_i[T−1−τ] · r_j[T−1−τ'].
    void fill_block(std::size_t i, std::size_t j) {
        const std::size_t T = length();
        const std::size_t L = max_delay_;
        const std::size_t N = fft_->size();

        Spectrum prod(fft_->bins());
        for (std::size_t b = 0; b < prod.size(); ++b) prod[b] = spectra_[i][b] * std::conj(spectra_[j][b]);
        const auto c = fft_->inverse(prod); // c[m] = Σ_u r_i[u + m] r_j[u] (circular)

        const auto ri = references_[i].samples();
        const auto rj = references_[j].samples();
        Eigen::MatrixXd block(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
        for (std::size_t tp = 0; tp < L; ++tp) block(0, static_cast<Eigen::Index>(tp)) = c[tp];
        for (std::size_t tau = 1; tau < L; ++tau) block(static_cast<Eigen::Index>(tau), 0) = c[N - tau];
        for (std::size_t tau = 1; tau < L; ++tau) {
            for (std::size_t tp = 1; tp < L; ++tp) {
                block(static_cast<Eigen::Index>(tau), static_cast<Eigen::Index>(tp)) =
                    block(static_cast<Eigen::Index>(tau - 1), static_cast<Eigen::Index>(tp - 1)) -
                    ri[T - tau] * rj[T - tp];
            }
        }
        if (i == j) block = 0.5 * (block + block.transpose()).eval();

        const auto r0 = static_cast<Eigen::Index>(i * L);
        const auto c0 = static_cast<Eigen::Index>(j * L);
        const auto n = static_cast<Eigen::Index>(L);
        gram_.block(r0, c0, n, n) = block;
        if (i != j) gram_.block(c0, r0, n, n) = block.transpose();
    }

    void factorize() {
        llt_.compute(gram_);
        double rcond = 0.0;
        if (llt_.info() == Eigen::Success) {
            rcond = llt_.rcond();
            if (rcond >= kMinRcond) return;
        }
        const double shift = kRegularizationLambda * gram_.trace() / static_cast<double>(dimension());
        Eigen::MatrixXd loaded = gram_;
        loaded.diagonal().array() += shift;
        llt_.compute(loaded);
        if (llt_.info() != Eigen::Success) {
            throw NumericalError("Gram matrix of basis '" + label_ + "' is singular even after regularization");
        }
        regularization_ = RegularizationEvent{label_, kRegularizationLambda, shift, rcond};
    }

    std::vector<Waveform> references_;
    std::size_t max_delay_;
    std::string label_;
    std::optional<RealFft> fft_;
    std::vector<Spectrum> spectra_;
    Eigen::MatrixXd gram_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    std::optional<RegularizationEvent> regularization_;
};

inline ProjectionBasis build_basis(std::vector<Waveform> references, std::size_t max_delay, std::string label = {}) {
    return ProjectionBasis(std::move(references), max_delay, std::move(label));
}

inline Waveform project(const ProjectionBasis& basis, const Waveform& x) { return basis.project(x); }

} // namespace opdkit
