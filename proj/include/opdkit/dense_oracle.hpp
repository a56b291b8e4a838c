#pragma once

// Brute-force reference path: materializes the delayed-signal matrix and
// solves the least-squares problem with a rank-revealing orthogonal
// decomposition. Slow and memory-hungry; used to validate the FFT path.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "opdkit/errors.hpp"
#include "opdkit/projection.hpp"
#include "opdkit/waveform.hpp"

namespace opdkit::oracle {

inline constexpr std::size_t kMaxLength = 8192;
inline constexpr std::size_t kMaxColumns = 64;

inline Eigen::MatrixXd delay_matrix(const std::vector<Waveform>& references, std::size_t max_delay) {
    if (references.empty()) throw ValidationError("dense oracle needs at least one reference");
    const std::size_t T = references.front().size();
    const std::size_t cols = references.size() * max_delay;
    if (max_delay < 1 || max_delay > T) throw ValidationError("dense oracle: invalid max delay");
    if (T > kMaxLength || cols > kMaxColumns) {
        throw ValidationError("dense oracle guard exceeded (T=" + std::to_string(T) + ", kL=" + std::to_string(cols) +
                              "; limits T<=8192, kL<=64)");
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < references.size(); ++i) {
        if (references[i].size() != T) throw ValidationError("dense oracle: reference length mismatch");
        for (std::size_t tau = 0; tau < max_delay; ++tau) {
            for (std::size_t t = tau; t < T; ++t) {
                A(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i * max_delay + tau)) = references[i][t - tau];
            }
        }
    }
    return A;
}

inline Eigen::MatrixXd gram(const std::vector<Waveform>& references, std::size_t max_delay) {
    const Eigen::MatrixXd A = delay_matrix(references, max_delay);
    return A.transpose() * A;
}

inline Waveform project_dense(const std::vector<Waveform>& references, std::size_t max_delay, const Waveform& x) {
    const Eigen::MatrixXd A = delay_matrix(references, max_delay);
    if (x.size() != static_cast<std::size_t>(A.rows())) throw ValidationError("dense oracle: signal length mismatch");
    const Eigen::Map<const Eigen::VectorXd> xv(x.samples().data(), A.rows());
    const Eigen::VectorXd c = A.completeOrthogonalDecomposition().solve(xv);
    const Eigen::VectorXd px = A * c;
    return Waveform(std::vector<double>(px.data(), px.data() + px.size()), x.sample_rate());
}

} // namespace opdkit::oracle

namespace opdkit {

inline Waveform project_dense_oracle(const std::vector<Waveform>& references, std::size_t max_delay, const Waveform& x) {
    return oracle::project_dense(references, max_delay, x);
}

} // namespace opdkit
