#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "opdkit/errors.hpp"

namespace opdkit {

using Spectrum = std::vector<std::complex<double>>;

namespace detail {

struct FftwDeleter {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

inline FftwBuffer<double> alloc_real(std::size_t n) {
    return FftwBuffer<double>(fftw_alloc_real(n));
}

inline FftwBuffer<fftw_complex> alloc_complex(std::size_t n) {
    return FftwBuffer<fftw_complex>(fftw_alloc_complex(n));
}

/// Forward/inverse plans for one transform size. Plans are created once under
/// the global planner lock and then executed through the new-array interface,
/// which FFTW documents as thread-safe.
class PlanPair {
public:
    explicit PlanPair(std::size_t n) {
        auto real = alloc_real(n);
        auto cplx = alloc_complex(n / 2 + 1);
        const int size = static_cast<int>(n);
        forward_ = fftw_plan_dft_r2c_1d(size, real.get(), cplx.get(), FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_c2r_1d(size, cplx.get(), real.get(), FFTW_ESTIMATE);
        if (forward_ == nullptr || inverse_ == nullptr) throw NumericalError("FFTW planning failed");
    }
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;
    ~PlanPair() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
    }

    fftw_plan forward() const { return forward_; }
    fftw_plan inverse() const { return inverse_; }

private:
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline std::shared_ptr<const PlanPair> plans_for(std::size_t n) {
    static std::map<std::size_t, std::shared_ptr<const PlanPair>> cache;
    std::lock_guard lock(planner_mutex());
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const PlanPair>(n);
    return slot;
}

} // namespace detail

/// Real-to-complex FFT of a fixed size. Inputs shorter than the size are
/// zero-padded. The inverse is normalized (inverse(forward(x)) == x).
class RealFft {
public:
    explicit RealFft(std::size_t size) : size_(size) {
        if (size_ < 1) throw ValidationError("FFT size must be positive");
        plans_ = detail::plans_for(size_);
    }

    std::size_t size() const noexcept { return size_; }
    std::size_t bins() const noexcept { return size_ / 2 + 1; }

    Spectrum forward(std::span<const double> input) const {
        if (input.size() > size_) throw ValidationError("FFT input longer than transform size");
        auto real = detail::alloc_real(size_);
        auto cplx = detail::alloc_complex(bins());
        std::copy(input.begin(), input.end(), real.get());
        std::fill(real.get() + input.size(), real.get() + size_, 0.0);
        fftw_execute_dft_r2c(plans_->forward(), real.get(), cplx.get());
        Spectrum out(bins());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = {cplx[k][0], cplx[k][1]};
        return out;
    }

    std::vector<double> inverse(std::span<const std::complex<double>> spectrum) const {
        if (spectrum.size() != bins()) throw ValidationError("spectrum size does not match FFT size");
        auto real = detail::alloc_real(size_);
        auto cplx = detail::alloc_complex(bins());
        for (std::size_t k = 0; k < spectrum.size(); ++k) {
            cplx[k][0] = spectrum[k].real();
            cplx[k][1] = spectrum[k].imag();
        }
        fftw_execute_dft_c2r(plans_->inverse(), cplx.get(), real.get());
        std::vector<double> out(real.get(), real.get() + size_);
        const double norm = 1.0 / static_cast<double>(size_);
        for (double& v : out) v *= norm;
        return out;
    }

private:
    std::size_t size_;
    std::shared_ptr<const detail::PlanPair> plans_;
};

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace opdkit
