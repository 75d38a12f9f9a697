#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace fdebvm::fft {

using cplx = std::complex<double>;

enum class Direction { forward, backward };

/// In-place complex DFT plan over a batch of equally strided 1D sequences.
///
/// forward:  X_j = sum_r x_r exp(-2 pi i j r / n)
/// backward: x_r = sum_j X_j exp(+2 pi i j r / n)   (unnormalized)
///
/// Plans are immutable after construction; execute() is reentrant and may be
/// called concurrently on distinct buffers.
class Plan1d {
public:
    Plan1d(std::size_t n, std::size_t howmany = 1, std::size_t stride = 1, std::size_t dist = 0);
    ~Plan1d();
    Plan1d(const Plan1d&) = delete;
    Plan1d& operator=(const Plan1d&) = delete;

    std::size_t size() const { return n_; }
    std::size_t batch() const { return howmany_; }
    /// Number of complex values the buffer passed to execute() must hold.
    std::size_t extent() const { return extent_; }

    void execute(Direction dir, std::span<cplx> data) const;

private:
    std::size_t n_;
    std::size_t howmany_;
    std::size_t extent_;
    void* forward_ = nullptr;
    void* backward_ = nullptr;
};

/// In-place 2D DFT of a row-major rows x cols array.
class Plan2d {
public:
    Plan2d(std::size_t rows, std::size_t cols);
    ~Plan2d();
    Plan2d(const Plan2d&) = delete;
    Plan2d& operator=(const Plan2d&) = delete;

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void execute(Direction dir, std::span<cplx> data) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    void* forward_ = nullptr;
    void* backward_ = nullptr;
};

/// 2D DFT of a real row-major rows x cols array. The spectrum keeps the
/// non-redundant half: rows x (cols/2 + 1), entry (j,k) = X_{j,k}; the other
/// half is X_{(rows-j) mod rows, cols-k} = conj(X_{j,k}).
class RealPlan2d {
public:
    RealPlan2d(std::size_t rows, std::size_t cols);
    ~RealPlan2d();
    RealPlan2d(const RealPlan2d&) = delete;
    RealPlan2d& operator=(const RealPlan2d&) = delete;

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t spectrum_cols() const { return cols_ / 2 + 1; }

    /// Forward transform; `in` is left unchanged.
    void forward(std::span<const double> in, std::span<cplx> spectrum) const;
    /// Unnormalized inverse of a Hermitian half spectrum; overwrites `spectrum`.
    void backward(std::span<cplx> spectrum, std::span<double> out) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    void* forward_ = nullptr;
    void* backward_ = nullptr;
};

/// Shared single-sequence plan of length n from a process-wide cache.
std::shared_ptr<const Plan1d> cached_plan(std::size_t n);

}  // namespace fdebvm::fft
