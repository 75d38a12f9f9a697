#include "fdebvm/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "fdebvm/errors.hpp"

namespace fdebvm::fft {
namespace {

// The FFTW planner is not thread-safe; plan creation and destruction go
// through this lock. Execution with the new-array interface is safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Plan1d::Plan1d(std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist)
    : n_(n), howmany_(howmany) {
    if (n == 0 || howmany == 0 || stride == 0) {
        throw UsageError("fft::Plan1d: sizes must be positive");
    }
    if (dist == 0) dist = n * stride;
    extent_ = (howmany - 1) * dist + (n - 1) * stride + 1;

    std::lock_guard lock(planner_mutex());
    std::vector<cplx> scratch(extent_);
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    for (auto [sign, slot] : {std::pair{FFTW_FORWARD, &forward_}, std::pair{FFTW_BACKWARD, &backward_}}) {
        *slot = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), as_fftw(scratch.data()), nullptr,
                                   static_cast<int>(stride), static_cast<int>(dist), as_fftw(scratch.data()),
                                   nullptr, static_cast<int>(stride), static_cast<int>(dist), sign, flags);
        if (*slot == nullptr) throw SolverError("fft::Plan1d: FFTW planning failed");
    }
}

Plan1d::~Plan1d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void Plan1d::execute(Direction dir, std::span<cplx> data) const {
    if (data.size() < extent_) throw UsageError("fft::Plan1d::execute: buffer too small");
    auto plan = static_cast<fftw_plan>(dir == Direction::forward ? forward_ : backward_);
    fftw_execute_dft(plan, as_fftw(data.data()), as_fftw(data.data()));
}

Plan2d::Plan2d(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw UsageError("fft::Plan2d: sizes must be positive");
    std::lock_guard lock(planner_mutex());
    std::vector<cplx> scratch(rows * cols);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), as_fftw(scratch.data()),
                                as_fftw(scratch.data()), FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), as_fftw(scratch.data()),
                                 as_fftw(scratch.data()), FFTW_BACKWARD, flags);
    if (forward_ == nullptr || backward_ == nullptr) throw SolverError("fft::Plan2d: FFTW planning failed");
}

Plan2d::~Plan2d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void Plan2d::execute(Direction dir, std::span<cplx> data) const {
    if (data.size() < rows_ * cols_) throw UsageError("fft::Plan2d::execute: buffer too small");
    auto plan = static_cast<fftw_plan>(dir == Direction::forward ? forward_ : backward_);
    fftw_execute_dft(plan, as_fftw(data.data()), as_fftw(data.data()));
}

RealPlan2d::RealPlan2d(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw UsageError("fft::RealPlan2d: sizes must be positive");
    std::lock_guard lock(planner_mutex());
    std::vector<double> real(rows * cols);
    std::vector<cplx> spec(rows * spectrum_cols());
    const int r = static_cast<int>(rows);
    const int c = static_cast<int>(cols);
    forward_ = fftw_plan_dft_r2c_2d(r, c, real.data(), as_fftw(spec.data()),
                                    FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    backward_ = fftw_plan_dft_c2r_2d(r, c, as_fftw(spec.data()), real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (forward_ == nullptr || backward_ == nullptr) throw SolverError("fft::RealPlan2d: FFTW planning failed");
}

RealPlan2d::~RealPlan2d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void RealPlan2d::forward(std::span<const double> in, std::span<cplx> spectrum) const {
    if (in.size() < rows_ * cols_ || spectrum.size() < rows_ * spectrum_cols()) {
        throw UsageError("fft::RealPlan2d::forward: buffer too small");
    }
    // preserved-input plan: FFTW does not write through this pointer
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), const_cast<double*>(in.data()), as_fftw(spectrum.data()));
}

void RealPlan2d::backward(std::span<cplx> spectrum, std::span<double> out) const {
    if (out.size() < rows_ * cols_ || spectrum.size() < rows_ * spectrum_cols()) {
        throw UsageError("fft::RealPlan2d::backward: buffer too small");
    }
    fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), as_fftw(spectrum.data()), out.data());
}

std::shared_ptr<const Plan1d> cached_plan(std::size_t n) {
    static std::mutex cache_mutex;
    static std::map<std::size_t, std::shared_ptr<const Plan1d>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const Plan1d>(n);
    return slot;
}

}  // namespace fdebvm::fft
