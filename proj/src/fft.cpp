#include "snc/dsp/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "snc/errors.hpp"

namespace snc::dsp {

namespace {

// FFTW's planner mutates global state; guard plan create/destroy.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(size_t size) : size_(size) {
  if (size == 0) {
    throw Error(ErrorCode::Argument, "FFT size must be positive");
  }
  real_buf_ = fftw_alloc_real(size);
  auto* cbuf = fftw_alloc_complex(size / 2 + 1);
  complex_buf_ = cbuf;
  std::lock_guard lock(planner_mutex());
  forward_plan_ =
      fftw_plan_dft_r2c_1d(static_cast<int>(size), real_buf_, cbuf, FFTW_ESTIMATE);
  inverse_plan_ =
      fftw_plan_dft_c2r_1d(static_cast<int>(size), cbuf, real_buf_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  }
  fftw_free(real_buf_);
  fftw_free(static_cast<fftw_complex*>(complex_buf_));
}

std::vector<std::complex<double>> RealFft::forward(
    const std::vector<double>& input) const {
  if (input.size() != size_) {
    throw Error(ErrorCode::Argument, "FFT input length mismatch");
  }
  std::memcpy(real_buf_, input.data(), size_ * sizeof(double));
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
  std::vector<std::complex<double>> out(bins());
  for (size_t i = 0; i < out.size(); ++i) out[i] = {cbuf[i][0], cbuf[i][1]};
  return out;
}

std::vector<double> RealFft::inverse(
    const std::vector<std::complex<double>>& spectrum) const {
  if (spectrum.size() != bins()) {
    throw Error(ErrorCode::Argument, "FFT spectrum length mismatch");
  }
  auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
  for (size_t i = 0; i < spectrum.size(); ++i) {
    cbuf[i][0] = spectrum[i].real();
    cbuf[i][1] = spectrum[i].imag();
  }
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::vector<double> out(size_);
  const double norm = 1.0 / static_cast<double>(size_);
  for (size_t i = 0; i < size_; ++i) out[i] = real_buf_[i] * norm;
  return out;
}

std::vector<double> hann_window(size_t n) {
  std::vector<double> w(n);
  for (size_t k = 0; k < n; ++k) {
    w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                static_cast<double>(n));
  }
  return w;
}

}  // namespace snc::dsp
