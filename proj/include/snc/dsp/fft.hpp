#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace snc::dsp {

// Real-input FFT of a fixed size, backed by FFTW. Plans are created with
// FFTW_ESTIMATE so results are deterministic across runs, and plan
// creation/destruction is serialized internally (FFTW's planner is not
// thread-safe; execution is).
class RealFft {
 public:
  explicit RealFft(size_t size);
  ~RealFft();

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  size_t size() const { return size_; }
  size_t bins() const { return size_ / 2 + 1; }

  // `input.size()` must equal size(); returns size()/2+1 complex bins.
  std::vector<std::complex<double>> forward(const std::vector<double>& input) const;

  // Inverse of forward() including the 1/N normalization, so
  // inverse(forward(x)) == x up to rounding.
  std::vector<double> inverse(const std::vector<std::complex<double>>& spectrum) const;

 private:
  size_t size_;
  void* forward_plan_;
  void* inverse_plan_;
  double* real_buf_;
  void* complex_buf_;
};

// Periodic Hann window of length n: 0.5 - 0.5*cos(2*pi*k/n).
std::vector<double> hann_window(size_t n);

}  // namespace snc::dsp
