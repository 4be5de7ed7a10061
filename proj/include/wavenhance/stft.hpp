#pragma once

#include <Eigen/Core>
#include <complex>
#include <memory>

namespace wavenhance {

using Spectrum = Eigen::ArrayXcd;

// Periodic Hann window: 0.5 - 0.5 cos(2 pi n / N). Shifted copies at hop N/2
// sum to exactly one.
Eigen::ArrayXd periodic_hann(int length);

// Real-input FFT returning bins 0..N/2; N must be a power of two.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }
  Spectrum forward(const Eigen::ArrayXd& frame);
  Eigen::ArrayXd inverse(const Spectrum& half_spectrum);

 private:
  struct Impl;
  int size_;
  std::unique_ptr<Impl> impl_;
};

bool is_power_of_two(long n);

}  // namespace wavenhance
