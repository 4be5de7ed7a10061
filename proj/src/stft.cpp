#include "wavenhance/stft.hpp"

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "wavenhance/error.hpp"

namespace wavenhance {

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::ArrayXd periodic_hann(int length) {
  Eigen::ArrayXd w(length);
  for (int n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  }
  return w;
}

struct RealFft::Impl {
  Eigen::FFT<double> fft;
  std::vector<double> time;
  std::vector<std::complex<double>> freq;
};

RealFft::RealFft(int size) : size_(size) {
  if (!is_power_of_two(size) || size < 2) {
    throw Error(ErrorCode::kInvalidArgument, "FFT size must be a power of two >= 2");
  }
  impl_ = std::make_unique<Impl>();
  impl_->fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  impl_->time.resize(static_cast<std::size_t>(size));
}

RealFft::~RealFft() = default;

Spectrum RealFft::forward(const Eigen::ArrayXd& frame) {
  std::copy(frame.data(), frame.data() + size_, impl_->time.begin());
  impl_->fft.fwd(impl_->freq, impl_->time);
  Spectrum out(size_ / 2 + 1);
  for (int k = 0; k <= size_ / 2; ++k) out[k] = impl_->freq[static_cast<std::size_t>(k)];
  return out;
}

Eigen::ArrayXd RealFft::inverse(const Spectrum& half_spectrum) {
  impl_->freq.assign(half_spectrum.data(), half_spectrum.data() + half_spectrum.size());
  impl_->fft.inv(impl_->time, impl_->freq, size_);
  return Eigen::Map<const Eigen::ArrayXd>(impl_->time.data(), size_);
}

}  // namespace wavenhance
