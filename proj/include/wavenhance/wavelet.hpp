#pragma once

// Multi-level discrete wavelet transform as a two-channel FIR filter bank.
//
// Phase convention (pinned by the golden vectors under tests/fixtures):
//
//   periodic   cA[k] = sum_j dec_lo[j] * x[(2k - j) mod N]
//              i.e. the filter origin sits at index 0 and decimation keeps the
//              even-indexed outputs of the circular convolution. Odd-length
//              inputs are first extended by repeating the last sample, so a
//              level produces ceil(N / 2) coefficients per branch.
//
//   symmetric  cA[k] = sum_j dec_lo[j] * xs[2k + 1 - j], where xs is the
//              half-sample symmetric extension of x. A level produces
//              floor((N + 23) / 2) coefficients per branch.
//
// Synthesis upsamples by two and convolves with rec_lo / rec_hi, then folds
// (periodic) or keeps the valid part (symmetric) and trims to the recorded
// length. Periodic mode is an orthogonal transform for even lengths, so band
// energies sum exactly to the signal energy when the length is divisible by
// 2^level.

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "wavenhance/audio.hpp"
#include "wavenhance/error.hpp"

namespace wavenhance {

enum class ExtensionMode { kPeriodic, kSymmetric };

inline constexpr int kFilterLength = 24;
inline constexpr int kDefaultLevel = 5;
inline constexpr int kMaxLevel = 8;

template <typename Scalar>
using Signal = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
struct FilterQuad {
  using Taps = Eigen::Array<Scalar, kFilterLength, 1>;
  Taps dec_lo;
  Taps dec_hi;
  Taps rec_lo;
  Taps rec_hi;
};

namespace detail {

// sym12 scaling filter (decomposition lowpass), 24 taps.
inline constexpr std::array<double, kFilterLength> kSym12DecLo = {
    0.00011196719424656033,  -1.1353928041541452e-05, -0.0013497557555715387,
    0.00018021409008538188,  0.007414965517654251,    -0.0014089092443297553,
    -0.024220722675013445,   0.0075537806116804775,   0.04917931829966084,
    -0.03584883073695439,    -0.022162306170337816,   0.39888597239022,
    0.7634790977836572,      0.46274103121927235,     -0.07833262231634322,
    -0.17037069723886492,    0.01530174062247884,     0.05780417944550566,
    -0.0026043910313322326,  -0.014589836449234145,   0.00030764779631059454,
    0.002350297614183465,    -1.8158078862617515e-05, -0.0001790665869750869,
};

inline Eigen::Index wrap(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index r = i % n;
  return r < 0 ? r + n : r;
}

// Half-sample symmetric reflection: ... x1 x0 | x0 x1 ... x(n-1) | x(n-1) ...
inline Eigen::Index reflect(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index r = wrap(i, 2 * n);
  return r < n ? r : 2 * n - 1 - r;
}

}  // namespace detail

// The sym12 quad. dec_hi[n] = (-1)^n dec_lo[23 - n]; the reconstruction pair
// is the time reverse of the decomposition pair.
template <typename Scalar = double>
FilterQuad<Scalar> sym12_filters() {
  FilterQuad<Scalar> f;
  for (int n = 0; n < kFilterLength; ++n) {
    f.dec_lo[n] = static_cast<Scalar>(detail::kSym12DecLo[n]);
  }
  for (int n = 0; n < kFilterLength; ++n) {
    const Scalar sign = (n % 2 == 0) ? Scalar(1) : Scalar(-1);
    f.dec_hi[n] = sign * f.dec_lo[kFilterLength - 1 - n];
  }
  f.rec_lo = f.dec_lo.reverse();
  f.rec_hi = f.dec_hi.reverse();
  return f;
}

// Per-branch coefficient count produced by one analysis step.
inline Eigen::Index coefficient_length(Eigen::Index input_length, ExtensionMode mode) {
  if (mode == ExtensionMode::kPeriodic) return (input_length + 1) / 2;
  return (input_length + kFilterLength - 1) / 2;
}

// Lengths of the approximation signal entering each level: result[0] is the
// original length, result[k] the length of cA_k.
inline std::vector<Eigen::Index> level_lengths(Eigen::Index original_length, int level,
                                               ExtensionMode mode) {
  std::vector<Eigen::Index> lengths{original_length};
  for (int k = 0; k < level; ++k) lengths.push_back(coefficient_length(lengths.back(), mode));
  return lengths;
}

namespace detail {

// Two-band synthesis in polyphase form. With a and d the coefficient
// arrays (zero outside [0, m)) and H = F / 2, the outputs for window start s
// are
//   even = sum_t rec_lo[2(H-1-t)] a[s + t] + rec_hi[2(H-1-t)] d[s + t]
//   odd  = same with the odd taps.
template <typename Scalar>
class PolyphaseSynthesis {
 public:
  static constexpr int H = kFilterLength / 2;
  using Window = Eigen::Array<Scalar, H, 1>;

  explicit PolyphaseSynthesis(const FilterQuad<Scalar>& f) {
    for (int t = 0; t < H; ++t) {
      lo_even_[t] = f.rec_lo[2 * (H - 1 - t)];
      lo_odd_[t] = f.rec_lo[2 * (H - 1 - t) + 1];
      hi_even_[t] = f.rec_hi[2 * (H - 1 - t)];
      hi_odd_[t] = f.rec_hi[2 * (H - 1 - t) + 1];
    }
  }

  std::pair<Scalar, Scalar> at(const Scalar* a, const Scalar* d, Eigen::Index m,
                               Eigen::Index s) const {
    if (s >= 0 && s + H <= m) return dot(Eigen::Map<const Window>(a + s), Eigen::Map<const Window>(d + s));
    Window wa, wd;
    for (int t = 0; t < H; ++t) {
      const Eigen::Index i = s + t;
      const bool inside = i >= 0 && i < m;
      wa[t] = inside ? a[i] : Scalar(0);
      wd[t] = inside ? d[i] : Scalar(0);
    }
    return dot(wa, wd);
  }

 private:
  template <typename A, typename D>
  std::pair<Scalar, Scalar> dot(const A& wa, const D& wd) const {
    return {(lo_even_ * wa).sum() + (hi_even_ * wd).sum(), (lo_odd_ * wa).sum() + (hi_odd_ * wd).sum()};
  }

  Window lo_even_, lo_odd_, hi_even_, hi_odd_;
};

}  // namespace detail

template <typename Derived>
std::pair<Signal<typename Derived::Scalar>, Signal<typename Derived::Scalar>> dwt_step(
    const Eigen::ArrayBase<Derived>& signal, const FilterQuad<typename Derived::Scalar>& f,
    ExtensionMode mode = ExtensionMode::kPeriodic) {
  using Scalar = typename Derived::Scalar;
  using Window = Eigen::Array<Scalar, kFilterLength, 1>;
  constexpr Eigen::Index F = kFilterLength;
  const Eigen::Ref<const Signal<Scalar>> x(signal);
  const Eigen::Index n = x.size();
  if (n < 1) throw Error(ErrorCode::kEmptyInput, "dwt_step: empty signal");

  const Eigen::Index m = coefficient_length(n, mode);
  const Eigen::Index period = 2 * m;
  // Sample t of the extended signal.
  auto extended = [&](Eigen::Index t) {
    if (mode == ExtensionMode::kPeriodic) return x[std::min(detail::wrap(t, period), n - 1)];
    return x[detail::reflect(t, n)];
  };

  // Output k is the dot product of the reversed filters with the extended
  // signal over [2k + phase - (F - 1), 2k + phase].
  const Eigen::Index phase = mode == ExtensionMode::kPeriodic ? 0 : 1;
  const Window lo = f.dec_lo.reverse();
  const Window hi = f.dec_hi.reverse();
  Signal<Scalar> ca(m);
  Signal<Scalar> cd(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index start = 2 * k + phase - (F - 1);
    if (start >= 0 && start + F <= n) {
      const auto window = x.template segment<F>(start);
      ca[k] = (lo * window).sum();
      cd[k] = (hi * window).sum();
    } else {
      Window window;
      for (Eigen::Index j = 0; j < F; ++j) window[j] = extended(start + j);
      ca[k] = (lo * window).sum();
      cd[k] = (hi * window).sum();
    }
  }
  return {std::move(ca), std::move(cd)};
}

template <typename DerivedA, typename DerivedD>
Signal<typename DerivedA::Scalar> idwt_step(const Eigen::ArrayBase<DerivedA>& ca,
                                            const Eigen::ArrayBase<DerivedD>& cd,
                                            const FilterQuad<typename DerivedA::Scalar>& f,
                                            Eigen::Index target_length,
                                            ExtensionMode mode = ExtensionMode::kPeriodic) {
  using Scalar = typename DerivedA::Scalar;
  constexpr Eigen::Index F = kFilterLength;
  constexpr Eigen::Index H = F / 2;
  const Eigen::Ref<const Signal<Scalar>> a(ca);
  const Eigen::Ref<const Signal<Scalar>> d(cd);
  const Eigen::Index m = a.size();
  if (target_length < 1 || d.size() != m || coefficient_length(target_length, mode) != m) {
    throw Error(ErrorCode::kInconsistentLengths,
                "idwt_step: coefficient lengths do not match the target length");
  }
  const detail::PolyphaseSynthesis<Scalar> synth(f);

  Signal<Scalar> out = Signal<Scalar>::Zero(target_length);
  if (mode == ExtensionMode::kPeriodic) {
    // Full convolution of the upsampled branches, q in [0, period + F - 1),
    // folded back onto one period with the analysis delay of F - 1:
    // sample q lands on (q - (F - 1)) mod period.
    const Eigen::Index period = 2 * m;
    const Eigen::Index full_length = period + F - 1;
    auto deposit = [&](Eigen::Index q, Scalar value) {
      if (q >= full_length) return;
      const Eigen::Index i = detail::wrap(q - (F - 1), period);
      if (i < target_length) out[i] += value;
    };
    for (Eigen::Index p = 0; p < m + H; ++p) {
      const auto [even, odd] = synth.at(a.data(), d.data(), m, p - (H - 1));
      deposit(2 * p, even);
      deposit(2 * p + 1, odd);
    }
  } else {
    // Valid part of the upsampled convolution: 2m - F + 2 samples.
    const Eigen::Index pairs = (2 * m - F + 2) / 2;
    for (Eigen::Index p = 0; p < pairs && 2 * p < target_length; ++p) {
      const auto [even, odd] = synth.at(a.data(), d.data(), m, p);
      out[2 * p] = even;
      if (2 * p + 1 < target_length) out[2 * p + 1] = odd;
    }
  }
  return out;
}

// Coefficient bands of a Mallat pyramid, ordered low to high frequency:
// {cA_L, cD_L, cD_(L-1), ..., cD1}. For the standard level-5 pipeline that is
// {cA5, cD5, cD4, cD3, cD2, cD1}.
template <typename Scalar = double>
struct SubbandSet {
  std::vector<Signal<Scalar>> bands;
  Eigen::Index original_length = 0;
  int sample_rate_hz = 0;
  ExtensionMode mode = ExtensionMode::kPeriodic;

  int level() const { return static_cast<int>(bands.size()) - 1; }
  std::size_t band_count() const { return bands.size(); }
};

std::string band_name(int level, std::size_t index);

// Nominal [low, high] Hz edges of each band of a level-L pyramid at the given
// rate, same order as SubbandSet::bands. The real filters overlap.
std::vector<std::pair<double, double>> band_edges_hz(int level, int sample_rate_hz);

template <typename Derived>
SubbandSet<typename Derived::Scalar> decompose(const Eigen::ArrayBase<Derived>& signal, int level,
                                               ExtensionMode mode = ExtensionMode::kPeriodic,
                                               int sample_rate_hz = 0) {
  using Scalar = typename Derived::Scalar;
  if (level < 1 || level > kMaxLevel) {
    throw Error(ErrorCode::kInvalidArgument, "wavedec: level must be in 1..8");
  }
  if (signal.size() < (Eigen::Index{1} << level)) {
    throw Error(ErrorCode::kSignalTooShort,
                "wavedec: signal shorter than 2^level samples");
  }
  static const FilterQuad<Scalar> filters = sym12_filters<Scalar>();

  SubbandSet<Scalar> set;
  set.original_length = signal.size();
  set.sample_rate_hz = sample_rate_hz;
  set.mode = mode;
  set.bands.resize(static_cast<std::size_t>(level) + 1);

  Signal<Scalar> approx;
  for (int k = 1; k <= level; ++k) {
    auto [ca, cd] = k == 1 ? dwt_step(signal, filters, mode) : dwt_step(approx, filters, mode);
    set.bands[static_cast<std::size_t>(level - k + 1)] = std::move(cd);
    approx = std::move(ca);
  }
  set.bands[0] = std::move(approx);
  return set;
}

template <typename Scalar>
Signal<Scalar> reconstruct(const SubbandSet<Scalar>& set) {
  const int level = set.level();
  if (level < 1 || set.original_length < 1) {
    throw Error(ErrorCode::kInconsistentLengths, "waverec: malformed subband set");
  }
  static const FilterQuad<Scalar> filters = sym12_filters<Scalar>();
  const auto lengths = level_lengths(set.original_length, level, set.mode);
  for (int k = 1; k <= level; ++k) {
    const auto& band = set.bands[static_cast<std::size_t>(level - k + 1)];
    if (band.size() != lengths[static_cast<std::size_t>(k)]) {
      throw Error(ErrorCode::kInconsistentLengths,
                  "waverec: band " + band_name(level, static_cast<std::size_t>(level - k + 1)) +
                      " has a corrupted length");
    }
  }
  if (set.bands[0].size() != lengths.back()) {
    throw Error(ErrorCode::kInconsistentLengths, "waverec: approximation band has a corrupted length");
  }

  Signal<Scalar> approx = set.bands[0];
  for (int k = level; k >= 1; --k) {
    approx = idwt_step(approx, set.bands[static_cast<std::size_t>(level - k + 1)], filters,
                       lengths[static_cast<std::size_t>(k - 1)], set.mode);
  }
  return approx;
}

SubbandSet<double> wavedec(const AudioBuffer& audio, int level = kDefaultLevel,
                           ExtensionMode mode = ExtensionMode::kPeriodic);
AudioBuffer waverec(const SubbandSet<double>& subbands);

// Sum of squares of each band, same order as the bands.
template <typename Scalar>
std::vector<Scalar> band_energies(const SubbandSet<Scalar>& set) {
  std::vector<Scalar> out;
  out.reserve(set.bands.size());
  for (const auto& b : set.bands) out.push_back(b.square().sum());
  return out;
}

}  // namespace wavenhance
