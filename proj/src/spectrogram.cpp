#include "wavenhance/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>

#include "wavenhance/error.hpp"
#include "wavenhance/stft.hpp"

namespace wavenhance {

Eigen::ArrayXXd magnitude_spectrogram(const AudioBuffer& audio, const SpectrogramOptions& options) {
  if (audio.empty()) throw Error(ErrorCode::kEmptyInput, "spectrogram: empty audio");
  if (options.hop <= 0 || !(options.floor_db < 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "spectrogram: hop must be > 0 and floor_db < 0");
  }
  RealFft fft(options.frame);
  const int frame = options.frame;
  const Eigen::ArrayXd window = periodic_hann(frame);

  Eigen::ArrayXd x = audio.samples();
  if (x.size() < frame) {
    Eigen::ArrayXd padded = Eigen::ArrayXd::Zero(frame);
    padded.head(x.size()) = x;
    x = std::move(padded);
  }
  const Eigen::Index frames = 1 + (x.size() - frame) / options.hop;
  Eigen::ArrayXXd mag(frame / 2 + 1, frames);
  for (Eigen::Index t = 0; t < frames; ++t) {
    mag.col(t) = fft.forward(x.segment(t * options.hop, frame) * window).abs();
  }
  const double peak = mag.maxCoeff();
  if (peak > 0.0) mag /= peak;
  return mag;
}

std::vector<double> spectral_band_energies(const AudioBuffer& audio,
                                           const std::vector<std::pair<double, double>>& bands_hz) {
  if (audio.empty()) throw Error(ErrorCode::kEmptyInput, "spectral_band_energies: empty audio");
  int size = 2;
  while (size < audio.size()) size *= 2;
  Eigen::ArrayXd padded = Eigen::ArrayXd::Zero(size);
  padded.head(audio.size()) = audio.samples();
  RealFft fft(size);
  const Eigen::ArrayXd power = fft.forward(padded).abs2();

  // Parseval for a real signal: bins 1 .. N/2-1 stand for two conjugate bins.
  const double bin_hz = static_cast<double>(audio.sample_rate_hz()) / size;
  std::vector<double> out;
  out.reserve(bands_hz.size());
  for (const auto& [lo, hi] : bands_hz) {
    double e = 0.0;
    for (int k = 0; k <= size / 2; ++k) {
      const double f = k * bin_hz;
      if (f < lo || f >= hi) continue;
      e += (k == 0 || k == size / 2 ? 1.0 : 2.0) * power[k];
    }
    out.push_back(e / size);
  }
  return out;
}

Eigen::ArrayXXd to_db(const Eigen::ArrayXXd& magnitudes, double floor_db) {
  return magnitudes.unaryExpr([floor_db](double m) {
    return m > 0.0 ? std::max(floor_db, 20.0 * std::log10(m)) : floor_db;
  });
}

void write_spectrogram_matrix(const std::filesystem::path& path, const Eigen::ArrayXXd& db) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  for (Eigen::Index r = 0; r < db.rows(); ++r) {
    for (Eigen::Index c = 0; c < db.cols(); ++c) {
      out << (c ? " " : "") << fmt::format("{:.6g}", db(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, fmt::format("write failed for '{}'", path.string()));
}

void write_spectrogram_pgm(const std::filesystem::path& path, const Eigen::ArrayXXd& db,
                           double floor_db) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << "P5\n" << db.cols() << ' ' << db.rows() << "\n255\n";
  std::string row(static_cast<std::size_t>(db.cols()), '\0');
  for (Eigen::Index r = db.rows() - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < db.cols(); ++c) {
      const double v = std::clamp((db(r, c) - floor_db) / -floor_db, 0.0, 1.0);
      row[static_cast<std::size_t>(c)] = static_cast<char>(std::lround(255.0 * v));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw Error(ErrorCode::kIo, fmt::format("write failed for '{}'", path.string()));
}

}  // namespace wavenhance
