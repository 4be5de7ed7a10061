#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <utility>
#include <vector>

#include "wavenhance/audio.hpp"

namespace wavenhance {

struct SpectrogramOptions {
  int frame = 1024;
  int hop = 256;
  double floor_db = -80.0;
};

// Magnitude spectrogram, rows = bins 0..frame/2, columns = frames, scaled so
// the largest entry is 1 (all zeros for silence). Frame count is
// 1 + floor((n - frame) / hop); shorter input is zero-padded to one frame.
Eigen::ArrayXXd magnitude_spectrogram(const AudioBuffer& audio,
                                      const SpectrogramOptions& options = {});

// Energy of the whole signal within each [low, high) Hz band, from one
// zero-padded FFT. Band energies of a full partition sum to the signal energy.
std::vector<double> spectral_band_energies(const AudioBuffer& audio,
                                           const std::vector<std::pair<double, double>>& bands_hz);

// 20 log10 of the magnitudes, clamped below at floor_db.
Eigen::ArrayXXd to_db(const Eigen::ArrayXXd& magnitudes, double floor_db);

// Whitespace-separated text matrix, one line per bin.
void write_spectrogram_matrix(const std::filesystem::path& path, const Eigen::ArrayXXd& db);

// Binary PGM (P5); floor_db maps to 0 and 0 dB to 255, high frequencies on top.
void write_spectrogram_pgm(const std::filesystem::path& path, const Eigen::ArrayXXd& db,
                           double floor_db);

}  // namespace wavenhance
