#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "wavenhance/error.hpp"
#include "wavenhance/spectrogram.hpp"

namespace wavenhance {
namespace {

TEST(Spectrogram, ToneLandsInExpectedBin) {
  const int rate = 44100;
  const AudioBuffer a(testing::sine(rate, 1000.0, rate), rate);
  SpectrogramOptions options;
  const auto mag = magnitude_spectrogram(a, options);
  ASSERT_EQ(mag.rows(), options.frame / 2 + 1);
  ASSERT_EQ(mag.cols(), 1 + (rate - options.frame) / options.hop);
  const Eigen::ArrayXd mean = mag.rowwise().mean();
  Eigen::Index peak = 0;
  mean.maxCoeff(&peak);
  EXPECT_EQ(peak, std::lround(1000.0 * options.frame / rate));
  EXPECT_DOUBLE_EQ(mag.maxCoeff(), 1.0);
}

TEST(Spectrogram, SilenceIsAllFloor) {
  const AudioBuffer a(Samples::Zero(5000), 8000);
  const auto db = to_db(magnitude_spectrogram(a), -80.0);
  EXPECT_EQ(db.maxCoeff(), -80.0);
  EXPECT_EQ(db.minCoeff(), -80.0);
}

TEST(Spectrogram, ShortInputGetsOneFrame) {
  const AudioBuffer a(Samples::Ones(100), 8000);
  SpectrogramOptions options;
  options.frame = 256;
  options.hop = 64;
  const auto mag = magnitude_spectrogram(a, options);
  EXPECT_EQ(mag.rows(), 129);
  EXPECT_EQ(mag.cols(), 1);
  options.frame = 300;
  EXPECT_THROW(magnitude_spectrogram(a, options), Error);
}

TEST(SpectralBandEnergies, PartitionSumsToSignalEnergy) {
  std::mt19937_64 rng(51);
  const AudioBuffer a(testing::random_samples(3001, rng), 16000);
  const auto e = spectral_band_energies(a, {{0, 1000}, {1000, 3000}, {3000, 8000.001}});
  EXPECT_NEAR(e[0] + e[1] + e[2], energy(a), 1e-9 * energy(a));

  const AudioBuffer tone(testing::sine(16000, 2000.0, 16000), 16000);
  const auto t = spectral_band_energies(tone, {{0, 1500}, {1500, 2500}, {2500, 8000}});
  EXPECT_GT(t[1], 0.99 * energy(tone));
}

TEST(SpectrogramFiles, MatrixAndPgm) {
  const auto dir = testing::scratch_dir("spectrogram_files");
  Eigen::ArrayXXd db(3, 2);
  db << 0, -80, -40, -20, -80, 0;
  write_spectrogram_matrix(dir / "m.txt", db);
  EXPECT_EQ(testing::read_file(dir / "m.txt"), "0 -80\n-40 -20\n-80 0\n");

  write_spectrogram_pgm(dir / "s.pgm", db, -80.0);
  const std::string pgm = testing::read_file(dir / "s.pgm");
  const std::string header = "P5\n2 3\n255\n";
  ASSERT_EQ(pgm.size(), header.size() + 6);
  EXPECT_EQ(pgm.substr(0, header.size()), header);
  const auto* px = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  // Top row is the highest bin.
  EXPECT_EQ(px[0], 0);
  EXPECT_EQ(px[1], 255);
  EXPECT_EQ(px[2], 128);
  EXPECT_EQ(px[3], 191);
  EXPECT_EQ(px[4], 255);
  EXPECT_EQ(px[5], 0);
}

}  // namespace
}  // namespace wavenhance
