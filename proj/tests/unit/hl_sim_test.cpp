#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "wavenhance/error.hpp"
#include "wavenhance/hl_sim.hpp"
#include "wavenhance/spectrogram.hpp"

namespace wavenhance {
namespace {

const std::vector<std::pair<double, double>> kOctaves = {
    {0, 250}, {250, 500}, {500, 1000}, {1000, 2000}, {2000, 4000}, {4000, 8000}, {8000, 22050}};

AudioBuffer speech_clip() {
  const AudioBuffer s = read_wav(testing::data_dir() / "speech.wav");
  return AudioBuffer(s.samples().head(2 * 44100), s.sample_rate_hz());
}

TEST(InterpolateLoss, Examples) {
  const auto a = Audiogram::moderate_sloping();
  EXPECT_DOUBLE_EQ(interpolate_loss(a, 1000.0), 50.0);
  EXPECT_DOUBLE_EQ(interpolate_loss(a, 16000.0), 60.0);
  EXPECT_DOUBLE_EQ(interpolate_loss(a, 50.0), 30.0);
  EXPECT_NEAR(interpolate_loss(a, std::sqrt(500.0 * 1000.0)), 45.0, 1e-12);
  EXPECT_THROW(interpolate_loss(Audiogram(), 1000.0), Error);
  EXPECT_THROW(interpolate_loss(a, 0.0), Error);
}

TEST(Audiogram, ValidationAndShift) {
  EXPECT_THROW(Audiogram({{1000, 10}, {500, 20}}), Error);
  EXPECT_THROW(Audiogram({{1000, 10}, {1000, 20}}), Error);
  EXPECT_THROW(Audiogram({{1000, -1}}), Error);
  EXPECT_THROW(Audiogram({{0, 1}}), Error);
  const auto shifted = Audiogram::moderate_sloping().shifted(10.0);
  EXPECT_DOUBLE_EQ(interpolate_loss(shifted, 1000.0), 60.0);
  EXPECT_DOUBLE_EQ(interpolate_loss(Audiogram::normal(), 3000.0), 0.0);
}

TEST(ParseAudiogram, ValidFileAndErrors) {
  const auto a = parse_audiogram("# comment\n125 30\n\n1000 50 \n8000\t60\n");
  ASSERT_EQ(a.points().size(), 3u);
  EXPECT_EQ(a.points()[1].frequency_hz, 1000.0);
  EXPECT_EQ(a.points()[2].loss_db, 60.0);

  const auto from_file = read_audiogram(testing::data_dir() / "audiogram_moderate_sloping.txt");
  EXPECT_DOUBLE_EQ(interpolate_loss(from_file, 2000.0), 60.0);

  auto message = [](std::string_view text) {
    try {
      parse_audiogram(text, "ag.txt");
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("1000 20\n500 30\n").find("ag.txt:2"), std::string::npos);
  EXPECT_NE(message("1000 abc\n").find("ag.txt:1"), std::string::npos);
  EXPECT_NE(message("1000 20 7\n").find("ag.txt:1"), std::string::npos);
  EXPECT_NE(message("1000 -5\n").find("ag.txt:1"), std::string::npos);
  EXPECT_NE(message("# nothing\n"), "no error");
  try {
    read_audiogram("/nonexistent/ag.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(AbsoluteThreshold, ShapeOfTheCurve) {
  double min_value = 1e9, min_freq = 0.0;
  for (double f = 20.0; f <= 20000.0; f *= 1.01) {
    const double t = absolute_threshold(f);
    if (t < min_value) {
      min_value = t;
      min_freq = f;
    }
  }
  EXPECT_GT(min_freq, 2000.0);
  EXPECT_LT(min_freq, 5000.0);
  EXPECT_GT(absolute_threshold(100.0), absolute_threshold(1000.0));
  double previous = absolute_threshold(6000.0);
  for (double f = 6100.0; f <= 20000.0; f += 100.0) {
    const double t = absolute_threshold(f);
    EXPECT_GT(t, previous) << f;
    previous = t;
  }
  EXPECT_THROW(absolute_threshold(10.0), Error);
  EXPECT_THROW(absolute_threshold(25000.0), Error);
}

TEST(Recruitment, ExponentLaw) {
  EXPECT_EQ(RecruitmentConfig::exponent(0.0), 1.0);
  EXPECT_DOUBLE_EQ(RecruitmentConfig::exponent(30.0), 1.5);
  EXPECT_DOUBLE_EQ(RecruitmentConfig::exponent(90.0), 2.5);
  EXPECT_DOUBLE_EQ(RecruitmentConfig::exponent(200.0), 2.5);
  double previous = 1.0;
  for (double loss = 0.0; loss <= 150.0; loss += 0.5) {
    EXPECT_GE(RecruitmentConfig::exponent(loss), previous);
    previous = RecruitmentConfig::exponent(loss);
  }
}

TEST(SimulateHearingLoss, IdentityAtHighCalibration) {
  const AudioBuffer x = speech_clip();
  HearingLossOptions options;
  options.calibration_db_spl = 300.0;
  const auto y = simulate_hearing_loss(x, Audiogram::normal(), {false}, options);
  ASSERT_EQ(y.size(), x.size());
  EXPECT_LE((y.samples() - x.samples()).abs().maxCoeff(), 1e-3);
}

TEST(SimulateHearingLoss, HardGatingBelowThreshold) {
  // A 100 Hz tone at about 0 dB SPL sits below the quiet threshold there.
  const AudioBuffer quiet(testing::sine(8192, 100.0, 44100, 1e-5), 44100);
  const auto y = simulate_hearing_loss(quiet, Audiogram::normal(), {false});
  EXPECT_EQ(y.samples().abs().maxCoeff(), 0.0);

  // Audible at 100 dB SPL full scale, but a 90 dB loss pushes it under.
  const AudioBuffer loud(testing::sine(8192, 1000.0, 44100, 0.01), 44100);
  EXPECT_GT(energy(simulate_hearing_loss(loud, Audiogram::normal(), {false})), 0.0);
  const Audiogram severe({{125, 90}, {8000, 90}});
  EXPECT_EQ(simulate_hearing_loss(loud, severe, {false}).samples().abs().maxCoeff(), 0.0);
}

TEST(SimulateHearingLoss, ExtraLossNeverRaisesBandEnergy) {
  const AudioBuffer x = speech_clip();
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> loss(0.0, 70.0);
  const double freqs[] = {125, 250, 500, 1000, 2000, 4000, 8000};
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Audiogram::Point> points;
    for (double f : freqs) points.push_back({f, loss(rng)});
    const Audiogram a(points);
    for (bool recruit : {false, true}) {
      const auto base = spectral_band_energies(simulate_hearing_loss(x, a, {recruit}), kOctaves);
      const auto more =
          spectral_band_energies(simulate_hearing_loss(x, a.shifted(10.0), {recruit}), kOctaves);
      for (std::size_t b = 0; b < kOctaves.size(); ++b) {
        EXPECT_LE(more[b], base[b] * (1.0 + 1e-9)) << "trial " << trial << " band " << b;
      }
    }
  }
}

TEST(SimulateHearingLoss, SlopingLossTiltsSpectrum) {
  const AudioBuffer x = speech_clip();
  const auto y = simulate_hearing_loss(x, Audiogram::moderate_sloping(), {true});
  const std::vector<std::pair<double, double>> split = {{0, 500}, {4000, 22050}};
  const auto in = spectral_band_energies(x, split);
  const auto out = spectral_band_energies(y, split);
  const double shift_db = 10.0 * std::log10(in[1] / in[0]) - 10.0 * std::log10(out[1] / out[0]);
  EXPECT_GE(shift_db, 40.0);
}

TEST(SimulateHearingLoss, Errors) {
  const AudioBuffer x(Samples::Zero(4096), 44100);
  EXPECT_THROW(simulate_hearing_loss(x, Audiogram(), {true}), Error);
  EXPECT_THROW(simulate_hearing_loss(AudioBuffer(Samples(0), 44100), Audiogram::normal(), {true}),
               Error);
  HearingLossOptions odd;
  odd.frame = 1000;
  odd.hop = 500;
  EXPECT_THROW(simulate_hearing_loss(x, Audiogram::normal(), {true}, odd), Error);
}

}  // namespace
}  // namespace wavenhance
