#include <gtest/gtest.h>

#include <cstdint>
#include <cstring>
#include <random>

#include "test_support.hpp"
#include "wavenhance/audio.hpp"
#include "wavenhance/error.hpp"

namespace wavenhance {
namespace {

using testing::scratch_dir;

// Minimal RIFF writer for reader tests: `frames` already holds the encoded
// little-endian sample bytes.
void write_raw_wav(const std::filesystem::path& path, std::uint16_t tag, std::uint16_t channels,
                   std::uint16_t bits, const std::vector<std::uint8_t>& frames,
                   bool extensible = false) {
  std::vector<std::uint8_t> out;
  auto u16 = [&](std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back(v >> 8);
  };
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
  };
  auto tag4 = [&](const char* s) { out.insert(out.end(), s, s + 4); };
  const std::uint32_t fmt_size = extensible ? 40 : 16;
  tag4("RIFF");
  u32(static_cast<std::uint32_t>(4 + 8 + fmt_size + 8 + frames.size()));
  tag4("WAVE");
  tag4("fmt ");
  u32(fmt_size);
  u16(extensible ? 0xFFFE : tag);
  u16(channels);
  u32(44100);
  u32(44100u * channels * bits / 8);
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  if (extensible) {
    u16(22);
    u16(bits);
    u32(0);
    u16(tag);  // first two bytes of the subformat GUID carry the format tag
    const std::uint8_t guid_tail[14] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                        0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};
    out.insert(out.end(), guid_tail, guid_tail + 14);
  }
  tag4("data");
  u32(static_cast<std::uint32_t>(frames.size()));
  out.insert(out.end(), frames.begin(), frames.end());
  std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(out.data()),
                                              static_cast<std::streamsize>(out.size()));
}

std::vector<std::uint8_t> pcm16(std::initializer_list<int> values) {
  std::vector<std::uint8_t> out;
  for (int v : values) {
    const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
    out.push_back(u & 0xff);
    out.push_back(u >> 8);
  }
  return out;
}

ErrorCode error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no wavenhance::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(AudioBuffer, RejectsNonFiniteSamplesAndBadRate) {
  Samples x(3);
  x << 0.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
  EXPECT_EQ(error_code_of([&] { AudioBuffer(x, 44100); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_code_of([&] { AudioBuffer(Samples::Zero(3), 0); }), ErrorCode::kInvalidArgument);
}

TEST(ReadWav, Mono16BitScaling) {
  const auto dir = scratch_dir("wav_mono16");
  write_raw_wav(dir / "a.wav", 1, 1, 16, pcm16({0, 16384, -16384}));
  const AudioBuffer a = read_wav(dir / "a.wav");
  ASSERT_EQ(a.size(), 3);
  EXPECT_EQ(a.sample_rate_hz(), 44100);
  EXPECT_NEAR(a.samples()[0], 0.0, 1e-4);
  EXPECT_NEAR(a.samples()[1], 0.5, 1e-4);
  EXPECT_NEAR(a.samples()[2], -0.5, 1e-4);
}

TEST(ReadWav, StereoIsAveraged) {
  const auto dir = scratch_dir("wav_stereo");
  write_raw_wav(dir / "s.wav", 1, 2, 16, pcm16({32767, 0, 32767, 0}));
  const AudioBuffer a = read_wav(dir / "s.wav");
  ASSERT_EQ(a.size(), 2);
  EXPECT_NEAR(a.samples()[0], 0.5, 1e-4);
  EXPECT_NEAR(a.samples()[1], 0.5, 1e-4);
}

TEST(ReadWav, OtherSampleFormats) {
  const auto dir = scratch_dir("wav_formats");
  // 8-bit unsigned: 128 is zero, 255 is +127/127.
  write_raw_wav(dir / "u8.wav", 1, 1, 8, {128, 255, 1});
  auto a = read_wav(dir / "u8.wav");
  EXPECT_NEAR(a.samples()[0], 0.0, 1e-12);
  EXPECT_NEAR(a.samples()[1], 1.0, 1e-12);
  EXPECT_NEAR(a.samples()[2], -1.0, 1e-12);

  // 24-bit: 0x400000 is half scale.
  write_raw_wav(dir / "s24.wav", 1, 1, 24, {0x00, 0x00, 0x40, 0x00, 0x00, 0xC0});
  a = read_wav(dir / "s24.wav");
  EXPECT_NEAR(a.samples()[0], 0.5, 1e-6);
  EXPECT_NEAR(a.samples()[1], -0.5, 1e-6);

  // 32-bit integer.
  write_raw_wav(dir / "s32.wav", 1, 1, 32, {0x00, 0x00, 0x00, 0x40});
  a = read_wav(dir / "s32.wav");
  EXPECT_NEAR(a.samples()[0], 0.5, 1e-9);

  // 32-bit float, plain and extensible.
  std::vector<std::uint8_t> floats(8);
  const float fv[2] = {0.25f, -0.75f};
  std::memcpy(floats.data(), fv, 8);
  write_raw_wav(dir / "f32.wav", 3, 1, 32, floats);
  a = read_wav(dir / "f32.wav");
  EXPECT_DOUBLE_EQ(a.samples()[0], 0.25);
  EXPECT_DOUBLE_EQ(a.samples()[1], -0.75);
  write_raw_wav(dir / "f32x.wav", 3, 1, 32, floats, true);
  a = read_wav(dir / "f32x.wav");
  EXPECT_DOUBLE_EQ(a.samples()[1], -0.75);
}

TEST(ReadWav, DistinctErrors) {
  const auto dir = scratch_dir("wav_errors");
  EXPECT_EQ(error_code_of([&] { read_wav(dir / "missing.wav"); }), ErrorCode::kIo);

  write_raw_wav(dir / "adpcm.wav", 2, 1, 4, {0, 0});
  EXPECT_EQ(error_code_of([&] { read_wav(dir / "adpcm.wav"); }), ErrorCode::kUnsupportedFormat);

  std::ofstream(dir / "text.wav") << "not a wav file at all";
  EXPECT_EQ(error_code_of([&] { read_wav(dir / "text.wav"); }), ErrorCode::kUnsupportedFormat);

  write_raw_wav(dir / "empty.wav", 1, 1, 16, {});
  try {
    read_wav(dir / "empty.wav");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroFrames);
    EXPECT_NE(std::string(e.what()).find("zero frames"), std::string::npos) << e.what();
  }
}

TEST(WriteWav, RoundTripWithinQuantization) {
  const auto dir = scratch_dir("wav_roundtrip");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Samples x(2000);
  for (auto& v : x) v = u(rng);
  x[0] = 1.0;
  x[1] = -1.0;
  write_wav(dir / "r.wav", AudioBuffer(x, 22050));
  const AudioBuffer back = read_wav(dir / "r.wav");
  EXPECT_EQ(back.sample_rate_hz(), 22050);
  EXPECT_LE((back.samples() - x).abs().maxCoeff(), 1.0 / 32767);
}

TEST(WriteWav, ClipsAndScalesSymmetrically) {
  const auto dir = scratch_dir("wav_clip");
  Samples x(3);
  x << 1.5, -1.0, -3.0;
  write_wav(dir / "c.wav", AudioBuffer(x, 8000));
  const std::string bytes = testing::read_file(dir / "c.wav");
  ASSERT_EQ(bytes.size(), 44u + 6u);
  auto sample = [&](int i) {
    std::int16_t v;
    std::memcpy(&v, bytes.data() + 44 + 2 * i, 2);
    return v;
  };
  EXPECT_EQ(sample(0), 32767);
  EXPECT_EQ(sample(1), -32767);
  EXPECT_EQ(sample(2), -32767);
}

TEST(WriteWav, UnwritablePath) {
  EXPECT_EQ(error_code_of([] {
              write_wav("/nonexistent-dir/x.wav", AudioBuffer(Samples::Zero(4), 8000));
            }),
            ErrorCode::kIo);
}

TEST(SignalStats, Examples) {
  Samples c(4);
  c << 0.5, 0.5, 0.5, 0.5;
  auto s = signal_stats(AudioBuffer(c, 8000));
  EXPECT_DOUBLE_EQ(s.rms, 0.5);
  EXPECT_DOUBLE_EQ(s.energy, 1.0);
  EXPECT_DOUBLE_EQ(s.peak, 0.5);

  Samples alt(4);
  alt << 1, -1, 1, -1;
  s = signal_stats(AudioBuffer(alt, 8000));
  EXPECT_DOUBLE_EQ(s.rms, 1.0);
  EXPECT_DOUBLE_EQ(s.energy, 4.0);
  EXPECT_DOUBLE_EQ(s.peak, 1.0);

  // 100 whole periods of a 441 Hz sine.
  s = signal_stats(AudioBuffer(testing::sine(44100, 441.0, 44100), 44100));
  EXPECT_NEAR(s.rms, std::sqrt(0.5), 1e-3);

  EXPECT_EQ(error_code_of([] { signal_stats(AudioBuffer(Samples(0), 8000)); }),
            ErrorCode::kEmptyInput);
}

TEST(SignalStats, InvariantsOnRandomBuffers) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Samples x = testing::random_samples(1 + trial * 37, rng);
    const auto s = signal_stats(AudioBuffer(x, 16000));
    double brute = 0.0;
    for (double v : x) brute += v * v;
    EXPECT_EQ(s.energy, brute);
    EXPECT_NEAR(s.energy, s.rms * s.rms * static_cast<double>(x.size()), 1e-12 * s.energy);
    EXPECT_GE(s.peak, s.rms);
  }
}

TEST(NormalizeRms, ExamplesAndProperty) {
  Samples x(2);
  x << 0.2, -0.2;
  const auto y = normalize_rms(AudioBuffer(x, 8000), 0.4);
  EXPECT_NEAR(y.samples()[0], 0.4, 1e-15);
  EXPECT_NEAR(y.samples()[1], -0.4, 1e-15);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const AudioBuffer a(testing::random_samples(64 + trial, rng, 0.1 + trial), 8000);
    const double target = 0.01 * (trial + 1);
    const auto out = normalize_rms(a, target);
    EXPECT_NEAR(signal_stats(out).rms, target, 1e-9 * target);
    // Pure scaling: constant ratio.
    const Samples ratio = out.samples() / a.samples();
    EXPECT_NEAR(ratio.maxCoeff(), ratio.minCoeff(), 1e-12 * ratio.maxCoeff());
  }
  const AudioBuffer same(testing::random_samples(100, rng), 8000);
  EXPECT_LE((normalize_rms(same, signal_stats(same).rms).samples() - same.samples()).abs().maxCoeff(),
            1e-15);
  EXPECT_EQ(error_code_of([] { normalize_rms(AudioBuffer(Samples::Zero(8), 8000), 1.0); }),
            ErrorCode::kEmptyInput);
}

TEST(NormalizeEnergy, ExamplesAndProperty) {
  Samples x(2);
  x << 1.0, 0.0;
  const auto y = normalize_energy(AudioBuffer(x, 8000), 2.0);
  EXPECT_NEAR(y.samples()[0], std::sqrt(2.0), 1e-15);
  EXPECT_EQ(y.samples()[1], 0.0);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const AudioBuffer a(testing::random_samples(50 + trial, rng), 8000);
    const double target = 0.5 + trial;
    const auto out = normalize_energy(a, target);
    EXPECT_NEAR(energy(out), target, 1e-9 * target);
    EXPECT_NEAR(out.samples()[0] / a.samples()[0], std::sqrt(target / energy(a)), 1e-12);
  }
  EXPECT_EQ(error_code_of([] { normalize_energy(AudioBuffer(Samples::Zero(8), 8000), 1.0); }),
            ErrorCode::kEmptyInput);
}

TEST(MixAtNsr, Examples) {
  Samples s(2), n(2);
  s << 1, 0;
  n << 0, 1;
  const AudioBuffer speech(s, 8000);
  const AudioBuffer noise(n, 8000);
  const auto mixed = mix_at_nsr(speech, noise, 2.0);
  EXPECT_EQ(mixed.samples()[0], 1.0);
  EXPECT_EQ(mixed.samples()[1], 2.0);
  EXPECT_EQ(mix_at_nsr(speech, noise, 0.0).samples().matrix(), s.matrix());

  EXPECT_EQ(error_code_of([&] { mix_at_nsr(speech, noise, -1.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_code_of([&] { mix_at_nsr(speech, AudioBuffer(n, 16000), 1.0); }),
            ErrorCode::kInvalidArgument);
}

TEST(MixAtNsr, NoiseIsTiled) {
  Samples s = Samples::Zero(7);
  Samples n(3);
  n << 1, 2, 3;
  const auto mixed = mix_at_nsr(AudioBuffer(s, 8000), AudioBuffer(n, 8000), 1.0);
  Samples expected(7);
  expected << 1, 2, 3, 1, 2, 3, 1;
  EXPECT_EQ(mixed.samples().matrix(), expected.matrix());
}

TEST(MixAtNsr, NoiseEnergyRatioAtNsr3) {
  std::mt19937_64 rng(5);
  const auto speech = normalize_rms(AudioBuffer(testing::random_samples(44100, rng), 44100), 0.1);
  const auto noise = normalize_rms(AudioBuffer(testing::random_samples(44100, rng), 44100), 0.1);
  const auto mixed = mix_at_nsr(speech, noise, 3.0);
  const double noise_part = (mixed.samples() - speech.samples()).square().sum();
  EXPECT_NEAR(noise_part / energy(speech), 9.0, 1e-6);
}

TEST(MixAtNsr, LinearInNsr) {
  std::mt19937_64 rng(6);
  const AudioBuffer s(testing::random_samples(500, rng), 8000);
  const AudioBuffer n(testing::random_samples(300, rng), 8000);
  const AudioBuffer silent(Samples::Zero(500), 8000);
  const Samples lhs = mix_at_nsr(s, n, 0.7).samples() + mix_at_nsr(silent, n, 1.3).samples();
  EXPECT_LE((lhs - mix_at_nsr(s, n, 2.0).samples()).abs().maxCoeff(), 1e-12);
}

}  // namespace
}  // namespace wavenhance
