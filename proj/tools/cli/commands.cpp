#include "commands.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>

#include "common.hpp"
#include "wavenhance/digest.hpp"
#include "wavenhance/error.hpp"
#include "wavenhance/hl_sim.hpp"
#include "wavenhance/optimizer.hpp"
#include "wavenhance/spectrogram.hpp"
#include "wavenhance/stft.hpp"

namespace wavenhance::cli {

namespace fs = std::filesystem;

namespace {

std::string manifest_path_for(const std::string& output) { return output + ".manifest"; }

LimiterConfig make_limiter(double threshold, double knee) {
  LimiterConfig limiter;
  limiter.peak_threshold = threshold;
  limiter.knee_start = knee;
  limiter.validate();
  return limiter;
}

// ---------------------------------------------------------------- enhance

struct EnhanceArgs {
  std::string input;
  std::string output;
  GainOptions gains;
  int level = kDefaultLevel;
  std::string mode = "periodic";
  double threshold = 0.99;
  double knee = 0.80;
};

int cmd_enhance(const EnhanceArgs& a, const std::vector<std::string>& args) {
  const auto mode = parse_mode(a.mode);
  const GainVector gains = a.gains.resolve(a.level);
  const LimiterConfig limiter = make_limiter(a.threshold, a.knee);
  const AudioBuffer input = read_wav(a.input);
  const auto result = wavelet_enhance(input, gains, limiter, a.level, mode);
  write_wav(a.output, result.audio);

  Manifest m("enhance", args);
  m.add_input("input", a.input, input);
  m.set("output", a.output);
  m.set("gains", to_string(gains));
  m.set("level", std::to_string(a.level));
  m.set("mode", a.mode);
  m.set("peak_threshold", a.threshold);
  m.set("knee_start", a.knee);
  m.write(manifest_path_for(a.output));

  const auto& log = result.log;
  fmt::print("gains={}\n", to_string(gains));
  fmt::print("effective_gains={}\n", to_string(effective_gains(gains, log.normalization_factor)));
  fmt::print("normalization_factor={}\n", num(log.normalization_factor));
  fmt::print("limiter_engaged={}\n", log.limiter_engaged ? "true" : "false");
  fmt::print("pre_limiter_peak={}\n", num(log.pre_limiter_peak));
  fmt::print("input_energy={}\noutput_energy={}\n", num(log.input_energy), num(log.output_energy));
  fmt::print("energy_deviation={}\n\n", num(log.energy_deviation));
  fmt::print("{}\n{}", stats_table(input, result.audio).aligned(),
             band_energy_table(input, result.audio, a.level, mode).aligned());
  return 0;
}

// -------------------------------------------------------------------- mix

struct MixArgs {
  std::string speech;
  std::string noise;
  std::string output;
  double nsr = 0.0;
};

int cmd_mix(const MixArgs& a, const std::vector<std::string>& args) {
  const AudioBuffer speech = read_wav(a.speech);
  const AudioBuffer noise_raw = read_wav(a.noise);
  const AudioBuffer noise = normalize_rms(noise_raw, signal_stats(speech).rms);
  const AudioBuffer mix = mix_at_nsr(speech, noise, a.nsr);
  write_wav(a.output, mix);

  Manifest m("mix", args);
  m.add_input("speech", a.speech, speech);
  m.add_input("noise", a.noise, noise_raw);
  m.set("output", a.output);
  m.set("nsr", a.nsr);
  m.write(manifest_path_for(a.output));

  const auto s = signal_stats(mix);
  fmt::print("nsr={}\nrms={}\nenergy={}\npeak={}\nclipped_on_write={}\n", num(a.nsr), num(s.rms),
             num(s.energy), num(s.peak), s.peak > 1.0 ? "true" : "false");
  return 0;
}

// ------------------------------------------------------------------ score

struct ScoreArgs {
  std::string input;
  ReferenceOptions reference;
  TranscriberOptions transcriber;
  int level = kDefaultLevel;
  std::string manifest;
};

int cmd_score(const ScoreArgs& a, const std::vector<std::string>& args) {
  const std::string reference = a.reference.resolve();
  const AudioBuffer audio = read_wav(a.input);
  Manifest m("score", args);
  m.add_input("input", a.input, audio);
  m.set("language", a.reference.language);
  m.set("reference.sha256", sha256_hex(reference));
  auto transcriber =
      a.transcriber.create(audio, reference, a.reference.language, a.level, {}, m);
  const Transcript t = transcriber->transcribe(audio, a.reference.language);
  const ScoreReport r = transcription_accuracy(t.text, reference, a.reference.language);
  if (!a.manifest.empty()) m.write(a.manifest);

  fmt::print("transcriber={}\n", transcriber->name());
  fmt::print("accuracy={}\n", num(r.accuracy_percent));
  fmt::print("edit_distance={}\n", r.edit_distance);
  fmt::print("reference_tokens={}\n", r.reference.tokens.size());
  fmt::print("hypothesis_tokens={}\n", r.hypothesis.tokens.size());
  fmt::print("no_hypotheses={}\n", t.no_hypotheses ? "true" : "false");
  fmt::print("hypothesis={}\n", t.text);
  return 0;
}

// --------------------------------------------------------------- optimize

struct OptimizeArgs {
  std::string speech;
  std::string noise;
  std::string out_dir;
  std::string scenario = "enhance-then-mix";
  ReferenceOptions reference;
  TranscriberOptions transcriber;
  double gain_min = 0.0;
  double gain_max = 3.0;
  double gain_step = 0.1;
  std::vector<double> nsr_grid = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  int max_sweeps = 10;
  bool coarse_to_fine = false;
  double coarse_step = 0.5;
  std::vector<double> initial_gains;
  bool point_to_point = false;
  int level = kDefaultLevel;
  double threshold = 0.99;
  double knee = 0.80;
  int jobs = 0;
  bool wall_clock = false;
};

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

Table summary_table(const OptimizeArgs& a, const OptimizationResult& r) {
  // Rows are inputs, columns interferences, cells the mean accuracy over the
  // NSR grid.
  Table t;
  t.header = {"input", stem(a.noise)};
  t.rows.push_back({stem(a.speech) + " original", num(r.baseline_mean_accuracy)});
  t.rows.push_back({stem(a.speech) + " enhanced", num(r.mean_accuracy)});
  t.rows.push_back({"improvement", num(r.mean_accuracy - r.baseline_mean_accuracy)});
  return t;
}

Table per_nsr_table(const OptimizationResult& r, const std::vector<OptimizationResult>& ceiling) {
  Table t;
  t.header = {"nsr", "baseline", "enhanced"};
  if (!ceiling.empty()) t.header.push_back("point_to_point");
  for (std::size_t i = 0; i < r.per_nsr_trace.size(); ++i) {
    const auto& p = r.per_nsr_trace[i];
    t.rows.push_back({num(p.nsr), num(p.baseline_accuracy), num(p.enhanced_accuracy)});
    if (!ceiling.empty()) t.rows.back().push_back(num(ceiling[i].mean_accuracy));
  }
  return t;
}

Table gains_table(const OptimizeArgs& a, const OptimizationResult& r,
                  const std::vector<OptimizationResult>& ceiling) {
  Table t;
  t.header = {"gains"};
  for (int b = 0; b < r.best_gains.size(); ++b) {
    t.header.push_back(band_name(a.level, static_cast<std::size_t>(b)));
  }
  auto row = [&](std::string label, const GainVector& g) {
    std::vector<std::string> cells{std::move(label)};
    for (int b = 0; b < g.size(); ++b) cells.push_back(num(g[b]));
    t.rows.push_back(std::move(cells));
  };
  row("universal raw", r.best_gains);
  row("universal effective", r.effective_gains);
  for (const auto& c : ceiling) {
    row(fmt::format("nsr {} raw", num(c.per_nsr_trace.front().nsr)), c.best_gains);
  }
  return t;
}

std::string ceiling_lines(const std::vector<OptimizationResult>& ceiling) {
  std::string out;
  for (const auto& c : ceiling) {
    out += fmt::format("point_to_point nsr={} accuracy={} best_gains={} effective_gains={}\n",
                       num(c.per_nsr_trace.front().nsr), num(c.mean_accuracy),
                       join(std::vector<double>(c.best_gains.values().begin(),
                                                c.best_gains.values().end())),
                       join(std::vector<double>(c.effective_gains.values().begin(),
                                                c.effective_gains.values().end())));
  }
  return out;
}

int cmd_optimize(const OptimizeArgs& a, const std::vector<std::string>& args) {
  const Scenario scenario = parse_scenario(a.scenario);
  const LimiterConfig limiter = make_limiter(a.threshold, a.knee);
  const std::string reference = a.reference.resolve();

  SearchConfig config;
  config.gain_min = a.gain_min;
  config.gain_max = a.gain_max;
  config.gain_step = a.gain_step;
  config.nsr_grid = a.nsr_grid;
  config.max_sweeps = a.max_sweeps;
  config.language = a.reference.language;
  config.reference_text = reference;
  config.coarse_to_fine = a.coarse_to_fine;
  config.coarse_step = a.coarse_step;
  config.limiter = limiter;
  config.level = a.level;
  config.jobs = a.jobs > 0 ? a.jobs : default_jobs();
  if (!a.initial_gains.empty()) {
    config.initial_gains = GainVector(Eigen::Map<const Eigen::ArrayXd>(
        a.initial_gains.data(), static_cast<Eigen::Index>(a.initial_gains.size())));
  }
  config.validate();

  const AudioBuffer speech = read_wav(a.speech);
  const AudioBuffer noise_raw = read_wav(a.noise);
  const AudioBuffer noise = normalize_rms(noise_raw, signal_stats(speech).rms);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);

  Manifest m("optimize", args);
  m.add_input("speech", a.speech, speech);
  m.add_input("noise", a.noise, noise_raw);
  m.set("scenario", std::string(to_string(scenario)));
  m.set("gain_range", fmt::format("{}:{}:{}", num(a.gain_min), num(a.gain_step), num(a.gain_max)));
  m.set("nsr_grid", join(a.nsr_grid));
  m.set("max_sweeps", std::to_string(a.max_sweeps));
  m.set("coarse_to_fine", a.coarse_to_fine ? num(a.coarse_step) : "off");
  m.set("initial_gains", a.initial_gains.empty() ? "ones" : join(a.initial_gains));
  m.set("point_to_point", a.point_to_point ? "on" : "off");
  m.set("level", std::to_string(a.level));
  m.set("peak_threshold", a.threshold);
  m.set("knee_start", a.knee);
  m.set("language", a.reference.language);
  m.set("reference.sha256", sha256_hex(reference));
  m.set("timestamps", a.wall_clock ? "wall-clock" : "logical");
  auto transcriber = a.transcriber.create(speech, reference, a.reference.language, a.level,
                                          limiter, m);
  m.write(dir / "manifest.txt");

  // The trace is streamed so that an aborted run leaves every completed
  // evaluation on disk.
  std::ofstream trace(dir / "trace.log", std::ios::binary);
  if (!trace) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", (dir / "trace.log").string()));
  std::string run_label = "universal";
  EvaluationCache cache;
  EvaluatorOptions options;
  options.cache = &cache;
  options.wall_clock_timestamps = a.wall_clock;
  options.sink = [&](const EvaluationRecord& record) {
    trace << "run=" << run_label << ' ' << format_trace_record(record) << '\n';
    trace.flush();
  };

  OptimizationResult result;
  std::vector<OptimizationResult> ceiling;
  try {
    result = greedy_optimize(speech, noise, scenario, config, *transcriber, options);
    if (a.point_to_point) {
      for (double nsr : config.nsr_grid) {
        run_label = "point-to-point@" + num(nsr);
        ceiling.push_back(
            point_to_point_optimize(speech, noise, nsr, scenario, config, *transcriber, options));
      }
    }
  } catch (const OptimizationError& e) {
    write_text(dir / "result.txt", fmt::format("status=aborted\nerror={}\nrun={}\n{}", e.what(),
                                               run_label, format_result(e.partial())));
    throw;
  }

  const std::string result_text =
      "status=complete\n" + format_result(result) + ceiling_lines(ceiling);
  write_text(dir / "result.txt", result_text);

  const Table summary = summary_table(a, result);
  const Table per_nsr = per_nsr_table(result, ceiling);
  const Table gains = gains_table(a, result, ceiling);
  const std::string tables = fmt::format("scenario: {}\n\n{}\n{}\n{}", to_string(scenario),
                                         summary.aligned(), per_nsr.aligned(), gains.aligned());
  write_text(dir / "table.txt", tables);
  write_text(dir / "table.tsv", summary.tsv());
  write_text(dir / "per_nsr.tsv", per_nsr.tsv());
  write_text(dir / "gains.tsv", gains.tsv());

  fmt::print("{}\n{}", result_text, tables);
  return 0;
}

// ----------------------------------------------------------- simulate-hl

struct SimulateArgs {
  std::string input;
  std::string output;
  std::string audiogram;
  std::string preset;
  bool no_recruitment = false;
  double calibration = 100.0;
  int level = kDefaultLevel;
};

Table audiogram_band_table(const Audiogram& audiogram, const AudioBuffer& before,
                           const AudioBuffer& after) {
  std::vector<std::pair<double, double>> bands;
  for (const auto& p : audiogram.points()) {
    bands.emplace_back(p.frequency_hz / std::sqrt(2.0), p.frequency_hz * std::sqrt(2.0));
  }
  const auto in = spectral_band_energies(before, bands);
  const auto out = spectral_band_energies(after, bands);
  Table t;
  t.header = {"band_hz", "loss_db", "input_db", "output_db", "change_db"};
  auto db = [](double e) { return e > 0.0 ? 10.0 * std::log10(e) : -300.0; };
  for (std::size_t i = 0; i < bands.size(); ++i) {
    t.rows.push_back({num(audiogram.points()[i].frequency_hz),
                      num(audiogram.points()[i].loss_db), num(db(in[i])), num(db(out[i])),
                      num(db(out[i]) - db(in[i]))});
  }
  return t;
}

int cmd_simulate_hl(const SimulateArgs& a, const std::vector<std::string>& args) {
  Audiogram audiogram;
  if (!a.audiogram.empty()) {
    audiogram = read_audiogram(a.audiogram);
  } else if (a.preset == "moderate-sloping") {
    audiogram = Audiogram::moderate_sloping();
  } else if (a.preset == "normal") {
    audiogram = Audiogram::normal();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "one of --audiogram or --preset is required");
  }
  RecruitmentConfig recruitment;
  recruitment.enabled = !a.no_recruitment;
  HearingLossOptions options;
  options.calibration_db_spl = a.calibration;

  const AudioBuffer input = read_wav(a.input);
  const AudioBuffer simulated = simulate_hearing_loss(input, audiogram, recruitment, options);
  // Renormalized to the input energy so the scorer compares like with like.
  const AudioBuffer output = normalize_energy(simulated, energy(input));
  write_wav(a.output, output);

  Manifest m("simulate-hl", args);
  m.add_input("input", a.input, input);
  m.set("output", a.output);
  if (!a.audiogram.empty()) {
    m.set("audiogram", a.audiogram);
    m.set("audiogram.sha256", sha256_hex(read_text(a.audiogram)));
  } else {
    m.set("audiogram_preset", a.preset);
  }
  m.set("recruitment", recruitment.enabled ? "on" : "off");
  m.set("calibration_db_spl", a.calibration);
  m.write(manifest_path_for(a.output));

  fmt::print("recruitment={}\ncalibration_db_spl={}\nsimulated_energy={}\noutput_energy={}\n\n",
             recruitment.enabled ? "on" : "off", num(a.calibration), num(energy(simulated)),
             num(energy(output)));
  fmt::print("{}\n{}", audiogram_band_table(audiogram, input, output).aligned(),
             band_energy_table(input, output, a.level, ExtensionMode::kPeriodic).aligned());
  return 0;
}

// ------------------------------------------------------------ spectrogram

struct SpectrogramArgs {
  std::string input;
  std::string image;
  std::string matrix;
  int frame = 1024;
  int hop = 256;
  double floor_db = -80.0;
};

int cmd_spectrogram(const SpectrogramArgs& a, const std::vector<std::string>& args) {
  if (a.image.empty() && a.matrix.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "give --image and/or --matrix");
  }
  if (!is_power_of_two(a.frame) || a.frame < 4) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("--frame {} is not a power of two", a.frame));
  }
  if (a.hop < 1 || a.hop > a.frame) {
    throw Error(ErrorCode::kInvalidArgument, "--hop must be in 1 .. frame");
  }
  const AudioBuffer audio = read_wav(a.input);
  SpectrogramOptions options{a.frame, a.hop, a.floor_db};
  const Eigen::ArrayXXd mag = magnitude_spectrogram(audio, options);
  const Eigen::ArrayXXd db = to_db(mag, a.floor_db);
  if (!a.image.empty()) write_spectrogram_pgm(a.image, db, a.floor_db);
  if (!a.matrix.empty()) write_spectrogram_matrix(a.matrix, db);

  Manifest m("spectrogram", args);
  m.add_input("input", a.input, audio);
  m.set("frame", std::to_string(a.frame));
  m.set("hop", std::to_string(a.hop));
  m.set("floor_db", a.floor_db);
  if (!a.image.empty()) m.set("image", a.image);
  if (!a.matrix.empty()) m.set("matrix", a.matrix);
  m.write(manifest_path_for(a.image.empty() ? a.matrix : a.image));

  Eigen::Index peak_bin = 0;
  mag.rowwise().sum().maxCoeff(&peak_bin);
  fmt::print("bins={}\nframes={}\npeak_bin={}\npeak_bin_hz={}\n", mag.rows(), mag.cols(), peak_bin,
             num(static_cast<double>(peak_bin) * audio.sample_rate_hz() / a.frame));
  return 0;
}

// ----------------------------------------------------------------- digest

int cmd_digest(const std::vector<std::string>& inputs, const std::string& manifest,
               const std::vector<std::string>& args) {
  Manifest m("digest", args);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const AudioBuffer audio = read_wav(inputs[i]);
    m.add_input(fmt::format("input{}", i), inputs[i], audio);
    fmt::print("{}  {}\n", audio_digest(audio), inputs[i]);
  }
  if (!manifest.empty()) m.write(manifest);
  return 0;
}

}  // namespace

void register_commands(CLI::App& app, const std::vector<std::string>& args,
                       std::function<int()>& action) {
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));
  app.set_config("--config", "", "TOML/INI file with option defaults");

  {
    auto a = std::make_shared<EnhanceArgs>();
    auto* sub = app.add_subcommand("enhance", "apply per-band gains at constant energy");
    sub->add_option("input", a->input, "input WAV")->required();
    sub->add_option("output", a->output, "output WAV (16-bit)")->required();
    a->gains.add_to(*sub);
    sub->add_option("--level", a->level, "DWT level")->check(CLI::Range(1, kMaxLevel));
    sub->add_option("--mode", a->mode, "boundary extension")
        ->check(CLI::IsMember({"periodic", "symmetric"}));
    sub->add_option("--peak-threshold", a->threshold, "limiter ceiling");
    sub->add_option("--knee", a->knee, "limiter knee start");
    sub->callback([a, &action, &args] { action = [a, &args] { return cmd_enhance(*a, args); }; });
  }
  {
    auto a = std::make_shared<MixArgs>();
    auto* sub = app.add_subcommand("mix", "add rms-matched noise at a noise-to-signal ratio");
    sub->add_option("speech", a->speech, "speech WAV")->required();
    sub->add_option("noise", a->noise, "noise WAV (tiled to the speech length)")->required();
    sub->add_option("output", a->output, "output WAV")->required();
    sub->add_option("--nsr", a->nsr, "noise amplitude relative to the speech rms")
        ->required()
        ->check(CLI::NonNegativeNumber);
    sub->callback([a, &action, &args] { action = [a, &args] { return cmd_mix(*a, args); }; });
  }
  {
    auto a = std::make_shared<ScoreArgs>();
    auto* sub = app.add_subcommand("score", "transcribe a WAV and report transcription accuracy");
    sub->add_option("input", a->input, "input WAV")->required();
    a->reference.add_to(*sub);
    a->transcriber.add_to(*sub);
    sub->add_option("--level", a->level, "DWT level of the synthetic transcriber")
        ->check(CLI::Range(1, kMaxLevel));
    sub->add_option("--manifest", a->manifest, "write the run manifest here");
    sub->callback([a, &action, &args] { action = [a, &args] { return cmd_score(*a, args); }; });
  }
  {
    auto a = std::make_shared<OptimizeArgs>();
    auto* sub = app.add_subcommand("optimize", "greedy sub-band gain search over an NSR grid");
    sub->add_option("speech", a->speech, "speech WAV")->required();
    sub->add_option("noise", a->noise, "noise WAV (rms-matched to the speech)")->required();
    sub->add_option("--out-dir", a->out_dir, "output directory")->required();
    sub->add_option("--scenario", a->scenario, "enhance-then-mix | mix-then-enhance")
        ->check(CLI::IsMember({"enhance-then-mix", "mix-then-enhance"}));
    a->reference.add_to(*sub);
    a->transcriber.add_to(*sub);
    sub->add_option("--gain-min", a->gain_min, "smallest gain")->check(CLI::NonNegativeNumber);
    sub->add_option("--gain-max", a->gain_max, "largest gain")->check(CLI::NonNegativeNumber);
    sub->add_option("--gain-step", a->gain_step, "gain grid step")->check(CLI::PositiveNumber);
    sub->add_option("--nsr-grid", a->nsr_grid, "ascending NSR values")->delimiter(',');
    sub->add_option("--max-sweeps", a->max_sweeps, "sweep limit")->check(CLI::PositiveNumber);
    sub->add_flag("--coarse-to-fine", a->coarse_to_fine, "scan a coarse grid first");
    sub->add_option("--coarse-step", a->coarse_step, "coarse grid step")->check(CLI::PositiveNumber);
    sub->add_option("--initial-gains", a->initial_gains, "warm-start gains");
    sub->add_flag("--point-to-point", a->point_to_point, "also optimize each NSR on its own");
    sub->add_option("--level", a->level, "DWT level")->check(CLI::Range(1, kMaxLevel));
    sub->add_option("--peak-threshold", a->threshold, "limiter ceiling");
    sub->add_option("--knee", a->knee, "limiter knee start");
    sub->add_option("--jobs", a->jobs, "worker threads (default WAVENHANCE_JOBS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--wall-clock", a->wall_clock, "wall-clock trace timestamps (not reproducible)");
    sub->callback([a, &action, &args] { action = [a, &args] { return cmd_optimize(*a, args); }; });
  }
  {
    auto a = std::make_shared<SimulateArgs>();
    auto* sub = app.add_subcommand("simulate-hl", "hearing-loss simulation, energy renormalized");
    sub->add_option("input", a->input, "input WAV")->required();
    sub->add_option("output", a->output, "output WAV")->required();
    auto* file = sub->add_option("--audiogram", a->audiogram, "'frequency_hz loss_db' per line");
    sub->add_option("--preset", a->preset, "built-in audiogram")
        ->check(CLI::IsMember({"moderate-sloping", "normal"}))
        ->excludes(file);
    sub->add_flag("--no-recruitment", a->no_recruitment, "disable loudness recruitment");
    sub->add_option("--calibration", a->calibration, "dB SPL of a full-scale sine");
    sub->add_option("--level", a->level, "DWT level of the band table")
        ->check(CLI::Range(1, kMaxLevel));
    sub->callback(
        [a, &action, &args] { action = [a, &args] { return cmd_simulate_hl(*a, args); }; });
  }
  {
    auto a = std::make_shared<SpectrogramArgs>();
    auto* sub = app.add_subcommand("spectrogram", "peak-normalized magnitude spectrogram");
    sub->add_option("input", a->input, "input WAV")->required();
    sub->add_option("--image", a->image, "PGM output (dB, high frequencies on top)");
    sub->add_option("--matrix", a->matrix, "text matrix output (rows = bins, columns = frames)");
    sub->add_option("--frame", a->frame, "frame length, a power of two");
    sub->add_option("--hop", a->hop, "hop length, 1 .. frame");
    sub->add_option("--floor-db", a->floor_db, "dB floor")->check(CLI::Range(-400.0, -1.0));
    sub->callback(
        [a, &action, &args] { action = [a, &args] { return cmd_spectrogram(*a, args); }; });
  }
  {
    auto inputs = std::make_shared<std::vector<std::string>>();
    auto manifest = std::make_shared<std::string>();
    auto* sub = app.add_subcommand("digest", "print the sample digests used by fixture tables");
    sub->add_option("inputs", *inputs, "WAV files")->required();
    sub->add_option("--manifest", *manifest, "write the run manifest here");
    sub->callback([inputs, manifest, &action, &args] {
      action = [inputs, manifest, &args] { return cmd_digest(*inputs, *manifest, args); };
    });
  }
  {
    auto path = std::make_shared<std::string>();
    auto* sub = app.add_subcommand("replay", "rerun the command recorded in a manifest");
    sub->add_option("manifest", *path, "manifest file")->required();
    sub->callback([path, &action] {
      action = [path] {
        const auto recorded = manifest_args(*path);
        if (!recorded.empty() && recorded.front() == "replay") {
          throw Error(ErrorCode::kInvalidArgument, "a replay manifest cannot be replayed");
        }
        return run(recorded);
      };
    });
  }
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"wavenhance: wavelet sub-band speech intelligibility toolkit", "wavenhance"};
  std::function<int()> action;
  register_commands(app, args, action);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitClass::kUsage);
  }

  try {
    return action();
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.code()), e.what());
    return static_cast<int>(exit_class(e.code()));
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(stderr, "error [io]: {}\n", e.what());
    return static_cast<int>(ExitClass::kIo);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return static_cast<int>(ExitClass::kNumeric);
  }
}

}  // namespace wavenhance::cli
