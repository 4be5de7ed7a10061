#include "wavenhance/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <mutex>
#include <thread>

#include "wavenhance/digest.hpp"

namespace wavenhance {

namespace {

// Grid values are snapped to 1e-9 so that 0.1-steps and 0.5-steps agree
// bit-for-bit (0.5 == 5 * 0.1 after snapping).
double snap(double v) { return std::round(v * 1e9) / 1e9; }

std::vector<double> make_grid(double lo, double hi, double step) {
  std::vector<double> grid;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= count; ++k) grid.push_back(snap(lo + static_cast<double>(k) * step));
  return grid;
}

std::string join_gains(const GainVector& g) {
  std::string out;
  for (int b = 0; b < g.size(); ++b) {
    if (b) out += ',';
    out += fmt::format("{:.6g}", g[b]);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads and rethrows the
// exception of the lowest failing index.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  return scenario == Scenario::kEnhanceThenMix ? "enhance-then-mix" : "mix-then-enhance";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "enhance-then-mix") return Scenario::kEnhanceThenMix;
  if (text == "mix-then-enhance") return Scenario::kMixThenEnhance;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown scenario '{}' (enhance-then-mix | mix-then-enhance)", text));
}

void SearchConfig::validate() const {
  if (!(gain_step > 0.0) || !(gain_min >= 0.0) || !(gain_max >= gain_min)) {
    throw Error(ErrorCode::kInvalidArgument, "search: invalid gain range or step");
  }
  const auto grid = gain_grid();
  if (std::find(grid.begin(), grid.end(), 1.0) == grid.end()) {
    throw Error(ErrorCode::kInvalidArgument, "search: gain grid must contain 1.0");
  }
  if (coarse_to_fine) {
    const auto coarse = coarse_grid();
    if (!(coarse_step > gain_step) || std::find(coarse.begin(), coarse.end(), 1.0) == coarse.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "search: coarse grid must be coarser than the fine grid and contain 1.0");
    }
  }
  if (nsr_grid.empty()) throw Error(ErrorCode::kInvalidArgument, "search: empty NSR grid");
  for (std::size_t i = 0; i < nsr_grid.size(); ++i) {
    if (!(nsr_grid[i] >= 0.0) || !std::isfinite(nsr_grid[i]) ||
        (i > 0 && !(nsr_grid[i] > nsr_grid[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "search: NSR grid must be non-negative and strictly ascending");
    }
  }
  if (max_sweeps < 1) throw Error(ErrorCode::kInvalidArgument, "search: max_sweeps must be >= 1");
  if (normalize_text(reference_text, language).empty()) {
    throw Error(ErrorCode::kEmptyReference, "search: reference text is empty");
  }
  if (initial_gains && initial_gains->size() != level + 1) {
    throw Error(ErrorCode::kInvalidArgument, "search: initial gains do not match the level");
  }
  limiter.validate();
}

std::vector<double> SearchConfig::gain_grid() const { return make_grid(gain_min, gain_max, gain_step); }

std::vector<double> SearchConfig::coarse_grid() const {
  return make_grid(gain_min, gain_max, coarse_step);
}

std::optional<double> EvaluationCache::lookup(const std::string& key) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EvaluationCache::insert(const std::string& key, double accuracy) {
  std::unique_lock lock(mutex_);
  entries_.emplace(key, accuracy);
}

std::size_t EvaluationCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

GainEvaluator::GainEvaluator(const AudioBuffer& speech, const AudioBuffer& noise,
                             Scenario scenario, const SearchConfig& config,
                             Transcriber& transcriber, EvaluatorOptions options)
    : speech_(speech),
      noise_(noise),
      scenario_(scenario),
      config_(config),
      transcriber_(transcriber),
      options_(std::move(options)),
      cache_(options_.cache ? options_.cache : &own_cache_) {
  config_.validate();
  context_digest_ = sha256_hex(fmt::format(
      "{}|{}|{}|{}|{}|{:.17g}|{:.17g}|{}", audio_digest(speech_), audio_digest(noise_),
      transcriber_.name(), config_.language, config_.reference_text,
      config_.limiter.peak_threshold, config_.limiter.knee_start, config_.level));
  if (scenario_ == Scenario::kMixThenEnhance) {
    for (double nsr : config_.nsr_grid) noisy_inputs_.push_back(mix_at_nsr(speech_, noise_, nsr));
  }
}

std::string GainEvaluator::cache_key(const GainVector& gains, double nsr) const {
  std::string text = fmt::format("{}|{}|{:.17g}", context_digest_, to_string(scenario_), nsr);
  for (int b = 0; b < gains.size(); ++b) text += fmt::format("|{:.17g}", gains[b]);
  return sha256_hex(text);
}

std::vector<double> GainEvaluator::score(const GainVector& gains, std::vector<Fresh>& fresh) const {
  const auto& grid = config_.nsr_grid;
  std::vector<double> accuracies(grid.size());
  std::optional<AudioBuffer> enhanced_speech;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double nsr = grid[i];
    const std::string key = cache_key(gains, nsr);
    if (const auto hit = cache_->lookup(key)) {
      accuracies[i] = *hit;
      continue;
    }
    AudioBuffer mix = [&] {
      if (scenario_ == Scenario::kEnhanceThenMix) {
        if (!enhanced_speech) {
          enhanced_speech = wavelet_enhance(speech_, gains, config_.limiter, config_.level).audio;
        }
        return mix_at_nsr(*enhanced_speech, noise_, nsr);
      }
      return wavelet_enhance(noisy_inputs_[i], gains, config_.limiter, config_.level).audio;
    }();

    Transcript transcript;
    try {
      transcript = transcriber_.transcribe(mix, config_.language);
    } catch (const Error& e) {
      throw EvaluationError(e.code(),
                            fmt::format("transcription failed at nsr={:.6g}: {}", nsr, e.what()),
                            nsr);
    }
    accuracies[i] =
        transcription_accuracy(transcript.text, config_.reference_text, config_.language)
            .accuracy_percent;
    cache_->insert(key, accuracies[i]);
    fresh.push_back({nsr, accuracies[i]});
  }
  return accuracies;
}

void GainEvaluator::commit(const GainVector& gains, const std::vector<Fresh>& fresh) {
  for (const auto& f : fresh) {
    EvaluationRecord record;
    record.sequence = trace_.size();
    record.scenario = scenario_;
    record.gains = gains;
    record.nsr = f.nsr;
    record.accuracy = f.accuracy;
    record.timestamp =
        options_.wall_clock_timestamps
            ? std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch())
                  .count()
            : static_cast<double>(record.sequence);
    ++evaluations_;
    trace_.push_back(record);
    if (options_.sink) options_.sink(record);
  }
}

std::vector<double> GainEvaluator::per_nsr(const GainVector& gains) {
  std::vector<Fresh> fresh;
  auto accuracies = score(gains, fresh);
  commit(gains, fresh);
  return accuracies;
}

double GainEvaluator::mean(const GainVector& gains) { return mean_of(per_nsr(gains)); }

std::vector<double> GainEvaluator::mean_batch(const std::vector<GainVector>& candidates) {
  std::vector<std::vector<Fresh>> fresh(candidates.size());
  std::vector<double> means(candidates.size(), 0.0);
  std::exception_ptr failure;
  try {
    parallel_for(candidates.size(), config_.jobs, [&](std::size_t i) {
      means[i] = mean_of(score(candidates[i], fresh[i]));
    });
  } catch (...) {
    failure = std::current_exception();
  }
  // Completed work is committed in candidate order even when a later
  // candidate failed, so the partial trace stays deterministic.
  for (std::size_t i = 0; i < candidates.size(); ++i) commit(candidates[i], fresh[i]);
  if (failure) std::rethrow_exception(failure);
  return means;
}

double GainEvaluator::normalization_factor(const GainVector& gains) const {
  const AudioBuffer& input =
      scenario_ == Scenario::kEnhanceThenMix ? speech_ : noisy_inputs_.front();
  return wavelet_enhance(input, gains, config_.limiter, config_.level).log.normalization_factor;
}

double evaluate_gains(const AudioBuffer& speech, const AudioBuffer& noise, const GainVector& gains,
                      Scenario scenario, const SearchConfig& config, Transcriber& transcriber,
                      EvaluationCache* cache) {
  EvaluatorOptions options;
  options.cache = cache;
  GainEvaluator evaluator(speech, noise, scenario, config, transcriber, std::move(options));
  return evaluator.mean(gains);
}

namespace {

// Index of the winning candidate: highest score, then closest to the
// incumbent value, then smaller gain.
std::size_t pick_best(const std::vector<double>& values, const std::vector<double>& scores,
                      double incumbent) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (scores[i] > scores[best]) {
      best = i;
    } else if (scores[i] == scores[best]) {
      const double di = std::abs(values[i] - incumbent);
      const double db = std::abs(values[best] - incumbent);
      if (di < db || (di == db && values[i] < values[best])) best = i;
    }
  }
  return best;
}

std::vector<double> with_incumbent(std::vector<double> values, double incumbent) {
  if (std::find(values.begin(), values.end(), incumbent) == values.end()) {
    values.push_back(incumbent);
    std::sort(values.begin(), values.end());
  }
  return values;
}

struct BandMove {
  double gain;
  double score;
};

BandMove search_band(GainEvaluator& evaluator, const SearchConfig& config, const GainVector& current,
                     int band) {
  const double incumbent = current[band];
  auto scan = [&](const std::vector<double>& values) {
    std::vector<GainVector> candidates;
    candidates.reserve(values.size());
    for (double g : values) candidates.push_back(current.with(band, g));
    const auto scores = evaluator.mean_batch(candidates);
    const std::size_t i = pick_best(values, scores, incumbent);
    return BandMove{values[i], scores[i]};
  };

  if (!config.coarse_to_fine) return scan(with_incumbent(config.gain_grid(), incumbent));

  const BandMove coarse = scan(with_incumbent(config.coarse_grid(), incumbent));
  std::vector<double> fine;
  for (double g : config.gain_grid()) {
    if (std::abs(g - coarse.gain) < config.coarse_step - 1e-9) fine.push_back(g);
  }
  fine = with_incumbent(std::move(fine), incumbent);
  fine = with_incumbent(std::move(fine), coarse.gain);
  return scan(fine);
}

OptimizationResult finish(GainEvaluator& evaluator, Scenario scenario, const SearchConfig& config,
                          const GainVector& best, double best_score, int sweeps,
                          const std::vector<double>& baseline) {
  OptimizationResult result;
  result.scenario = scenario;
  result.best_gains = best;
  result.mean_accuracy = best_score;
  result.baseline_mean_accuracy = mean_of(baseline);
  result.sweeps_run = sweeps;
  const auto enhanced = evaluator.per_nsr(best);
  for (std::size_t i = 0; i < config.nsr_grid.size(); ++i) {
    result.per_nsr_trace.push_back({config.nsr_grid[i], baseline[i], enhanced[i]});
  }
  result.effective_gains = effective_gains(best, evaluator.normalization_factor(best));
  result.evaluations = evaluator.evaluations();
  result.trace = evaluator.trace();
  return result;
}

}  // namespace

OptimizationResult greedy_optimize(const AudioBuffer& speech, const AudioBuffer& noise,
                                   Scenario scenario, const SearchConfig& config,
                                   Transcriber& transcriber, EvaluatorOptions options) {
  GainEvaluator evaluator(speech, noise, scenario, config, transcriber, std::move(options));
  const GainVector unit = GainVector::unit(config.level + 1);

  GainVector current = config.initial_gains.value_or(unit);
  std::vector<double> baseline;
  double current_score = 0.0;
  int sweeps = 0;

  auto partial = [&] {
    OptimizationResult r;
    r.scenario = scenario;
    r.best_gains = current;
    r.effective_gains = current;
    r.mean_accuracy = current_score;
    r.baseline_mean_accuracy = baseline.empty() ? 0.0 : mean_of(baseline);
    r.sweeps_run = sweeps;
    r.evaluations = evaluator.evaluations();
    r.trace = evaluator.trace();
    return r;
  };

  try {
    baseline = evaluator.per_nsr(unit);
    current_score = evaluator.mean(current);

    while (sweeps < config.max_sweeps) {
      ++sweeps;
      const double sweep_start = current_score;
      for (int band = 0; band < current.size(); ++band) {
        const BandMove move = search_band(evaluator, config, current, band);
        current = current.with(band, move.gain);
        current_score = move.score;
      }
      if (!(current_score > sweep_start)) break;
    }

    // A warm start may end below the all-ones baseline; the baseline is part
    // of the search set, so it wins in that case.
    const double baseline_mean = mean_of(baseline);
    if (baseline_mean > current_score) {
      current = unit;
      current_score = baseline_mean;
    }
    return finish(evaluator, scenario, config, current, current_score, sweeps, baseline);
  } catch (const Error& e) {
    throw OptimizationError(e.code(), e.what(), partial());
  }
}

OptimizationResult point_to_point_optimize(const AudioBuffer& speech, const AudioBuffer& noise,
                                           double nsr, Scenario scenario,
                                           const SearchConfig& config, Transcriber& transcriber,
                                           EvaluatorOptions options) {
  SearchConfig single = config;
  single.nsr_grid = {nsr};
  return greedy_optimize(speech, noise, scenario, single, transcriber, std::move(options));
}

std::string format_trace_record(const EvaluationRecord& r) {
  return fmt::format("seq={} scenario={} gains={} nsr={:.6g} accuracy={:.6g} timestamp={:.6f}",
                     r.sequence, to_string(r.scenario), join_gains(r.gains), r.nsr, r.accuracy,
                     r.timestamp);
}

std::string format_result(const OptimizationResult& r) {
  std::string out;
  out += fmt::format("scenario={}\n", to_string(r.scenario));
  out += fmt::format("best_gains={}\n", join_gains(r.best_gains));
  out += fmt::format("effective_gains={}\n", join_gains(r.effective_gains));
  out += fmt::format("mean_accuracy={:.6g}\n", r.mean_accuracy);
  out += fmt::format("baseline_mean_accuracy={:.6g}\n", r.baseline_mean_accuracy);
  out += fmt::format("improvement={:.6g}\n", r.mean_accuracy - r.baseline_mean_accuracy);
  out += fmt::format("evaluations={}\n", r.evaluations);
  out += fmt::format("sweeps_run={}\n", r.sweeps_run);
  for (const auto& p : r.per_nsr_trace) {
    out += fmt::format("nsr={:.6g} baseline={:.6g} enhanced={:.6g}\n", p.nsr, p.baseline_accuracy,
                       p.enhanced_accuracy);
  }
  return out;
}

std::map<std::string, std::string> parse_key_values(std::string_view line) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    const std::size_t end = std::min(line.find(' ', pos), line.size());
    const std::string_view field = line.substr(pos, end - pos);
    if (!field.empty()) {
      const auto eq = field.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::kParse, fmt::format("malformed key=value field '{}'", field));
      }
      out.emplace(std::string(field.substr(0, eq)), std::string(field.substr(eq + 1)));
    }
    pos = end;
  }
  return out;
}

}  // namespace wavenhance
