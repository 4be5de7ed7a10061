#pragma once

#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "wavenhance/audio.hpp"
#include "wavenhance/enhancer.hpp"
#include "wavenhance/error.hpp"
#include "wavenhance/scorer.hpp"

namespace wavenhance {

enum class Scenario {
  kEnhanceThenMix,  // enhance clean speech, then add noise
  kMixThenEnhance,  // add noise, then enhance the mix
};

std::string_view to_string(Scenario scenario);
// Accepts "enhance-then-mix" / "mix-then-enhance".
Scenario parse_scenario(std::string_view text);

struct SearchConfig {
  double gain_min = 0.0;
  double gain_max = 3.0;
  double gain_step = 0.1;
  std::vector<double> nsr_grid = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  int max_sweeps = 10;
  std::string language = "en";
  std::string reference_text;

  // Two-stage grid per band: coarse_step first, then gain_step within one
  // coarse step of the coarse winner.
  bool coarse_to_fine = false;
  double coarse_step = 0.5;

  // Warm start. The all-ones vector is still evaluated as the baseline.
  std::optional<GainVector> initial_gains;

  LimiterConfig limiter;
  int level = kDefaultLevel;
  int jobs = 1;

  // Throws kInvalidArgument on an empty/unsorted NSR grid, a gain grid that
  // misses 1.0, or an empty reference text.
  void validate() const;
  std::vector<double> gain_grid() const;
  std::vector<double> coarse_grid() const;
};

// Thread-safe map from an evaluation digest to its accuracy.
class EvaluationCache {
 public:
  std::optional<double> lookup(const std::string& key) const;
  void insert(const std::string& key, double accuracy);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, double> entries_;
};

struct EvaluationRecord {
  std::size_t sequence = 0;
  Scenario scenario = Scenario::kEnhanceThenMix;
  GainVector gains;
  double nsr = 0.0;
  double accuracy = 0.0;
  // Logical clock (equal to sequence) unless a wall clock was requested.
  double timestamp = 0.0;
};

// Receives every fresh (transcriber-backed) evaluation, in deterministic
// order, as soon as its batch completes.
using TraceSink = std::function<void(const EvaluationRecord&)>;

struct NsrPoint {
  double nsr = 0.0;
  double baseline_accuracy = 0.0;
  double enhanced_accuracy = 0.0;
};

struct OptimizationResult {
  Scenario scenario = Scenario::kEnhanceThenMix;
  GainVector best_gains;
  GainVector effective_gains;
  double mean_accuracy = 0.0;
  double baseline_mean_accuracy = 0.0;
  std::vector<NsrPoint> per_nsr_trace;
  std::size_t evaluations = 0;
  int sweeps_run = 0;
  std::vector<EvaluationRecord> trace;
};

// Transcriber failure during an evaluation, tagged with the failing NSR.
class EvaluationError : public Error {
 public:
  EvaluationError(ErrorCode code, const std::string& message, double nsr)
      : Error(code, message), nsr_(nsr) {}
  double nsr() const noexcept { return nsr_; }

 private:
  double nsr_;
};

// Aborted search. partial() holds the best point so far and the full trace
// of evaluations completed before the failure.
class OptimizationError : public Error {
 public:
  OptimizationError(ErrorCode code, const std::string& message, OptimizationResult partial)
      : Error(code, message), partial_(std::move(partial)) {}
  const OptimizationResult& partial() const noexcept { return partial_; }

 private:
  OptimizationResult partial_;
};

struct EvaluatorOptions {
  EvaluationCache* cache = nullptr;  // shared cache; a private one is used when null
  TraceSink sink;
  bool wall_clock_timestamps = false;
};

// Scores gain vectors for one (speech, noise, scenario, config, transcriber)
// context. Speech and noise must already be rms-matched.
class GainEvaluator {
 public:
  GainEvaluator(const AudioBuffer& speech, const AudioBuffer& noise, Scenario scenario,
                const SearchConfig& config, Transcriber& transcriber,
                EvaluatorOptions options = {});

  // Accuracy at every NSR of the grid, in grid order.
  std::vector<double> per_nsr(const GainVector& gains);
  double mean(const GainVector& gains);

  // Mean accuracy of each candidate; candidates are scored concurrently on up
  // to config.jobs threads, but records reach the trace in candidate order.
  std::vector<double> mean_batch(const std::vector<GainVector>& candidates);

  std::size_t evaluations() const { return evaluations_; }
  const std::vector<EvaluationRecord>& trace() const { return trace_; }
  // Energy-normalization factor of the enhancement applied at the first NSR.
  double normalization_factor(const GainVector& gains) const;
  std::string cache_key(const GainVector& gains, double nsr) const;

 private:
  struct Fresh {
    double nsr;
    double accuracy;
  };
  std::vector<double> score(const GainVector& gains, std::vector<Fresh>& fresh) const;
  void commit(const GainVector& gains, const std::vector<Fresh>& fresh);

  AudioBuffer speech_;
  AudioBuffer noise_;
  Scenario scenario_;
  SearchConfig config_;
  Transcriber& transcriber_;
  EvaluatorOptions options_;
  EvaluationCache own_cache_;
  EvaluationCache* cache_;
  std::string context_digest_;
  std::vector<AudioBuffer> noisy_inputs_;  // MixThenEnhance: the mix per NSR
  std::size_t evaluations_ = 0;
  std::vector<EvaluationRecord> trace_;
};

// Mean accuracy over config.nsr_grid.
double evaluate_gains(const AudioBuffer& speech, const AudioBuffer& noise, const GainVector& gains,
                      Scenario scenario, const SearchConfig& config, Transcriber& transcriber,
                      EvaluationCache* cache = nullptr);

// Coordinate-wise greedy search from all-ones (or config.initial_gains) over
// bands cA5 -> cD1, repeated until a sweep brings no improvement or
// config.max_sweeps is reached. Ties prefer the gain closest to the current
// value, then the smaller gain.
OptimizationResult greedy_optimize(const AudioBuffer& speech, const AudioBuffer& noise,
                                   Scenario scenario, const SearchConfig& config,
                                   Transcriber& transcriber, EvaluatorOptions options = {});

// greedy_optimize restricted to a single NSR.
OptimizationResult point_to_point_optimize(const AudioBuffer& speech, const AudioBuffer& noise,
                                           double nsr, Scenario scenario,
                                           const SearchConfig& config, Transcriber& transcriber,
                                           EvaluatorOptions options = {});

// Plain-text key=value formats for the evaluation trace (one record per line)
// and the final result file.
std::string format_trace_record(const EvaluationRecord& record);
std::string format_result(const OptimizationResult& result);

// Splits "k1=v1 k2=v2 ..." on spaces; values may not contain spaces except
// the gains fields, which are comma-separated.
std::map<std::string, std::string> parse_key_values(std::string_view line);

}  // namespace wavenhance
