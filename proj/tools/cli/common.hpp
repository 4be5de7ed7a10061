#pragma once

#include <CLI11.hpp>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wavenhance/audio.hpp"
#include "wavenhance/enhancer.hpp"
#include "wavenhance/scorer.hpp"
#include "wavenhance/wavelet.hpp"

namespace wavenhance::cli {

std::string_view tool_version();

// Key/value record of a run: command, verbatim arguments, resolved
// parameters and input digests. No timestamps, so reruns match byte for byte.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& args);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void add_input(const std::string& key, const std::filesystem::path& path,
                 const AudioBuffer& audio);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Arguments recorded in a manifest, for `replay`.
std::vector<std::string> manifest_args(const std::filesystem::path& path);

// Rows of preformatted cells, rendered as aligned text or as TSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string aligned() const;
  std::string tsv() const;
};

std::string num(double v);  // 6 significant digits
std::string join(const std::vector<double>& values, std::string_view sep = ",");

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Input/output energies per wavelet band, with nominal Hz ranges.
Table band_energy_table(const AudioBuffer& before, const AudioBuffer& after, int level,
                        ExtensionMode mode);
Table stats_table(const AudioBuffer& before, const AudioBuffer& after);

// --gains v0 .. vL plus per-band overrides --ca/--ca5 and --cd1 .. --cd8.
struct GainOptions {
  std::vector<double> gains;
  std::optional<double> approx;
  std::array<std::optional<double>, kMaxLevel + 1> detail{};  // index = detail level

  void add_to(CLI::App& app, const std::string& gains_flag = "--gains");
  GainVector resolve(int level) const;
};

ExtensionMode parse_mode(const std::string& text);

struct ReferenceOptions {
  std::string text;
  std::string file;
  std::string language = "en";

  void add_to(CLI::App& app);
  std::string resolve() const;
};

struct TranscriberOptions {
  std::string kind = "synthetic";
  std::vector<std::string> fixtures;
  std::vector<double> target_gains;
  std::string target_speech;
  double full_deletion_db = 30.0;
  std::uint64_t seed = 0x5eed;
  std::string asr_url;
  int max_retries = 3;
  int timeout_s = 60;
  int max_in_flight = 4;

  void add_to(CLI::App& app);
  // `speech` is the default target for the synthetic transcriber.
  std::unique_ptr<Transcriber> create(const AudioBuffer& speech, const std::string& reference,
                                      const std::string& language, int level,
                                      const LimiterConfig& limiter, Manifest& manifest) const;
};

// Value of WAVENHANCE_JOBS when set, else the number of hardware threads.
int default_jobs();

}  // namespace wavenhance::cli
