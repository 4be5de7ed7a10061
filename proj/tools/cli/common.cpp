#include "common.hpp"

#include <algorithm>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "wavenhance/digest.hpp"
#include "wavenhance/error.hpp"
#include "wavenhance/http_transcriber.hpp"
#include "wavenhance/transcribers.hpp"

namespace wavenhance::cli {

std::string_view tool_version() { return WAVENHANCE_VERSION; }

Manifest::Manifest(std::string command, const std::vector<std::string>& args) {
  set("command", command);
  set("version", std::string(tool_version()));
  set("args", nlohmann::json(args).dump());
}

void Manifest::set(const std::string& key, const std::string& value) {
  const auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const auto& e) { return e.first == key; });
  if (it != entries_.end()) {
    it->second = value;
  } else {
    entries_.emplace_back(key, value);
  }
}

void Manifest::set(const std::string& key, double value) { set(key, num(value)); }

void Manifest::add_input(const std::string& key, const std::filesystem::path& path,
                         const AudioBuffer& audio) {
  set(key, path.string());
  set(key + ".sha256", audio_digest(audio));
  set(key + ".sample_rate_hz", std::to_string(audio.sample_rate_hz()));
  set(key + ".samples", std::to_string(audio.size()));
}

std::string Manifest::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += fmt::format("{}={}\n", k, v);
  return out;
}

void Manifest::write(const std::filesystem::path& path) const { write_text(path, str()); }

std::vector<std::string> manifest_args(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("args=", 0) != 0) continue;
    const auto doc = nlohmann::json::parse(line.substr(5), nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: args is not a JSON array", path.string(), line_no));
    }
    return doc.get<std::vector<std::string>>();
  }
  throw Error(ErrorCode::kParse, fmt::format("{}: no args= line", path.string()));
}

std::string Table::aligned() const {
  std::vector<std::size_t> width(header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  };
  widen(header);
  for (const auto& r : rows) widen(r);

  auto render = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      // First column left-aligned (labels), the rest right-aligned (numbers).
      line += c == 0 ? fmt::format("{:<{}}", row[c], width[c]) : fmt::format("{:>{}}", row[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line + '\n';
  };
  std::string out = render(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
  for (const auto& r : rows) out += render(r);
  return out;
}

std::string Table::tsv() const {
  auto render = [](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) line += (c ? "\t" : "") + row[c];
    return line + '\n';
  };
  std::string out = render(header);
  for (const auto& r : rows) out += render(r);
  return out;
}

std::string num(double v) { return fmt::format("{:.6g}", v); }

std::string join(const std::vector<double>& values, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += num(values[i]);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(ErrorCode::kIo, fmt::format("write failed for '{}'", path.string()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

namespace {

double to_db(double ratio) { return ratio > 0.0 ? 10.0 * std::log10(ratio) : -300.0; }

}  // namespace

Table band_energy_table(const AudioBuffer& before, const AudioBuffer& after, int level,
                        ExtensionMode mode) {
  const auto in = band_energies(wavedec(before, level, mode));
  const auto out = band_energies(wavedec(after, level, mode));
  const auto edges = band_edges_hz(level, before.sample_rate_hz());
  double in_total = 0.0;
  double out_total = 0.0;
  for (std::size_t b = 0; b < in.size(); ++b) {
    in_total += in[b];
    out_total += out[b];
  }
  Table t;
  t.header = {"band", "range_hz", "input_energy", "output_energy", "input_share", "output_share",
              "change_db"};
  for (std::size_t b = 0; b < in.size(); ++b) {
    t.rows.push_back({band_name(level, b),
                      fmt::format("{}-{}", num(edges[b].first), num(edges[b].second)), num(in[b]),
                      num(out[b]), num(in_total > 0 ? in[b] / in_total : 0.0),
                      num(out_total > 0 ? out[b] / out_total : 0.0),
                      num(in[b] > 0 ? to_db(out[b] / in[b]) : 0.0)});
  }
  return t;
}

Table stats_table(const AudioBuffer& before, const AudioBuffer& after) {
  const auto a = signal_stats(before);
  const auto b = signal_stats(after);
  Table t;
  t.header = {"signal", "rms", "energy", "peak"};
  t.rows.push_back({"input", num(a.rms), num(a.energy), num(a.peak)});
  t.rows.push_back({"output", num(b.rms), num(b.energy), num(b.peak)});
  return t;
}

void GainOptions::add_to(CLI::App& app, const std::string& gains_flag) {
  app.add_option(gains_flag, gains, "per-band gains, low to high band (cA5 cD5 .. cD1 at level 5)")
      ->expected(2, kMaxLevel + 1);
  app.add_option("--ca,--ca5", approx, "gain of the approximation band")
      ->check(CLI::NonNegativeNumber);
  for (int k = 1; k <= kMaxLevel; ++k) {
    app.add_option(fmt::format("--cd{}", k), detail[static_cast<std::size_t>(k)],
                   fmt::format("gain of detail band cD{}", k))
        ->check(CLI::NonNegativeNumber);
  }
}

GainVector GainOptions::resolve(int level) const {
  const int bands = level + 1;
  Eigen::ArrayXd g = Eigen::ArrayXd::Ones(bands);
  if (!gains.empty()) {
    if (static_cast<int>(gains.size()) != bands) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("expected {} gains for level {}, got {}", bands, level, gains.size()));
    }
    for (int b = 0; b < bands; ++b) g[b] = gains[static_cast<std::size_t>(b)];
  }
  if (approx) g[0] = *approx;
  for (int k = 1; k <= kMaxLevel; ++k) {
    if (const auto& v = detail[static_cast<std::size_t>(k)]) {
      if (k > level) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("--cd{} does not exist at level {}", k, level));
      }
      g[level + 1 - k] = *v;  // cD_level sits at index 1, cD1 last
    }
  }
  return GainVector(g);
}

ExtensionMode parse_mode(const std::string& text) {
  if (text == "periodic") return ExtensionMode::kPeriodic;
  if (text == "symmetric") return ExtensionMode::kSymmetric;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown extension mode '{}' (periodic | symmetric)", text));
}

void ReferenceOptions::add_to(CLI::App& app) {
  auto* text_opt = app.add_option("--reference", text, "reference transcript");
  auto* file_opt = app.add_option("--reference-file", file, "file holding the reference transcript");
  text_opt->excludes(file_opt);
  app.add_option("--language", language, "language tag (en, zh, ...)");
}

std::string ReferenceOptions::resolve() const {
  if (!file.empty()) return read_text(file);
  if (!text.empty()) return text;
  throw Error(ErrorCode::kInvalidArgument, "one of --reference or --reference-file is required");
}

void TranscriberOptions::add_to(CLI::App& app) {
  app.add_option("--transcriber", kind, "fixture | synthetic | http")
      ->check(CLI::IsMember({"fixture", "synthetic", "http"}));
  app.add_option("--fixtures", fixtures, "fixture table(s): <sha256><TAB><transcript> per line");
  app.add_option("--target-gains", target_gains,
                 "synthetic: gains whose enhancement of the target speech defines the target "
                 "band profile (default all ones)");
  app.add_option("--target-speech", target_speech,
                 "synthetic: speech the target profile is built from (default the input speech)");
  app.add_option("--full-deletion-db", full_deletion_db,
                 "synthetic: profile distance at which every token is dropped")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "synthetic: token deletion order seed");
  app.add_option("--asr-url", asr_url,
                 "http: endpoint base URL (overrides WAVENHANCE_ASR_URL; the token is read from "
                 "WAVENHANCE_ASR_TOKEN only)");
  app.add_option("--max-retries", max_retries, "http: retries of transient failures")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--timeout", timeout_s, "http: per-request timeout in seconds")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-in-flight", max_in_flight, "http: concurrent request limit")
      ->check(CLI::PositiveNumber);
}

std::unique_ptr<Transcriber> TranscriberOptions::create(const AudioBuffer& speech,
                                                        const std::string& reference,
                                                        const std::string& language, int level,
                                                        const LimiterConfig& limiter,
                                                        Manifest& manifest) const {
  manifest.set("transcriber", kind);
  if (kind == "fixture") {
    if (fixtures.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--transcriber fixture needs --fixtures");
    }
    auto t = std::make_unique<FixtureTranscriber>();
    for (const auto& path : fixtures) {
      t->load(path);
      manifest.set("fixtures." + path + ".sha256", sha256_hex(read_text(path)));
    }
    return t;
  }
  if (kind == "synthetic") {
    SyntheticTranscriberConfig config;
    config.reference_text = reference;
    config.level = level;
    config.full_deletion_db = full_deletion_db;
    config.seed = seed;
    const AudioBuffer target_source = target_speech.empty() ? speech : read_wav(target_speech);
    if (!target_speech.empty()) manifest.add_input("target_speech", target_speech, target_source);
    const GainVector planted = target_gains.empty()
                                   ? GainVector::unit(level + 1)
                                   : GainVector(Eigen::Map<const Eigen::ArrayXd>(
                                         target_gains.data(),
                                         static_cast<Eigen::Index>(target_gains.size())));
    if (planted.size() != level + 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("--target-gains needs {} values", level + 1));
    }
    config.target_profile =
        SyntheticTranscriber::planted_profile(target_source, planted, limiter, level);
    manifest.set("target_gains", to_string(planted));
    manifest.set("full_deletion_db", full_deletion_db);
    manifest.set("seed", std::to_string(seed));
    return std::make_unique<SyntheticTranscriber>(std::move(config), language);
  }
  auto config = HttpTranscriberConfig::from_environment();
  if (!asr_url.empty()) config.endpoint_url = asr_url;
  config.max_retries = max_retries;
  config.timeout = std::chrono::seconds(timeout_s);
  config.max_in_flight = max_in_flight;
  manifest.set("asr_url", config.endpoint_url);
  return std::make_unique<HttpTranscriber>(std::move(config));
}

int default_jobs() {
  if (const char* env = std::getenv("WAVENHANCE_JOBS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("WAVENHANCE_JOBS must be a positive integer, got '{}'", env));
    }
    return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace wavenhance::cli
