#include "wavenhance/http_transcriber.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <json.hpp>
#include <thread>

#include "wavenhance/digest.hpp"
#include "wavenhance/error.hpp"

namespace wavenhance {

namespace {

using nlohmann::json;

bool is_transient(int status) {
  return status == 408 || status == 429 || (status >= 500 && status <= 599);
}

std::vector<std::uint8_t> pcm16_bytes(const AudioBuffer& audio) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(2 * static_cast<std::size_t>(audio.size()));
  for (double s : audio.samples()) {
    const auto q = static_cast<std::int16_t>(std::lround(std::clamp(s, -1.0, 1.0) * 32767.0));
    const auto u = static_cast<std::uint16_t>(q);
    bytes.push_back(static_cast<std::uint8_t>(u));
    bytes.push_back(static_cast<std::uint8_t>(u >> 8));
  }
  return bytes;
}

}  // namespace

HttpTranscriberConfig HttpTranscriberConfig::from_environment(const std::string& fallback_url) {
  HttpTranscriberConfig config;
  if (const char* url = std::getenv(kAsrUrlEnv); url && *url) {
    config.endpoint_url = url;
  } else if (!fallback_url.empty()) {
    config.endpoint_url = fallback_url;
  }
  if (const char* token = std::getenv(kAsrTokenEnv); token) config.credential = token;
  return config;
}

std::string build_recognize_request(const AudioBuffer& audio, std::string_view language) {
  const json body = {
      {"config",
       {{"encoding", "LINEAR16"},
        {"sampleRateHertz", audio.sample_rate_hz()},
        {"languageCode", std::string(language)}}},
      {"audio", {{"content", base64_encode(pcm16_bytes(audio))}}},
  };
  return body.dump();
}

Transcript parse_recognize_response(std::string_view body) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kMalformedResponse, "recognize response is not a JSON object");
  }
  Transcript out;
  const auto results = doc.find("results");
  if (results == doc.end()) {
    out.no_hypotheses = true;
    return out;
  }
  if (!results->is_array()) {
    throw Error(ErrorCode::kMalformedResponse, "recognize response: 'results' is not an array");
  }
  bool any = false;
  for (const auto& result : *results) {
    const auto alts = result.find("alternatives");
    if (alts == result.end() || !alts->is_array() || alts->empty()) continue;
    const auto& top = alts->front();
    const auto text = top.find("transcript");
    if (text == top.end()) continue;
    if (!text->is_string()) {
      throw Error(ErrorCode::kMalformedResponse, "recognize response: transcript is not a string");
    }
    if (!out.text.empty()) out.text += ' ';
    out.text += text->get<std::string>();
    any = true;
  }
  out.no_hypotheses = !any;
  return out;
}

HttpTranscriber::HttpTranscriber(HttpTranscriberConfig config)
    : config_(std::move(config)), in_flight_(std::max(1, config_.max_in_flight)) {
  if (config_.credential.empty()) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("http transcriber: no credential; set {}", kAsrTokenEnv));
  }
  if (config_.endpoint_url.empty()) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("http transcriber: no endpoint URL; set {}", kAsrUrlEnv));
  }
}

HttpTranscriber::~HttpTranscriber() = default;

Transcript HttpTranscriber::transcribe(const AudioBuffer& audio, std::string_view language) {
  if (audio.duration_s() > config_.max_duration_s) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("http transcriber: audio is {:.1f} s, cap is {:.1f} s",
                            audio.duration_s(), config_.max_duration_s));
  }
  const std::string body = build_recognize_request(audio, language);

  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<>& sem;
    ~Release() { sem.release(); }
  } release{in_flight_};

  httplib::Client client(config_.endpoint_url);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  const httplib::Headers headers = {{"Authorization", "Bearer " + config_.credential}};

  RequestLogEntry entry;
  auto record = [this, &entry] {
    std::lock_guard lock(log_mutex_);
    log_.push_back(entry);
  };

  auto backoff = config_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    entry.attempts = attempt + 1;
    entry.retries = attempt;
    auto res = client.Post(config_.path, headers, body, "application/json");

    std::string failure;
    ErrorCode code = ErrorCode::kNetwork;
    if (!res) {
      failure = fmt::format("transport failure: {}", httplib::to_string(res.error()));
      entry.final_status = 0;
    } else {
      entry.final_status = res->status;
      if (res->status >= 200 && res->status < 300) {
        try {
          Transcript t = parse_recognize_response(res->body);
          entry.no_hypotheses = t.no_hypotheses;
          record();
          return t;
        } catch (const Error& e) {
          entry.error = e.what();
          record();
          throw;
        }
      }
      code = ErrorCode::kHttpStatus;
      failure = fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 200));
      if (!is_transient(res->status)) {
        entry.error = failure;
        record();
        throw Error(code, "recognize request failed: " + failure);
      }
    }

    if (attempt >= config_.max_retries) {
      entry.error = failure;
      record();
      throw Error(code, fmt::format("recognize request failed after {} attempts: {}",
                                    attempt + 1, failure));
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::min(config_.max_backoff,
                       std::chrono::milliseconds(static_cast<long long>(
                           static_cast<double>(backoff.count()) * config_.backoff_multiplier)));
  }
}

std::vector<RequestLogEntry> HttpTranscriber::request_log() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

}  // namespace wavenhance
