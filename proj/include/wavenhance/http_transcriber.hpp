#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include "wavenhance/scorer.hpp"

namespace wavenhance {

inline constexpr const char* kAsrUrlEnv = "WAVENHANCE_ASR_URL";
inline constexpr const char* kAsrTokenEnv = "WAVENHANCE_ASR_TOKEN";
inline constexpr const char* kDefaultAsrUrl = "https://speech.googleapis.com";

struct HttpTranscriberConfig {
  std::string endpoint_url = kDefaultAsrUrl;  // scheme://host[:port]
  std::string path = "/v1/speech:recognize";
  std::string credential;  // bearer token; only ever read from the environment
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
  std::chrono::seconds timeout{60};
  double max_duration_s = 60.0;
  int max_in_flight = 4;

  // Endpoint from WAVENHANCE_ASR_URL when set (else `fallback_url`, else the
  // public default) and credential from WAVENHANCE_ASR_TOKEN.
  static HttpTranscriberConfig from_environment(const std::string& fallback_url = {});
};

struct RequestLogEntry {
  int attempts = 0;
  int retries = 0;
  int final_status = 0;  // 0 when no HTTP response was received
  bool no_hypotheses = false;
  std::string error;
};

// Client for a Speech-to-Text v1 `recognize`-shaped endpoint: POST JSON
// {config: {encoding: LINEAR16, sampleRateHertz, languageCode},
//  audio: {content: base64 PCM16}}, answer {results: [{alternatives:
// [{transcript}]}]}. Transient failures (transport errors, 429, 5xx) are
// retried with exponential backoff.
class HttpTranscriber final : public Transcriber {
 public:
  // Throws kConfiguration when the credential or endpoint is missing.
  explicit HttpTranscriber(HttpTranscriberConfig config);
  ~HttpTranscriber() override;

  Transcript transcribe(const AudioBuffer& audio, std::string_view language) override;
  std::string name() const override { return "http"; }

  std::vector<RequestLogEntry> request_log() const;

 private:
  HttpTranscriberConfig config_;
  std::counting_semaphore<> in_flight_;
  mutable std::mutex log_mutex_;
  std::vector<RequestLogEntry> log_;
};

// Request body for the recognize call; exposed for the stub server and tests.
std::string build_recognize_request(const AudioBuffer& audio, std::string_view language);

// Parses a recognize response; throws kMalformedResponse on shape errors.
Transcript parse_recognize_response(std::string_view body);

}  // namespace wavenhance
