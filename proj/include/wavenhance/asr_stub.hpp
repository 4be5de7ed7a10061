#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavenhance/audio.hpp"

namespace wavenhance {

// Local stand-in for the recognize endpoint, speaking the same JSON contract
// as HttpTranscriber. Requests without a bearer token get 401; malformed
// bodies get 400. A scripted list of status codes can be queued to simulate
// transient failures before the normal answer.
class AsrStubServer {
 public:
  // Returns the transcript for the decoded PCM16 audio, or nullopt to answer
  // with zero alternatives.
  using Responder =
      std::function<std::optional<std::string>(const AudioBuffer& audio, const std::string& language)>;

  explicit AsrStubServer(Responder responder);
  ~AsrStubServer();
  AsrStubServer(const AsrStubServer&) = delete;
  AsrStubServer& operator=(const AsrStubServer&) = delete;

  // Binds to host:port (port 0 picks a free one) and serves on a background
  // thread. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks on the calling thread until stop() is called from elsewhere.
  void listen_blocking(const std::string& host, int port);
  void stop();

  std::string url() const;
  void script_statuses(std::vector<int> statuses);
  int requests_received() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wavenhance
