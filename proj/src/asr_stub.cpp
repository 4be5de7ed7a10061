#include "wavenhance/asr_stub.hpp"

#include <httplib.h>

#include <atomic>
#include <deque>
#include <fmt/format.h>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "wavenhance/digest.hpp"
#include "wavenhance/error.hpp"

namespace wavenhance {

struct AsrStubServer::Impl {
  Responder responder;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
  std::mutex mutex;
  std::deque<int> scripted;
  std::atomic<int> requests{0};

  void handle(const httplib::Request& req, httplib::Response& res) {
    ++requests;
    {
      std::lock_guard lock(mutex);
      if (!scripted.empty()) {
        res.status = scripted.front();
        scripted.pop_front();
        res.set_content(R"({"error":{"message":"scripted failure"}})", "application/json");
        return;
      }
    }
    const auto auth = req.get_header_value("Authorization");
    if (auth.rfind("Bearer ", 0) != 0 || auth.size() <= 7) {
      res.status = 401;
      res.set_content(R"({"error":{"message":"missing bearer token"}})", "application/json");
      return;
    }
    const auto doc = nlohmann::json::parse(req.body, nullptr, false);
    try {
      if (doc.is_discarded()) throw Error(ErrorCode::kMalformedResponse, "body is not JSON");
      const auto& config = doc.at("config");
      if (config.at("encoding").get<std::string>() != "LINEAR16") {
        throw Error(ErrorCode::kMalformedResponse, "only LINEAR16 is supported");
      }
      const int rate = config.at("sampleRateHertz").get<int>();
      const std::string language = config.at("languageCode").get<std::string>();
      const std::string pcm = base64_decode(doc.at("audio").at("content").get<std::string>());
      Samples samples(static_cast<Eigen::Index>(pcm.size() / 2));
      for (Eigen::Index i = 0; i < samples.size(); ++i) {
        const auto lo = static_cast<std::uint8_t>(pcm[2 * i]);
        const auto hi = static_cast<std::uint8_t>(pcm[2 * i + 1]);
        samples[i] = static_cast<std::int16_t>(lo | (hi << 8)) / 32767.0;
      }
      const auto transcript = responder(AudioBuffer(std::move(samples), rate), language);
      nlohmann::json answer = nlohmann::json::object();
      if (transcript) {
        answer["results"] = nlohmann::json::array(
            {{{"alternatives", nlohmann::json::array({{{"transcript", *transcript},
                                                       {"confidence", 0.9}}})}}});
      } else {
        answer["results"] =
            nlohmann::json::array({{{"alternatives", nlohmann::json::array()}}});
      }
      res.status = 200;
      res.set_content(answer.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", {{"message", e.what()}}}}.dump(),
                      "application/json");
    }
  }
};

AsrStubServer::AsrStubServer(Responder responder) : impl_(std::make_unique<Impl>()) {
  impl_->responder = std::move(responder);
  impl_->server.Post("/v1/speech:recognize",
                     [this](const httplib::Request& req, httplib::Response& res) {
                       impl_->handle(req, res);
                     });
}

AsrStubServer::~AsrStubServer() { stop(); }

int AsrStubServer::start(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port == 0 ? impl_->server.bind_to_any_port(host) : port;
  if (port != 0 && !impl_->server.bind_to_port(host, port)) impl_->port = -1;
  if (impl_->port <= 0) {
    throw Error(ErrorCode::kIo, fmt::format("asr stub: cannot bind {}:{}", host, port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void AsrStubServer::listen_blocking(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kIo, fmt::format("asr stub: cannot listen on {}:{}", host, port));
  }
}

void AsrStubServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string AsrStubServer::url() const {
  return fmt::format("http://{}:{}", impl_->host, impl_->port);
}

void AsrStubServer::script_statuses(std::vector<int> statuses) {
  std::lock_guard lock(impl_->mutex);
  impl_->scripted.assign(statuses.begin(), statuses.end());
}

int AsrStubServer::requests_received() const { return impl_->requests.load(); }

}  // namespace wavenhance
