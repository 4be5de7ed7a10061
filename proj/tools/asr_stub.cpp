// Local recognize-endpoint stand-in for offline runs of the http transcriber.
// Answers from a fixture table keyed by the digest of the decoded request
// audio, or with one fixed transcript.
#include <CLI11.hpp>
#include <csignal>
#include <fmt/format.h>

#include "wavenhance/asr_stub.hpp"
#include "wavenhance/digest.hpp"
#include "wavenhance/error.hpp"
#include "wavenhance/transcribers.hpp"

namespace {

wavenhance::AsrStubServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local speech-recognition stub speaking the v1 recognize contract"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> fixtures;
  std::string transcript;
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "bind port")->check(CLI::Range(1, 65535));
  auto* fix = app.add_option("--fixtures", fixtures, "fixture tables keyed by audio digest");
  app.add_option("--transcript", transcript, "answer every request with this text")->excludes(fix);
  CLI11_PARSE(app, argc, argv);

  try {
    auto table = std::make_shared<wavenhance::FixtureTranscriber>();
    for (const auto& f : fixtures) table->load(f);
    wavenhance::AsrStubServer server(
        [table, transcript, use_table = !fixtures.empty()](
            const wavenhance::AudioBuffer& audio,
            const std::string& language) -> std::optional<std::string> {
          if (!use_table) return transcript;
          try {
            return table->transcribe(audio, language).text;
          } catch (const wavenhance::Error&) {
            return std::nullopt;
          }
        });
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    fmt::print("listening on http://{}:{}\n", host, port);
    std::fflush(stdout);
    server.listen_blocking(host, port);
  } catch (const wavenhance::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return static_cast<int>(wavenhance::exit_class(e.code()));
  }
  return 0;
}
