#include "guide/speech_services.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include <httplib.h>

#include "guide/errors.hpp"
#include "text_util.hpp"

namespace guide {

namespace {

constexpr const char* kOctetStream = "application/octet-stream";
constexpr const char* kTextPlain = "text/plain; charset=utf-8";

std::string describe_http_error(httplib::Error e) { return httplib::to_string(e); }

}  // namespace

CodecBoundary CodecBoundary::wav_passthrough() {
  return CodecBoundary{"wav-passthrough", [](const PcmSignal& s) { return write_wav(s); }};
}

std::string fingerprint(std::span<const uint8_t> bytes) {
  uint64_t hash = 0xcbf29ce484222325ull;
  for (uint8_t b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ull;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[hash & 0xF];
    hash >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------- client

AsrClient::AsrClient(AsrClientOptions options) : options_(std::move(options)) {
  if (!options_.codec.encode) throw Error(ErrorCode::InvalidConfig, "ASR codec has no encoder");
  if (options_.language_tag.empty()) throw Error(ErrorCode::InvalidConfig, "ASR language tag is empty");
  if (options_.retries < 0) throw Error(ErrorCode::InvalidConfig, "asr.retries must be non-negative");
}

namespace {

httplib::Client make_client(const AsrClientOptions& options) {
  httplib::Client client(options.endpoint);
  if (!client.is_valid()) throw Error(ErrorCode::TransportError, "invalid ASR endpoint '" + options.endpoint + "'");
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

}  // namespace

std::string AsrClient::upload(const RecognitionRequest& request) const {
  if (request.payload.empty()) throw Error(ErrorCode::RemoteRejection, "refusing to upload an empty payload");
  auto client = make_client(options_);
  httplib::Headers headers{{"X-Language", request.language_tag}};
  auto res = client.Post("/recognize", headers, reinterpret_cast<const char*>(request.payload.data()),
                         request.payload.size(), kOctetStream);
  if (!res) throw Error(ErrorCode::TransportError, "upload failed: " + describe_http_error(res.error()));
  if (res->status != 200) {
    throw Error(ErrorCode::RemoteRejection, "upload answered " + std::to_string(res->status) + ": " + res->body);
  }
  std::string session(detail::trim(res->body));
  if (session.empty()) throw Error(ErrorCode::RemoteRejection, "upload returned no session id");
  return session;
}

Transcript AsrClient::fetch_result(const std::string& session_id) const {
  auto client = make_client(options_);
  const std::string path = "/result/" + session_id;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.retry_delay);
    auto res = client.Get(path);
    if (!res) throw Error(ErrorCode::TransportError, "result request failed: " + describe_http_error(res.error()));
    switch (res->status) {
      case 200: {
        Transcript t{res->body, std::nullopt};
        if (res->has_header("X-Confidence")) {
          const auto c = detail::parse_double(res->get_header_value("X-Confidence"));
          if (!c || *c < 0.0 || *c > 1.0) throw Error(ErrorCode::RemoteRejection, "confidence outside [0, 1]");
          t.confidence = *c;
        }
        return t;
      }
      case 202:
        continue;
      case 404:
        throw Error(ErrorCode::UnknownSession, "server does not know session '" + session_id + "'");
      default:
        throw Error(ErrorCode::RemoteRejection, "result answered " + std::to_string(res->status) + ": " + res->body);
    }
  }
  throw Error(ErrorCode::RecognitionPending,
              "no result for session '" + session_id + "' after " + std::to_string(options_.retries) + " retries");
}

Transcript AsrClient::recognize(const PcmSignal& signal) const {
  RecognitionRequest request{options_.codec.encode(signal), options_.language_tag, {}};
  request.session_id = upload(request);
  return fetch_result(request.session_id);
}

// ---------------------------------------------------------------- mock server

struct MockAsrServer::Impl {
  struct Session {
    std::string fingerprint;
    std::string language;
    int polls = 0;
  };

  mutable std::mutex mutex;
  std::mutex serve_mutex;  // one request in flight at a time
  TranscriptTable transcripts;
  MockAsrOptions options;
  std::map<std::string, Session> sessions;
  std::vector<std::string> log;
  std::size_t next_session = 1;

  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
};

MockAsrServer::MockAsrServer(TranscriptTable transcripts, MockAsrOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->transcripts = std::move(transcripts);
  impl_->options = options;

  auto& svr = impl_->server;
  svr.Post("/recognize", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard serial(impl_->serve_mutex);
    {
      std::lock_guard lock(impl_->mutex);
      impl_->log.push_back("POST /recognize");
      if (impl_->options.reject_status != 0) {
        res.status = impl_->options.reject_status;
        res.set_content("upload rejected", kTextPlain);
        return;
      }
    }
    if (req.body.empty()) {
      res.status = 400;
      res.set_content("empty payload", kTextPlain);
      return;
    }
    const std::string language = req.has_header("X-Language") ? req.get_header_value("X-Language") : "en-us";
    const auto* data = reinterpret_cast<const uint8_t*>(req.body.data());
    res.set_content(accept_upload({data, req.body.size()}, language), kTextPlain);
  });
  svr.Get(R"(/result/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard serial(impl_->serve_mutex);
    {
      std::lock_guard lock(impl_->mutex);
      impl_->log.push_back("GET " + req.path);
    }
    try {
      const auto found = lookup_result(req.matches[1].str());
      res.status = found.status;
      if (found.status == 200) {
        res.set_header("X-Confidence", detail::format_double(found.transcript.confidence.value_or(0.0)));
        res.set_content(found.transcript.text, kTextPlain);
      } else {
        res.set_content("pending", kTextPlain);
      }
    } catch (const Error&) {
      res.status = 404;
      res.set_content("unknown session", kTextPlain);
    }
  });
}

MockAsrServer::~MockAsrServer() { stop(); }

void MockAsrServer::prime(const std::string& fp, std::string text) {
  std::lock_guard lock(impl_->mutex);
  impl_->transcripts[fp] = std::move(text);
}

std::string MockAsrServer::accept_upload(std::span<const uint8_t> payload, std::string_view language_tag) {
  std::lock_guard lock(impl_->mutex);
  const std::string id = "session-" + std::to_string(impl_->next_session++);
  impl_->sessions[id] = Impl::Session{fingerprint(payload), std::string(language_tag), 0};
  return id;
}

MockAsrServer::Lookup MockAsrServer::lookup_result(const std::string& session_id) {
  std::lock_guard lock(impl_->mutex);
  const auto it = impl_->sessions.find(session_id);
  if (it == impl_->sessions.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + session_id + "'");
  auto& session = it->second;
  if (session.polls++ < impl_->options.pending_polls) return {202, {}};
  const auto t = impl_->transcripts.find(session.fingerprint);
  if (t == impl_->transcripts.end()) return {200, Transcript{"", 0.0}};
  return {200, Transcript{t->second, 1.0}};
}

int MockAsrServer::start(const std::string& host, int port) {
  if (running()) return impl_->port;
  auto& svr = impl_->server;
  const int bound = port == 0 ? svr.bind_to_any_port(host) : (svr.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(ErrorCode::TransportError, "cannot bind mock ASR server to " + host);
  impl_->host = host;
  impl_->port = bound;
  impl_->thread = std::thread([&svr] { svr.listen_after_bind(); });
  svr.wait_until_ready();
  return bound;
}

void MockAsrServer::serve_blocking(const std::string& host, int port, const std::function<void(int)>& on_bound) {
  auto& svr = impl_->server;
  const int bound = port == 0 ? svr.bind_to_any_port(host) : (svr.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(ErrorCode::TransportError, "cannot bind mock ASR server to " + host);
  impl_->host = host;
  impl_->port = bound;
  if (on_bound) on_bound(bound);
  svr.listen_after_bind();
}

void MockAsrServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

bool MockAsrServer::running() const { return impl_->server.is_running(); }

std::string MockAsrServer::endpoint() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

std::vector<std::string> MockAsrServer::request_log() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->log;
}

// ---------------------------------------------------------------- TTS stub

PcmSignal synthesize(std::string_view text, uint32_t sample_rate_hz) {
  const std::size_t segment = tone_segment_samples(sample_rate_hz);
  std::vector<int16_t> samples;
  samples.reserve(segment * text.size());
  for (char ch : text) {
    const double freq = tone_frequency_hz(static_cast<uint8_t>(ch));
    for (std::size_t i = 0; i < segment; ++i) {
      const double phase = 2.0 * std::numbers::pi * freq * static_cast<double>(i) / sample_rate_hz;
      samples.push_back(static_cast<int16_t>(std::lround(kToneAmplitude * std::sin(phase))));
    }
  }
  return PcmSignal(std::move(samples), sample_rate_hz);
}

PcmSignal ToneSynthesizer::synthesize(std::string_view text) const { return guide::synthesize(text, sample_rate_hz_); }

}  // namespace guide
