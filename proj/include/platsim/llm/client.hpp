#pragma once

#include <atomic>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <condition_variable>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "platsim/core/config.hpp"
#include "platsim/core/errors.hpp"

namespace platsim {

struct HttpResult {
  enum class Kind { Ok, Timeout, Unreachable } kind = Kind::Ok;
  int status = 0;
  std::string body;
};

/// One HTTP POST. Swappable so tests never touch the network.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResult post(const std::string& url, const std::string& body,
                          const std::string& api_key, int timeout_ms) = 0;
};

/// Plain-HTTP transport backed by cpp-httplib.
class HttpTransport : public Transport {
 public:
  HttpResult post(const std::string& url, const std::string& body, const std::string& api_key,
                  int timeout_ms) override {
    const auto scheme_end = url.find("://");
    const auto host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_begin = url.find('/', host_begin);
    const std::string origin = url.substr(0, path_begin);
    const std::string path = path_begin == std::string::npos ? "/" : url.substr(path_begin);

    httplib::Client cli(origin);
    const auto sec = timeout_ms / 1000;
    const auto usec = (timeout_ms % 1000) * 1000;
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    auto res = cli.Post(path, headers, body, "application/json");
    HttpResult out;
    if (!res) {
      out.kind = res.error() == httplib::Error::Read || res.error() == httplib::Error::Write ||
                         res.error() == httplib::Error::ConnectionTimeout
                     ? HttpResult::Kind::Timeout
                     : HttpResult::Kind::Unreachable;
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

/// Counting gate bounding in-flight requests.
class ConcurrencyGate {
 public:
  explicit ConcurrencyGate(int limit) : free_(limit < 1 ? 1 : limit) {}
  void acquire() {
    std::unique_lock lock(m_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
  }
  void release() {
    {
      std::lock_guard lock(m_);
      ++free_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  int free_;
};

inline std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

/// Chat-completion client. Transient failures (timeouts, unreachable host, 5xx,
/// 429) are retried; other 4xx replies fail at once.
class LlmClient {
 public:
  LlmClient(LlmSettings cfg, std::shared_ptr<Transport> transport)
      : cfg_(std::move(cfg)), transport_(std::move(transport)), gate_(cfg_.concurrency) {
    cfg_.endpoint = env_or("SIM_LLM_ENDPOINT", cfg_.endpoint);
    api_key_ = env_or("SIM_LLM_API_KEY", "");
    if (cfg_.retries < 0) fail(Errc::ConfigError, "llm.retries must be >= 0");
    if (cfg_.timeout_ms <= 0) fail(Errc::ConfigError, "llm.timeout_ms must be > 0");
  }

  std::string request_body(const std::string& prompt) const {
    nlohmann::json j = {{"model", cfg_.model},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                        {"temperature", cfg_.temperature},
                        {"max_tokens", cfg_.max_tokens}};
    return j.dump();
  }

  std::string complete(const std::string& prompt) {
    gate_.acquire();
    struct Release {
      ConcurrencyGate& g;
      ~Release() { g.release(); }
    } release{gate_};
    ++calls_;

    const auto body = request_body(prompt);
    const int attempts = cfg_.retries + 1;
    int timeouts = 0;
    int last_status = 0;
    for (int a = 0; a < attempts; ++a) {
      const auto res = transport_->post(cfg_.endpoint, body, api_key_, cfg_.timeout_ms);
      if (res.kind != HttpResult::Kind::Ok) {
        ++timeouts;
        continue;
      }
      last_status = res.status;
      if (res.status >= 200 && res.status < 300) return extract_content(res.body);
      if (res.status >= 400 && res.status < 500 && res.status != 429) {
        fail(Errc::HttpError, "HTTP " + std::to_string(res.status));
      }
    }
    if (timeouts == attempts) {
      fail(Errc::Timeout, "no reply within " + std::to_string(cfg_.timeout_ms) + " ms after " +
                              std::to_string(attempts) + " attempt(s)");
    }
    if (attempts == 1) fail(Errc::HttpError, "HTTP " + std::to_string(last_status));
    fail(Errc::ExhaustedRetries, "gave up after " + std::to_string(attempts) + " attempts");
  }

  static std::string extract_content(const std::string& body) {
    try {
      const auto j = nlohmann::json::parse(body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::ParseFailure, std::string("malformed completion response: ") + e.what());
    }
  }

  std::size_t calls() const { return calls_.load(); }
  const LlmSettings& settings() const { return cfg_; }

 private:
  LlmSettings cfg_;
  std::shared_ptr<Transport> transport_;
  ConcurrencyGate gate_;
  std::string api_key_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace platsim
