#include "phishguard/agents/http_backend.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::agents {

void RateLimiter::acquire() {
  if (interval_.count() <= 0) return;
  std::chrono::steady_clock::time_point wait_until;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto now = std::chrono::steady_clock::now();
    if (next_slot_ < now) next_slot_ = now;
    wait_until = next_slot_;
    next_slot_ += interval_;
  }
  std::this_thread::sleep_until(wait_until);
}

HttpBackend::HttpBackend(ChatBackendConfig config)
    : config_(std::move(config)), limiter_(config_.rate_limit_interval) {
  std::string url = config_.base_url;
  /* split scheme://host[:port] from any path prefix */
  std::size_t scheme = url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t slash = url.find('/', host_start);
  if (slash == std::string::npos) {
    host_ = url;
    path_prefix_.clear();
  } else {
    host_ = url.substr(0, slash);
    path_prefix_ = url.substr(slash);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

std::string HttpBackend::complete(const std::vector<ChatMessage>& messages) {
  limiter_.acquire();

  nlohmann::json payload;
  payload["model"] = config_.model_name;
  payload["messages"] = nlohmann::json::array();
  for (const auto& message : messages)
    payload["messages"].push_back({{"role", message.role}, {"content", message.content}});
  payload["response_format"] = {{"type", "json_object"}};

  httplib::Client client(host_);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
  httplib::Headers headers;
  if (!config_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto result = client.Post(path_prefix_ + "/v1/chat/completions", headers, payload.dump(),
                            "application/json");
  if (!result)
    raise(Errc::BackendUnavailable,
          "no response from " + host_ + " (" + httplib::to_string(result.error()) + ")");
  if (result->status < 200 || result->status >= 300)
    raise(Errc::BackendUnavailable,
          "backend returned HTTP " + std::to_string(result->status) + ": " +
              result->body.substr(0, 200));

  nlohmann::json body = nlohmann::json::parse(result->body, nullptr, false);
  if (body.is_discarded())
    raise(Errc::BackendUnavailable, "backend response is not JSON");
  try {
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    raise(Errc::BackendUnavailable, "backend response lacks choices[0].message.content");
  }
}

}  // namespace phishguard::agents
