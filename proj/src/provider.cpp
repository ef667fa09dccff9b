// SPDX-License-Identifier: Apache-2.0
#include "irforge/provider.hpp"

#include "irforge/error.hpp"
#include "irforge/io.hpp"

#include <httplib.h>

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <regex>

namespace irforge {

using nlohmann::json;

ProviderConfig provider_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object())
    throw Error(ErrorKind::Malformed, "provider config must be an object");
  if (doc.contains("api_key") || doc.contains("key"))
    throw Error(ErrorKind::Malformed,
                "provider config must not contain keys; use an environment variable");
  ProviderConfig c;
  c.kind = doc.value("kind", std::string("offline"));
  if (c.kind != "offline" && c.kind != "live")
    throw Error(ErrorKind::Malformed, "provider kind must be 'live' or 'offline'");
  c.endpoint = doc.value("endpoint", std::string());
  c.model = doc.value("model", std::string());
  if (auto it = doc.find("fixture_path"); it != doc.end() && it->is_string())
    c.fixture_path = absolute_from(it->get<std::string>(), base_dir.empty() ? "." : base_dir);
  c.api_key_env = doc.value("api_key_env", c.api_key_env);
  c.timeout_seconds = doc.value("timeout_seconds", c.timeout_seconds);
  return c;
}

size_t approximate_tokens(std::string_view text) {
  size_t n = 0;
  bool in_word = false;
  for (char ch : text) {
    const bool space = std::isspace(static_cast<unsigned char>(ch));
    if (!space && !in_word)
      ++n;
    in_word = !space;
  }
  return n;
}

ModelOutput query_model(const std::string& prompt, const ProviderConfig& config) {
  if (config.kind == "offline") {
    ModelOutput out;
    out.text = read_file(config.fixture_path);
    out.tokens_in = approximate_tokens(prompt);
    out.tokens_out = approximate_tokens(out.text);
    return out;
  }

  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config.endpoint, m, url))
    throw Error(ErrorKind::Malformed, "provider endpoint '" + config.endpoint + "' is not a URL");
  const std::string base = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/v1/chat/completions";

  httplib::Client client(base);
  const auto secs = static_cast<time_t>(std::floor(config.timeout_seconds));
  const auto usecs = static_cast<time_t>((config.timeout_seconds - secs) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  const json body = {{"model", config.model},
                     {"temperature", 0},
                     {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path, headers, body.dump(), "application/json");
  const double latency =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!res) {
    if (res.error() == httplib::Error::Read || res.error() == httplib::Error::Write ||
        res.error() == httplib::Error::ConnectionTimeout)
      throw Error(ErrorKind::Timeout, "provider request timed out or was cut off: " +
                                          httplib::to_string(res.error()));
    throw ProviderFailure(0, httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300)
    throw ProviderFailure(res->status, res->body);

  ModelOutput out;
  out.latency_seconds = latency;
  try {
    const json reply = json::parse(res->body);
    out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    if (auto u = reply.find("usage"); u != reply.end()) {
      out.tokens_in = u->value("prompt_tokens", size_t{0});
      out.tokens_out = u->value("completion_tokens", size_t{0});
    }
  } catch (const json::exception& e) {
    throw ProviderFailure(res->status, std::string("unexpected reply shape: ") + e.what());
  }
  if (out.tokens_in == 0)
    out.tokens_in = approximate_tokens(prompt);
  if (out.tokens_out == 0)
    out.tokens_out = approximate_tokens(out.text);
  return out;
}

} // namespace irforge
