// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace irforge {

/// `kind` is "offline" (canned response file) or "live" (OpenAI-style chat
/// completion endpoint). The API key is read from the environment variable
/// named by `api_key_env`, never from a file.
struct ProviderConfig {
  std::string kind = "offline";
  std::string endpoint;
  std::string model;
  std::filesystem::path fixture_path;
  std::string api_key_env = "IRFORGE_API_KEY";
  double timeout_seconds = 300;
};

/// Relative fixture paths resolve against `base_dir`.
ProviderConfig provider_from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = {});

struct ModelOutput {
  std::string text;
  size_t tokens_in = 0;
  size_t tokens_out = 0;
  double latency_seconds = 0;
};

/// Raises ProviderFailure (ErrorKind::ProviderError) on non-success HTTP
/// status and ErrorKind::Timeout when the request times out.
ModelOutput query_model(const std::string& prompt, const ProviderConfig& config);

/// Whitespace-separated word count, used as the offline token estimate.
size_t approximate_tokens(std::string_view text);

} // namespace irforge
