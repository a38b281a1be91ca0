#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "btrec/verdict.hpp"

namespace btrec {

// code: "config" | "transport" | "malformed-response" | "schema-violation"
class VlmError : public std::runtime_error {
 public:
  VlmError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct EndpointConfig {
  std::string url;          // http://host:port/path, chat-completions style
  std::string model;
  std::string api_key_env;  // env var holding the bearer token, empty for none
  int timeout_seconds = 60;
  int retries = 2;  // extra attempts after an unusable response
};

EndpointConfig load_endpoint_config(const std::string& path);

// Sends one chat request per check. The prompt comes from a per-check-kind
// template file; the reply must be a JSON object {detected, identification,
// correction}. Unparseable replies are retried; replies that parse but use
// vocabulary outside the scene/catalog fail immediately.
class VlmReasoner : public Reasoner {
 public:
  VlmReasoner(EndpointConfig config, const std::string& prompts_dir);

  Verdict check(const CheckRequest& req) override;
  std::string name() const override { return "vlm"; }

  int requests_made() const { return requests_made_; }
  std::string render_prompt(const CheckRequest& req) const;

 private:
  std::optional<std::string> post_chat(const std::string& prompt, std::string& failure_reason);

  EndpointConfig config_;
  std::map<CheckKind, std::string> templates_;
  int requests_made_ = 0;
};

}  // namespace btrec
