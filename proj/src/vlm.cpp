#include "btrec/vlm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <sstream>

#include "btrec/report.hpp"
#include "btrec/scene.hpp"
#include "btrec/skill.hpp"

namespace btrec {
namespace {

struct ParsedUrl {
  std::string host;
  int port = 80;
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind("https://", 0) == 0)
    throw VlmError("config", "https endpoints are not supported; use http");
  if (url.rfind(scheme, 0) != 0)
    throw VlmError("config", "endpoint url must start with http://: " + url);
  std::string rest = url.substr(scheme.size());
  ParsedUrl out;
  std::size_t slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : rest.substr(slash);
  std::size_t colon = authority.find(':');
  if (colon == std::string::npos) {
    out.host = authority;
  } else {
    out.host = authority.substr(0, colon);
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw VlmError("config", "bad port in endpoint url: " + url);
    }
  }
  if (out.host.empty()) throw VlmError("config", "endpoint url has no host: " + url);
  return out;
}

void trim_in_place(std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    s.clear();
    return;
  }
  std::size_t e = s.find_last_not_of(" \t\r\n");
  s = s.substr(b, e - b + 1);
}

// Tolerates a reply wrapped in markdown code fences.
std::string strip_fences(std::string s) {
  trim_in_place(s);
  if (s.rfind("```", 0) == 0) {
    std::size_t nl = s.find('\n');
    s = nl == std::string::npos ? std::string() : s.substr(nl + 1);
    std::size_t fence = s.rfind("```");
    if (fence != std::string::npos) s = s.substr(0, fence);
    trim_in_place(s);
  }
  return s;
}

void replace_all(std::string& text, const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
}

std::string or_none(const std::string& s) { return s.empty() ? "(none)" : s; }

std::string describe_template(const SkillTemplate& t) {
  std::ostringstream os;
  os << t.name << "(";
  for (std::size_t i = 0; i < t.params.size(); ++i) {
    if (i) os << ", ";
    os << t.params[i].name;
  }
  os << ")\n";
  for (const auto& p : t.params) {
    os << "  " << p.name << ": ";
    for (std::size_t i = 0; i < p.classes.size(); ++i) {
      if (i) os << "|";
      os << p.classes[i];
    }
    if (!p.required_attributes.empty()) {
      os << " with ";
      for (std::size_t i = 0; i < p.required_attributes.size(); ++i) {
        if (i) os << ", ";
        os << p.required_attributes[i];
      }
    }
    os << "\n";
  }
  os << "  pre:  " << or_none(to_string(t.preconditions)) << "\n";
  os << "  post: " << or_none(to_string(t.postconditions)) << "\n";
  return os.str();
}

std::string describe_catalog(const SkillCatalog& catalog) {
  std::ostringstream os;
  for (const auto& t : catalog.active()) os << describe_template(t);
  if (!catalog.latent().empty()) {
    os << "latent skills (propose by name, not yet usable):\n";
    for (const auto& t : catalog.latent()) os << describe_template(t);
  }
  return os.str();
}

[[noreturn]] void schema_error(const std::string& what) {
  throw VlmError("schema-violation", "reply violates the response schema: " + what);
}

bool known_skill(const SkillCatalog* catalog, const std::string& name) {
  if (!catalog) return true;
  return catalog->find(name) != nullptr || catalog->find_latent(name) != nullptr;
}

void check_scene_vocabulary(const CheckRequest& req, const Literal& lit) {
  if (!req.scene) return;
  for (const auto& arg : lit.args) {
    if (arg.kind == TermKind::Constant && !req.scene->has_object(arg.name))
      schema_error("literal " + lit.to_string() + " names unknown object " + arg.name);
  }
}

Literal parse_reply_literal(const CheckRequest& req, const std::string& text) {
  Literal lit;
  try {
    lit = parse_literal(text);
  } catch (const ParseError& e) {
    schema_error(std::string("bad literal \"") + text + "\": " + e.what());
  }
  check_scene_vocabulary(req, lit);
  return lit;
}

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) schema_error(std::string("missing string '") + key + "'");
  return j[key].get<std::string>();
}

Verdict payload_to_verdict(const json& j, const CheckRequest& req) {
  Verdict v;
  v.kind = req.kind;
  if (!j.is_object()) schema_error("reply is not an object");
  if (!j.contains("detected") || !j["detected"].is_boolean())
    schema_error("missing boolean 'detected'");
  v.detected = j["detected"].get<bool>();
  json id = j.contains("identification") ? j["identification"] : json(nullptr);
  json corr = j.contains("correction") ? j["correction"] : json(nullptr);
  if (!v.detected) {
    if (!id.is_null() || !corr.is_null())
      schema_error("identification and correction must be null when detected is false");
    return v;
  }
  if (id.is_null() || corr.is_null())
    schema_error("detected replies must carry identification and correction");

  Identification ident;
  ident.skill = require_string(id, "skill");
  if (!known_skill(req.catalog, ident.skill))
    schema_error("identification names unknown skill " + ident.skill);
  if (id.contains("culprit") && !id["culprit"].is_null()) {
    if (!id["culprit"].is_object()) schema_error("culprit must be an object");
    for (auto it = id["culprit"].begin(); it != id["culprit"].end(); ++it) {
      if (!it.value().is_string()) schema_error("culprit values must be strings");
      std::string obj = it.value().get<std::string>();
      if (req.scene && !req.scene->has_object(obj))
        schema_error("culprit names unknown object " + obj);
      ident.culprit[it.key()] = obj;
    }
  }
  ident.cause = id.contains("cause") && id["cause"].is_string() ? id["cause"].get<std::string>() : "";
  v.identification = std::move(ident);

  Correction c;
  std::string type_text = require_string(corr, "type");
  auto type = correction_type_from(type_text);
  if (!type) schema_error("unknown correction type " + type_text);
  c.type = *type;
  switch (c.type) {
    case Correction::Type::MarkUnsatisfied: {
      if (!corr.contains("unsatisfied") || !corr["unsatisfied"].is_array() ||
          corr["unsatisfied"].empty())
        schema_error("mark_unsatisfied needs a non-empty 'unsatisfied' array");
      for (const auto& item : corr["unsatisfied"]) {
        if (!item.is_string()) schema_error("'unsatisfied' entries must be strings");
        c.unsatisfied.push_back(parse_reply_literal(req, item.get<std::string>()));
      }
      break;
    }
    case Correction::Type::ReportSkillFailure: {
      c.skill = require_string(corr, "skill");
      if (!known_skill(req.catalog, c.skill)) schema_error("unknown skill " + c.skill);
      break;
    }
    case Correction::Type::AddPrecondition: {
      c.skill = require_string(corr, "skill");
      if (!known_skill(req.catalog, c.skill)) schema_error("unknown skill " + c.skill);
      Literal lit = parse_reply_literal(req, require_string(corr, "precondition"));
      if (!lit.is_ground()) schema_error("precondition must be ground");
      c.precondition = std::move(lit);
      break;
    }
    case Correction::Type::AddSkill: {
      c.skill = require_string(corr, "skill");
      if (!known_skill(req.catalog, c.skill)) schema_error("unknown skill " + c.skill);
      break;
    }
  }
  v.correction = std::move(c);
  return v;
}

}  // namespace

EndpointConfig load_endpoint_config(const std::string& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw VlmError("config", "endpoint config is not a JSON object: " + path);
  EndpointConfig cfg;
  if (!j.contains("url") || !j["url"].is_string())
    throw VlmError("config", "endpoint config needs a string 'url'");
  cfg.url = j["url"].get<std::string>();
  if (!j.contains("model") || !j["model"].is_string())
    throw VlmError("config", "endpoint config needs a string 'model'");
  cfg.model = j["model"].get<std::string>();
  cfg.api_key_env = j.value("api_key_env", std::string());
  cfg.timeout_seconds = j.value("timeout_seconds", 60);
  cfg.retries = j.value("retries", 2);
  if (cfg.timeout_seconds <= 0) throw VlmError("config", "timeout_seconds must be positive");
  if (cfg.retries < 0) throw VlmError("config", "retries must be non-negative");
  parse_url(cfg.url);
  return cfg;
}

VlmReasoner::VlmReasoner(EndpointConfig config, const std::string& prompts_dir)
    : config_(std::move(config)) {
  const CheckKind kinds[] = {CheckKind::PreExecution, CheckKind::PreconditionVerify,
                             CheckKind::PostconditionVerify, CheckKind::PreconditionSuggest,
                             CheckKind::SkillSuggest};
  for (CheckKind kind : kinds) {
    std::string path = prompts_dir + "/" + to_string(kind) + ".txt";
    try {
      templates_[kind] = read_text_file(path);
    } catch (const std::exception& e) {
      throw VlmError("config", std::string("cannot load prompt template: ") + e.what());
    }
  }
}

std::string VlmReasoner::render_prompt(const CheckRequest& req) const {
  std::string text = templates_.at(req.kind);
  replace_all(text, "{{task}}", or_none(req.task));
  replace_all(text, "{{goals}}", or_none(to_string(req.goals)));
  replace_all(text, "{{scene}}", req.scene ? serialize_scene(*req.scene) : "(no scene)\n");
  replace_all(text, "{{skills}}",
              req.catalog ? describe_catalog(*req.catalog) : "(no catalog)\n");
  replace_all(text, "{{skill}}",
              req.skill.name.empty() ? std::string("(none)") : req.skill.to_string());
  replace_all(text, "{{preconditions}}", or_none(to_string(req.preconditions)));
  replace_all(text, "{{postconditions}}", or_none(to_string(req.postconditions)));
  replace_all(text, "{{unachievable}}",
              req.unachievable.predicate.empty() ? std::string("(none)")
                                                 : req.unachievable.to_string());
  std::string events;
  for (const auto& e : req.recent_events) {
    events += e;
    events += "\n";
  }
  replace_all(text, "{{recent_events}}", events.empty() ? "(none)\n" : events);
  return text;
}

std::optional<std::string> VlmReasoner::post_chat(const std::string& prompt,
                                                  std::string& failure_reason) {
  ParsedUrl url = parse_url(config_.url);
  httplib::Client client(url.host, url.port);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  json body{{"model", config_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", 0}};
  ++requests_made_;
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    failure_reason = "transport: " + httplib::to_string(res.error());
    return std::nullopt;
  }
  if (res->status != 200) {
    std::ostringstream os;
    os << "http status " << res->status;
    failure_reason = os.str();
    return std::nullopt;
  }
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) {
    failure_reason = "response body is not JSON";
    return std::nullopt;
  }
  if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty() ||
      !reply["choices"][0].contains("message") ||
      !reply["choices"][0]["message"].contains("content") ||
      !reply["choices"][0]["message"]["content"].is_string()) {
    failure_reason = "response has no message content";
    return std::nullopt;
  }
  return reply["choices"][0]["message"]["content"].get<std::string>();
}

Verdict VlmReasoner::check(const CheckRequest& req) {
  std::string prompt = render_prompt(req);
  int attempts = 1 + config_.retries;
  std::string reason = "no attempt made";
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::optional<std::string> content = post_chat(prompt, reason);
    if (!content) continue;
    json payload = json::parse(strip_fences(*content), nullptr, false);
    if (payload.is_discarded()) {
      reason = "message content is not a JSON object";
      continue;
    }
    return payload_to_verdict(payload, req);
  }
  std::ostringstream os;
  os << "check " << to_string(req.kind) << " got no usable reply after " << attempts
     << " attempts (" << reason << ")";
  throw VlmError("malformed-response", os.str());
}

}  // namespace btrec
