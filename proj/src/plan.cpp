#include "restex/plan.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <set>
#include <stdexcept>

#include "restex/errors.hpp"

namespace restex {

std::string_view to_string(Component component) {
  switch (component) {
    case Component::ValidRandom: return "valid-random";
    case Component::FromState: return "from-state";
    case Component::Boundary: return "boundary";
    case Component::InvalidTyped: return "invalid-typed";
  }
  return "valid-random";
}

Component component_from_string(std::string_view text) {
  if (text == "valid-random") return Component::ValidRandom;
  if (text == "from-state") return Component::FromState;
  if (text == "boundary") return Component::Boundary;
  if (text == "invalid-typed") return Component::InvalidTyped;
  throw std::invalid_argument("unknown component: " + std::string(text));
}

std::string_view to_string(TransportError error) {
  switch (error) {
    case TransportError::Timeout: return "timeout";
    case TransportError::ConnectionRefused: return "connection-refused";
    case TransportError::ProtocolError: return "protocol-error";
  }
  return "protocol-error";
}

TransportError transport_error_from_string(std::string_view text) {
  if (text == "timeout") return TransportError::Timeout;
  if (text == "connection-refused") return TransportError::ConnectionRefused;
  if (text == "protocol-error") return TransportError::ProtocolError;
  throw std::invalid_argument("unknown transport error: " + std::string(text));
}

const PlanParam* RequestPlan::param(std::string_view name, ParamLocation location) const {
  for (const auto& p : params) {
    if (p.name == name && p.location == location) return &p;
  }
  return nullptr;
}

std::map<std::string, Component> RequestPlan::value_tags() const {
  std::set<std::string> wire_names;
  for (const auto& p : params) {
    if (p.location != ParamLocation::BodyField) wire_names.insert(p.name);
  }
  std::map<std::string, Component> out;
  for (const auto& p : params) {
    const bool clash = p.location == ParamLocation::BodyField && wire_names.count(p.name);
    out[clash ? "body." + p.name : p.name] = p.component;
  }
  return out;
}

bool RequestPlan::has_invalid() const {
  for (const auto& p : params) {
    if (p.component == Component::InvalidTyped) return true;
  }
  return false;
}

std::string wire_string(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string out;
    for (const auto& v : value) {
      if (!out.empty()) out += ",";
      out += wire_string(v);
    }
    return out;
  }
  return value.dump();
}

std::string percent_encode(std::string_view text) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size() &&
        std::isxdigit(static_cast<unsigned char>(text[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(text.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else if (text[i] == '+') {
      out.push_back(' ');
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

void render_plan(RequestPlan& plan, const OperationDef& op, const std::string& base_path) {
  std::string path;
  for (const auto& seg : path_segments(op.path_template)) {
    path += "/";
    if (is_path_param_segment(seg)) {
      const auto name = seg.substr(1, seg.size() - 2);
      const auto* p = plan.param(name, ParamLocation::Path);
      if (!p) throw std::logic_error("plan lacks path parameter " + name);
      path += percent_encode(wire_string(p->value));
    } else {
      path += seg;
    }
  }
  if (path.empty()) path = "/";
  std::string prefix = base_path;
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  std::string query;
  plan.headers.clear();
  json body;
  bool has_body = false;
  for (const auto& p : plan.params) {
    switch (p.location) {
      case ParamLocation::Query: {
        std::vector<json> values;
        if (p.value.is_array()) values.assign(p.value.begin(), p.value.end());
        else values.push_back(p.value);
        for (const auto& v : values) {
          query += query.empty() ? "?" : "&";
          query += percent_encode(p.name) + "=" + percent_encode(wire_string(v));
        }
        break;
      }
      case ParamLocation::Header:
        plan.headers[p.name] = wire_string(p.value);
        break;
      case ParamLocation::BodyField:
        if (p.name == "$body") {
          body = p.value;
        } else {
          if (!body.is_object()) body = json::object();
          body[p.name] = p.value;
        }
        has_body = true;
        break;
      case ParamLocation::Path:
        break;
    }
  }
  if (!has_body && op.request_body_required) {
    body = json::object();
    has_body = true;
  }
  plan.method = op.method;
  plan.path_template = op.path_template;
  plan.concrete_url = prefix + path + query;
  if (has_body) {
    plan.body = body;
    plan.headers["Content-Type"] = "application/json";
  } else {
    plan.body.reset();
  }
}

json to_json(const PlanParam& p) {
  json j = {{"name", p.name},
            {"location", std::string(to_string(p.location))},
            {"value", p.value},
            {"component", std::string(to_string(p.component))}};
  if (!p.reference.empty()) j["reference"] = p.reference;
  if (!p.violated.empty()) j["violated"] = p.violated;
  return j;
}

json to_json(const RequestPlan& plan) {
  json params = json::array();
  for (const auto& p : plan.params) params.push_back(to_json(p));
  json tags = json::object();
  for (const auto& [name, c] : plan.value_tags()) tags[name] = std::string(to_string(c));
  json j = {{"plan_id", plan.plan_id},
            {"operation", plan.binding.operation},
            {"resource", plan.binding.resource},
            {"crud_kind", std::string(to_string(plan.binding.crud_kind))},
            {"method", plan.method},
            {"path_template", plan.path_template},
            {"url", plan.concrete_url},
            {"headers", plan.headers},
            {"params", std::move(params)},
            {"value_tags", std::move(tags)}};
  if (plan.body) j["body"] = *plan.body;
  return j;
}

RequestPlan plan_from_json(const json& j) {
  try {
    RequestPlan plan;
    plan.plan_id = j.at("plan_id").get<std::uint64_t>();
    plan.binding.operation = j.at("operation").get<std::string>();
    plan.binding.resource = j.at("resource").get<std::string>();
    plan.binding.crud_kind = crud_kind_from_string(j.at("crud_kind").get<std::string>());
    plan.method = j.at("method").get<std::string>();
    plan.path_template = j.at("path_template").get<std::string>();
    plan.concrete_url = j.at("url").get<std::string>();
    plan.headers = j.at("headers").get<std::map<std::string, std::string>>();
    if (j.contains("body")) plan.body = j["body"];
    for (const auto& pj : j.at("params")) {
      PlanParam p;
      p.name = pj.at("name").get<std::string>();
      p.location = param_location_from_string(pj.at("location").get<std::string>());
      p.value = pj.at("value");
      p.component = component_from_string(pj.at("component").get<std::string>());
      p.reference = pj.value("reference", "");
      p.violated = pj.value("violated", "");
      plan.params.push_back(std::move(p));
    }
    return plan;
  } catch (const json::exception& e) {
    throw ScriptFormatError(std::string("malformed request plan: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ScriptFormatError(std::string("malformed request plan: ") + e.what());
  }
}

HttpRequest to_http_request(const RequestPlan& plan) {
  HttpRequest r;
  r.method = plan.method;
  r.target = plan.concrete_url;
  r.headers = plan.headers;
  if (plan.body) r.body = plan.body->dump();
  return r;
}

std::string HttpExchangeResult::header(std::string_view name) const {
  std::string key(name);
  for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  auto it = headers.find(key);
  return it == headers.end() ? std::string() : it->second;
}

bool is_json_content_type(std::string_view content_type) {
  auto semi = content_type.find(';');
  std::string base(content_type.substr(0, semi));
  for (auto& c : base) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  while (!base.empty() && base.back() == ' ') base.pop_back();
  return base == "application/json" || (base.size() > 5 && base.compare(base.size() - 5, 5, "+json") == 0);
}

HttpExchangeResult make_result(int status, std::map<std::string, std::string> headers, std::string body,
                               double latency_ms) {
  HttpExchangeResult r;
  r.status = status;
  for (auto& [k, v] : headers) {
    std::string key = k;
    for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    r.headers[key] = v;
  }
  r.body = std::move(body);
  r.latency_ms = latency_ms;
  if (!r.body.empty() && is_json_content_type(r.header("content-type"))) {
    try {
      r.json_body = json::parse(r.body);
    } catch (const json::parse_error&) {
    }
  }
  return r;
}

HttpExchangeResult make_error(TransportError error, std::string detail, double latency_ms) {
  HttpExchangeResult r;
  r.transport_error = error;
  r.error_detail = std::move(detail);
  r.latency_ms = latency_ms;
  return r;
}

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) { ++i; continue; }
    if ((c & 0xE0) == 0xC0) { extra = 1; cp = c & 0x1F; }
    else if ((c & 0xF0) == 0xE0) { extra = 2; cp = c & 0x0F; }
    else if ((c & 0xF8) == 0xF0) { extra = 3; cp = c & 0x07; }
    else return false;
    if (i + extra >= text.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static const std::uint32_t min_cp[] = {0, 0x80, 0x800, 0x10000};
    if (cp < min_cp[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += extra + 1;
  }
  return true;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ScriptFormatError("base64 text length is not a multiple of 4");
  std::string out(3 * text.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
  if (n < 0) throw ScriptFormatError("invalid base64 text");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock counts padding as zero bytes.
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

json to_json(const HttpExchangeResult& r) {
  json j = json::object();
  j["latency_ms"] = r.latency_ms;
  if (r.transport_error) {
    j["transport_error"] = std::string(to_string(*r.transport_error));
    j["error_detail"] = r.error_detail;
    return j;
  }
  j["status"] = *r.status;
  j["headers"] = r.headers;
  if (is_valid_utf8(r.body)) j["body"] = r.body;
  else j["body_base64"] = base64_encode(r.body);
  return j;
}

HttpExchangeResult result_from_json(const json& j) {
  try {
    const double latency = j.value("latency_ms", 0.0);
    if (j.contains("transport_error")) {
      return make_error(transport_error_from_string(j["transport_error"].get<std::string>()),
                        j.value("error_detail", ""), latency);
    }
    std::string body = j.contains("body_base64") ? base64_decode(j["body_base64"].get<std::string>())
                                                 : j.value("body", "");
    return make_result(j.at("status").get<int>(), j.value("headers", std::map<std::string, std::string>{}),
                       std::move(body), latency);
  } catch (const json::exception& e) {
    throw ScriptFormatError(std::string("malformed exchange result: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ScriptFormatError(std::string("malformed exchange result: ") + e.what());
  }
}

}  // namespace restex
