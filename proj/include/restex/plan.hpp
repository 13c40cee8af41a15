#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restex/model.hpp"
#include "restex/spec.hpp"

namespace restex {

/// Which part of a value domain's mixture produced a sample.
enum class Component { ValidRandom, FromState, Boundary, InvalidTyped };

std::string_view to_string(Component component);
Component component_from_string(std::string_view text);

/// One filled parameter of a request.
struct PlanParam {
  std::string name;
  ParamLocation location = ParamLocation::Query;
  json value;
  Component component = Component::ValidRandom;
  /// Resource whose id(s) the value carries; empty for plain values.
  std::string reference;
  /// Constraint an invalid-typed value breaks ("pattern", "type", ...).
  std::string violated;

  friend bool operator==(const PlanParam&, const PlanParam&) = default;
};

struct RequestPlan {
  std::uint64_t plan_id = 0;
  OperationBinding binding;
  std::string method;
  std::string path_template;
  /// Path plus query string, relative to the endpoint.
  std::string concrete_url;
  std::map<std::string, std::string> headers;
  std::optional<json> body;
  std::vector<PlanParam> params;

  const PlanParam* param(std::string_view name, ParamLocation location) const;
  /// Parameter name -> component tag. Body fields are keyed "body.<name>"
  /// when a path/query/header parameter has the same name.
  std::map<std::string, Component> value_tags() const;
  bool has_invalid() const;

  friend bool operator==(const RequestPlan&, const RequestPlan&) = default;
};

/// Fills concrete_url, headers and body of `plan` from its params.
/// `base_path` is prefixed to the path ("" or "/" for none).
void render_plan(RequestPlan& plan, const OperationDef& op, const std::string& base_path);

/// Text form of a scalar as it travels in a path, query or header.
std::string wire_string(const json& value);
std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

json to_json(const PlanParam& param);
json to_json(const RequestPlan& plan);
RequestPlan plan_from_json(const json& j);

struct HttpRequest {
  std::string method;
  /// Path and query, e.g. "/books/b1?limit=3".
  std::string target;
  std::map<std::string, std::string> headers;
  std::string body;
};

HttpRequest to_http_request(const RequestPlan& plan);

enum class TransportError { Timeout, ConnectionRefused, ProtocolError };

std::string_view to_string(TransportError error);
TransportError transport_error_from_string(std::string_view text);

struct HttpExchangeResult {
  std::optional<int> status;
  /// Header names lower-cased.
  std::map<std::string, std::string> headers;
  std::string body;
  /// Parsed body when the content type is JSON and the body parses.
  std::optional<json> json_body;
  double latency_ms = 0;
  std::optional<TransportError> transport_error;
  std::string error_detail;

  bool ok() const { return status.has_value(); }
  std::string header(std::string_view name) const;
};

/// Builds a result from a raw response, parsing JSON bodies.
HttpExchangeResult make_result(int status, std::map<std::string, std::string> headers, std::string body,
                               double latency_ms);
HttpExchangeResult make_error(TransportError error, std::string detail, double latency_ms);

bool is_json_content_type(std::string_view content_type);
bool is_valid_utf8(std::string_view text);
std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

/// Bodies that are not valid UTF-8 are stored under "body_base64".
json to_json(const HttpExchangeResult& result);
HttpExchangeResult result_from_json(const json& j);

}  // namespace restex
