#include "restex/checker.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "restex/validate.hpp"

namespace restex {

namespace {

constexpr std::array<std::pair<Grade, std::string_view>, 3> kGrades{{
    {Grade::Error, "error"},
    {Grade::Warning, "warning"},
    {Grade::Info, "info"},
}};

constexpr std::array<std::pair<FindingKind, std::string_view>, 7> kKinds{{
    {FindingKind::SchemaViolation, "schema-violation"},
    {FindingKind::UndefinedStatus, "undefined-status"},
    {FindingKind::ServerError5xx, "server-error-5xx"},
    {FindingKind::SemanticMismatch, "semantic-mismatch"},
    {FindingKind::NoResponse, "no-response"},
    {FindingKind::UndeclaredContentType, "undeclared-content-type"},
    {FindingKind::IdExtractionFailure, "id-extraction-failure"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
  for (const auto& [v, name] : table)
    if (v == value) return name;
  return "?";
}

template <typename E, std::size_t N>
E value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view text, const char* what) {
  for (const auto& [v, name] : table)
    if (name == text) return v;
  throw std::invalid_argument(std::string("unknown ") + what + ": " + std::string(text));
}

Finding make(Grade grade, FindingKind kind, const OperationDef& op, std::string detail) {
  Finding f;
  f.grade = grade;
  f.kind = kind;
  f.operation = op.key();
  f.detail = std::move(detail);
  return f;
}

std::string declared_list(const OperationDef& op) {
  std::string out;
  for (const auto& [pattern, _] : op.responses) {
    if (!out.empty()) out += ",";
    out += pattern;
  }
  return out.empty() ? "none" : out;
}

/// Media type without parameters, lower case.
std::string media_type(std::string_view content_type) {
  std::string out(content_type.substr(0, content_type.find(';')));
  while (!out.empty() && out.back() == ' ') out.pop_back();
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view to_string(Grade grade) { return name_of(kGrades, grade); }
Grade grade_from_string(std::string_view text) { return value_of(kGrades, text, "grade"); }
std::string_view to_string(FindingKind kind) { return name_of(kKinds, kind); }
FindingKind finding_kind_from_string(std::string_view text) { return value_of(kKinds, text, "finding kind"); }

json to_json(const Finding& f) {
  return {{"grade", to_string(f.grade)},
          {"kind", to_string(f.kind)},
          {"exchange_ref", f.exchange_ref},
          {"operation", f.operation},
          {"detail", f.detail}};
}

Finding finding_from_json(const json& j) {
  Finding f;
  f.grade = grade_from_string(j.at("grade").get<std::string>());
  f.kind = finding_kind_from_string(j.at("kind").get<std::string>());
  f.exchange_ref = j.value("exchange_ref", std::uint64_t{0});
  f.operation = j.value("operation", "");
  f.detail = j.value("detail", "");
  return f;
}

json to_json(const CheckPolicy& p) {
  return {{"allow_declared_5xx", p.allow_declared_5xx},
          {"stale_mismatch_grade", to_string(p.stale_mismatch_grade)},
          {"no_response_grade", to_string(p.no_response_grade)}};
}

CheckPolicy check_policy_from_json(const json& j) {
  CheckPolicy p;
  p.allow_declared_5xx = j.value("allow_declared_5xx", p.allow_declared_5xx);
  if (j.contains("stale_mismatch_grade"))
    p.stale_mismatch_grade = grade_from_string(j.at("stale_mismatch_grade").get<std::string>());
  if (j.contains("no_response_grade"))
    p.no_response_grade = grade_from_string(j.at("no_response_grade").get<std::string>());
  return p;
}

std::optional<Finding> check_status(const HttpExchangeResult& response, const OperationDef& op,
                                    const CheckPolicy& policy) {
  if (!response.status) return std::nullopt;
  const int status = *response.status;
  const auto* declared = op.response_for(status);
  if (status >= 500 && status <= 599) {
    const bool exact = declared && declared->pattern().is_exact();
    if (!(exact && policy.allow_declared_5xx)) {
      return make(Grade::Error, FindingKind::ServerError5xx, op,
                  "status " + std::to_string(status) + " (declared: " + declared_list(op) + ")");
    }
    return std::nullopt;
  }
  if (!declared) {
    return make(Grade::Error, FindingKind::UndefinedStatus, op,
                "status " + std::to_string(status) + " not declared (declared: " + declared_list(op) + ")");
  }
  return std::nullopt;
}

std::vector<Finding> check_syntactic(const HttpExchangeResult& response, const OperationDef& op) {
  std::vector<Finding> out;
  if (!response.status) return out;
  const auto* declared = op.response_for(*response.status);
  if (!declared || !declared->body_schema) return out;
  if (!response.json_body) {
    const std::string why = response.body.empty() ? "empty body" : "malformed body";
    out.push_back(make(Grade::Error, FindingKind::SchemaViolation, op, "$: " + why));
    return out;
  }
  for (const auto& v : validate(*response.json_body, *declared->body_schema)) {
    out.push_back(make(Grade::Error, FindingKind::SchemaViolation, op, v.path + ": " + v.constraint + " (" + v.message + ")"));
  }
  return out;
}

std::optional<Finding> check_semantic(const HttpExchangeResult& response, const StatusPrediction& prediction,
                                      const CheckPolicy& policy) {
  if (!response.status || prediction.admits(*response.status)) return std::nullopt;
  Finding f;
  f.kind = FindingKind::SemanticMismatch;
  f.grade = prediction.basis == PredictionBasis::ExactState ? Grade::Error : policy.stale_mismatch_grade;
  f.detail = "expected " + prediction.expected_str() + ", observed " + std::to_string(*response.status) +
             " (basis " + std::string(to_string(prediction.basis)) + ")";
  if (!prediction.rationale.empty()) f.detail += ": " + prediction.rationale;
  return f;
}

std::vector<Finding> check_exchange(const HttpExchangeResult& response, const OperationDef& op,
                                    const StatusPrediction& prediction, const CheckPolicy& policy,
                                    std::uint64_t exchange_ref) {
  std::vector<Finding> out;
  if (!response.status) {
    const auto err = response.transport_error.value_or(TransportError::ProtocolError);
    out.push_back(make(policy.no_response_grade, FindingKind::NoResponse, op,
                       std::string(to_string(err)) + (response.error_detail.empty() ? "" : ": " + response.error_detail)));
  } else {
    if (auto f = check_status(response, op, policy)) out.push_back(std::move(*f));
    const auto* declared = op.response_for(*response.status);
    bool body_checkable = true;
    if (declared && declared->body_schema && !response.body.empty()) {
      const auto type = media_type(response.header("content-type"));
      const bool listed = std::any_of(declared->content_types.begin(), declared->content_types.end(),
                                      [&](const std::string& t) { return media_type(t) == type; });
      if (!listed && !is_json_content_type(type)) {
        out.push_back(make(Grade::Info, FindingKind::UndeclaredContentType, op,
                           "content type '" + type + "' not declared; body not checked"));
        body_checkable = false;
      }
    }
    if (body_checkable) {
      auto syn = check_syntactic(response, op);
      out.insert(out.end(), syn.begin(), syn.end());
    }
    if (*response.status < 500) {
      if (auto f = check_semantic(response, prediction, policy)) {
        f->operation = op.key();
        out.push_back(std::move(*f));
      }
    }
  }
  for (auto& f : out) f.exchange_ref = exchange_ref;
  return out;
}

bool has_error(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(), [](const Finding& f) { return f.grade == Grade::Error; });
}

}  // namespace restex
