#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restex/plan.hpp"
#include "restex/spec.hpp"
#include "restex/state.hpp"

namespace restex {

enum class Grade { Error, Warning, Info };

std::string_view to_string(Grade grade);
Grade grade_from_string(std::string_view text);

enum class FindingKind {
  SchemaViolation,
  UndefinedStatus,
  ServerError5xx,
  SemanticMismatch,
  NoResponse,
  UndeclaredContentType,
  IdExtractionFailure,
};

std::string_view to_string(FindingKind kind);
FindingKind finding_kind_from_string(std::string_view text);

struct Finding {
  Grade grade = Grade::Error;
  FindingKind kind = FindingKind::SchemaViolation;
  /// Trace event the finding belongs to (0 until recorded).
  std::uint64_t exchange_ref = 0;
  std::string operation;
  std::string detail;

  friend bool operator==(const Finding&, const Finding&) = default;
};

json to_json(const Finding& f);
Finding finding_from_json(const json& j);

struct CheckPolicy {
  /// A 5XX the operation declares by exact code is not reported.
  bool allow_declared_5xx = false;
  Grade stale_mismatch_grade = Grade::Warning;
  Grade no_response_grade = Grade::Warning;

  friend bool operator==(const CheckPolicy&, const CheckPolicy&) = default;
};

json to_json(const CheckPolicy& p);
CheckPolicy check_policy_from_json(const json& j);

/// Undeclared status -> undefined-status; any 5XX -> server-error-5xx (which
/// takes precedence) unless declared exactly and allowed by the policy.
std::optional<Finding> check_status(const HttpExchangeResult& response, const OperationDef& op,
                                    const CheckPolicy& policy = {});

/// Validates the body against the schema declared for the observed status.
/// An unparseable body yields a single finding.
std::vector<Finding> check_syntactic(const HttpExchangeResult& response, const OperationDef& op);

/// Observed status outside the predicted set -> semantic-mismatch, graded by
/// the prediction basis.
std::optional<Finding> check_semantic(const HttpExchangeResult& response, const StatusPrediction& prediction,
                                      const CheckPolicy& policy = {});

/// All checks for one exchange in a fixed order: no-response, status,
/// content type, body, semantics. Semantic checking is skipped for 5XX,
/// which the status check already reports.
std::vector<Finding> check_exchange(const HttpExchangeResult& response, const OperationDef& op,
                                    const StatusPrediction& prediction, const CheckPolicy& policy = {},
                                    std::uint64_t exchange_ref = 0);

bool has_error(const std::vector<Finding>& findings);

}  // namespace restex
