#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restex/checker.hpp"
#include "restex/generator.hpp"
#include "restex/http.hpp"
#include "restex/trace.hpp"

namespace restex {

inline constexpr int kScriptVersion = 1;

/// Marker for a symbol inside a parameter value: {"$sym": "$customer_id"}.
json symbol_ref(const std::string& variable);
std::optional<std::string> symbol_name(const json& value);

struct SymbolConsumer {
  std::uint64_t step = 0;
  ParamLocation location = ParamLocation::Path;
  std::string parameter;

  friend bool operator==(const SymbolConsumer&, const SymbolConsumer&) = default;
};

/// A value produced by one step's response and used by later steps.
struct SymbolicBinding {
  std::string variable;
  std::uint64_t producer_step = 0;
  /// Location in the producer's response body: "$.customerId", "$[2].bookId".
  std::string producer_path;
  std::vector<SymbolConsumer> consumers;

  friend bool operator==(const SymbolicBinding&, const SymbolicBinding&) = default;
};

struct ScriptStep {
  std::uint64_t step = 0;
  /// Trace event the step was derived from.
  std::uint64_t source_event = 0;
  /// Parameter values may hold symbol references.
  RequestPlan plan;

  friend bool operator==(const ScriptStep&, const ScriptStep&) = default;
};

struct ExpectedFailure {
  FindingKind kind = FindingKind::ServerError5xx;
  std::string operation;
  std::string detail;

  bool matches(const Finding& f) const { return f.kind == kind && f.operation == operation; }
  friend bool operator==(const ExpectedFailure&, const ExpectedFailure&) = default;
};

struct RecreateScript {
  json spec_document;
  json model;
  std::vector<ScriptStep> steps;
  std::vector<SymbolicBinding> bindings;
  std::optional<ExpectedFailure> expected_failure;
  RunMode mode = RunMode::Sequential;
  int max_in_flight = 1;
};

json to_json(const RecreateScript& s);
/// Throws ScriptFormatError.
RecreateScript script_from_json(const json& j);
RecreateScript read_script(const std::string& path);
void write_script(const RecreateScript& s, const std::string& path);

/// Turns trace events into script steps, replacing literals that equal an id
/// produced by an earlier response with symbols. Created ids always start a
/// new symbol; ids seen in reads only when not produced before. Symbols with
/// no consumer are dropped. The expected failure is taken from the last
/// event's first error-grade finding.
RecreateScript bind_symbols(const std::vector<TraceEvent>& events, const SemanticModel& model);

/// Step numbers each step consumes symbols from.
std::vector<std::vector<std::uint64_t>> producer_steps(const RecreateScript& script);

enum class ReplayOutcome { Reproduced, NotReproduced, Error };

std::string_view to_string(ReplayOutcome o);
/// 0 reproduced, 1 not reproduced, 2 error.
int exit_code(ReplayOutcome o);

struct ReplayOptions {
  Millis timeout = kDefaultRequestTimeout;
  /// Attempts for concurrent scripts; reproduced when any attempt fails.
  int concurrent_replays = 20;
  CheckPolicy policy;
  /// Called before every attempt to give the SUT a fresh state.
  std::function<void()> reset;
};

struct ReplayResult {
  ReplayOutcome outcome = ReplayOutcome::NotReproduced;
  int attempts = 0;
  int failures = 0;
  std::string detail;
};

/// Runs the script once (sequential) or up to concurrent_replays times.
/// Sequential scripts reproduce when the last step shows the expected
/// failure; concurrent ones when any step does.
ReplayResult replay(const RecreateScript& script, Transport& transport, const ReplayOptions& options = {});

/// A single attempt. Throws SymbolResolutionFailure when a producer response
/// lacks its bound value.
bool replay_once(const RecreateScript& script, const ApiSpecIR& spec, const SemanticModel& model, Transport& transport,
                 const ReplayOptions& options);

/// Decides whether a candidate event list still shows the failure.
using Oracle = std::function<bool(const std::vector<TraceEvent>&)>;

/// Oracle that binds symbols, replays against `transport` and requires the
/// given failure. Symbol resolution failures count as not reproduced.
Oracle make_replay_oracle(const ApiSpecIR& spec, const SemanticModel& model, Transport& transport,
                          const ExpectedFailure& expected, RunMode mode, int max_in_flight,
                          const ReplayOptions& options);

struct MinimizeOptions {
  int budget = 500;
  int precondition_attempts = 3;
};

struct MinimizeResult {
  std::vector<TraceEvent> events;
  std::size_t before = 0;
  std::size_t after = 0;
  int oracle_calls = 0;
  /// False when the budget ran out before 1-minimality was confirmed.
  bool proven_minimal = false;
};

/// Delta debugging over the events dispatched before `failing_event`
/// completed, in dispatch order. An event is kept
/// together with the events that produce the symbols it consumes, and the
/// failing event is always kept. Throws NotReproducible when the full prefix
/// never reproduces.
MinimizeResult minimize(const std::vector<TraceEvent>& trace, std::uint64_t failing_event, const SemanticModel& model,
                        const Oracle& oracle, const MinimizeOptions& options = {});

/// Smallest N with k * (1 - 1/k)^N <= epsilon: a union bound on "some of k
/// uniformly selected operations was never invoked in N draws".
std::uint64_t estimate_run_length(std::uint64_t k, double epsilon);

/// Monte Carlo estimate of P(some of k operations missed in n draws) for
/// each n, from coupon-collector completion times.
std::vector<double> simulate_miss_probability(std::uint64_t k, const std::vector<std::uint64_t>& n_values,
                                              std::uint64_t trials, std::uint64_t seed);

}  // namespace restex
