#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restex/checker.hpp"
#include "restex/http.hpp"
#include "restex/sampling.hpp"
#include "restex/trace.hpp"

namespace restex {

enum class RunMode { Sequential, Concurrent };
enum class Verdict { Passed, Failed };
enum class StopReason { Timeout, ErrorDetected, OperatorStop };

std::string_view to_string(RunMode m);
RunMode run_mode_from_string(std::string_view text);
std::string_view to_string(Verdict v);
std::string_view to_string(StopReason r);

inline constexpr int kDefaultWarmup = 20;

struct ProgressEvent {
  double elapsed_s = 0;
  std::uint64_t requests = 0;
  double requests_per_second = 0;
  std::size_t findings = 0;
  std::size_t errors = 0;
};

struct RunConfig {
  RunMode mode = RunMode::Sequential;
  /// Sequential mode always uses 1.
  int max_in_flight = 1;
  Millis duration_limit{60000};
  bool stop_on_error = false;
  std::uint64_t master_seed = 0;
  Millis request_timeout = kDefaultRequestTimeout;
  /// Optional request budget, reported like the duration limit.
  std::optional<std::uint64_t> max_requests;
  /// Leading selections that create prerequisite resources in dependency order.
  int warmup = kDefaultWarmup;
  CheckPolicy policy;
  Millis progress_interval{1000};
  std::function<void(const ProgressEvent&)> on_progress;
  /// Set by the operator to end the run.
  const std::atomic<bool>* stop = nullptr;
};

struct RunResult {
  Verdict verdict = Verdict::Passed;
  StopReason stop_reason = StopReason::Timeout;
  std::uint64_t requests_sent = 0;
  std::map<std::string, std::uint64_t> per_operation;
  /// Findings in event order, capped at kMaxKeptFindings; counts are exact.
  std::vector<Finding> findings;
  std::size_t findings_count = 0;
  std::size_t error_count = 0;
  std::map<std::string, std::size_t> findings_by_kind;
  int peak_in_flight = 0;
  double elapsed_s = 0;
  std::string trace_ref;
  std::string note;

  static constexpr std::size_t kMaxKeptFindings = 10000;
};

json to_json(const RunResult& r);

/// Fills one request for `binding`: each required parameter, and each
/// optional one with the configured probability.
RequestPlan generate_request(const ApiSpecIR& spec, const SamplingSpec& sampling, const OperationBinding& binding,
                             const StateStore& store, Rng& rng);

/// Chooses operations (warm-up first, then weighted selection) and fills them.
class Generator {
 public:
  Generator(const ApiSpecIR& spec, const SemanticModel& model, const SamplingSpec& sampling,
            int warmup = kDefaultWarmup);

  RequestPlan next(const StateStore& store, Rng& rng);
  std::uint64_t generated() const { return next_id_ - 1; }

 private:
  const ApiSpecIR& spec_;
  const SemanticModel& model_;
  const SamplingSpec& sampling_;
  std::vector<const OperationBinding*> warmup_creates_;
  int warmup_;
  std::uint64_t next_id_ = 1;
};

/// One request in flight at a time. Throws EndpointUnreachable when the
/// startup probe fails.
RunResult run_sequential(const RunConfig& config, const ApiSpecIR& spec, const SemanticModel& model,
                         const SamplingSpec& sampling, Transport& transport, TraceSink& sink);

/// Up to max_in_flight requests at a time; effects are applied in
/// completion order and predictions allow for overlapping requests.
RunResult run_concurrent(const RunConfig& config, const ApiSpecIR& spec, const SemanticModel& model,
                         const SamplingSpec& sampling, Transport& transport, TraceSink& sink);

/// Dispatches on config.mode.
RunResult run(const RunConfig& config, const ApiSpecIR& spec, const SemanticModel& model, const SamplingSpec& sampling,
              Transport& transport, TraceSink& sink);

}  // namespace restex
