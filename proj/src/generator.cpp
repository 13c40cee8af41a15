#include "restex/generator.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "restex/errors.hpp"

namespace restex {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Running totals shared by both modes.
class Tally {
 public:
  Tally(const RunConfig& config, RunResult& result) : config_(config), result_(result), start_(Clock::now()) {
    last_progress_ = start_;
  }

  void add(const TraceEvent& e) {
    ++result_.requests_sent;
    ++result_.per_operation[e.plan.binding.operation];
    for (const auto& f : e.findings) {
      ++result_.findings_count;
      ++result_.findings_by_kind[std::string(to_string(f.kind))];
      if (f.grade == Grade::Error) ++result_.error_count;
      if (result_.findings.size() < RunResult::kMaxKeptFindings) result_.findings.push_back(f);
    }
  }

  void maybe_progress() {
    if (!config_.on_progress) return;
    const auto now = Clock::now();
    if (now - last_progress_ < config_.progress_interval) return;
    last_progress_ = now;
    emit();
  }

  void emit() {
    if (!config_.on_progress) return;
    ProgressEvent p;
    p.elapsed_s = seconds_since(start_);
    p.requests = result_.requests_sent;
    p.requests_per_second = p.elapsed_s > 0 ? static_cast<double>(p.requests) / p.elapsed_s : 0;
    p.findings = result_.findings_count;
    p.errors = result_.error_count;
    config_.on_progress(p);
  }

  void finish() {
    result_.elapsed_s = seconds_since(start_);
    result_.verdict = result_.error_count > 0 ? Verdict::Failed : Verdict::Passed;
    emit();
  }

  Clock::time_point start() const { return start_; }

 private:
  const RunConfig& config_;
  RunResult& result_;
  Clock::time_point start_;
  Clock::time_point last_progress_;
};

bool eligible(const OperationBinding& b, const ApiSpecIR& spec, const WeightTable& w) {
  const auto* op = spec.find_operation(b.operation);
  if (!op) return false;
  return w.operation_weight(b, op->operation_id) > 0 && w.resource_weight(b.resource) > 0;
}

/// Checks, applies and packages one completed exchange.
TraceEvent complete_exchange(const RequestPlan& plan, HttpExchangeResult response, const StatusPrediction& prediction,
                             const OperationDef& op, const CheckPolicy& policy, StateStore& store,
                             std::uint64_t event_id) {
  TraceEvent e;
  e.event_id = event_id;
  e.plan = plan;
  e.prediction = prediction;
  e.findings = check_exchange(response, op, prediction, policy, event_id);
  const auto delta = store.apply_effect(plan, response, event_id);
  if (delta.id_extraction_failure) {
    e.findings.push_back(
        {Grade::Warning, FindingKind::IdExtractionFailure, event_id, op.key(), *delta.id_extraction_failure});
  }
  e.response = std::move(response);
  return e;
}

}  // namespace

std::string_view to_string(RunMode m) { return m == RunMode::Sequential ? "sequential" : "concurrent"; }

RunMode run_mode_from_string(std::string_view text) {
  if (text == "sequential") return RunMode::Sequential;
  if (text == "concurrent") return RunMode::Concurrent;
  throw std::invalid_argument("unknown mode: " + std::string(text));
}

std::string_view to_string(Verdict v) { return v == Verdict::Passed ? "passed" : "failed"; }

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Timeout:
      return "timeout";
    case StopReason::ErrorDetected:
      return "error-detected";
    case StopReason::OperatorStop:
      return "operator-stop";
  }
  return "?";
}

json to_json(const RunResult& r) {
  json findings = json::array();
  for (const auto& f : r.findings) findings.push_back(to_json(f));
  return {{"verdict", to_string(r.verdict)},
          {"stop_reason", to_string(r.stop_reason)},
          {"counters",
           {{"requests_sent", r.requests_sent},
            {"per_operation", r.per_operation},
            {"findings", r.findings_count},
            {"errors", r.error_count},
            {"findings_by_kind", r.findings_by_kind},
            {"peak_in_flight", r.peak_in_flight}}},
          {"elapsed_s", r.elapsed_s},
          {"trace_ref", r.trace_ref},
          {"note", r.note},
          {"findings", std::move(findings)}};
}

RequestPlan generate_request(const ApiSpecIR& spec, const SamplingSpec& sampling, const OperationBinding& binding,
                             const StateStore& store, Rng& rng) {
  const auto* op = spec.find_operation(binding.operation);
  if (!op) throw std::invalid_argument("unknown operation " + binding.operation);
  RequestPlan plan;
  plan.binding = binding;
  if (auto it = sampling.per_operation.find(binding.operation); it != sampling.per_operation.end()) {
    for (const auto& ps : it->second.per_parameter) {
      if (!ps.param.required && !rng.chance(sampling.config.optional_probability)) continue;
      auto v = sample_value(ps.domain, store, rng, sampling.config);
      plan.params.push_back({ps.param.name, ps.param.location, std::move(v.value), v.component,
                             ps.domain.reference, std::move(v.violated)});
    }
  }
  render_plan(plan, *op, spec.base_path());
  return plan;
}

Generator::Generator(const ApiSpecIR& spec, const SemanticModel& model, const SamplingSpec& sampling, int warmup)
    : spec_(spec), model_(model), sampling_(sampling), warmup_(warmup) {
  for (const auto& resource : model.topological_order()) {
    for (const auto* b : model.bindings_of(resource)) {
      if (b->crud_kind == CrudKind::Create && eligible(*b, spec, sampling.weights)) {
        warmup_creates_.push_back(b);
        break;
      }
    }
  }
}

RequestPlan Generator::next(const StateStore& store, Rng& rng) {
  const std::uint64_t n = next_id_++;
  const OperationBinding* binding = nullptr;
  if (n <= static_cast<std::uint64_t>(std::max(0, warmup_)) && !warmup_creates_.empty()) {
    binding = warmup_creates_[(n - 1) % warmup_creates_.size()];
  } else {
    binding = &select_operation(model_, sampling_.weights, rng, &spec_);
  }
  auto plan = generate_request(spec_, sampling_, *binding, store, rng);
  plan.plan_id = n;
  return plan;
}

RunResult run_sequential(const RunConfig& config, const ApiSpecIR& spec, const SemanticModel& model,
                         const SamplingSpec& sampling, Transport& transport, TraceSink& sink) {
  transport.probe();
  RunResult result;
  result.trace_ref = sink.ref();
  Tally tally(config, result);
  StateStore store(model);
  Rng rng(config.master_seed);
  Generator gen(spec, model, sampling, config.warmup);
  const auto deadline = tally.start() + config.duration_limit;
  std::uint64_t clock = 0;

  for (;;) {
    if (config.stop && config.stop->load()) {
      result.stop_reason = StopReason::OperatorStop;
      break;
    }
    if (Clock::now() >= deadline || (config.max_requests && result.requests_sent >= *config.max_requests)) {
      result.stop_reason = StopReason::Timeout;
      break;
    }
    auto plan = gen.next(store, rng);
    const auto* op = spec.find_operation(plan.binding.operation);
    const auto prediction = store.predict_status(plan, PredictionMode::Sequential);
    const auto dispatch = ++clock;
    auto response = execute(transport, plan, config.request_timeout);
    result.peak_in_flight = 1;
    const auto completion = ++clock;
    auto event = complete_exchange(plan, std::move(response), prediction, *op, config.policy, store, plan.plan_id);
    event.dispatch_epoch = dispatch;
    event.completion_epoch = completion;
    tally.add(event);
    try {
      sink.record(event);
    } catch (const SinkWriteError& e) {
      result.stop_reason = StopReason::OperatorStop;
      result.note = e.what();
      break;
    }
    if (config.stop_on_error && has_error(event.findings)) {
      result.stop_reason = StopReason::ErrorDetected;
      break;
    }
    tally.maybe_progress();
  }
  tally.finish();
  return result;
}

RunResult run_concurrent(const RunConfig& config, const ApiSpecIR& spec, const SemanticModel& model,
                         const SamplingSpec& sampling, Transport& transport, TraceSink& sink) {
  if (config.max_in_flight <= 1) return run_sequential(config, spec, model, sampling, transport, sink);
  transport.probe();

  struct Job {
    std::shared_ptr<const RequestPlan> plan;
    const OperationDef* op = nullptr;
    StatusPrediction prediction;
    std::vector<std::shared_ptr<const RequestPlan>> overlapping;
    std::uint64_t dispatch_epoch = 0;
  };

  RunResult result;
  result.trace_ref = sink.ref();
  Tally tally(config, result);
  StateStore store(model);
  Rng rng(config.master_seed);
  Generator gen(spec, model, sampling, config.warmup);
  const auto deadline = tally.start() + config.duration_limit;

  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::shared_ptr<Job>> queue;
  std::vector<std::shared_ptr<Job>> active;
  bool shutting_down = false;
  bool error_seen = false;
  bool sink_failed = false;
  std::uint64_t clock = 0;
  std::uint64_t next_event = 1;
  std::atomic<int> executing{0};
  std::atomic<int> peak{0};

  auto complete = [&](const std::shared_ptr<Job>& job, HttpExchangeResult response) {
    std::lock_guard lock(mu);
    const auto completion = ++clock;
    std::vector<const RequestPlan*> others;
    for (const auto& p : job->overlapping) others.push_back(p.get());
    const auto widened = widen_prediction(job->prediction, *job->plan, others);
    auto event = complete_exchange(*job->plan, std::move(response), widened, *job->op, config.policy, store,
                                   next_event++);
    event.dispatch_epoch = job->dispatch_epoch;
    event.completion_epoch = completion;
    tally.add(event);
    if (!sink_failed) {
      try {
        sink.record(event);
      } catch (const SinkWriteError& e) {
        sink_failed = true;
        result.note = e.what();
      }
    }
    if (has_error(event.findings)) error_seen = true;
    active.erase(std::find(active.begin(), active.end(), job));
    cv.notify_all();
  };

  std::vector<std::thread> workers;
  for (int i = 0; i < config.max_in_flight; ++i) {
    workers.emplace_back([&] {
      for (;;) {
        std::shared_ptr<Job> job;
        {
          std::unique_lock lock(mu);
          cv.wait(lock, [&] { return shutting_down || !queue.empty(); });
          if (queue.empty()) return;
          job = std::move(queue.front());
          queue.pop_front();
        }
        const int now = ++executing;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        auto response = execute(transport, *job->plan, config.request_timeout);
        --executing;
        complete(job, std::move(response));
      }
    });
  }

  {
    std::unique_lock lock(mu);
    std::uint64_t dispatched = 0;
    for (;;) {
      cv.wait_until(lock, std::min(deadline, Clock::now() + config.progress_interval), [&] {
        return static_cast<int>(active.size()) < config.max_in_flight || (config.stop && config.stop->load()) ||
               sink_failed || (config.stop_on_error && error_seen);
      });
      if ((config.stop && config.stop->load()) || sink_failed) {
        result.stop_reason = StopReason::OperatorStop;
        break;
      }
      if (config.stop_on_error && error_seen) {
        result.stop_reason = StopReason::ErrorDetected;
        break;
      }
      if (Clock::now() >= deadline || (config.max_requests && dispatched >= *config.max_requests)) {
        result.stop_reason = StopReason::Timeout;
        break;
      }
      tally.maybe_progress();
      if (static_cast<int>(active.size()) >= config.max_in_flight) continue;

      auto job = std::make_shared<Job>();
      auto plan = std::make_shared<RequestPlan>(gen.next(store, rng));
      job->op = spec.find_operation(plan->binding.operation);
      job->prediction = store.predict_status(*plan, PredictionMode::Concurrent);
      job->plan = plan;
      for (const auto& other : active) {
        other->overlapping.push_back(plan);
        job->overlapping.push_back(other->plan);
      }
      job->dispatch_epoch = ++clock;
      active.push_back(job);
      queue.push_back(job);
      ++dispatched;
      cv.notify_all();
    }
    // Let what is in flight finish so every dispatched request is recorded.
    cv.wait(lock, [&] { return active.empty(); });
    shutting_down = true;
    cv.notify_all();
  }
  for (auto& w : workers) w.join();
  if (config.stop_on_error && error_seen && result.stop_reason == StopReason::Timeout) {
    result.stop_reason = StopReason::ErrorDetected;
  }
  result.peak_in_flight = peak.load();
  tally.finish();
  return result;
}

RunResult run(const RunConfig& config, const ApiSpecIR& spec, const SemanticModel& model, const SamplingSpec& sampling,
              Transport& transport, TraceSink& sink) {
  if (config.mode == RunMode::Sequential) return run_sequential(config, spec, model, sampling, transport, sink);
  return run_concurrent(config, spec, model, sampling, transport, sink);
}

}  // namespace restex
