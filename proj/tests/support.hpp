#pragma once

#include <string>
#include <vector>

#include "restex/bookshop.hpp"
#include "restex/generator.hpp"
#include "restex/recreate.hpp"

namespace restex::testing {

inline const ApiSpecIR& bookshop_ir() {
  static const ApiSpecIR ir = load_spec(bookshop_spec_yaml(), DocumentFormat::Yaml);
  return ir;
}

inline const SemanticModel& bookshop_model() {
  static const SemanticModel m = infer_model(bookshop_ir());
  return m;
}

inline const SamplingSpec& bookshop_sampling() {
  static const SamplingSpec s = build_sampling_spec(bookshop_ir(), bookshop_model());
  return s;
}

/// Builds a rendered plan for `operation` from explicit parameters.
inline RequestPlan make_plan(const std::string& operation, std::vector<PlanParam> params, std::uint64_t id = 0) {
  RequestPlan plan;
  plan.plan_id = id;
  plan.binding = *bookshop_model().binding_for(operation);
  plan.params = std::move(params);
  render_plan(plan, *bookshop_ir().find_operation(operation), bookshop_ir().base_path());
  return plan;
}

/// Runs `plan` against `transport`, checking it against a prediction made
/// from `store`, and applies the effect.
inline TraceEvent exchange(Transport& transport, StateStore& store, RequestPlan plan, std::uint64_t event_id) {
  plan.plan_id = event_id;
  const auto* op = bookshop_ir().find_operation(plan.binding.operation);
  TraceEvent e;
  e.event_id = event_id;
  e.prediction = store.predict_status(plan, PredictionMode::Sequential);
  e.response = execute(transport, plan);
  e.findings = check_exchange(e.response, *op, e.prediction, {}, event_id);
  store.apply_effect(plan, e.response, event_id);
  e.plan = std::move(plan);
  e.dispatch_epoch = 2 * event_id - 1;
  e.completion_epoch = 2 * event_id;
  return e;
}

/// `prefix` clean random events followed by one exchange that trips `bug`:
/// a GET of a missing customer, or a DELETE of the first customer created.
inline std::vector<TraceEvent> failing_trace(Transport& transport, Bug bug, std::uint64_t prefix,
                                             std::uint64_t seed = 1) {
  const std::string get = "GET /customers/{customerId}";
  const std::string del = "DELETE /customers/{customerId}";
  WeightTable weights;
  weights.per_operation[bug == Bug::GetMissingCustomer500 ? get : del] = 0;
  const auto sampling = build_sampling_spec(bookshop_ir(), bookshop_model(), {}, weights);
  RunConfig config;
  config.master_seed = seed;
  config.max_requests = prefix;
  MemoryTraceSink sink;
  run_sequential(config, bookshop_ir(), bookshop_model(), sampling, transport, sink);
  auto events = sink.events();

  StateStore store(bookshop_model());
  for (const auto& e : events) store.apply_effect(e.plan, e.response, e.event_id);
  std::string id = "zz404";
  if (bug == Bug::DeleteCustomer500) {
    const auto live = store.query_ids("customer", {Lifecycle::Live});
    if (!live.empty()) id = live.front();
  }
  PlanParam p{"customerId", ParamLocation::Path, id, Component::FromState, "customer", ""};
  events.push_back(
      exchange(transport, store, make_plan(bug == Bug::GetMissingCustomer500 ? get : del, {p}), events.size() + 1));
  return events;
}

}  // namespace restex::testing
