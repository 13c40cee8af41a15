#include "restex/recreate.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "restex/errors.hpp"

namespace restex {

namespace {

bool is_2xx(const HttpExchangeResult& r) { return r.status && *r.status >= 200 && *r.status < 300; }

std::optional<std::string> id_text(const json& v) {
  if (v.is_string() && !v.get_ref<const std::string&>().empty()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  return std::nullopt;
}

/// Path and text of the resource's own id inside one object.
std::optional<std::pair<std::string, std::string>> own_id(const json& obj, const std::string& prefix,
                                                          const Resource& res, const SemanticModel& model) {
  if (!obj.is_object()) return std::nullopt;
  for (const auto& f : res.id_field_names) {
    auto it = obj.find(f);
    if (it != obj.end()) {
      if (auto id = id_text(*it)) return std::make_pair(prefix + "." + f, *id);
    }
  }
  for (const auto& [key, value] : obj.items()) {
    if (model.id_match(qualify_name(key, res.name), res) >= model.name_threshold) {
      if (auto id = id_text(value)) return std::make_pair(prefix + "." + key, *id);
    }
  }
  return std::nullopt;
}

/// Resolves "$.a[2].b" inside `root`.
const json* json_at(const json& root, std::string_view path) {
  if (path.empty() || path[0] != '$') return nullptr;
  const json* cur = &root;
  std::size_t i = 1;
  while (i < path.size()) {
    if (path[i] == '.') {
      std::size_t end = path.find_first_of(".[", i + 1);
      if (end == std::string_view::npos) end = path.size();
      const std::string key(path.substr(i + 1, end - i - 1));
      if (!cur->is_object()) return nullptr;
      auto it = cur->find(key);
      if (it == cur->end()) return nullptr;
      cur = &*it;
      i = end;
    } else if (path[i] == '[') {
      const std::size_t end = path.find(']', i);
      if (end == std::string_view::npos || !cur->is_array()) return nullptr;
      const auto idx = std::stoul(std::string(path.substr(i + 1, end - i - 1)));
      if (idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
      i = end + 1;
    } else {
      return nullptr;
    }
  }
  return cur;
}

/// Replaces symbol references with their values; throws when one is unknown.
void resolve(json& value, const std::map<std::string, json>& symbols) {
  if (auto name = symbol_name(value)) {
    auto it = symbols.find(*name);
    if (it == symbols.end()) throw SymbolResolutionFailure("symbol " + *name + " has no value");
    value = it->second;
    return;
  }
  if (value.is_array() || value.is_object()) {
    for (auto& v : value) resolve(v, symbols);
  }
}

bool has_unresolved(const json& value, const std::map<std::string, json>& symbols) {
  if (auto name = symbol_name(value)) return !symbols.count(*name);
  if (value.is_array() || value.is_object()) {
    for (const auto& v : value)
      if (has_unresolved(v, symbols)) return true;
  }
  return false;
}

/// Stores the values a step's response produces.
void capture(const RecreateScript& script, std::uint64_t step, const HttpExchangeResult& response,
             std::map<std::string, json>& symbols) {
  for (const auto& b : script.bindings) {
    if (b.producer_step != step) continue;
    const json* v = is_2xx(response) && response.json_body ? json_at(*response.json_body, b.producer_path) : nullptr;
    if (!v || !id_text(*v)) {
      throw SymbolResolutionFailure("step " + std::to_string(step) + " produced no value at " + b.producer_path +
                                    " for " + b.variable +
                                    (response.status ? " (status " + std::to_string(*response.status) + ")" : ""));
    }
    symbols[b.variable] = *v;
  }
}

json step_to_json(const ScriptStep& s) {
  return {{"step", s.step}, {"source_event", s.source_event}, {"plan", to_json(s.plan)}};
}

json binding_to_json(const SymbolicBinding& b) {
  json consumers = json::array();
  for (const auto& c : b.consumers)
    consumers.push_back({{"step", c.step}, {"location", to_string(c.location)}, {"parameter", c.parameter}});
  return {{"variable", b.variable},
          {"producer", {{"step", b.producer_step}, {"path", b.producer_path}}},
          {"consumers", std::move(consumers)}};
}

}  // namespace

json symbol_ref(const std::string& variable) { return {{"$sym", variable}}; }

std::optional<std::string> symbol_name(const json& value) {
  if (value.is_object() && value.size() == 1) {
    auto it = value.find("$sym");
    if (it != value.end() && it->is_string()) return it->get<std::string>();
  }
  return std::nullopt;
}

json to_json(const RecreateScript& s) {
  json steps = json::array();
  for (const auto& st : s.steps) steps.push_back(step_to_json(st));
  json bindings = json::array();
  for (const auto& b : s.bindings) bindings.push_back(binding_to_json(b));
  json expected = nullptr;
  if (s.expected_failure) {
    expected = {{"kind", to_string(s.expected_failure->kind)},
                {"operation", s.expected_failure->operation},
                {"detail", s.expected_failure->detail}};
  }
  return {{"script_version", kScriptVersion},
          {"mode", to_string(s.mode)},
          {"max_in_flight", s.max_in_flight},
          {"expected_failure", std::move(expected)},
          {"steps", std::move(steps)},
          {"bindings", std::move(bindings)},
          {"model", s.model},
          {"spec", s.spec_document}};
}

RecreateScript script_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ScriptFormatError("script must be a JSON object");
    if (j.value("script_version", 0) != kScriptVersion) throw ScriptFormatError("unsupported script_version");
    RecreateScript s;
    s.mode = run_mode_from_string(j.value("mode", "sequential"));
    s.max_in_flight = j.value("max_in_flight", 1);
    s.spec_document = j.at("spec");
    s.model = j.at("model");
    std::uint64_t expected_step = 1;
    for (const auto& st : j.at("steps")) {
      ScriptStep step;
      step.step = st.at("step").get<std::uint64_t>();
      if (step.step != expected_step++) throw ScriptFormatError("steps must be numbered 1, 2, ...");
      step.source_event = st.value("source_event", std::uint64_t{0});
      step.plan = plan_from_json(st.at("plan"));
      s.steps.push_back(std::move(step));
    }
    for (const auto& bj : j.at("bindings")) {
      SymbolicBinding b;
      b.variable = bj.at("variable").get<std::string>();
      b.producer_step = bj.at("producer").at("step").get<std::uint64_t>();
      b.producer_path = bj.at("producer").at("path").get<std::string>();
      for (const auto& c : bj.at("consumers")) {
        SymbolConsumer sc{c.at("step").get<std::uint64_t>(),
                          param_location_from_string(c.at("location").get<std::string>()),
                          c.at("parameter").get<std::string>()};
        if (sc.step <= b.producer_step) throw ScriptFormatError(b.variable + " is consumed before it is produced");
        b.consumers.push_back(std::move(sc));
      }
      if (b.producer_step == 0 || b.producer_step > s.steps.size())
        throw ScriptFormatError(b.variable + " has no producer step");
      s.bindings.push_back(std::move(b));
    }
    const auto& ef = j.at("expected_failure");
    if (!ef.is_null()) {
      s.expected_failure = ExpectedFailure{finding_kind_from_string(ef.at("kind").get<std::string>()),
                                           ef.at("operation").get<std::string>(), ef.value("detail", "")};
    }
    return s;
  } catch (const ScriptFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScriptFormatError(std::string("malformed script: ") + e.what());
  }
}

RecreateScript read_script(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScriptFormatError("cannot open script " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScriptFormatError(path + ": " + e.what());
  }
  return script_from_json(j);
}

void write_script(const RecreateScript& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << to_json(s).dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path);
}

RecreateScript bind_symbols(const std::vector<TraceEvent>& events, const SemanticModel& model) {
  RecreateScript script;
  script.model = model_to_json(model);

  struct Produced {
    std::uint64_t step;
    std::string path;
    std::string resource;
    std::optional<std::size_t> binding;
  };
  std::map<std::string, Produced> produced;
  std::map<std::string, int> name_uses;

  auto substitute = [&](json& value, std::uint64_t step, const PlanParam& param, auto& self) -> void {
    if (value.is_array() || value.is_object()) {
      for (auto& v : value) self(v, step, param, self);
      return;
    }
    auto text = id_text(value);
    if (!text) return;
    auto it = produced.find(*text);
    if (it == produced.end()) return;
    auto& p = it->second;
    if (!p.binding) {
      const std::string base = "$" + p.resource + "_id";
      const int n = ++name_uses[base];
      SymbolicBinding b;
      b.variable = n == 1 ? base : base + "_" + std::to_string(n);
      b.producer_step = p.step;
      b.producer_path = p.path;
      p.binding = script.bindings.size();
      script.bindings.push_back(std::move(b));
    }
    auto& b = script.bindings[*p.binding];
    SymbolConsumer c{step, param.location, param.name};
    if (std::find(b.consumers.begin(), b.consumers.end(), c) == b.consumers.end()) b.consumers.push_back(c);
    value = symbol_ref(b.variable);
  };

  std::uint64_t step = 0;
  for (const auto& e : events) {
    ++step;
    ScriptStep s;
    s.step = step;
    s.source_event = e.event_id;
    s.plan = e.plan;
    for (auto& p : s.plan.params) substitute(p.value, step, p, substitute);
    script.steps.push_back(std::move(s));

    if (!is_2xx(e.response) || !e.response.json_body) continue;
    const auto* res = model.find_resource(e.plan.binding.resource);
    if (!res) continue;
    const json& body = *e.response.json_body;
    auto offer = [&](const std::pair<std::string, std::string>& id, bool fresh) {
      if (!fresh && produced.count(id.second)) return;
      produced[id.second] = Produced{step, id.first, res->name, std::nullopt};
    };
    switch (e.plan.binding.crud_kind) {
      case CrudKind::Create:
        if (auto id = own_id(body, "$", *res, model)) offer(*id, true);
        break;
      case CrudKind::Read:
      case CrudKind::Update:
        if (auto id = own_id(body, "$", *res, model)) offer(*id, false);
        break;
      case CrudKind::ReadList: {
        const json* items = nullptr;
        std::string prefix = "$";
        if (body.is_array()) {
          items = &body;
        } else if (body.is_object()) {
          for (const char* key : {"items", "data", "results"}) {
            auto it = body.find(key);
            if (it != body.end() && it->is_array()) {
              items = &*it;
              prefix = std::string("$.") + key;
              break;
            }
          }
        }
        if (items) {
          for (std::size_t k = 0; k < items->size(); ++k) {
            if (auto id = own_id((*items)[k], prefix + "[" + std::to_string(k) + "]", *res, model)) offer(*id, false);
          }
        }
        break;
      }
      default:
        break;
    }
  }

  if (!events.empty()) {
    const auto& last = events.back().findings;
    auto pick = std::find_if(last.begin(), last.end(), [](const Finding& f) { return f.grade == Grade::Error; });
    if (pick == last.end()) pick = last.begin();
    if (pick != last.end()) script.expected_failure = ExpectedFailure{pick->kind, pick->operation, pick->detail};
  }
  return script;
}

std::vector<std::vector<std::uint64_t>> producer_steps(const RecreateScript& script) {
  std::vector<std::vector<std::uint64_t>> out(script.steps.size());
  for (const auto& b : script.bindings) {
    for (const auto& c : b.consumers) {
      auto& v = out.at(c.step - 1);
      if (std::find(v.begin(), v.end(), b.producer_step) == v.end()) v.push_back(b.producer_step);
    }
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

std::string_view to_string(ReplayOutcome o) {
  switch (o) {
    case ReplayOutcome::Reproduced:
      return "reproduced";
    case ReplayOutcome::NotReproduced:
      return "not-reproduced";
    case ReplayOutcome::Error:
      return "error";
  }
  return "?";
}

int exit_code(ReplayOutcome o) {
  switch (o) {
    case ReplayOutcome::Reproduced:
      return 0;
    case ReplayOutcome::NotReproduced:
      return 1;
    case ReplayOutcome::Error:
      return 2;
  }
  return 2;
}

bool replay_once(const RecreateScript& script, const ApiSpecIR& spec, const SemanticModel& model, Transport& transport,
                 const ReplayOptions& options) {
  if (!script.expected_failure) throw ScriptFormatError("script has no expected failure");
  const auto& expected = *script.expected_failure;
  StateStore store(model);
  std::map<std::string, json> symbols;

  auto prepare = [&](const ScriptStep& st) {
    RequestPlan plan = st.plan;
    for (auto& p : plan.params) resolve(p.value, symbols);
    const auto* op = spec.find_operation(plan.binding.operation);
    if (!op) throw ScriptFormatError("unknown operation " + plan.binding.operation);
    render_plan(plan, *op, spec.base_path());
    return std::make_pair(plan, op);
  };
  auto shows_failure = [&](const std::vector<Finding>& findings) {
    return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return expected.matches(f); });
  };

  if (script.mode == RunMode::Sequential || script.max_in_flight <= 1) {
    bool last_failed = false;
    for (const auto& st : script.steps) {
      auto [plan, op] = prepare(st);
      const auto prediction = store.predict_status(plan, PredictionMode::Sequential);
      auto response = execute(transport, plan, options.timeout);
      const auto findings = check_exchange(response, *op, prediction, options.policy, st.step);
      store.apply_effect(plan, response, st.step);
      capture(script, st.step, response, symbols);
      last_failed = shows_failure(findings);
    }
    return last_failed;
  }

  // Concurrent: dispatch in step order, at most max_in_flight at a time; a
  // step waits for the steps producing its symbols.
  struct Running {
    std::shared_ptr<const RequestPlan> plan;
    std::vector<std::shared_ptr<const RequestPlan>> overlapping;
  };
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::thread> threads;
  std::map<std::uint64_t, std::shared_ptr<Running>> active;
  bool failed = false;
  std::exception_ptr error;

  std::unique_lock lock(mu);
  for (const auto& st : script.steps) {
    cv.wait(lock, [&] {
      if (error) return true;
      if (static_cast<int>(active.size()) >= script.max_in_flight) return false;
      return std::none_of(st.plan.params.begin(), st.plan.params.end(),
                          [&](const PlanParam& p) { return has_unresolved(p.value, symbols); }) ||
             active.empty();
    });
    if (error) break;
    auto [plan, op] = prepare(st);
    auto running = std::make_shared<Running>();
    running->plan = std::make_shared<RequestPlan>(plan);
    for (auto& [_, other] : active) {
      other->overlapping.push_back(running->plan);
      running->overlapping.push_back(other->plan);
    }
    const auto prediction = store.predict_status(plan, PredictionMode::Concurrent);
    active[st.step] = running;
    threads.emplace_back([&, running, prediction, op = op, step = st.step] {
      auto response = execute(transport, *running->plan, options.timeout);
      std::lock_guard guard(mu);
      std::vector<const RequestPlan*> others;
      for (const auto& p : running->overlapping) others.push_back(p.get());
      const auto widened = widen_prediction(prediction, *running->plan, others);
      const auto findings = check_exchange(response, *op, widened, options.policy, step);
      store.apply_effect(*running->plan, response, step);
      try {
        capture(script, step, response, symbols);
      } catch (...) {
        if (!error) error = std::current_exception();
      }
      failed |= shows_failure(findings);
      active.erase(step);
      cv.notify_all();
    });
  }
  cv.wait(lock, [&] { return active.empty(); });
  lock.unlock();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return failed;
}

ReplayResult replay(const RecreateScript& script, Transport& transport, const ReplayOptions& options) {
  ReplayResult out;
  ApiSpecIR spec;
  SemanticModel model;
  try {
    if (!script.expected_failure) throw ScriptFormatError("script has no expected failure");
    spec = load_spec(script.spec_document);
    model = model_from_json(script.model, spec);
    transport.probe();
  } catch (const std::exception& e) {
    out.outcome = ReplayOutcome::Error;
    out.detail = e.what();
    return out;
  }
  const bool concurrent = script.mode == RunMode::Concurrent && script.max_in_flight > 1;
  const int attempts = concurrent ? std::max(1, options.concurrent_replays) : 1;
  for (int a = 0; a < attempts; ++a) {
    if (options.reset) options.reset();
    ++out.attempts;
    try {
      if (replay_once(script, spec, model, transport, options)) {
        ++out.failures;
        break;
      }
    } catch (const SymbolResolutionFailure& e) {
      if (!concurrent) {
        out.outcome = ReplayOutcome::Error;
        out.detail = e.what();
        return out;
      }
      out.detail = e.what();
    } catch (const std::exception& e) {
      out.outcome = ReplayOutcome::Error;
      out.detail = e.what();
      return out;
    }
  }
  out.outcome = out.failures > 0 ? ReplayOutcome::Reproduced : ReplayOutcome::NotReproduced;
  if (out.outcome == ReplayOutcome::Reproduced) {
    out.detail = script.expected_failure->kind == FindingKind::SemanticMismatch
                     ? "semantic mismatch on " + script.expected_failure->operation
                     : std::string(to_string(script.expected_failure->kind)) + " on " +
                           script.expected_failure->operation;
  }
  return out;
}

Oracle make_replay_oracle(const ApiSpecIR& spec, const SemanticModel& model, Transport& transport,
                          const ExpectedFailure& expected, RunMode mode, int max_in_flight,
                          const ReplayOptions& options) {
  return [&spec, &model, &transport, expected, mode, max_in_flight, options](const std::vector<TraceEvent>& events) {
    auto script = bind_symbols(events, model);
    script.expected_failure = expected;
    script.mode = mode;
    script.max_in_flight = max_in_flight;
    const bool concurrent = mode == RunMode::Concurrent && max_in_flight > 1;
    const int attempts = concurrent ? std::max(1, options.concurrent_replays) : 1;
    for (int a = 0; a < attempts; ++a) {
      if (options.reset) options.reset();
      try {
        if (replay_once(script, spec, model, transport, options)) return true;
      } catch (const SymbolResolutionFailure&) {
      }
    }
    return false;
  };
}

namespace {

struct BudgetExhausted {};

}  // namespace

MinimizeResult minimize(const std::vector<TraceEvent>& trace, std::uint64_t failing_event, const SemanticModel& model,
                        const Oracle& oracle, const MinimizeOptions& options) {
  // Everything dispatched before the failing exchange completed may have
  // influenced it; in sequential traces that is exactly the earlier events.
  const auto target = std::find_if(trace.begin(), trace.end(),
                                   [&](const TraceEvent& e) { return e.event_id == failing_event; });
  if (target == trace.end()) throw std::invalid_argument("event " + std::to_string(failing_event) + " not in trace");
  std::vector<TraceEvent> prefix;
  for (const auto& e : trace)
    if (e.event_id == failing_event || e.dispatch_epoch < target->completion_epoch) prefix.push_back(e);
  std::stable_sort(prefix.begin(), prefix.end(),
                   [](const TraceEvent& a, const TraceEvent& b) { return a.dispatch_epoch < b.dispatch_epoch; });
  std::size_t failing = 0;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (prefix[i].event_id == failing_event) failing = i;

  MinimizeResult result;
  result.before = prefix.size();

  // Direct producers of each position, from the symbol analysis.
  const auto steps = producer_steps(bind_symbols(prefix, model));
  auto closure = [&](std::set<std::size_t> keep) {
    keep.insert(failing);
    std::vector<std::size_t> todo(keep.begin(), keep.end());
    while (!todo.empty()) {
      const auto i = todo.back();
      todo.pop_back();
      for (auto s : steps[i]) {
        if (keep.insert(s - 1).second) todo.push_back(s - 1);
      }
    }
    return keep;
  };
  auto events_of = [&](const std::set<std::size_t>& keep) {
    std::vector<TraceEvent> out;
    for (auto i : keep) out.push_back(prefix[i]);
    return out;
  };
  std::map<std::set<std::size_t>, bool> cache;
  auto test = [&](const std::set<std::size_t>& units) {
    const auto keep = closure(units);
    if (auto it = cache.find(keep); it != cache.end()) return it->second;
    if (result.oracle_calls >= options.budget) throw BudgetExhausted{};
    ++result.oracle_calls;
    const bool r = oracle(events_of(keep));
    cache[keep] = r;
    return r;
  };

  bool reproducible = false;
  for (int a = 0; a < std::max(1, options.precondition_attempts) && !reproducible; ++a) {
    ++result.oracle_calls;
    reproducible = oracle(prefix);
  }
  if (!reproducible) {
    throw NotReproducible("event " + std::to_string(failing_event) + " did not reproduce in " +
                          std::to_string(result.oracle_calls) + " replays of the full prefix");
  }

  std::set<std::size_t> all;
  for (std::size_t i = 0; i < prefix.size(); ++i) all.insert(i);
  cache[all] = true;
  std::set<std::size_t> best = all;

  try {
    std::set<std::size_t> units;
    for (std::size_t i = 0; i < prefix.size(); ++i)
      if (i != failing) units.insert(i);

    if (test({})) {
      units.clear();
    } else {
      std::size_t n = 2;
      while (units.size() >= 2) {
        std::vector<std::set<std::size_t>> chunks(std::min(n, units.size()));
        std::size_t k = 0;
        const std::size_t per = (units.size() + chunks.size() - 1) / chunks.size();
        for (auto u : units) chunks[std::min(k++ / per, chunks.size() - 1)].insert(u);
        bool reduced = false;
        for (const auto& c : chunks) {
          if (test(c)) {
            units = c;
            n = 2;
            reduced = true;
            break;
          }
        }
        if (!reduced && chunks.size() > 2) {
          for (const auto& c : chunks) {
            std::set<std::size_t> rest;
            std::set_difference(units.begin(), units.end(), c.begin(), c.end(), std::inserter(rest, rest.end()));
            if (test(rest)) {
              units = std::move(rest);
              n = std::max<std::size_t>(n - 1, 2);
              reduced = true;
              break;
            }
          }
        }
        if (reduced) {
          best = closure(units);
          continue;
        }
        if (n >= units.size()) break;
        n = std::min(units.size(), n * 2);
      }
    }
    best = closure(units);

    // Confirm 1-minimality: dropping any kept event (with what depends on it)
    // must lose the failure.
    for (bool changed = true; changed;) {
      changed = false;
      for (auto e : best) {
        if (e == failing) continue;
        std::set<std::size_t> candidate;
        for (auto x : best) {
          if (x == e) continue;
          if (closure({x}).count(e)) continue;
          candidate.insert(x);
        }
        if (candidate.count(failing) == 0) continue;
        if (test(candidate)) {
          best = closure(candidate);
          changed = true;
          break;
        }
      }
    }
    result.proven_minimal = true;
  } catch (const BudgetExhausted&) {
    result.proven_minimal = false;
  }
  result.events = events_of(best);
  result.after = result.events.size();
  return result;
}

std::uint64_t estimate_run_length(std::uint64_t k, double epsilon) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must be in (0, 1)");
  if (k == 1) return 1;
  const double kd = static_cast<double>(k);
  const double q = 1.0 - 1.0 / kd;
  auto bound = [&](std::uint64_t n) { return kd * std::pow(q, static_cast<double>(n)); };
  auto n = static_cast<std::uint64_t>(std::max(1.0, std::ceil(std::log(epsilon / kd) / std::log(q))));
  while (n > 1 && bound(n - 1) <= epsilon) --n;
  while (bound(n) > epsilon) ++n;
  return n;
}

std::vector<double> simulate_miss_probability(std::uint64_t k, const std::vector<std::uint64_t>& n_values,
                                              std::uint64_t trials, std::uint64_t seed) {
  if (k == 0 || trials == 0) throw std::invalid_argument("k and trials must be positive");
  Rng rng(seed);
  std::vector<std::uint64_t> misses(n_values.size(), 0);
  std::vector<char> seen(k);
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::fill(seen.begin(), seen.end(), 0);
    std::uint64_t distinct = 0, draws = 0;
    while (distinct < k) {
      ++draws;
      auto& s = seen[rng.below(k)];
      if (!s) {
        s = 1;
        ++distinct;
      }
    }
    // Some operation was missed in n draws exactly when collection took longer.
    for (std::size_t i = 0; i < n_values.size(); ++i) misses[i] += draws > n_values[i];
  }
  std::vector<double> out;
  for (auto m : misses) out.push_back(static_cast<double>(m) / static_cast<double>(trials));
  return out;
}

}  // namespace restex
