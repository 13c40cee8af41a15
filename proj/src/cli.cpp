#include "restex/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "restex/bookshop.hpp"
#include "restex/errors.hpp"
#include "restex/generator.hpp"
#include "restex/recreate.hpp"

namespace restex {

namespace {

using namespace std::chrono_literals;

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

/// Installs the interrupt handler for the lifetime of a run.
class InterruptGuard {
 public:
  InterruptGuard() {
    g_stop.store(false);
    previous_ = std::signal(SIGINT, on_interrupt);
  }
  ~InterruptGuard() { std::signal(SIGINT, previous_); }

 private:
  void (*previous_)(int) = SIG_DFL;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

/// JSON or YAML side file, chosen by extension.
json read_document(const std::string& path) {
  const auto text = read_file(path);
  if (format_from_path(path) == DocumentFormat::Yaml) return yaml_to_json(text);
  return json::parse(text);
}

// ---------------------------------------------------------------------------
// Targets: a live endpoint or the in-process bookshop.

struct Target {
  std::shared_ptr<Bookshop> shop;
  std::shared_ptr<Transport> transport;
  std::function<void()> reset;
  std::string description;
};

/// Target settings live in the same JSON shape as the run config:
/// "endpoint", "fixture": {"bugs", "random_ids", "id_seed"}, "headers",
/// "insecure", "reset_path".
Target make_target(const json& cfg) {
  const bool has_endpoint = cfg.contains("endpoint") && !cfg["endpoint"].get<std::string>().empty();
  const bool has_fixture = cfg.contains("fixture") && !cfg["fixture"].is_null() && cfg["fixture"] != false;
  if (has_endpoint == has_fixture) throw std::invalid_argument("give exactly one of --endpoint or --fixture");
  Target t;
  if (has_fixture) {
    BookshopOptions o;
    const json f = cfg["fixture"].is_object() ? cfg["fixture"] : json::object();
    for (const auto& b : f.value("bugs", json::array())) o.bugs.insert(bug_from_string(b.get<std::string>()));
    o.random_ids = f.value("random_ids", false);
    o.id_seed = f.value("id_seed", std::uint64_t{0});
    t.shop = std::make_shared<Bookshop>(o);
    t.transport = std::make_shared<InProcessTransport>(t.shop->handler(), "fixture");
    t.reset = [shop = t.shop] { shop->reset(); };
    std::string bugs;
    for (auto b : o.bugs) bugs += (bugs.empty() ? "" : ",") + std::string(to_string(b));
    t.description = "fixture" + (bugs.empty() ? std::string() : " [" + bugs + "]");
    return t;
  }
  NetworkOptions n;
  for (const auto& [k, v] : cfg.value("headers", json::object()).items()) n.default_headers[k] = v.get<std::string>();
  if (const char* token = std::getenv(kAuthTokenEnv); token && *token) {
    n.default_headers["Authorization"] = std::string("Bearer ") + token;
  }
  n.insecure = cfg.value("insecure", false);
  auto transport = std::make_shared<NetworkTransport>(cfg["endpoint"].get<std::string>(), n);
  t.transport = transport;
  t.description = transport->describe();
  if (const auto path = cfg.value("reset_path", std::string()); !path.empty()) {
    t.reset = [transport, path] {
      const auto r = transport->execute(HttpRequest{"POST", path, {}, ""}, 10000ms);
      if (!r.status || *r.status >= 300) throw std::runtime_error("reset request to " + path + " failed");
    };
  }
  return t;
}

struct TargetFlags {
  std::string endpoint;
  bool fixture = false;
  std::vector<std::string> bugs;
  bool random_ids = false;
  std::uint64_t id_seed = 0;
  std::vector<std::string> headers;
  bool insecure = false;
  std::string reset_path;
  std::vector<CLI::Option*> options;
};

void add_target_flags(CLI::App* app, TargetFlags& f) {
  f.options = {
      app->add_option("--endpoint", f.endpoint, "Base URL of the API under test"),
      app->add_flag("--fixture", f.fixture, "Use the built-in bookshop service"),
      app->add_option("--bug", f.bugs, "Enable a fixture bug (repeatable)"),
      app->add_flag("--random-ids", f.random_ids, "Fixture assigns random ids"),
      app->add_option("--id-seed", f.id_seed, "Seed for fixture random ids"),
      app->add_option("--header", f.headers, "Extra request header 'Name: value' (repeatable)"),
      app->add_flag("--insecure", f.insecure, "Skip TLS certificate checks"),
      app->add_option("--reset-path", f.reset_path, "POST here before each replay to reset the service"),
  };
}

/// Writes the flags that were given into `cfg`.
void apply_target_flags(const TargetFlags& f, json& cfg) {
  auto given = [&](std::size_t i) { return f.options[i]->count() > 0; };
  if (given(0)) {
    cfg["endpoint"] = f.endpoint;
    cfg.erase("fixture");
  }
  if (given(1) || given(2) || given(3) || given(4)) {
    if (!cfg.contains("fixture") || !cfg["fixture"].is_object()) cfg["fixture"] = json::object();
    if (given(1)) cfg.erase("endpoint");
    if (given(2)) cfg["fixture"]["bugs"] = f.bugs;
    if (given(3)) cfg["fixture"]["random_ids"] = true;
    if (given(4)) cfg["fixture"]["id_seed"] = f.id_seed;
  }
  if (given(5)) {
    for (const auto& h : f.headers) {
      const auto colon = h.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("header must look like 'Name: value': " + h);
      auto value = h.substr(colon + 1);
      value.erase(0, value.find_first_not_of(' '));
      cfg["headers"][h.substr(0, colon)] = value;
    }
  }
  if (given(6)) cfg["insecure"] = true;
  if (given(7)) cfg["reset_path"] = f.reset_path;
}

// ---------------------------------------------------------------------------

void print_lint(const std::vector<LintFinding>& findings, std::ostream& out) {
  for (const auto& f : findings) out << format_lint_line(f) << '\n';
}

bool has_lint_error(const std::vector<LintFinding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const LintFinding& f) { return f.severity == Severity::Error; });
}

/// Entries of `overrides[key]` replace those of `doc[key]` with the same
/// identity, or are appended.
void merge_entries(json& doc, const json& overrides, const std::string& key,
                   const std::function<bool(const json&, const json&)>& same) {
  if (!overrides.contains(key)) return;
  auto& list = doc[key];
  for (auto entry : overrides.at(key)) {
    entry["provenance"] = "user-edited";
    auto it = std::find_if(list.begin(), list.end(), [&](const json& e) { return same(e, entry); });
    if (it != list.end()) {
      *it = entry;
    } else {
      list.push_back(entry);
    }
  }
}

bool same_edge(const json& a, const json& b) {
  return a.value("dependent", "") == b.value("dependent", "") &&
         a.value("prerequisite", "") == b.value("prerequisite", "") &&
         a.value("via_parameter", "") == b.value("via_parameter", "");
}

/// Applies a reviewer's overrides file to an inferred model document.
json merge_overrides(json doc, const json& overrides) {
  if (!overrides.is_object()) throw ModelSchemaError("overrides file root must be an object");
  if (overrides.contains("name_threshold")) doc["name_threshold"] = overrides["name_threshold"];
  merge_entries(doc, overrides, "resources",
                [](const json& a, const json& b) { return a.value("name", "") == b.value("name", ""); });
  merge_entries(doc, overrides, "bindings",
                [](const json& a, const json& b) { return a.value("operation", "") == b.value("operation", ""); });
  merge_entries(doc, overrides, "edges", same_edge);
  if (overrides.contains("remove_edges")) {
    auto& edges = doc["edges"];
    for (const auto& r : overrides["remove_edges"]) {
      edges.erase(std::remove_if(edges.begin(), edges.end(), [&](const json& e) { return same_edge(e, r); }),
                  edges.end());
    }
  }
  return doc;
}

ApiSpecIR spec_for(const json& cfg) {
  if (cfg.contains("spec")) return load_spec_file(cfg["spec"].get<std::string>());
  if (cfg.contains("fixture")) return load_spec(bookshop_spec_yaml(), DocumentFormat::Yaml);
  throw std::invalid_argument("--spec is required unless --fixture is used");
}

std::string format_seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << s << "s";
  return os.str();
}

void print_run_summary(const json& report, std::ostream& out) {
  const auto& c = report["counters"];
  out << "verdict: " << report["verdict"].get<std::string>() << " (" << report["stop_reason"].get<std::string>()
      << ")\n";
  out << "requests: " << c["requests_sent"] << " in " << format_seconds(report.value("elapsed_s", 0.0))
      << ", peak in flight " << c["peak_in_flight"] << '\n';
  out << "findings: " << c["findings"] << " (" << c["errors"] << " errors)\n";
  for (const auto& [kind, n] : c["findings_by_kind"].items()) out << "  " << kind << ": " << n << '\n';
  std::size_t shown = 0;
  for (const auto& f : report.value("findings", json::array())) {
    if (f.value("grade", "") != "error") continue;
    if (shown++ == 10) {
      out << "  ...\n";
      break;
    }
    out << "  event " << f["exchange_ref"] << " " << f["operation"].get<std::string>() << ": "
        << f["kind"].get<std::string>() << " " << f["detail"].get<std::string>() << '\n';
  }
  if (!report.value("note", "").empty()) out << "note: " << report["note"].get<std::string>() << '\n';
  if (!report.value("trace_ref", "").empty()) out << "trace: " << report["trace_ref"].get<std::string>() << '\n';
}

// ---------------------------------------------------------------------------
// Subcommands.

struct Common {
  bool json_out = false;
};

int cmd_lint(const std::string& spec_path, bool strict, double threshold, const Common& c, std::ostream& out) {
  const auto spec = load_spec_file(spec_path);
  const auto findings = lint_spec(spec, threshold);
  if (c.json_out) {
    json list = json::array();
    for (const auto& f : findings) list.push_back(to_json(f));
    out << json{{"spec", spec_path}, {"lint", list}}.dump(2) << '\n';
  } else {
    print_lint(findings, out);
    out << findings.size() << " lint finding(s)\n";
  }
  return strict && has_lint_error(findings) ? kExitFailed : kExitOk;
}

int cmd_model(const std::string& spec_path, const std::string& out_path, const std::string& overrides_path,
              bool strict, double threshold, const Common& c, std::ostream& out) {
  const auto spec = load_spec_file(spec_path);
  auto model = infer_model(spec, threshold);
  if (!overrides_path.empty()) {
    const auto merged = merge_overrides(model_to_json(model), read_document(overrides_path));
    model = model_from_json(merged, spec);
  }
  auto findings = lint_spec(spec, model.name_threshold);
  findings.insert(findings.end(), model.warnings.begin(), model.warnings.end());
  const auto text = serialize_model(model);
  if (out_path.empty() || out_path == "-") {
    if (!c.json_out) out << text;
  } else {
    write_file(out_path, text);
  }
  if (c.json_out) {
    json list = json::array();
    for (const auto& f : findings) list.push_back(to_json(f));
    out << json{{"model", model_to_json(model)}, {"output", out_path}, {"lint", list}}.dump(2) << '\n';
  } else {
    print_lint(findings, out);
    if (!out_path.empty() && out_path != "-") {
      out << "wrote " << out_path << ": " << model.resources.size() << " resources, " << model.edges.size()
          << " edges\n";
    }
  }
  return strict && has_lint_error(findings) ? kExitFailed : kExitOk;
}

int cmd_fuzz(const json& cfg, bool quiet, const Common& c, std::ostream& out, std::ostream& err) {
  const auto spec = spec_for(cfg);
  const auto model = cfg.contains("model") ? load_model(read_file(cfg["model"].get<std::string>()), spec)
                                           : infer_model(spec);
  const auto sampling = build_sampling_spec(
      spec, model, cfg.contains("sampling") ? sampling_config_from_json(cfg["sampling"]) : SamplingConfig{},
      cfg.contains("weights") ? weight_table_from_json(cfg["weights"]) : WeightTable{});

  RunConfig rc;
  rc.mode = run_mode_from_string(cfg.value("mode", "sequential"));
  rc.max_in_flight = rc.mode == RunMode::Sequential ? 1 : cfg.value("max_in_flight", 8);
  if (rc.max_in_flight < 1) throw std::invalid_argument("max_in_flight must be at least 1");
  rc.duration_limit = parse_duration(cfg.value("duration", "60s"));
  rc.stop_on_error = cfg.value("stop_on_error", false);
  rc.master_seed = cfg.value("seed", std::uint64_t{0});
  rc.request_timeout = parse_duration(cfg.value("request_timeout", "30s"));
  if (cfg.contains("max_requests")) rc.max_requests = cfg["max_requests"].get<std::uint64_t>();
  rc.warmup = cfg.value("warmup", kDefaultWarmup);
  if (cfg.contains("policy")) rc.policy = check_policy_from_json(cfg["policy"]);
  if (!quiet) {
    rc.on_progress = [&err](const ProgressEvent& p) {
      err << "[" << format_seconds(p.elapsed_s) << "] " << p.requests << " requests ("
          << static_cast<long long>(p.requests_per_second) << "/s), " << p.findings << " findings, " << p.errors
          << " errors\n";
    };
  }
  InterruptGuard guard;
  rc.stop = &g_stop;

  auto target = make_target(cfg);
  const auto trace_path = cfg.value("trace", std::string("restex-trace.jsonl"));
  const auto report_path = cfg.value("report", std::string("restex-report.json"));
  json settings = {{"mode", to_string(rc.mode)},
                   {"max_in_flight", rc.max_in_flight},
                   {"seed", rc.master_seed},
                   {"target", target.description},
                   {"config", cfg}};
  settings["config"].erase("headers");
  FileTraceSink sink(trace_path, make_trace_header(spec, model, settings));
  const auto result = run(rc, spec, model, sampling, *target.transport, sink);

  auto report = to_json(result);
  report["target"] = target.description;
  report["seed"] = rc.master_seed;
  report["mode"] = to_string(rc.mode);
  report["max_in_flight"] = rc.max_in_flight;
  write_file(report_path, report.dump(2) + "\n");
  if (c.json_out) {
    out << report.dump(2) << '\n';
  } else {
    print_run_summary(report, out);
    out << "report: " << report_path << '\n';
  }
  return result.verdict == Verdict::Passed ? kExitOk : kExitFailed;
}

struct MinimizeArgs {
  std::string trace;
  std::uint64_t event = 0;
  std::string output = "restex-script.json";
  int budget = 500;
  int replays = 20;
  std::string timeout = "30s";
};

int cmd_minimize(const MinimizeArgs& a, const json& target_cfg, const Common& c, std::ostream& out,
                 std::ostream& err) {
  const auto trace = read_trace(a.trace);
  const auto spec = load_spec(trace.header.at("spec"));
  const auto model = model_from_json(trace.header.at("model"), spec);
  const auto* failing = trace.find(a.event);
  if (!failing) throw std::invalid_argument("event " + std::to_string(a.event) + " is not in " + a.trace);
  if (failing->findings.empty()) throw std::invalid_argument("event " + std::to_string(a.event) + " has no finding");
  auto pick = std::find_if(failing->findings.begin(), failing->findings.end(),
                           [](const Finding& f) { return f.grade == Grade::Error; });
  if (pick == failing->findings.end()) pick = failing->findings.begin();
  const ExpectedFailure expected{pick->kind, pick->operation, pick->detail};
  const auto& run_settings = trace.header.value("run", json::object());
  const auto mode = run_mode_from_string(run_settings.value("mode", "sequential"));
  const int max_in_flight = run_settings.value("max_in_flight", 1);

  auto target = make_target(target_cfg);
  target.transport->probe();
  ReplayOptions ro;
  ro.timeout = parse_duration(a.timeout);
  ro.concurrent_replays = a.replays;
  ro.reset = target.reset;
  auto oracle = make_replay_oracle(spec, model, *target.transport, expected, mode, max_in_flight, ro);
  MinimizeOptions mo;
  mo.budget = a.budget;

  MinimizeResult result;
  try {
    result = minimize(trace.events, a.event, model, oracle, mo);
  } catch (const NotReproducible& e) {
    err << "not reproducible: " << e.what() << '\n';
    if (c.json_out) out << json{{"outcome", "not-reproducible"}, {"detail", e.what()}}.dump(2) << '\n';
    return kExitNotReproducible;
  }
  auto script = bind_symbols(result.events, model);
  script.spec_document = trace.header.at("spec");
  script.expected_failure = expected;
  script.mode = mode;
  script.max_in_flight = max_in_flight;
  write_script(script, a.output);

  json summary = {{"outcome", "minimized"},
                  {"script", a.output},
                  {"events_before", result.before},
                  {"events_after", result.after},
                  {"oracle_calls", result.oracle_calls},
                  {"proven_minimal", result.proven_minimal},
                  {"bindings", script.bindings.size()},
                  {"expected_failure", {{"kind", to_string(expected.kind)}, {"operation", expected.operation}}}};
  if (c.json_out) {
    out << summary.dump(2) << '\n';
  } else {
    out << "minimized " << result.before << " -> " << result.after << " events with " << result.oracle_calls
        << " replays" << (result.proven_minimal ? "" : " (budget exhausted, not proven minimal)") << '\n';
    out << "expected: " << to_string(expected.kind) << " on " << expected.operation << '\n';
    out << "wrote " << a.output << '\n';
  }
  return kExitOk;
}

int cmd_replay(const std::string& script_path, int replays, const std::string& timeout, const json& target_cfg,
               const Common& c, std::ostream& out, std::ostream& err) {
  ReplayResult r;
  try {
    const auto script = read_script(script_path);
    auto target = make_target(target_cfg);
    ReplayOptions ro;
    ro.timeout = parse_duration(timeout);
    ro.concurrent_replays = replays;
    ro.reset = target.reset;
    r = replay(script, *target.transport, ro);
  } catch (const std::exception& e) {
    r.outcome = ReplayOutcome::Error;
    r.detail = e.what();
  }
  if (c.json_out) {
    out << json{{"outcome", to_string(r.outcome)},
                {"attempts", r.attempts},
                {"failures", r.failures},
                {"detail", r.detail}}
               .dump(2)
        << '\n';
  } else {
    out << to_string(r.outcome);
    if (r.attempts > 1) out << " (" << r.failures << "/" << r.attempts << " attempts failed)";
    out << '\n';
    if (!r.detail.empty()) (r.outcome == ReplayOutcome::Error ? err : out) << r.detail << '\n';
  }
  return exit_code(r.outcome);
}

json summarize_trace(const Trace& t) {
  std::map<std::string, std::uint64_t> per_operation;
  std::map<std::string, std::size_t> by_kind;
  json errors = json::array();
  std::size_t findings = 0, error_count = 0;
  for (const auto& e : t.events) {
    ++per_operation[e.plan.binding.operation];
    for (const auto& f : e.findings) {
      ++findings;
      ++by_kind[std::string(to_string(f.kind))];
      if (f.grade == Grade::Error) {
        ++error_count;
        errors.push_back(to_json(f));
      }
    }
  }
  return {{"verdict", error_count > 0 ? "failed" : "passed"},
          {"stop_reason", "n/a"},
          {"counters",
           {{"requests_sent", t.events.size()},
            {"per_operation", per_operation},
            {"findings", findings},
            {"errors", error_count},
            {"findings_by_kind", by_kind},
            {"peak_in_flight", t.header.value("run", json::object()).value("max_in_flight", 1)}}},
          {"findings", errors},
          {"run", t.header.value("run", json::object())}};
}

int cmd_report(const std::string& path, const Common& c, std::ostream& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string first;
  std::getline(in, first);
  json report;
  bool from_trace = false;
  try {
    from_trace = json::parse(first).contains("trace_version");
  } catch (const json::parse_error&) {
  }
  if (from_trace) {
    report = summarize_trace(read_trace(path));
  } else {
    report = json::parse(read_file(path));
    if (!report.contains("verdict") || !report.contains("counters")) {
      throw std::invalid_argument(path + " is neither a run report nor a trace");
    }
  }
  if (c.json_out) {
    out << report.dump(2) << '\n';
  } else {
    print_run_summary(report, out);
    out << "per operation:\n";
    for (const auto& [op, n] : report["counters"]["per_operation"].items()) out << "  " << op << ": " << n << '\n';
  }
  return report["verdict"] == "passed" ? kExitOk : kExitFailed;
}

}  // namespace

std::chrono::milliseconds parse_duration(std::string_view text) {
  double value = 0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || value < 0) throw std::invalid_argument("bad duration: " + std::string(text));
  const std::string_view unit(p, static_cast<std::size_t>(end - p));
  double ms = 0;
  if (unit.empty() || unit == "s") {
    ms = value * 1000;
  } else if (unit == "ms") {
    ms = value;
  } else if (unit == "m") {
    ms = value * 60000;
  } else if (unit == "h") {
    ms = value * 3600000;
  } else {
    throw std::invalid_argument("bad duration unit: " + std::string(text));
  }
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms + 0.5));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stateful black-box testing of REST APIs from their OpenAPI description", "restex"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("--json", common.json_out, "Machine-readable output");

  // lint
  auto* lint = app.add_subcommand("lint", "Report specification pitfalls");
  std::string lint_spec_path;
  bool lint_strict = false;
  double lint_threshold = kDefaultNameThreshold;
  lint->add_option("spec", lint_spec_path, "OpenAPI document")->required();
  lint->add_flag("--strict", lint_strict, "Exit 1 on error-grade findings");
  lint->add_option("--name-threshold", lint_threshold, "Name-similarity threshold");
  lint->add_flag("--json", common.json_out, "Machine-readable output");

  // model
  auto* model = app.add_subcommand("model", "Infer the semantic model and lint the specification");
  std::string model_spec, model_out, model_overrides;
  bool model_strict = false;
  double model_threshold = kDefaultNameThreshold;
  model->add_option("spec", model_spec, "OpenAPI document")->required();
  model->add_option("-o,--output", model_out, "Model file to write ('-' for stdout)");
  model->add_option("--overrides", model_overrides, "Reviewer overrides (JSON or YAML)");
  model->add_flag("--strict", model_strict, "Exit 1 on error-grade lint findings");
  model->add_option("--name-threshold", model_threshold, "Name-similarity threshold");
  model->add_flag("--json", common.json_out, "Machine-readable output");

  // fuzz
  auto* fuzz = app.add_subcommand("fuzz", "Generate and check random request sequences");
  std::string config_path, spec_path, model_path, mode, duration, timeout, trace_path, report_path;
  std::uint64_t seed = 0, max_requests = 0;
  int max_in_flight = 8, warmup = kDefaultWarmup;
  bool stop_on_error = false, quiet = false;
  TargetFlags fuzz_target;
  fuzz->add_option("--config", config_path, "Run configuration file (JSON)");
  auto* o_spec = fuzz->add_option("--spec", spec_path, "OpenAPI document");
  auto* o_model = fuzz->add_option("--model", model_path, "Reviewed model file");
  auto* o_mode = fuzz->add_option("--mode", mode, "sequential or concurrent");
  auto* o_mif = fuzz->add_option("--max-in-flight", max_in_flight, "Concurrent request bound");
  auto* o_duration = fuzz->add_option("--duration", duration, "Run length, e.g. 60s or 5m");
  auto* o_requests = fuzz->add_option("--max-requests", max_requests, "Stop after this many requests");
  auto* o_seed = fuzz->add_option("--seed", seed, "Master seed");
  auto* o_stop = fuzz->add_flag("--stop-on-error", stop_on_error, "Stop at the first error-grade finding");
  auto* o_timeout = fuzz->add_option("--timeout", timeout, "Per-request timeout");
  auto* o_warmup = fuzz->add_option("--warmup", warmup, "Leading create requests");
  auto* o_trace = fuzz->add_option("--trace", trace_path, "Trace file to write");
  auto* o_report = fuzz->add_option("--report", report_path, "Report file to write");
  fuzz->add_flag("-q,--quiet", quiet, "No progress lines");
  fuzz->add_flag("--json", common.json_out, "Machine-readable output");
  add_target_flags(fuzz, fuzz_target);

  // minimize
  auto* mini = app.add_subcommand("minimize", "Reduce a failing trace to a replayable script");
  MinimizeArgs margs;
  TargetFlags mini_target;
  mini->add_option("trace", margs.trace, "Trace file")->required();
  mini->add_option("--event", margs.event, "Failing event id")->required();
  mini->add_option("-o,--output", margs.output, "Script file to write");
  mini->add_option("--budget", margs.budget, "Maximum replays");
  mini->add_option("--replays", margs.replays, "Attempts per candidate for concurrent traces");
  mini->add_option("--timeout", margs.timeout, "Per-request timeout");
  mini->add_flag("--json", common.json_out, "Machine-readable output");
  add_target_flags(mini, mini_target);

  // replay
  auto* rep = app.add_subcommand("replay", "Replay a script: exit 0 reproduced, 1 not reproduced, 2 error");
  std::string script_path, replay_timeout = "30s";
  int replays = 20;
  TargetFlags rep_target;
  rep->add_option("script", script_path, "Script file")->required();
  rep->add_option("--replays", replays, "Attempts for concurrent scripts");
  rep->add_option("--timeout", replay_timeout, "Per-request timeout");
  rep->add_flag("--json", common.json_out, "Machine-readable output");
  add_target_flags(rep, rep_target);

  // report
  auto* report = app.add_subcommand("report", "Summarize a run report or a trace");
  std::string report_input;
  report->add_option("input", report_input, "Report JSON or trace file")->required();
  report->add_flag("--json", common.json_out, "Machine-readable output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*lint) return cmd_lint(lint_spec_path, lint_strict, lint_threshold, common, out);
    if (*model) return cmd_model(model_spec, model_out, model_overrides, model_strict, model_threshold, common, out);
    if (*fuzz) {
      json cfg = config_path.empty() ? json::object() : read_document(config_path);
      if (!cfg.is_object()) throw std::invalid_argument("config file root must be an object");
      if (o_spec->count()) cfg["spec"] = spec_path;
      if (o_model->count()) cfg["model"] = model_path;
      if (o_mode->count()) cfg["mode"] = mode;
      if (o_mif->count()) cfg["max_in_flight"] = max_in_flight;
      if (o_duration->count()) cfg["duration"] = duration;
      if (o_requests->count()) cfg["max_requests"] = max_requests;
      if (o_seed->count()) cfg["seed"] = seed;
      if (o_stop->count()) cfg["stop_on_error"] = true;
      if (o_timeout->count()) cfg["request_timeout"] = timeout;
      if (o_warmup->count()) cfg["warmup"] = warmup;
      if (o_trace->count()) cfg["trace"] = trace_path;
      if (o_report->count()) cfg["report"] = report_path;
      apply_target_flags(fuzz_target, cfg);
      return cmd_fuzz(cfg, quiet || common.json_out, common, out, err);
    }
    if (*mini) {
      json cfg = json::object();
      apply_target_flags(mini_target, cfg);
      return cmd_minimize(margs, cfg, common, out, err);
    }
    if (*rep) {
      json cfg = json::object();
      apply_target_flags(rep_target, cfg);
      return cmd_replay(script_path, replays, replay_timeout, cfg, common, out, err);
    }
    if (*report) return cmd_report(report_input, common, out);
  } catch (const EndpointUnreachable& e) {
    err << "endpoint unreachable: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace restex
