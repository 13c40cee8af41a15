#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "restex/errors.hpp"
#include "support.hpp"

using namespace restex;
using namespace restex::testing;

namespace {

const std::map<std::string, std::string> kJson{{"content-type", "application/json"}};

TraceEvent event(std::uint64_t id, RequestPlan plan, int status, const json& body) {
  TraceEvent e;
  e.event_id = id;
  plan.plan_id = id;
  e.plan = std::move(plan);
  e.response = make_result(status, kJson, body.is_null() ? "" : body.dump(), 1);
  e.dispatch_epoch = 2 * id - 1;
  e.completion_epoch = 2 * id;
  return e;
}

PlanParam path_id(const std::string& name, const std::string& value, const std::string& resource) {
  return {name, ParamLocation::Path, value, Component::FromState, resource, ""};
}

PlanParam field(const std::string& name, const json& value, const std::string& resource = "") {
  return {name, ParamLocation::BodyField, value, Component::ValidRandom, resource, ""};
}

json customer(const std::string& id) { return {{"customerId", id}, {"name", "n"}, {"metadata", json::object()}}; }

ReplayOptions resetting(Bookshop& shop) {
  ReplayOptions o;
  o.reset = [&shop] { shop.reset(); };
  return o;
}

}  // namespace

TEST_CASE("a created id read later becomes a symbol") {
  std::vector<TraceEvent> events{
      event(1, make_plan("POST /customers", {field("name", "n")}), 201, customer("c7")),
      event(2, make_plan("GET /customers/{customerId}", {path_id("customerId", "c7", "customer")}), 200,
            customer("c7")),
  };
  const auto s = bind_symbols(events, bookshop_model());
  REQUIRE(s.bindings.size() == 1);
  const auto& b = s.bindings[0];
  CHECK(b.variable == "$customer_id");
  CHECK(b.producer_step == 1);
  CHECK(b.producer_path == "$.customerId");
  REQUIRE(b.consumers.size() == 1);
  CHECK(b.consumers[0] == SymbolConsumer{2, ParamLocation::Path, "customerId"});
  CHECK(s.steps[1].plan.params[0].value == symbol_ref("$customer_id"));
  CHECK(s.steps[0].plan.params[0].value == "n");
  CHECK(!s.expected_failure);
  CHECK(producer_steps(s) == std::vector<std::vector<std::uint64_t>>{{}, {1}});
}

TEST_CASE("no shared literals means no bindings") {
  std::vector<TraceEvent> events{
      event(1, make_plan("POST /customers", {field("name", "n")}), 201, customer("c7")),
      event(2, make_plan("GET /authors", {}), 200, json::array()),
      event(3, make_plan("GET /customers/{customerId}", {path_id("customerId", "c9", "customer")}), 404,
            {{"code", 404}}),
  };
  const auto s = bind_symbols(events, bookshop_model());
  CHECK(s.bindings.empty());
  CHECK(s.steps.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(s.steps[i].plan == events[i].plan);
}

TEST_CASE("the latest producer of a value wins") {
  std::vector<TraceEvent> events{
      event(1, make_plan("POST /customers", {field("name", "a")}), 201, customer("c7")),
      event(2, make_plan("POST /customers", {field("name", "b")}), 201, customer("c7")),
      event(3, make_plan("DELETE /customers/{customerId}", {path_id("customerId", "c7", "customer")}), 204, nullptr),
  };
  const auto s = bind_symbols(events, bookshop_model());
  REQUIRE(s.bindings.size() == 1);
  CHECK(s.bindings[0].producer_step == 2);
}

TEST_CASE("reads and lists bind only values not produced before") {
  std::vector<TraceEvent> events{
      event(1, make_plan("POST /customers", {field("name", "a")}), 201, customer("c1")),
      event(2, make_plan("GET /customers", {}), 200, json::array({customer("c1"), customer("c2")})),
      event(3, make_plan("GET /customers/{customerId}", {path_id("customerId", "c1", "customer")}), 200,
            customer("c1")),
      event(4, make_plan("GET /customers/{customerId}", {path_id("customerId", "c2", "customer")}), 200,
            customer("c2")),
      event(5,
            make_plan("POST /orders", {field("customerId", "c2", "customer"), field("bookIds", {"c1"}, "book")}),
            404, {{"code", 404}}),
  };
  const auto s = bind_symbols(events, bookshop_model());
  REQUIRE(s.bindings.size() == 2);
  CHECK(s.bindings[0].variable == "$customer_id");
  CHECK(s.bindings[0].producer_step == 1);
  CHECK(s.bindings[1].variable == "$customer_id_2");
  CHECK(s.bindings[1].producer_step == 2);
  CHECK(s.bindings[1].producer_path == "$[1].customerId");
  CHECK(s.bindings[0].consumers.size() == 2);
  CHECK((*s.steps[4].plan.body).is_null() == false);
  CHECK(s.steps[4].plan.params[1].value == json::array({symbol_ref("$customer_id")}));
}

TEST_CASE("scripts round-trip through files") {
  Bookshop shop(BookshopOptions{{Bug::DeleteCustomer500}});
  InProcessTransport t(shop.handler());
  auto events = failing_trace(t, Bug::DeleteCustomer500, 30);
  auto s = bind_symbols(events, bookshop_model());
  s.spec_document = canonical_document(bookshop_ir());
  REQUIRE(s.expected_failure);
  CHECK(s.expected_failure->kind == FindingKind::ServerError5xx);
  CHECK(s.expected_failure->operation == "DELETE /customers/{customerId}");
  const auto path = (std::filesystem::temp_directory_path() / "restex_script.json").string();
  write_script(s, path);
  const auto back = read_script(path);
  CHECK(to_json(back) == to_json(s));
  CHECK(back.steps == s.steps);
  CHECK(back.bindings == s.bindings);
  CHECK(back.expected_failure == s.expected_failure);
  std::filesystem::remove(path);

  auto j = to_json(s);
  j["script_version"] = 99;
  CHECK_THROWS_AS(script_from_json(j), ScriptFormatError);
  j = to_json(s);
  j["steps"][0]["step"] = 5;
  CHECK_THROWS_AS(script_from_json(j), ScriptFormatError);
  CHECK_THROWS_AS(script_from_json(json::array()), ScriptFormatError);
}

TEST_CASE("bindings are consumed only after they are produced") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Bookshop shop;
    InProcessTransport t(shop.handler());
    MemoryTraceSink sink;
    RunConfig c;
    c.master_seed = seed;
    c.max_requests = 300;
    run_sequential(c, bookshop_ir(), bookshop_model(), bookshop_sampling(), t, sink);
    const auto s = bind_symbols(sink.events(), bookshop_model());
    CHECK(!s.bindings.empty());
    std::set<std::string> names;
    for (const auto& b : s.bindings) {
      CHECK(names.insert(b.variable).second);
      CHECK(!b.consumers.empty());
      for (const auto& c : b.consumers) CHECK(c.step > b.producer_step);
    }
  }
}

TEST_CASE("replay reproduces with the bug and not without it") {
  Bookshop shop(BookshopOptions{{Bug::DeleteCustomer500}});
  InProcessTransport t(shop.handler());
  auto events = failing_trace(t, Bug::DeleteCustomer500, 40);
  REQUIRE(has_error(events.back().findings));
  auto s = bind_symbols(events, bookshop_model());
  s.spec_document = canonical_document(bookshop_ir());

  const auto hit = replay(s, t, resetting(shop));
  CHECK(hit.outcome == ReplayOutcome::Reproduced);
  CHECK(exit_code(hit.outcome) == 0);

  shop.set_bug(Bug::DeleteCustomer500, false);
  const auto miss = replay(s, t, resetting(shop));
  CHECK(miss.outcome == ReplayOutcome::NotReproduced);
  CHECK(exit_code(miss.outcome) == 1);

  // A fresh instance with random ids still reproduces through the symbols.
  Bookshop other(BookshopOptions{{Bug::DeleteCustomer500}, true, 99});
  InProcessTransport t2(other.handler());
  CHECK(replay(s, t2, resetting(other)).outcome == ReplayOutcome::Reproduced);
}

TEST_CASE("a producer that fails leaves its symbol unresolved") {
  std::vector<TraceEvent> events{
      event(1, make_plan("POST /customers", {field("name", "n")}), 201, customer("c7")),
      event(2, make_plan("DELETE /customers/{customerId}", {path_id("customerId", "c7", "customer")}), 500,
            {{"code", 500}}),
  };
  events[1].findings.push_back({Grade::Error, FindingKind::ServerError5xx, 2, "DELETE /customers/{customerId}", ""});
  auto s = bind_symbols(events, bookshop_model());
  s.spec_document = canonical_document(bookshop_ir());
  InProcessTransport broken([](const HttpRequest&) { return HttpResponse{500, {{"Content-Type", "application/json"}}, "{}"}; });
  CHECK_THROWS_AS(replay_once(s, bookshop_ir(), bookshop_model(), broken, {}), SymbolResolutionFailure);
  const auto r = replay(s, broken);
  CHECK(r.outcome == ReplayOutcome::Error);
  CHECK(exit_code(r.outcome) == 2);
  CHECK(r.detail.find("$customer_id") != std::string::npos);
}

TEST_CASE("replay reports an unreachable endpoint as an error") {
  Bookshop shop(BookshopOptions{{Bug::DeleteCustomer500}});
  InProcessTransport t(shop.handler());
  auto s = bind_symbols(failing_trace(t, Bug::DeleteCustomer500, 10), bookshop_model());
  s.spec_document = canonical_document(bookshop_ir());
  NetworkTransport nowhere("http://127.0.0.1:1");
  CHECK(replay(s, nowhere).outcome == ReplayOutcome::Error);
}

TEST_CASE("concurrent scripts reproduce when any attempt fails") {
  Bookshop shop(BookshopOptions{{Bug::DeleteCustomer500}});
  InProcessTransport t(shop.handler());
  auto s = bind_symbols(failing_trace(t, Bug::DeleteCustomer500, 30), bookshop_model());
  s.spec_document = canonical_document(bookshop_ir());
  s.mode = RunMode::Concurrent;
  s.max_in_flight = 4;
  const auto r = replay(s, t, resetting(shop));
  CHECK(r.outcome == ReplayOutcome::Reproduced);
  CHECK(r.attempts >= 1);
  shop.set_bug(Bug::DeleteCustomer500, false);
  const auto miss = replay(s, t, resetting(shop));
  CHECK(miss.outcome == ReplayOutcome::NotReproduced);
  CHECK(miss.attempts == 20);
}

TEST_CASE("minimizing a delete failure keeps the create and the delete") {
  Bookshop shop(BookshopOptions{{Bug::DeleteCustomer500}});
  InProcessTransport t(shop.handler());
  const auto events = failing_trace(t, Bug::DeleteCustomer500, 49);
  REQUIRE(events.size() == 50);
  for (std::size_t i = 0; i + 1 < events.size(); ++i) REQUIRE(!has_error(events[i].findings));
  const auto s = bind_symbols(events, bookshop_model());
  REQUIRE(s.expected_failure);
  auto oracle = make_replay_oracle(bookshop_ir(), bookshop_model(), t, *s.expected_failure, RunMode::Sequential, 1,
                                   resetting(shop));
  const auto r = minimize(events, 50, bookshop_model(), oracle);
  CHECK(r.before == 50);
  CHECK(r.after == 2);
  CHECK(r.proven_minimal);
  CHECK(r.oracle_calls <= 500);
  REQUIRE(r.events.size() == 2);
  CHECK(r.events[0].plan.binding.operation == "POST /customers");
  CHECK(r.events[1].event_id == 50);
  CHECK(oracle(r.events));
  // Removing either event loses the failure.
  for (std::size_t drop = 0; drop < r.events.size(); ++drop) {
    std::vector<TraceEvent> fewer;
    for (std::size_t i = 0; i < r.events.size(); ++i)
      if (i != drop) fewer.push_back(r.events[i]);
    CHECK(!oracle(fewer));
  }
}

TEST_CASE("minimizing a one-event trace changes nothing") {
  Bookshop shop(BookshopOptions{{Bug::GetMissingCustomer500}});
  InProcessTransport t(shop.handler());
  const auto events = failing_trace(t, Bug::GetMissingCustomer500, 0);
  REQUIRE(events.size() == 1);
  const auto s = bind_symbols(events, bookshop_model());
  auto oracle = make_replay_oracle(bookshop_ir(), bookshop_model(), t, *s.expected_failure, RunMode::Sequential, 1,
                                   resetting(shop));
  const auto r = minimize(events, 1, bookshop_model(), oracle);
  CHECK(r.before == 1);
  CHECK(r.after == 1);
  CHECK(r.proven_minimal);
  CHECK(to_json(r.events[0]) == to_json(events[0]));
}

TEST_CASE("a failure that never reappears is not reproducible") {
  Bookshop shop(BookshopOptions{{Bug::GetMissingCustomer500}});
  InProcessTransport t(shop.handler());
  const auto events = failing_trace(t, Bug::GetMissingCustomer500, 10);
  int calls = 0;
  Oracle never = [&](const std::vector<TraceEvent>&) {
    ++calls;
    return false;
  };
  CHECK_THROWS_AS(minimize(events, events.back().event_id, bookshop_model(), never), NotReproducible);
  CHECK(calls == 3);
  CHECK_THROWS_AS(minimize(events, 999, bookshop_model(), never), std::invalid_argument);
}

TEST_CASE("ddmin against a synthetic oracle") {
  // Failure needs events 3 and 7 together with the last one.
  std::vector<TraceEvent> events;
  for (std::uint64_t i = 1; i <= 40; ++i) events.push_back(event(i, make_plan("GET /authors", {}), 200, json::array()));
  auto needs = [](const std::vector<TraceEvent>& es) {
    bool a = false, b = false, last = false;
    for (const auto& e : es) {
      a |= e.event_id == 3;
      b |= e.event_id == 7;
      last |= e.event_id == 40;
    }
    return a && b && last;
  };
  const auto r = minimize(events, 40, bookshop_model(), needs);
  REQUIRE(r.after == 3);
  CHECK(r.events[0].event_id == 3);
  CHECK(r.events[1].event_id == 7);
  CHECK(r.events[2].event_id == 40);
  CHECK(r.proven_minimal);

  MinimizeOptions tight;
  tight.budget = 5;
  const auto cut = minimize(events, 40, bookshop_model(), needs, tight);
  CHECK(!cut.proven_minimal);
  CHECK(cut.oracle_calls <= 5);
  CHECK(needs(cut.events));
}

TEST_CASE("events after the failing one are ignored") {
  std::vector<TraceEvent> events;
  for (std::uint64_t i = 1; i <= 10; ++i) events.push_back(event(i, make_plan("GET /authors", {}), 200, json::array()));
  std::uint64_t max_seen = 0;
  auto oracle = [&](const std::vector<TraceEvent>& es) {
    for (const auto& e : es) max_seen = std::max(max_seen, e.event_id);
    return true;
  };
  const auto r = minimize(events, 6, bookshop_model(), oracle);
  CHECK(max_seen == 6);
  CHECK(r.before == 6);
  CHECK(r.after == 1);
}

TEST_CASE("run length estimates") {
  CHECK(estimate_run_length(10, 1e-3) == 88);
  CHECK(estimate_run_length(1, 0.5) == 1);
  CHECK(estimate_run_length(1, 1e-9) == 1);
  CHECK_THROWS_AS(estimate_run_length(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_run_length(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_run_length(10, 1), std::invalid_argument);
  // Smallest N satisfying the bound, for a spread of inputs.
  for (std::uint64_t k : {2, 3, 5, 10, 19, 50}) {
    for (double eps : {0.5, 0.1, 1e-2, 1e-4}) {
      const auto n = estimate_run_length(k, eps);
      const double q = 1.0 - 1.0 / static_cast<double>(k);
      CHECK(k * std::pow(q, static_cast<double>(n)) <= eps);
      if (n > 1) CHECK(k * std::pow(q, static_cast<double>(n - 1)) > eps);
    }
  }
}

TEST_CASE("simulated miss probabilities") {
  const auto p = simulate_miss_probability(3, {1, 2, 3, 5, 10}, 200000, 7);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 1.0);
  // Exact: 1 - 3!/27 = 7/9 at three draws.
  CHECK(std::abs(p[2] - 7.0 / 9.0) < 0.005);
  // Inclusion-exclusion at ten draws.
  const double exact10 = 3 * std::pow(2.0 / 3, 10) - 3 * std::pow(1.0 / 3, 10);
  CHECK(std::abs(p[4] - exact10) < 0.003);
  CHECK(simulate_miss_probability(1, {1}, 100, 1)[0] == 0.0);
}

TEST_CASE("requests still in flight when the failure completed are candidates") {
  // Event 3 completes before event 2 although 2 was dispatched first; 4 is
  // dispatched after 3 completed.
  std::vector<TraceEvent> events;
  for (std::uint64_t i = 1; i <= 4; ++i) events.push_back(event(i, make_plan("GET /authors", {}), 200, json::array()));
  events[0].dispatch_epoch = 1, events[0].completion_epoch = 3;
  events[1].dispatch_epoch = 2, events[1].completion_epoch = 8;
  events[2].dispatch_epoch = 4, events[2].completion_epoch = 5;
  events[3].dispatch_epoch = 6, events[3].completion_epoch = 7;
  std::set<std::uint64_t> offered;
  auto needs_2 = [&](const std::vector<TraceEvent>& es) {
    bool two = false;
    for (const auto& e : es) {
      offered.insert(e.event_id);
      two |= e.event_id == 2;
    }
    return two;
  };
  const auto r = minimize(events, 3, bookshop_model(), needs_2);
  CHECK(offered == std::set<std::uint64_t>{1, 2, 3});
  REQUIRE(r.after == 2);
  CHECK(r.events[0].event_id == 2);
  CHECK(r.events[1].event_id == 3);
}
