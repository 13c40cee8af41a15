#include <doctest.h>

#include <thread>

#include "restex/state.hpp"

using namespace restex;

namespace {

const ApiSpecIR& bookshop() {
  static const ApiSpecIR ir = load_spec_file(std::string(RESTEX_FIXTURE_DIR) + "/bookshop.yaml");
  return ir;
}

const SemanticModel& model() {
  static const SemanticModel m = infer_model(bookshop());
  return m;
}

/// Plan with the given operation and parameters; references follow the
/// fixture naming.
RequestPlan plan_for(const std::string& op_key, std::vector<PlanParam> params) {
  RequestPlan plan;
  plan.binding = *model().binding_for(op_key);
  const auto* op = bookshop().find_operation(op_key);
  plan.params = std::move(params);
  render_plan(plan, *op, "");
  return plan;
}

PlanParam path_id(const std::string& name, const std::string& value, const std::string& resource,
                  Component c = Component::FromState) {
  return {name, ParamLocation::Path, value, c, resource, c == Component::InvalidTyped ? "pattern" : ""};
}

HttpExchangeResult response(int status, const json& body = nullptr) {
  std::map<std::string, std::string> headers;
  std::string text;
  if (!body.is_null()) {
    headers["Content-Type"] = "application/json";
    text = body.dump();
  }
  return make_result(status, headers, text, 1.0);
}

RequestPlan create_customer() {
  return plan_for("POST /customers", {{"name", ParamLocation::BodyField, "Ann", Component::ValidRandom, "", ""}});
}

}  // namespace

TEST_CASE("successful create inserts a live instance") {
  StateStore store(model());
  auto d = store.apply_effect(create_customer(), response(201, {{"customerId", "c9"}, {"name", "Ann"}}), 1);
  CHECK(d.changed);
  CHECK(!d.id_extraction_failure);
  auto inst = store.find("customer", "c9");
  REQUIRE(inst);
  CHECK(inst->lifecycle == Lifecycle::Live);
  CHECK(inst->created_by == 1);
  CHECK(store.query_ids("customer", {Lifecycle::Live}) == std::vector<std::string>{"c9"});
}

TEST_CASE("successful delete marks the instance deleted") {
  StateStore store(model());
  store.apply_effect(create_customer(), response(201, {{"customerId", "c9"}}), 1);
  store.apply_effect(plan_for("DELETE /customers/{customerId}", {path_id("customerId", "c9", "customer")}),
                     response(204), 2);
  CHECK(store.find("customer", "c9")->lifecycle == Lifecycle::Deleted);
}

TEST_CASE("failed read leaves the store unchanged") {
  StateStore store(model());
  store.apply_effect(create_customer(), response(201, {{"customerId", "c1"}}), 1);
  const auto before = store.snapshot();
  auto d = store.apply_effect(plan_for("GET /customers/{customerId}", {path_id("customerId", "cX", "customer")}),
                              response(404, {{"code", 404}, {"message", "no"}}), 2);
  CHECK(!d.changed);
  CHECK(store.snapshot() == before);
}

TEST_CASE("query_ids filters by lifecycle in insertion order") {
  StateStore store(model());
  CHECK(store.query_ids("customer", {Lifecycle::Live}).empty());
  for (auto id : {"c1", "c2", "c3"}) store.put({"customer", id, Lifecycle::Live, std::nullopt, 0, false});
  store.put({"customer", "c3", Lifecycle::Deleted, std::nullopt, 0, false});
  CHECK(store.query_ids("customer", {Lifecycle::Live}) == std::vector<std::string>{"c1", "c2"});
  CHECK(store.query_ids("customer", {Lifecycle::Deleted}) == std::vector<std::string>{"c3"});
  CHECK(store.query_ids("customer", {Lifecycle::Live, Lifecycle::Deleted}) ==
        std::vector<std::string>{"c1", "c2", "c3"});
}

TEST_CASE("create without an id field reports an extraction failure") {
  StateStore store(model());
  auto d = store.apply_effect(create_customer(), response(201, {{"name", "Ann"}}), 1);
  CHECK(d.id_extraction_failure);
  CHECK(store.size() == 0);
}

TEST_CASE("id extraction falls back to similar top-level names") {
  StateStore store(model());
  store.apply_effect(create_customer(), response(201, {{"customer_id", "c5"}}), 1);
  CHECK(store.find("customer", "c5"));
  store.apply_effect(create_customer(), response(201, {{"id", "c6"}}), 2);
  CHECK(store.find("customer", "c6"));
}

TEST_CASE("list responses reveal instances without reviving deleted ones") {
  StateStore store(model());
  store.put({"book", "b1", Lifecycle::Deleted, std::nullopt, 0, false});
  auto list = plan_for("GET /books", {});
  store.apply_effect(list, response(200, json::array({{{"bookId", "b1"}}, {{"bookId", "b2"}}})), 3);
  CHECK(store.find("book", "b1")->lifecycle == Lifecycle::Deleted);
  CHECK(store.find("book", "b2")->lifecycle == Lifecycle::Live);
  CHECK(store.find("book", "b2")->created_by == 3);
}

TEST_CASE("sequential predictions") {
  StateStore store(model());
  store.put({"book", "b1", Lifecycle::Live, std::nullopt, 0, false});
  store.put({"book", "b2", Lifecycle::Deleted, std::nullopt, 0, false});
  store.put({"author", "a1", Lifecycle::Live, std::nullopt, 0, false});

  auto get = [&](const char* id) {
    return store.predict_status(plan_for("GET /books/{bookId}", {path_id("bookId", id, "book")}),
                                PredictionMode::Sequential);
  };
  auto live = get("b1");
  CHECK(live.expected == std::vector<std::string>{"2XX"});
  CHECK(live.basis == PredictionBasis::ExactState);
  CHECK(live.admits(200));
  CHECK(!live.admits(404));

  auto deleted = get("b2");
  CHECK(deleted.expected == std::vector<std::string>{"404", "410"});
  CHECK(!deleted.admits(200));
  CHECK(get("zz9").admits(404));
  CHECK(!get("zz9").admits(500));

  auto del_invalid = store.predict_status(
      plan_for("DELETE /books/{bookId}", {path_id("bookId", "9x", "book", Component::InvalidTyped)}),
      PredictionMode::Sequential);
  CHECK(del_invalid.admits(400));
  CHECK(!del_invalid.admits(204));

  auto body = [](const char* author) {
    return std::vector<PlanParam>{
        {"title", ParamLocation::BodyField, "T", Component::ValidRandom, "", ""},
        {"authorId", ParamLocation::BodyField, author, Component::FromState, "author", ""},
        {"format", ParamLocation::BodyField, "paperback", Component::ValidRandom, "", ""},
        {"stock", ParamLocation::BodyField, 3, Component::ValidRandom, "", ""},
    };
  };
  CHECK(store.predict_status(plan_for("POST /books", body("a1")), PredictionMode::Sequential).expected ==
        std::vector<std::string>{"2XX"});
  CHECK(store.predict_status(plan_for("POST /books", body("a7")), PredictionMode::Sequential).expected ==
        std::vector<std::string>{"404", "410"});

  auto list = store.predict_status(plan_for("GET /books", {}), PredictionMode::Sequential);
  CHECK(list.expected == std::vector<std::string>{"2XX"});
}

TEST_CASE("a failed delete makes the target uncertain") {
  StateStore store(model());
  store.put({"customer", "c1", Lifecycle::Live, std::nullopt, 0, false});
  auto del = plan_for("DELETE /customers/{customerId}", {path_id("customerId", "c1", "customer")});
  store.apply_effect(del, response(500, {{"code", 500}, {"message", "boom"}}), 1);
  CHECK(store.find("customer", "c1")->lifecycle == Lifecycle::Live);
  auto p = store.predict_status(plan_for("GET /customers/{customerId}", {path_id("customerId", "c1", "customer")}),
                                PredictionMode::Sequential);
  CHECK(p.basis == PredictionBasis::StalePossible);
  CHECK(p.admits(200));
  CHECK(p.admits(404));
}

TEST_CASE("concurrent widening covers interleavings on shared instances") {
  StateStore store(model());
  store.put({"book", "b1", Lifecycle::Live, std::nullopt, 0, false});
  auto get = plan_for("GET /books/{bookId}", {path_id("bookId", "b1", "book")});
  auto del = plan_for("DELETE /books/{bookId}", {path_id("bookId", "b1", "book")});
  auto other = plan_for("GET /books/{bookId}", {path_id("bookId", "b9", "book")});
  auto base = store.predict_status(get, PredictionMode::Concurrent);
  CHECK(base.basis == PredictionBasis::StalePossible);
  CHECK(!base.admits(404));
  auto widened = widen_prediction(base, get, {&del});
  CHECK(widened.admits(200));
  CHECK(widened.admits(404));
  auto untouched = widen_prediction(base, get, {&other});
  CHECK(!untouched.admits(404));
}

TEST_CASE("replay equivalence and epoch monotonicity") {
  auto run = [](StateStore& store) {
    std::vector<std::uint64_t> epochs;
    store.apply_effect(create_customer(), response(201, {{"customerId", "c1"}}), 1);
    epochs.push_back(store.epoch());
    store.apply_effect(create_customer(), response(201, {{"customerId", "c2"}}), 2);
    epochs.push_back(store.epoch());
    store.apply_effect(plan_for("DELETE /customers/{customerId}", {path_id("customerId", "c1", "customer")}),
                       response(204), 3);
    epochs.push_back(store.epoch());
    return epochs;
  };
  StateStore a(model()), b(model());
  auto ea = run(a);
  run(b);
  CHECK(a.snapshot() == b.snapshot());
  CHECK(ea[0] < ea[1]);
  CHECK(ea[1] < ea[2]);
}

TEST_CASE("lifecycle never returns to live after deletion") {
  StateStore store(model());
  store.apply_effect(create_customer(), response(201, {{"customerId", "c1"}}), 1);
  auto del = plan_for("DELETE /customers/{customerId}", {path_id("customerId", "c1", "customer")});
  store.apply_effect(del, response(204), 2);
  auto get = plan_for("GET /customers/{customerId}", {path_id("customerId", "c1", "customer")});
  store.apply_effect(get, response(200, {{"customerId", "c1"}}), 3);
  store.apply_effect(create_customer(), response(201, {{"customerId", "c1"}}), 4);
  CHECK(store.find("customer", "c1")->lifecycle == Lifecycle::Deleted);
}

TEST_CASE("capacity evicts the oldest deleted instance first") {
  StateStore store(model(), 3);
  store.put({"book", "b1", Lifecycle::Live, std::nullopt, 0, false});
  store.put({"book", "b2", Lifecycle::Deleted, std::nullopt, 0, false});
  store.put({"book", "b3", Lifecycle::Deleted, std::nullopt, 0, false});
  store.put({"book", "b4", Lifecycle::Live, std::nullopt, 0, false});
  CHECK(store.size() == 3);
  CHECK(!store.find("book", "b2"));
  CHECK(store.find("book", "b1"));
  CHECK(!store.evicted_live("book"));
  store.put({"book", "b5", Lifecycle::Live, std::nullopt, 0, false});
  store.put({"book", "b6", Lifecycle::Live, std::nullopt, 0, false});
  CHECK(store.evicted_live("book"));
  // An unseen id can no longer be assumed missing.
  auto p = store.predict_status(plan_for("GET /books/{bookId}", {path_id("bookId", "b1", "book")}),
                                PredictionMode::Sequential);
  CHECK(p.admits(200));
  CHECK(p.admits(404));
}

TEST_CASE("concurrent readers and writers keep the epoch strictly increasing") {
  StateStore store(model());
  std::atomic<bool> stop{false};
  std::thread reader([&] {
    std::uint64_t last = 0;
    while (!stop) {
      auto e = store.epoch();
      CHECK(e >= last);
      last = e;
      store.query_ids("customer", {Lifecycle::Live});
    }
  });
  for (int i = 0; i < 500; ++i) {
    store.apply_effect(create_customer(), response(201, {{"customerId", "c" + std::to_string(i)}}), i + 1);
  }
  stop = true;
  reader.join();
  CHECK(store.epoch() == 500);
  CHECK(store.size() == 500);
}
