#include <doctest.h>

#include <algorithm>

#include "restex/checker.hpp"
#include "restex/rng.hpp"

using namespace restex;

namespace {

const ApiSpecIR& bookshop() {
  static const ApiSpecIR ir = load_spec_file(std::string(RESTEX_FIXTURE_DIR) + "/bookshop.yaml");
  return ir;
}

const OperationDef& op(const std::string& key) {
  const auto* o = bookshop().find_operation(key);
  REQUIRE(o);
  return *o;
}

HttpExchangeResult response(int status, const json& body = nullptr, const std::string& type = "application/json") {
  std::map<std::string, std::string> headers;
  std::string text;
  if (!body.is_null()) {
    headers["Content-Type"] = type;
    text = body.is_string() ? body.get<std::string>() : body.dump();
  }
  return make_result(status, headers, text, 1.0);
}

json author() {
  return {{"authorId", "a1"}, {"name", "Ann"}, {"metadata", {{"creationTimestamp", "2024-01-01T00:00:00Z"}}}};
}

StatusPrediction predict(std::vector<std::string> expected, PredictionBasis basis = PredictionBasis::ExactState) {
  return {std::move(expected), basis, ""};
}

ApiSpecIR declared_503_spec() {
  return load_spec(R"(
openapi: 3.0.3
info: {title: t, version: "1"}
paths:
  /jobs:
    get:
      responses:
        "200": {description: ok}
        "503": {description: busy}
)",
                   DocumentFormat::Yaml);
}

}  // namespace

TEST_CASE("status check") {
  const auto& get = op("GET /customers/{customerId}");
  auto f = check_status(response(500, {{"code", 500}, {"message", "x"}}), get);
  REQUIRE(f);
  CHECK(f->kind == FindingKind::ServerError5xx);
  CHECK(f->grade == Grade::Error);
  CHECK(!check_status(response(200, author()), get));
  CHECK(!check_status(response(404), get));

  auto undefined = check_status(response(418), get);
  REQUIRE(undefined);
  CHECK(undefined->kind == FindingKind::UndefinedStatus);
  CHECK(undefined->grade == Grade::Error);

  auto spec = declared_503_spec();
  const auto& jobs = *spec.find_operation("GET /jobs");
  CheckPolicy allow;
  allow.allow_declared_5xx = true;
  CHECK(!check_status(response(503), jobs, allow));
  CHECK(check_status(response(503), jobs));
  CHECK(check_status(response(500), jobs, allow)->kind == FindingKind::ServerError5xx);
}

TEST_CASE("syntactic check") {
  const auto& get = op("GET /authors/{authorId}");
  CHECK(check_syntactic(response(200, author()), get).empty());

  auto null_ts = author();
  null_ts["metadata"]["creationTimestamp"] = nullptr;
  auto f = check_syntactic(response(200, null_ts), get);
  REQUIRE(f.size() == 1);
  CHECK(f[0].kind == FindingKind::SchemaViolation);
  CHECK(f[0].grade == Grade::Error);
  CHECK(f[0].detail.rfind("$.metadata.creationTimestamp: null", 0) == 0);

  auto nameless = author();
  nameless.erase("name");
  f = check_syntactic(response(200, nameless), get);
  REQUIRE(f.size() == 1);
  CHECK(f[0].detail.rfind("$.name: required", 0) == 0);

  f = check_syntactic(response(200, "{not json"), get);
  REQUIRE(f.size() == 1);
  CHECK(f[0].detail.find("malformed") != std::string::npos);

  // 204 declares no body.
  CHECK(check_syntactic(response(204), op("DELETE /authors/{authorId}")).empty());
}

TEST_CASE("semantic check") {
  auto f = check_semantic(response(200, author()), predict({"404", "410"}));
  REQUIRE(f);
  CHECK(f->kind == FindingKind::SemanticMismatch);
  CHECK(f->grade == Grade::Error);
  CHECK(f->detail.find("404") != std::string::npos);
  CHECK(f->detail.find("exact-state") != std::string::npos);

  CHECK(!check_semantic(response(200), predict({"2XX"})));
  auto stale = check_semantic(response(404), predict({"2XX"}, PredictionBasis::StalePossible));
  REQUIRE(stale);
  CHECK(stale->grade == Grade::Warning);

  auto invalid = check_semantic(response(204), predict({"4XX"}));
  REQUIRE(invalid);
  CHECK(invalid->grade == Grade::Error);
}

TEST_CASE("exchange check") {
  const auto& get = op("GET /authors/{authorId}");
  auto none = check_exchange(response(200, author()), get, predict({"2XX"}), {}, 7);
  CHECK(none.empty());

  auto timeout = check_exchange(make_error(TransportError::Timeout, "slow", 30000), get, predict({"2XX"}), {}, 8);
  REQUIRE(timeout.size() == 1);
  CHECK(timeout[0].kind == FindingKind::NoResponse);
  CHECK(timeout[0].grade == Grade::Warning);
  CHECK(timeout[0].exchange_ref == 8);

  auto text = check_exchange(response(200, "hello", "text/plain"), get, predict({"2XX"}));
  REQUIRE(text.size() == 1);
  CHECK(text[0].kind == FindingKind::UndeclaredContentType);
  CHECK(text[0].grade == Grade::Info);

  // A 5XX is reported once, not again as a semantic mismatch.
  auto err = check_exchange(response(500, {{"code", 500}, {"message", "x"}}), get, predict({"2XX"}));
  REQUIRE(err.size() == 1);
  CHECK(err[0].kind == FindingKind::ServerError5xx);
  CHECK(has_error(err));
}

TEST_CASE("finding JSON round trip") {
  Finding f{Grade::Warning, FindingKind::SemanticMismatch, 12, "GET /books/{bookId}", "expected 2XX"};
  CHECK(finding_from_json(to_json(f)) == f);
  CheckPolicy p;
  p.allow_declared_5xx = true;
  p.no_response_grade = Grade::Error;
  CHECK(check_policy_from_json(to_json(p)) == p);
}

TEST_CASE("checks are pure, commute and grade by kind") {
  Rng rng(99);
  const int statuses[] = {200, 201, 204, 400, 404, 410, 418, 500, 503};
  std::vector<json> bodies = {author(), json::object(), json::array(), nullptr, "oops", 5};
  auto null_ts = author();
  null_ts["metadata"]["creationTimestamp"] = nullptr;
  bodies.push_back(null_ts);
  const std::vector<std::vector<std::string>> expectations = {{"2XX"}, {"404", "410"}, {"4XX"}, {"2XX", "404", "410"}};
  const auto& ops = bookshop().operations;
  for (int i = 0; i < 2000; ++i) {
    const auto& o = rng.pick(ops);
    const int status = statuses[rng.below(std::size(statuses))];
    const auto& body = rng.pick(bodies);
    const auto basis = rng.chance(0.5) ? PredictionBasis::ExactState : PredictionBasis::StalePossible;
    const auto pred = predict(rng.pick(expectations), basis);
    auto res = response(status, body);

    auto once = check_exchange(res, o, pred);
    CHECK(once == check_exchange(res, o, pred));

    auto a = check_syntactic(res, o);
    if (auto s = check_status(res, o)) a.push_back(*s);
    std::vector<Finding> b;
    if (auto s = check_status(res, o)) b.push_back(*s);
    auto syn = check_syntactic(res, o);
    b.insert(b.end(), syn.begin(), syn.end());
    auto key = [](const Finding& f) { return to_json(f).dump(); };
    auto by_key = [&](const Finding& x, const Finding& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), by_key);
    std::sort(b.begin(), b.end(), by_key);
    CHECK(a == b);

    for (const auto& f : once) {
      const bool hard = f.kind == FindingKind::SchemaViolation || f.kind == FindingKind::UndefinedStatus ||
                        f.kind == FindingKind::ServerError5xx ||
                        (f.kind == FindingKind::SemanticMismatch && basis == PredictionBasis::ExactState);
      CHECK((f.grade == Grade::Error) == hard);
    }
  }
}
