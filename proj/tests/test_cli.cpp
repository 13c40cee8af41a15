#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "restex/cli.hpp"
#include "restex/errors.hpp"
#include "support.hpp"

using namespace restex;
using namespace restex::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

/// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  Scratch() {
    static int n = 0;
    dir = fs::temp_directory_path() / ("restex_cli_" + std::to_string(::getpid()) + "_" + std::to_string(++n));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

json load(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string fixture_spec() { return std::string(RESTEX_FIXTURE_DIR) + "/bookshop.yaml"; }

}  // namespace

TEST_CASE("durations") {
  using std::chrono::milliseconds;
  CHECK(parse_duration("250ms") == milliseconds(250));
  CHECK(parse_duration("30s") == milliseconds(30000));
  CHECK(parse_duration("5m") == milliseconds(300000));
  CHECK(parse_duration("1h") == milliseconds(3600000));
  CHECK(parse_duration("2") == milliseconds(2000));
  CHECK(parse_duration("1.5s") == milliseconds(1500));
  CHECK(parse_duration("0s") == milliseconds(0));
  for (const char* bad : {"", "5x", "-1s", "s", "10 s"}) CHECK_THROWS_AS(parse_duration(bad), std::invalid_argument);
}

TEST_CASE("help and usage errors") {
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({}).code == kExitError);
  CHECK(cli({"explode"}).code == kExitError);
  CHECK(cli({"fuzz", "--no-such-flag"}).code == kExitError);
}

TEST_CASE("model writes the golden model file") {
  Scratch s;
  const auto r = cli({"model", fixture_spec(), "-o", s("model.json")});
  CHECK(r.code == kExitOk);
  std::ifstream a(s("model.json")), b(std::string(RESTEX_FIXTURE_DIR) + "/bookshop.model.json");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  const auto m = load(s("model.json"));
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& e : m["edges"]) edges.insert({e["dependent"].get<std::string>(), e["prerequisite"].get<std::string>()});
  CHECK(edges == std::set<std::pair<std::string, std::string>>{
                     {"book", "author"}, {"order", "customer"}, {"order", "book"}});

  const auto j = cli({"model", fixture_spec(), "-o", s("m2.json"), "--json"});
  CHECK(j.code == kExitOk);
  CHECK(json::parse(j.out)["model"]["edges"].size() == 3);
}

TEST_CASE("model overrides are merged as user edits") {
  Scratch s;
  write(s("overrides.yaml"), R"(
edges:
  - {dependent: order, prerequisite: author, via_parameter: customerId, confidence: 0.5}
bindings:
  - {operation: "GET /authors", resource: author, crud_kind: other}
remove_edges:
  - {dependent: book, prerequisite: author, via_parameter: authorId}
)");
  const auto r = cli({"model", fixture_spec(), "-o", s("model.json"), "--overrides", s("overrides.yaml")});
  REQUIRE(r.code == kExitOk);
  const auto m = load(s("model.json"));
  bool added = false, removed = true;
  for (const auto& e : m["edges"]) {
    if (e["dependent"] == "order" && e["prerequisite"] == "author") {
      added = true;
      CHECK(e["provenance"] == "user-edited");
    }
    if (e["dependent"] == "book" && e["prerequisite"] == "author") removed = false;
  }
  CHECK(added);
  CHECK(removed);
  for (const auto& b : m["bindings"]) {
    if (b["operation"] == "GET /authors") {
      CHECK(b["crud_kind"] == "other");
      CHECK(b["provenance"] == "user-edited");
    }
    if (b["operation"] == "GET /books") CHECK(b["provenance"] == "inferred");
  }

  write(s("dangling.json"), R"({"edges": [{"dependent": "order", "prerequisite": "ghost", "via_parameter": "x"}]})");
  CHECK(cli({"model", fixture_spec(), "-o", s("m3.json"), "--overrides", s("dangling.json")}).code == kExitError);
}

TEST_CASE("strict mode fails on error-grade lint") {
  Scratch s;
  write(s("bad.yaml"), R"(
openapi: 3.0.3
info: {title: t, version: "1"}
paths:
  /things:
    delete:
      responses: {"204": {description: gone}}
)");
  CHECK(cli({"model", s("bad.yaml"), "-o", s("m.json")}).code == kExitOk);
  const auto strict = cli({"model", s("bad.yaml"), "-o", s("m.json"), "--strict"});
  CHECK(strict.code == kExitFailed);
  CHECK(strict.out.find("delete-without-id") != std::string::npos);
  CHECK(cli({"lint", s("bad.yaml"), "--strict"}).code == kExitFailed);
  CHECK(cli({"lint", fixture_spec(), "--strict"}).code == kExitOk);
  CHECK(cli({"model", s("missing.yaml")}).code == kExitError);
  write(s("broken.yaml"), "openapi: [");
  CHECK(cli({"model", s("broken.yaml")}).code == kExitError);
}

TEST_CASE("fuzz against a clean fixture passes") {
  Scratch s;
  const auto r = cli({"fuzz", "--fixture", "--duration", "1s", "--seed", "3", "-q", "--trace", s("t.jsonl"),
                      "--report", s("r.json")});
  CHECK(r.code == kExitOk);
  const auto report = load(s("r.json"));
  CHECK(report["verdict"] == "passed");
  CHECK(report["stop_reason"] == "timeout");
  CHECK(report["counters"]["errors"] == 0);
  CHECK(report["counters"]["requests_sent"].get<int>() > 100);
  const auto trace = read_trace(s("t.jsonl"));
  CHECK(trace.events.size() == report["counters"]["requests_sent"].get<std::size_t>());
  CHECK(cli({"report", s("r.json")}).code == kExitOk);
  CHECK(cli({"report", s("t.jsonl")}).code == kExitOk);
}

TEST_CASE("fuzz stops on a seeded bug and names it") {
  Scratch s;
  const auto r = cli({"fuzz", "--fixture", "--bug", "get-missing-customer-500", "--stop-on-error", "--duration",
                      "60s", "--seed", "1", "--json", "--trace", s("t.jsonl"), "--report", s("r.json")});
  CHECK(r.code == kExitFailed);
  const auto report = json::parse(r.out);
  CHECK(report["verdict"] == "failed");
  CHECK(report["stop_reason"] == "error-detected");
  CHECK(report["counters"]["findings_by_kind"].contains("server-error-5xx"));
  CHECK(load(s("r.json")) == report);
  const auto rep = cli({"report", s("t.jsonl"), "--json"});
  CHECK(rep.code == kExitFailed);
  CHECK(json::parse(rep.out)["counters"]["errors"] == 1);
}

TEST_CASE("concurrent fuzzing against a server overlaps requests") {
  Scratch s;
  Bookshop shop;
  HttpServer server(shop.handler());
  const auto r = cli({"fuzz", "--endpoint", server.base_url(), "--spec", fixture_spec(), "--mode", "concurrent",
                      "--max-in-flight", "8", "--max-requests", "400", "--seed", "2", "-q", "--trace", s("t.jsonl"),
                      "--report", s("r.json")});
  CHECK(r.code == kExitOk);
  const auto report = load(s("r.json"));
  CHECK(report["counters"]["peak_in_flight"].get<int>() > 1);
  CHECK(report["counters"]["peak_in_flight"].get<int>() <= 8);
  CHECK(report["counters"]["requests_sent"] == 400);
}

TEST_CASE("fuzz reports an unreachable endpoint") {
  Scratch s;
  const auto r = cli({"fuzz", "--endpoint", "http://127.0.0.1:1", "--spec", fixture_spec(), "--duration", "1s",
                      "--trace", s("t.jsonl"), "--report", s("r.json")});
  CHECK(r.code == kExitError);
  CHECK(r.err.find("unreachable") != std::string::npos);
  CHECK(cli({"fuzz", "--duration", "1s", "--trace", s("t.jsonl")}).code == kExitError);
  CHECK(cli({"fuzz", "--fixture", "--bug", "nonsense", "--trace", s("t.jsonl")}).code == kExitError);
}

TEST_CASE("config files are overridden by flags") {
  Scratch s;
  write(s("run.json"), json{{"fixture", {{"bugs", json::array()}}},
                            {"seed", 5},
                            {"max_requests", 30},
                            {"duration", "60s"},
                            {"weights", {{"per_method", {{"DELETE", 0}}}}},
                            {"trace", s("t.jsonl")},
                            {"report", s("r.json")}}
                           .dump());
  CHECK(cli({"fuzz", "--config", s("run.json"), "-q"}).code == kExitOk);
  auto report = load(s("r.json"));
  CHECK(report["seed"] == 5);
  CHECK(report["counters"]["requests_sent"] == 30);
  for (const auto& [op, _] : report["counters"]["per_operation"].items()) CHECK(op.rfind("DELETE", 0) != 0);

  CHECK(cli({"fuzz", "--config", s("run.json"), "--max-requests", "10", "--seed", "6", "-q"}).code == kExitOk);
  report = load(s("r.json"));
  CHECK(report["seed"] == 6);
  CHECK(report["counters"]["requests_sent"] == 10);
}

TEST_CASE("the auth token is passed through as a bearer header") {
  Scratch s;
  Bookshop shop;
  std::mutex mu;
  std::set<std::string> seen;
  auto inner = shop.handler();
  HttpServer server([&](const HttpRequest& r) {
    {
      std::lock_guard lock(mu);
      for (const auto& [k, v] : r.headers)
        if (k == "Authorization") seen.insert(v);
    }
    return inner(r);
  });
  ::setenv(kAuthTokenEnv, "sekrit", 1);
  const auto r = cli({"fuzz", "--endpoint", server.base_url(), "--spec", fixture_spec(), "--max-requests", "20",
                      "-q", "--trace", s("t.jsonl"), "--report", s("r.json")});
  ::unsetenv(kAuthTokenEnv);
  CHECK(r.code == kExitOk);
  CHECK(seen == std::set<std::string>{"Bearer sekrit"});
  // The token is not written into the trace.
  std::ifstream in(s("t.jsonl"));
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("sekrit") == std::string::npos);
}

TEST_CASE("minimize then replay") {
  Scratch s;
  REQUIRE(cli({"fuzz", "--fixture", "--bug", "delete-customer-500", "--stop-on-error", "--seed", "1", "-q",
               "--trace", s("t.jsonl"), "--report", s("r.json")})
              .code == kExitFailed);
  const auto report = load(s("r.json"));
  const auto event = report["findings"][0]["exchange_ref"].get<std::uint64_t>();
  const auto m = cli({"minimize", s("t.jsonl"), "--event", std::to_string(event), "--fixture", "--bug",
                      "delete-customer-500", "-o", s("script.json"), "--json"});
  REQUIRE(m.code == kExitOk);
  const auto stats = json::parse(m.out);
  CHECK(stats["events_after"] == 2);
  CHECK(stats["events_before"] == event);
  CHECK(stats["proven_minimal"] == true);

  CHECK(cli({"replay", s("script.json"), "--fixture", "--bug", "delete-customer-500"}).code == kExitOk);
  CHECK(cli({"replay", s("script.json"), "--fixture", "--bug", "delete-customer-500", "--random-ids", "--id-seed",
             "4"})
            .code == kExitOk);
  CHECK(cli({"replay", s("script.json"), "--fixture"}).code == kExitFailed);
  write(s("broken.json"), "{");
  CHECK(cli({"replay", s("broken.json"), "--fixture"}).code == kExitError);
  CHECK(cli({"replay", s("nothing.json"), "--fixture"}).code == kExitError);

  const auto nr = cli({"minimize", s("t.jsonl"), "--event", std::to_string(event), "--fixture", "-o", s("x.json")});
  CHECK(nr.code == kExitNotReproducible);
  CHECK(nr.err.find("not reproducible") != std::string::npos);
  CHECK(cli({"minimize", s("t.jsonl"), "--event", "99999", "--fixture"}).code == kExitError);
}

TEST_CASE("minimizing an already minimal trace gives the same script") {
  Scratch s;
  Bookshop shop(BookshopOptions{{Bug::GetMissingCustomer500}});
  InProcessTransport t(shop.handler());
  const auto events = failing_trace(t, Bug::GetMissingCustomer500, 0);
  {
    FileTraceSink sink(s("t.jsonl"), make_trace_header(bookshop_ir(), bookshop_model()));
    for (const auto& e : events) sink.record(e);
  }
  const std::vector<std::string> base{"minimize", s("t.jsonl"), "--event", "1", "--fixture", "--bug",
                                      "get-missing-customer-500"};
  auto a = base, b = base;
  a.insert(a.end(), {"-o", s("a.json")});
  b.insert(b.end(), {"-o", s("b.json")});
  REQUIRE(cli(a).code == kExitOk);
  REQUIRE(cli(b).code == kExitOk);
  CHECK(load(s("a.json")) == load(s("b.json")));
  CHECK(load(s("a.json"))["steps"].size() == 1);
}

TEST_CASE("replay against a live server with a reset route") {
  Scratch s;
  Bookshop shop(BookshopOptions{{Bug::DeleteCustomer500}});
  HttpServer server(shop.handler());
  InProcessTransport t(shop.handler());
  auto script = bind_symbols(failing_trace(t, Bug::DeleteCustomer500, 20), bookshop_model());
  script.spec_document = canonical_document(bookshop_ir());
  write_script(script, s("script.json"));
  const std::vector<std::string> base{"replay", s("script.json"), "--endpoint", server.base_url(), "--reset-path",
                                      "/_admin/reset"};
  CHECK(cli(base).code == kExitOk);
  shop.set_bug(Bug::DeleteCustomer500, false);
  const auto r = cli({"replay", s("script.json"), "--endpoint", server.base_url(), "--json"});
  CHECK(r.code == kExitFailed);
  CHECK(json::parse(r.out)["outcome"] == "not-reproduced");
  CHECK(cli({"replay", s("script.json"), "--endpoint", "http://127.0.0.1:1"}).code == kExitError);
}
