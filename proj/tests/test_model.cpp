#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "restex/errors.hpp"
#include "restex/model.hpp"

using namespace restex;

namespace {

const std::string kFixtureDir = RESTEX_FIXTURE_DIR;

const ApiSpecIR& bookshop() {
  static const ApiSpecIR ir = load_spec_file(kFixtureDir + "/bookshop.yaml");
  return ir;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using EdgeTriple = std::tuple<std::string, std::string, std::string>;

std::set<EdgeTriple> edge_set(const SemanticModel& m) {
  std::set<EdgeTriple> out;
  for (const auto& e : m.edges) out.insert({e.dependent, e.prerequisite, e.via_parameter});
  return out;
}

ApiSpecIR spec_from(const char* text) { return load_spec(text, DocumentFormat::Yaml); }

}  // namespace

TEST_CASE("classification follows method and path shape") {
  auto op = [](const char* method, const char* path) {
    OperationDef d;
    d.method = method;
    d.path_template = path;
    return classify_operation(d);
  };
  CHECK(op("POST", "/books") == CrudKind::Create);
  CHECK(op("GET", "/books/{bookId}") == CrudKind::Read);
  CHECK(op("GET", "/books") == CrudKind::ReadList);
  CHECK(op("PUT", "/books/{bookId}") == CrudKind::Update);
  CHECK(op("PATCH", "/books/{bookId}") == CrudKind::Update);
  CHECK(op("DELETE", "/books/{bookId}") == CrudKind::Delete);
  CHECK(op("POST", "/books/{bookId}") == CrudKind::Other);
  CHECK(op("DELETE", "/books") == CrudKind::Other);
  CHECK(op("PUT", "/books") == CrudKind::Other);
}

TEST_CASE("bookshop inference yields the hand-derived dependency edges") {
  auto m = infer_model(bookshop());
  // Book.authorId, Order.customerId and Order.bookIds are the only inputs
  // that name another resource's id.
  std::set<EdgeTriple> expected = {
      {"book", "author", "authorId"},
      {"order", "customer", "customerId"},
      {"order", "book", "bookIds"},
  };
  CHECK(edge_set(m) == expected);
  for (const auto& e : m.edges) {
    CHECK(e.provenance == Provenance::Inferred);
    CHECK(e.confidence >= m.name_threshold);
    CHECK(e.confidence <= 1.0);
  }
  CHECK(m.warnings.empty());

  std::vector<std::string> names;
  for (const auto& r : m.resources) names.push_back(r.name);
  CHECK(names == std::vector<std::string>{"author", "book", "customer", "order"});
  CHECK(m.find_resource("book")->id_field_names == std::vector<std::string>{"bookId"});
  REQUIRE(m.find_resource("customer")->schema);
  CHECK(m.find_resource("customer")->schema->property("email"));
}

TEST_CASE("every bookshop operation is bound to a CRUD kind") {
  auto m = infer_model(bookshop());
  REQUIRE(m.bindings.size() == bookshop().operations.size());
  std::size_t classified = 0;
  for (const auto& b : m.bindings) classified += b.crud_kind != CrudKind::Other;
  CHECK(classified * 10 >= m.bindings.size() * 9);
  CHECK(classified == m.bindings.size());
  CHECK(m.binding_for("POST /orders")->crud_kind == CrudKind::Create);
  CHECK(m.binding_for("GET /customers")->crud_kind == CrudKind::ReadList);
  CHECK(m.binding_for("DELETE /books/{bookId}")->resource == "book");
}

TEST_CASE("binding totality: one binding per operation, resources declared") {
  auto m = infer_model(bookshop());
  std::set<std::string> ops;
  for (const auto& b : m.bindings) {
    CHECK(ops.insert(b.operation).second);
    CHECK(bookshop().find_operation(b.operation));
    CHECK(m.find_resource(b.resource));
  }
  CHECK(ops.size() == bookshop().operations.size());
}

TEST_CASE("edges cite a via parameter matching a prerequisite id field") {
  auto m = infer_model(bookshop());
  for (const auto& e : m.edges) {
    const auto* pre = m.find_resource(e.prerequisite);
    REQUIRE(pre);
    bool cited = false;
    for (const auto* b : m.bindings_of(e.dependent)) {
      const auto* op = bookshop().find_operation(b->operation);
      for (const auto& p : op->parameters) cited |= p.name == e.via_parameter;
    }
    CHECK(cited);
    CHECK(m.id_match(e.via_parameter, *pre) >= m.name_threshold);
  }
}

TEST_CASE("topological order puts prerequisites first") {
  auto m = infer_model(bookshop());
  auto order = m.topological_order();
  CHECK(order == std::vector<std::string>{"author", "book", "customer", "order"});
  auto pos = [&](const std::string& n) { return std::find(order.begin(), order.end(), n) - order.begin(); };
  for (const auto& e : m.edges) CHECK(pos(e.prerequisite) < pos(e.dependent));
}

TEST_CASE("mutual references are broken with a dependency-cycle warning") {
  auto ir = spec_from(R"(
openapi: 3.0.3
info: {title: cyc, version: "1"}
paths:
  /teams:
    post:
      requestBody:
        content:
          application/json:
            schema:
              type: object
              properties:
                captainId: {type: string}
      responses:
        "201":
          description: ok
          content:
            application/json:
              schema: {type: object, properties: {teamId: {type: string}}}
  /captains:
    post:
      requestBody:
        content:
          application/json:
            schema:
              type: object
              properties:
                teamId: {type: string}
      responses:
        "201":
          description: ok
          content:
            application/json:
              schema: {type: object, properties: {captainId: {type: string}}}
)");
  auto m = infer_model(ir);
  CHECK(m.edges.size() == 1);
  REQUIRE(m.warnings.size() == 1);
  CHECK(m.warnings[0].rule_id == "dependency-cycle");
  CHECK(m.topological_order().size() == 2);
}

TEST_CASE("inference is deterministic") {
  CHECK(serialize_model(infer_model(bookshop())) == serialize_model(infer_model(bookshop())));
}

TEST_CASE("model file round trip") {
  auto m = infer_model(bookshop());
  auto text = serialize_model(m);
  CHECK(text.back() == '\n');
  auto loaded = load_model(text, bookshop());
  CHECK(loaded == m);
  CHECK(serialize_model(loaded) == text);
}

TEST_CASE("golden model file loads equal to inference") {
  auto golden = read_file(kFixtureDir + "/bookshop.model.json");
  REQUIRE(!golden.empty());
  auto loaded = load_model(golden, bookshop());
  CHECK(loaded == infer_model(bookshop()));
  CHECK(serialize_model(loaded) == golden);
}

TEST_CASE("a hand-added edge is kept and marked user-edited") {
  auto doc = model_to_json(infer_model(bookshop()));
  doc["edges"].push_back({{"dependent", "book"}, {"prerequisite", "customer"}, {"via_parameter", "title"}});
  auto loaded = model_from_json(doc, bookshop());
  const DependencyEdge* added = nullptr;
  for (const auto& e : loaded.edges) {
    if (e.dependent == "book" && e.prerequisite == "customer") added = &e;
    else CHECK(e.provenance == Provenance::Inferred);
  }
  REQUIRE(added);
  CHECK(added->provenance == Provenance::UserEdited);
  CHECK(added->confidence == 1.0);
}

TEST_CASE("an edited binding is marked user-edited") {
  auto doc = model_to_json(infer_model(bookshop()));
  for (auto& b : doc["bindings"]) {
    if (b["operation"] == "GET /books") b["crud_kind"] = "other";
  }
  auto loaded = model_from_json(doc, bookshop());
  CHECK(loaded.binding_for("GET /books")->provenance == Provenance::UserEdited);
  CHECK(loaded.binding_for("GET /books")->crud_kind == CrudKind::Other);
  CHECK(loaded.binding_for("POST /books")->provenance == Provenance::Inferred);
}

TEST_CASE("missing bindings fall back to inference") {
  auto doc = model_to_json(infer_model(bookshop()));
  doc["bindings"] = json::array();
  auto loaded = model_from_json(doc, bookshop());
  CHECK(loaded.bindings == infer_model(bookshop()).bindings);
}

TEST_CASE("references to unknown operations or resources are rejected") {
  auto doc = model_to_json(infer_model(bookshop()));
  auto bad_op = doc;
  bad_op["bindings"].push_back(
      {{"operation", "PATCH /nothing"}, {"resource", "book"}, {"crud_kind", "update"}});
  CHECK_THROWS_AS(model_from_json(bad_op, bookshop()), DanglingReference);

  auto bad_res = doc;
  bad_res["edges"].push_back({{"dependent", "book"}, {"prerequisite", "publisher"}, {"via_parameter", "x"}});
  CHECK_THROWS_AS(model_from_json(bad_res, bookshop()), DanglingReference);
}

TEST_CASE("malformed model files raise ModelSchemaError") {
  CHECK_THROWS_AS(load_model(std::string_view("{not json"), bookshop()), ModelSchemaError);
  CHECK_THROWS_AS(load_model(std::string_view("[]"), bookshop()), ModelSchemaError);
  auto doc = model_to_json(infer_model(bookshop()));
  auto wrong_version = doc;
  wrong_version["model_version"] = 2;
  CHECK_THROWS_AS(model_from_json(wrong_version, bookshop()), ModelSchemaError);
  auto no_edges = doc;
  no_edges.erase("edges");
  CHECK_THROWS_AS(model_from_json(no_edges, bookshop()), ModelSchemaError);
  auto bad_kind = doc;
  bad_kind["bindings"][0]["crud_kind"] = "upsert";
  CHECK_THROWS_AS(model_from_json(bad_kind, bookshop()), ModelSchemaError);
  auto bad_conf = doc;
  bad_conf["edges"][0]["confidence"] = 1.5;
  CHECK_THROWS_AS(model_from_json(bad_conf, bookshop()), ModelSchemaError);
}

TEST_CASE("spec without recognizable ids still gets a total model") {
  auto ir = spec_from(R"(
openapi: 3.0.3
info: {title: bare, version: "1"}
paths:
  /:
    get:
      responses: {"200": {description: ok}}
  /ping:
    post:
      responses: {"200": {description: ok}}
)");
  auto m = infer_model(ir);
  CHECK(m.bindings.size() == 2);
  CHECK(m.edges.empty());
  CHECK(m.find_resource("root"));
  CHECK(m.find_resource("ping")->id_field_names == std::vector<std::string>{"pingId"});
}
