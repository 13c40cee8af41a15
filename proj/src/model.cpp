#include "restex/model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "restex/errors.hpp"

namespace restex {

std::string_view to_string(CrudKind kind) {
  switch (kind) {
    case CrudKind::Create: return "create";
    case CrudKind::Read: return "read";
    case CrudKind::ReadList: return "read-list";
    case CrudKind::Update: return "update";
    case CrudKind::Delete: return "delete";
    case CrudKind::Other: return "other";
  }
  return "other";
}

CrudKind crud_kind_from_string(std::string_view text) {
  if (text == "create") return CrudKind::Create;
  if (text == "read") return CrudKind::Read;
  if (text == "read-list") return CrudKind::ReadList;
  if (text == "update") return CrudKind::Update;
  if (text == "delete") return CrudKind::Delete;
  if (text == "other") return CrudKind::Other;
  throw std::invalid_argument("unknown crud kind: " + std::string(text));
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::UserEdited ? "user-edited" : "inferred";
}

CrudKind classify_operation(const OperationDef& op) {
  const bool item = is_item_path(op.path_template);
  if (op.method == "POST" && !item) return CrudKind::Create;
  if (op.method == "GET") return item ? CrudKind::Read : CrudKind::ReadList;
  if ((op.method == "PUT" || op.method == "PATCH") && item) return CrudKind::Update;
  if (op.method == "DELETE" && item) return CrudKind::Delete;
  return CrudKind::Other;
}

// ---------------------------------------------------------------------------
// SemanticModel queries

const Resource* SemanticModel::find_resource(std::string_view name) const {
  for (const auto& r : resources) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const OperationBinding* SemanticModel::binding_for(std::string_view operation) const {
  for (const auto& b : bindings) {
    if (b.operation == operation) return &b;
  }
  return nullptr;
}

std::vector<const OperationBinding*> SemanticModel::bindings_of(std::string_view resource) const {
  std::vector<const OperationBinding*> out;
  for (const auto& b : bindings) {
    if (b.resource == resource) out.push_back(&b);
  }
  return out;
}

std::vector<const DependencyEdge*> SemanticModel::prerequisites_of(std::string_view resource) const {
  std::vector<const DependencyEdge*> out;
  for (const auto& e : edges) {
    if (e.dependent == resource) out.push_back(&e);
  }
  return out;
}

std::vector<std::string> SemanticModel::topological_order() const {
  std::map<std::string, int> pending;  // unmet prerequisite count
  std::map<std::string, std::set<std::string>> dependents;
  for (const auto& r : resources) pending[r.name] = 0;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : edges) {
    if (!seen.insert({e.dependent, e.prerequisite}).second) continue;
    ++pending[e.dependent];
    dependents[e.prerequisite].insert(e.dependent);
  }
  std::set<std::string> ready;
  for (const auto& [name, count] : pending) {
    if (count == 0) ready.insert(name);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto name = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(name);
    for (const auto& d : dependents[name]) {
      if (--pending[d] == 0) ready.insert(d);
    }
  }
  // A cycle (only possible through hand edits) leaves the rest unordered.
  for (const auto& [name, count] : pending) {
    if (count > 0) order.push_back(name);
  }
  return order;
}

std::vector<std::string> SemanticModel::qualified_id_fields(const Resource& resource) const {
  std::vector<std::string> out;
  for (const auto& f : resource.id_field_names) out.push_back(qualify_name(f, resource.name));
  return out;
}

double SemanticModel::id_match(std::string_view name, const Resource& resource) const {
  double best = 0.0;
  for (const auto& f : qualified_id_fields(resource)) best = std::max(best, match_names(name, f));
  return best;
}

bool operator==(const Resource& a, const Resource& b) {
  return a.name == b.name && a.id_field_names == b.id_field_names && a.provenance == b.provenance &&
         schema_equal(a.schema, b.schema);
}

bool operator==(const SemanticModel& a, const SemanticModel& b) {
  return a.resources == b.resources && a.bindings == b.bindings && a.edges == b.edges &&
         a.name_threshold == b.name_threshold;
}

// ---------------------------------------------------------------------------
// Inference

namespace {

std::string binding_noun(const OperationDef& op) {
  auto noun = path_resource_noun(op.path_template);
  return noun.empty() ? "root" : noun;
}

const SchemaNode* success_body(const OperationDef& op) {
  for (const auto& [code, r] : op.responses) {
    if (code[0] == '2' && r.body_schema) return r.body_schema.get();
  }
  return nullptr;
}

const SchemaNode* element_schema(const SchemaNode* s) {
  if (s && s->kind == SchemaKind::Array && s->items) return s->items.get();
  return s;
}

bool is_id_field_of(const std::string& field, const std::string& resource, double threshold) {
  if (!has_id_suffix(field)) return false;
  return is_generic_id(field) || match_names(field, resource) >= threshold;
}

struct EdgeKey {
  std::string dependent, prerequisite, via;
  auto operator<=>(const EdgeKey&) const = default;
};

void sort_edges(std::vector<DependencyEdge>& edges) {
  std::sort(edges.begin(), edges.end(), [](const DependencyEdge& a, const DependencyEdge& b) {
    return std::tie(a.dependent, a.prerequisite, a.via_parameter) <
           std::tie(b.dependent, b.prerequisite, b.via_parameter);
  });
}

/// Returns the indices of edges forming one directed cycle, or empty.
std::vector<std::size_t> find_cycle(const std::vector<DependencyEdge>& edges) {
  std::map<std::string, std::vector<std::size_t>> out_edges;
  for (std::size_t i = 0; i < edges.size(); ++i) out_edges[edges[i].dependent].push_back(i);
  std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
  std::vector<std::size_t> path;
  std::vector<std::size_t> cycle;

  std::function<bool(const std::string&)> visit = [&](const std::string& node) {
    color[node] = 1;
    for (auto idx : out_edges[node]) {
      const auto& next = edges[idx].prerequisite;
      path.push_back(idx);
      if (color[next] == 1) {
        auto start = std::find_if(path.begin(), path.end(),
                                  [&](std::size_t e) { return edges[e].dependent == next; });
        cycle.assign(start, path.end());
        return true;
      }
      if (color[next] == 0 && visit(next)) return true;
      path.pop_back();
    }
    color[node] = 2;
    return false;
  };
  std::set<std::string> nodes;
  for (const auto& e : edges) nodes.insert(e.dependent);
  for (const auto& n : nodes) {
    if (color[n] == 0 && visit(n)) return cycle;
  }
  return {};
}

void break_cycles(std::vector<DependencyEdge>& edges, std::vector<LintFinding>& warnings) {
  for (auto cycle = find_cycle(edges); !cycle.empty(); cycle = find_cycle(edges)) {
    std::size_t weakest = cycle.front();
    for (auto idx : cycle) {
      const auto& e = edges[idx];
      const auto& w = edges[weakest];
      if (e.confidence < w.confidence ||
          (e.confidence == w.confidence &&
           std::tie(e.dependent, e.prerequisite, e.via_parameter) >
               std::tie(w.dependent, w.prerequisite, w.via_parameter))) {
        weakest = idx;
      }
    }
    const auto& dropped = edges[weakest];
    warnings.push_back({"dependency-cycle", Severity::Warning, dropped.dependent + " -> " + dropped.prerequisite,
                        "dropped dependency via '" + dropped.via_parameter + "' to break a cycle"});
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(weakest));
  }
}

std::vector<std::string> infer_id_fields(const ApiSpecIR& spec, const std::string& resource,
                                         const std::vector<OperationBinding>& bindings, double threshold) {
  std::set<std::string> fields;
  for (const auto& b : bindings) {
    if (b.resource != resource) continue;
    const auto* op = spec.find_operation(b.operation);
    if (b.crud_kind != CrudKind::Other) {
      if (const auto* body = element_schema(success_body(*op))) {
        for (const auto& [name, _] : body->properties) {
          if (is_id_field_of(name, resource, threshold)) fields.insert(name);
        }
      }
    }
    if (is_item_path(op->path_template)) {
      const auto last = path_param_names(op->path_template).back();
      if (is_id_field_of(last, resource, threshold)) fields.insert(last);
    }
  }
  if (fields.empty()) {
    for (const auto& b : bindings) {
      if (b.resource != resource) continue;
      const auto* op = spec.find_operation(b.operation);
      if (is_item_path(op->path_template)) fields.insert(path_param_names(op->path_template).back());
    }
  }
  return {fields.begin(), fields.end()};
}

SchemaPtr infer_resource_schema(const ApiSpecIR& spec, const std::string& resource,
                                const std::vector<OperationBinding>& bindings) {
  for (CrudKind wanted : {CrudKind::Create, CrudKind::Read, CrudKind::ReadList, CrudKind::Update}) {
    for (const auto& b : bindings) {
      if (b.resource != resource || b.crud_kind != wanted) continue;
      const auto* op = spec.find_operation(b.operation);
      for (const auto& [code, r] : op->responses) {
        if (code[0] != '2' || !r.body_schema) continue;
        if (wanted == CrudKind::ReadList) {
          if (r.body_schema->kind == SchemaKind::Array && r.body_schema->items) return r.body_schema->items;
        } else {
          return r.body_schema;
        }
      }
    }
  }
  return nullptr;
}

std::vector<DependencyEdge> infer_edges(const ApiSpecIR& spec, const SemanticModel& model) {
  std::map<EdgeKey, double> best;
  for (const auto& b : model.bindings) {
    const auto* op = spec.find_operation(b.operation);
    for (const auto& p : op->parameters) {
      const std::string noun =
          p.location == ParamLocation::Path ? path_param_noun(op->path_template, p.name) : b.resource;
      const std::string input = qualify_name(p.name, noun);
      for (const auto& prereq : model.resources) {
        if (prereq.name == b.resource) continue;
        const double score = model.id_match(input, prereq);
        if (score < model.name_threshold) continue;
        auto& slot = best[{b.resource, prereq.name, p.name}];
        slot = std::max(slot, score);
      }
    }
  }
  std::vector<DependencyEdge> edges;
  for (const auto& [key, score] : best) {
    edges.push_back({key.dependent, key.prerequisite, key.via, score, Provenance::Inferred});
  }
  return edges;
}

}  // namespace

SemanticModel infer_model(const ApiSpecIR& spec, double name_threshold) {
  SemanticModel model;
  model.name_threshold = name_threshold;
  std::set<std::string> nouns;
  for (const auto& op : spec.operations) {
    auto noun = binding_noun(op);
    nouns.insert(noun);
    model.bindings.push_back({op.key(), noun, classify_operation(op), Provenance::Inferred});
  }
  for (const auto& noun : nouns) {
    Resource r;
    r.name = noun;
    r.id_field_names = infer_id_fields(spec, noun, model.bindings, name_threshold);
    if (r.id_field_names.empty()) r.id_field_names.push_back(noun + "Id");
    r.schema = infer_resource_schema(spec, noun, model.bindings);
    model.resources.push_back(std::move(r));
  }
  model.edges = infer_edges(spec, model);
  break_cycles(model.edges, model.warnings);
  sort_edges(model.edges);
  return model;
}

// ---------------------------------------------------------------------------
// Serialization

json model_to_json(const SemanticModel& model) {
  json resources = json::array();
  for (const auto& r : model.resources) {
    resources.push_back({{"name", r.name},
                         {"id_fields", r.id_field_names},
                         {"provenance", std::string(to_string(r.provenance))}});
  }
  json bindings = json::array();
  for (const auto& b : model.bindings) {
    bindings.push_back({{"operation", b.operation},
                        {"resource", b.resource},
                        {"crud_kind", std::string(to_string(b.crud_kind))},
                        {"provenance", std::string(to_string(b.provenance))}});
  }
  json edges = json::array();
  for (const auto& e : model.edges) {
    edges.push_back({{"dependent", e.dependent},
                     {"prerequisite", e.prerequisite},
                     {"via_parameter", e.via_parameter},
                     {"confidence", e.confidence},
                     {"provenance", std::string(to_string(e.provenance))}});
  }
  return {{"model_version", 1},
          {"name_threshold", model.name_threshold},
          {"resources", std::move(resources)},
          {"bindings", std::move(bindings)},
          {"edges", std::move(edges)}};
}

std::string serialize_model(const SemanticModel& model) { return model_to_json(model).dump(2) + "\n"; }

namespace {

const json& require_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ModelSchemaError(where + ": missing '" + key + "'");
  return obj[key];
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = require_field(obj, key, where);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw ModelSchemaError(where + ": '" + key + "' must be a nonempty string");
  }
  return v.get<std::string>();
}

std::optional<Provenance> read_provenance(const json& obj, const std::string& where) {
  if (!obj.contains("provenance")) return std::nullopt;
  const auto& v = obj["provenance"];
  if (v == "inferred") return Provenance::Inferred;
  if (v == "user-edited") return Provenance::UserEdited;
  throw ModelSchemaError(where + ": provenance must be 'inferred' or 'user-edited'");
}

Provenance merged_provenance(std::optional<Provenance> declared, bool matches_inference) {
  if (declared == Provenance::UserEdited) return Provenance::UserEdited;
  return matches_inference ? Provenance::Inferred : Provenance::UserEdited;
}

const json& require_array(const json& doc, const char* key) {
  const auto& v = require_field(doc, key, "model");
  if (!v.is_array()) throw ModelSchemaError(std::string("model: '") + key + "' must be a list");
  return v;
}

}  // namespace

SemanticModel load_model(std::string_view document, const ApiSpecIR& spec) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ModelSchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(doc, spec);
}

SemanticModel model_from_json(const json& doc, const ApiSpecIR& spec) {
  if (!doc.is_object()) throw ModelSchemaError("model file root must be an object");
  const auto& version = require_field(doc, "model_version", "model");
  if (version != 1) throw ModelSchemaError("unsupported model_version " + version.dump());
  double threshold = kDefaultNameThreshold;
  if (doc.contains("name_threshold")) {
    if (!doc["name_threshold"].is_number()) throw ModelSchemaError("name_threshold must be a number");
    threshold = doc["name_threshold"].get<double>();
    if (threshold < 0 || threshold > 1) throw ModelSchemaError("name_threshold must lie in [0, 1]");
  }
  const auto& raw_resources = require_array(doc, "resources");
  const auto& raw_bindings = require_array(doc, "bindings");
  const auto& raw_edges = require_array(doc, "edges");

  const SemanticModel baseline = infer_model(spec, threshold);
  SemanticModel model;
  model.name_threshold = threshold;

  for (std::size_t i = 0; i < raw_resources.size(); ++i) {
    const auto& item = raw_resources[i];
    const std::string where = "resources[" + std::to_string(i) + "]";
    Resource r;
    r.name = canonical_noun(require_string(item, "name", where));
    if (r.name.empty()) throw ModelSchemaError(where + ": name has no word characters");
    if (model.find_resource(r.name)) throw ModelSchemaError(where + ": duplicate resource " + r.name);
    if (item.contains("id_fields")) {
      const auto& ids = item["id_fields"];
      if (!ids.is_array()) throw ModelSchemaError(where + ": id_fields must be a list");
      for (const auto& f : ids) {
        if (!f.is_string()) throw ModelSchemaError(where + ": id_fields entries must be strings");
        r.id_field_names.push_back(f.get<std::string>());
      }
    }
    const Resource* inferred = baseline.find_resource(r.name);
    if (inferred) r.schema = inferred->schema;
    if (r.id_field_names.empty()) {
      r.id_field_names = inferred ? inferred->id_field_names : std::vector<std::string>{r.name + "Id"};
    }
    r.provenance = merged_provenance(read_provenance(item, where),
                                     inferred && inferred->id_field_names == r.id_field_names);
    model.resources.push_back(std::move(r));
  }

  for (std::size_t i = 0; i < raw_bindings.size(); ++i) {
    const auto& item = raw_bindings[i];
    const std::string where = "bindings[" + std::to_string(i) + "]";
    OperationBinding b;
    b.operation = require_string(item, "operation", where);
    if (!spec.find_operation(b.operation)) {
      throw DanglingReference(where + ": operation '" + b.operation + "' is not in the specification");
    }
    if (model.binding_for(b.operation)) throw ModelSchemaError(where + ": operation bound twice");
    b.resource = canonical_noun(require_string(item, "resource", where));
    if (!model.find_resource(b.resource)) {
      throw DanglingReference(where + ": resource '" + b.resource + "' is not declared");
    }
    try {
      b.crud_kind = crud_kind_from_string(require_string(item, "crud_kind", where));
    } catch (const std::invalid_argument& e) {
      throw ModelSchemaError(where + ": " + e.what());
    }
    const auto* inferred = baseline.binding_for(b.operation);
    b.provenance = merged_provenance(read_provenance(item, where),
                                     inferred && inferred->resource == b.resource &&
                                         inferred->crud_kind == b.crud_kind);
    model.bindings.push_back(std::move(b));
  }
  // Operations the file does not mention keep their inferred binding.
  std::vector<OperationBinding> ordered;
  for (const auto& op : spec.operations) {
    if (const auto* b = model.binding_for(op.key())) {
      ordered.push_back(*b);
      continue;
    }
    const auto* inferred = baseline.binding_for(op.key());
    if (!model.find_resource(inferred->resource)) {
      model.resources.push_back(*baseline.find_resource(inferred->resource));
    }
    ordered.push_back(*inferred);
  }
  model.bindings = std::move(ordered);
  std::sort(model.resources.begin(), model.resources.end(),
            [](const Resource& a, const Resource& b) { return a.name < b.name; });

  for (std::size_t i = 0; i < raw_edges.size(); ++i) {
    const auto& item = raw_edges[i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    DependencyEdge e;
    e.dependent = canonical_noun(require_string(item, "dependent", where));
    e.prerequisite = canonical_noun(require_string(item, "prerequisite", where));
    e.via_parameter = require_string(item, "via_parameter", where);
    for (const auto* name : {&e.dependent, &e.prerequisite}) {
      if (!model.find_resource(*name)) throw DanglingReference(where + ": resource '" + *name + "' is not declared");
    }
    if (e.dependent == e.prerequisite) throw ModelSchemaError(where + ": a resource cannot depend on itself");
    e.confidence = 1.0;
    if (item.contains("confidence")) {
      if (!item["confidence"].is_number()) throw ModelSchemaError(where + ": confidence must be a number");
      e.confidence = item["confidence"].get<double>();
      if (e.confidence < 0 || e.confidence > 1) throw ModelSchemaError(where + ": confidence must lie in [0, 1]");
    }
    auto inferred = std::find_if(baseline.edges.begin(), baseline.edges.end(), [&](const DependencyEdge& b) {
      return b.dependent == e.dependent && b.prerequisite == e.prerequisite && b.via_parameter == e.via_parameter;
    });
    e.provenance = merged_provenance(read_provenance(item, where),
                                     inferred != baseline.edges.end() && inferred->confidence == e.confidence);
    model.edges.push_back(std::move(e));
  }
  break_cycles(model.edges, model.warnings);
  sort_edges(model.edges);
  return model;
}

}  // namespace restex
