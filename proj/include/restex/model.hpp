#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "restex/names.hpp"
#include "restex/spec.hpp"

namespace restex {

enum class CrudKind { Create, Read, ReadList, Update, Delete, Other };
enum class Provenance { Inferred, UserEdited };

std::string_view to_string(CrudKind kind);
CrudKind crud_kind_from_string(std::string_view text);
std::string_view to_string(Provenance provenance);

struct Resource {
  std::string name;  // lowercase, singular
  std::vector<std::string> id_field_names;
  SchemaPtr schema;
  Provenance provenance = Provenance::Inferred;
};

struct OperationBinding {
  std::string operation;  // OperationDef::key()
  std::string resource;
  CrudKind crud_kind = CrudKind::Other;
  Provenance provenance = Provenance::Inferred;

  friend bool operator==(const OperationBinding&, const OperationBinding&) = default;
};

/// `dependent` needs an id of `prerequisite`, supplied through `via_parameter`.
struct DependencyEdge {
  std::string dependent;
  std::string prerequisite;
  std::string via_parameter;
  double confidence = 0.0;
  Provenance provenance = Provenance::Inferred;

  friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

struct SemanticModel {
  std::vector<Resource> resources;
  std::vector<OperationBinding> bindings;
  std::vector<DependencyEdge> edges;
  double name_threshold = kDefaultNameThreshold;
  /// Inference warnings (dependency-cycle). Not serialized.
  std::vector<LintFinding> warnings;

  const Resource* find_resource(std::string_view name) const;
  const OperationBinding* binding_for(std::string_view operation) const;
  std::vector<const OperationBinding*> bindings_of(std::string_view resource) const;
  /// Edges whose dependent is `resource`.
  std::vector<const DependencyEdge*> prerequisites_of(std::string_view resource) const;
  /// Resources ordered so that every prerequisite precedes its dependents;
  /// ties broken by name.
  std::vector<std::string> topological_order() const;
  /// Id-field names of `resource`, qualified by resource name when generic.
  std::vector<std::string> qualified_id_fields(const Resource& resource) const;
  /// Best match_names score of `name` against the resource's id fields.
  double id_match(std::string_view name, const Resource& resource) const;
};

bool operator==(const Resource& a, const Resource& b);
bool operator==(const SemanticModel& a, const SemanticModel& b);

/// Derives resources, CRUD bindings and dependency edges. Never throws.
SemanticModel infer_model(const ApiSpecIR& spec, double name_threshold = kDefaultNameThreshold);

/// Canonical model file (JSON, model_version 1, sorted keys, trailing newline).
std::string serialize_model(const SemanticModel& model);
json model_to_json(const SemanticModel& model);

/// Loads a (possibly hand-edited) model file against `spec`. Elements that
/// differ from what inference produces are marked user-edited.
/// Throws ModelSchemaError or DanglingReference.
SemanticModel load_model(std::string_view document, const ApiSpecIR& spec);
SemanticModel model_from_json(const json& document, const ApiSpecIR& spec);

/// Classification rule: POST collection -> create, GET item -> read, GET
/// collection -> read-list, PUT/PATCH item -> update, DELETE item -> delete.
CrudKind classify_operation(const OperationDef& op);

}  // namespace restex
