#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "restex/model.hpp"
#include "restex/pattern_gen.hpp"
#include "restex/plan.hpp"
#include "restex/rng.hpp"
#include "restex/spec.hpp"
#include "restex/state.hpp"

namespace restex {

enum class DomainKind {
  EnumSet,
  IntegerRange,
  NumberRange,
  StringPattern,
  Boolean,
  Reference,
  CompositeObject,
  CompositeArray,
  Any,
};

std::string_view to_string(DomainKind kind);

/// Weights of the four sampling components. Not necessarily normalized.
struct Mixture {
  double valid_random = 0.70;
  double from_state = 0.20;
  double boundary = 0.07;
  double invalid_typed = 0.03;

  double weight(Component c) const;
  double total() const { return valid_random + from_state + boundary + invalid_typed; }

  friend bool operator==(const Mixture&, const Mixture&) = default;
};

/// Reference domains prefer ids already in state.
inline constexpr Mixture kDefaultReferenceMixture{0.20, 0.70, 0.07, 0.03};

json to_json(const Mixture& m);
/// Missing keys keep the values of `base`. Throws std::invalid_argument on
/// negative weights or an all-zero mixture.
Mixture mixture_from_json(const json& j, Mixture base = {});

struct ValueDomain {
  DomainKind kind = DomainKind::Any;
  SchemaPtr schema;
  /// Target resource of a Reference domain.
  std::string reference;
  /// Reference domain whose value is an array of ids.
  bool many = false;
  /// Value travels as text in a path, query or header.
  bool wire = false;
  /// Path parameters must not be empty.
  bool nonempty = false;
  /// Id synthesizer of a Reference domain; element domain of an array.
  std::shared_ptr<const ValueDomain> element;
  std::vector<std::pair<std::string, std::shared_ptr<const ValueDomain>>> fields;
  std::shared_ptr<const PatternGenerator> pattern;
  /// Normalized; components that do not apply are folded into valid-random.
  Mixture mixture;

  bool has_boundary() const;
  bool has_invalid() const;
};

struct ParameterSampler {
  ParameterDef param;
  ValueDomain domain;
};

struct ParameterSamplerSet {
  std::vector<ParameterSampler> per_parameter;

  const ValueDomain* find(std::string_view name, ParamLocation location) const;
};

struct WeightTable {
  /// Method weight; methods not listed weigh 1.
  std::map<std::string, double> per_method;
  /// Keyed by operation key ("PUT /books/{bookId}") or operationId.
  std::map<std::string, double> per_operation;
  /// Resources not listed weigh 1.
  std::map<std::string, double> per_resource;
  /// Operations under these path prefixes are never selected.
  std::vector<std::string> exclude_prefixes = {"/_admin"};

  double operation_weight(const OperationBinding& binding, std::string_view operation_id = {}) const;
  double resource_weight(std::string_view resource) const;

  friend bool operator==(const WeightTable&, const WeightTable&) = default;
};

json to_json(const WeightTable& w);
WeightTable weight_table_from_json(const json& j);

struct SamplingConfig {
  Mixture mixture;
  Mixture reference_mixture = kDefaultReferenceMixture;
  std::size_t max_string_length = 64;
  /// Chance that a from-state draw picks a deleted id when one exists.
  double deleted_pick_probability = 0.1;
  /// Chance that an optional parameter or property is filled.
  double optional_probability = 0.5;

  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

json to_json(const SamplingConfig& c);
SamplingConfig sampling_config_from_json(const json& j);

struct SamplingSpec {
  std::map<std::string, ParameterSamplerSet> per_operation;
  WeightTable weights;
  SamplingConfig config;
};

struct SampledValue {
  json value;
  Component component = Component::ValidRandom;
  /// Violated constraint for invalid-typed samples.
  std::string violated;
};

/// Builds a value domain for `schema`. `reference` makes it a reference
/// domain for that resource.
ValueDomain build_domain(const SchemaPtr& schema, const SamplingConfig& config, bool wire,
                         const std::string& reference = {});

/// Resource whose id `param` carries in `op`, or "" when none matches.
std::string reference_target(const ParameterDef& param, const OperationDef& op, const OperationBinding& binding,
                             const SemanticModel& model);

SamplingSpec build_sampling_spec(const ApiSpecIR& spec, const SemanticModel& model,
                                 const SamplingConfig& config = {}, const WeightTable& weights = {});

/// Two-stage draw: resource by weight, then one of its operations by weight.
/// Throws NoSelectableOperation when nothing has positive weight.
const OperationBinding& select_operation(const SemanticModel& model, const WeightTable& weights, Rng& rng,
                                         const ApiSpecIR* spec = nullptr);

/// Draws a component from the domain mixture, then a value.
SampledValue sample_value(const ValueDomain& domain, const StateStore& state, Rng& rng,
                          const SamplingConfig& config = {});

/// Draws a value from one component. from-state without a usable id falls
/// back to valid-random; components that do not apply fall back likewise.
SampledValue sample_component(const ValueDomain& domain, Component component, const StateStore& state, Rng& rng,
                              const SamplingConfig& config = {});

}  // namespace restex
