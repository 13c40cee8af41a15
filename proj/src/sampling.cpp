#include "restex/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "restex/errors.hpp"
#include "restex/validate.hpp"

namespace restex {

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::EnumSet: return "enum-set";
    case DomainKind::IntegerRange: return "integer-range";
    case DomainKind::NumberRange: return "number-range";
    case DomainKind::StringPattern: return "string-pattern";
    case DomainKind::Boolean: return "boolean";
    case DomainKind::Reference: return "reference-to-resource-id";
    case DomainKind::CompositeObject: return "composite-object";
    case DomainKind::CompositeArray: return "composite-array";
    case DomainKind::Any: return "any";
  }
  return "any";
}

double Mixture::weight(Component c) const {
  switch (c) {
    case Component::ValidRandom: return valid_random;
    case Component::FromState: return from_state;
    case Component::Boundary: return boundary;
    case Component::InvalidTyped: return invalid_typed;
  }
  return 0;
}

json to_json(const Mixture& m) {
  return {{"valid_random", m.valid_random},
          {"from_state", m.from_state},
          {"boundary", m.boundary},
          {"invalid_typed", m.invalid_typed}};
}

Mixture mixture_from_json(const json& j, Mixture base) {
  if (!j.is_object()) throw std::invalid_argument("mixture must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw std::invalid_argument("mixture weight '" + key + "' must be a number");
    const double w = value.get<double>();
    if (w < 0) throw std::invalid_argument("mixture weight '" + key + "' is negative");
    if (key == "valid_random") base.valid_random = w;
    else if (key == "from_state") base.from_state = w;
    else if (key == "boundary") base.boundary = w;
    else if (key == "invalid_typed") base.invalid_typed = w;
    else throw std::invalid_argument("unknown mixture component '" + key + "'");
  }
  if (base.total() <= 0) throw std::invalid_argument("mixture weights are all zero");
  return base;
}

// ---------------------------------------------------------------------------
// Domains

namespace {

const std::set<std::string>& known_formats() {
  static const std::set<std::string> f = {"date-time", "date", "uuid", "email"};
  return f;
}

SchemaPtr any_schema() {
  static const SchemaPtr s = std::make_shared<SchemaNode>();
  return s;
}

bool string_constrained(const SchemaNode& s, bool nonempty) {
  return s.pattern || s.max_length || (s.min_length && *s.min_length > (nonempty ? 1u : 0u)) ||
         (s.format && known_formats().count(*s.format));
}

}  // namespace

bool ValueDomain::has_boundary() const {
  const auto& s = *schema;
  switch (kind) {
    case DomainKind::IntegerRange:
    case DomainKind::NumberRange:
      return s.minimum || s.maximum;
    case DomainKind::StringPattern:
      return !s.pattern && !(s.format && known_formats().count(*s.format)) && (s.min_length || s.max_length);
    case DomainKind::CompositeArray:
      return s.min_items || s.max_items;
    case DomainKind::CompositeObject:
      return std::any_of(fields.begin(), fields.end(), [](const auto& f) { return f.second->has_boundary(); });
    default:
      return false;
  }
}

bool ValueDomain::has_invalid() const {
  switch (kind) {
    case DomainKind::Any:
      return false;
    case DomainKind::Reference:
      if (many) return !wire;
      return element->has_invalid();
    case DomainKind::StringPattern:
      return !wire || string_constrained(*schema, nonempty);
    case DomainKind::CompositeObject:
    case DomainKind::CompositeArray:
      return !wire;
    default:
      return true;
  }
}

ValueDomain build_domain(const SchemaPtr& schema_in, const SamplingConfig& config, bool wire,
                         const std::string& reference) {
  ValueDomain d;
  d.schema = schema_in ? schema_in : any_schema();
  d.wire = wire;
  const auto& s = *d.schema;
  if (!reference.empty()) {
    d.kind = DomainKind::Reference;
    d.reference = reference;
    if (s.kind == SchemaKind::Array) {
      d.many = true;
      d.element = std::make_shared<ValueDomain>(build_domain(s.items, config, false));
    } else {
      auto elem = build_domain(d.schema, config, wire);
      d.element = std::make_shared<ValueDomain>(std::move(elem));
    }
  } else if (!s.enum_values.empty()) {
    d.kind = DomainKind::EnumSet;
  } else {
    switch (s.kind) {
      case SchemaKind::Integer: d.kind = DomainKind::IntegerRange; break;
      case SchemaKind::Number: d.kind = DomainKind::NumberRange; break;
      case SchemaKind::Boolean: d.kind = DomainKind::Boolean; break;
      case SchemaKind::String:
        d.kind = DomainKind::StringPattern;
        if (s.pattern) {
          if (auto gen = PatternGenerator::compile(*s.pattern)) {
            d.pattern = std::make_shared<const PatternGenerator>(std::move(*gen));
          }
        }
        break;
      case SchemaKind::Object:
        d.kind = DomainKind::CompositeObject;
        for (const auto& [name, child] : s.properties) {
          d.fields.emplace_back(name, std::make_shared<ValueDomain>(build_domain(child, config, false)));
        }
        break;
      case SchemaKind::Array:
        d.kind = DomainKind::CompositeArray;
        d.element = std::make_shared<ValueDomain>(build_domain(s.items, config, false));
        break;
      case SchemaKind::Any:
        d.kind = DomainKind::Any;
        break;
    }
  }

  Mixture m = d.kind == DomainKind::Reference ? config.reference_mixture : config.mixture;
  if (d.kind != DomainKind::Reference) {
    m.valid_random += m.from_state;
    m.from_state = 0;
  }
  if (!d.has_boundary()) {
    m.valid_random += m.boundary;
    m.boundary = 0;
  }
  if (!d.has_invalid()) {
    m.valid_random += m.invalid_typed;
    m.invalid_typed = 0;
  }
  const double total = m.total();
  if (total > 0) {
    m.valid_random /= total;
    m.from_state /= total;
    m.boundary /= total;
    m.invalid_typed /= total;
  } else {
    m = {1, 0, 0, 0};
  }
  d.mixture = m;
  return d;
}

const ValueDomain* ParameterSamplerSet::find(std::string_view name, ParamLocation location) const {
  for (const auto& p : per_parameter) {
    if (p.param.name == name && p.param.location == location) return &p.domain;
  }
  return nullptr;
}

std::string reference_target(const ParameterDef& param, const OperationDef& op, const OperationBinding& binding,
                             const SemanticModel& model) {
  const std::string noun =
      param.location == ParamLocation::Path ? path_param_noun(op.path_template, param.name) : binding.resource;
  const std::string qualified = qualify_name(param.name, noun.empty() ? binding.resource : noun);
  std::string best;
  double best_score = 0;
  for (const auto& r : model.resources) {
    const double score = model.id_match(qualified, r);
    if (score >= model.name_threshold && score > best_score) {
      best = r.name;
      best_score = score;
    }
  }
  if (best.empty()) return best;
  // Only string/integer ids (or arrays of them) can carry references.
  const auto& s = param.schema ? *param.schema : SchemaNode{};
  const SchemaNode* scalar = s.kind == SchemaKind::Array && s.items ? s.items.get() : &s;
  const bool id_like = scalar->kind == SchemaKind::String || scalar->kind == SchemaKind::Integer ||
                       scalar->kind == SchemaKind::Any;
  return id_like ? best : std::string();
}

SamplingSpec build_sampling_spec(const ApiSpecIR& spec, const SemanticModel& model, const SamplingConfig& config,
                                 const WeightTable& weights) {
  SamplingSpec out;
  out.weights = weights;
  out.config = config;
  for (const auto& binding : model.bindings) {
    const auto* op = spec.find_operation(binding.operation);
    if (!op) continue;
    ParameterSamplerSet set;
    for (const auto& p : op->parameters) {
      const bool wire = p.location != ParamLocation::BodyField;
      auto domain = build_domain(p.schema, config, wire, reference_target(p, *op, binding, model));
      if (p.location == ParamLocation::Path) {
        domain.nonempty = true;
        if (domain.element && !domain.many) {
          auto elem = *domain.element;
          elem.nonempty = true;
          domain.element = std::make_shared<ValueDomain>(std::move(elem));
        }
      }
      set.per_parameter.push_back({p, std::move(domain)});
    }
    out.per_operation.emplace(binding.operation, std::move(set));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weights

double WeightTable::operation_weight(const OperationBinding& binding, std::string_view operation_id) const {
  const auto space = binding.operation.find(' ');
  const std::string method = binding.operation.substr(0, space);
  const std::string path = space == std::string::npos ? std::string() : binding.operation.substr(space + 1);
  for (const auto& prefix : exclude_prefixes) {
    if (!prefix.empty() && path.compare(0, prefix.size(), prefix) == 0) return 0;
  }
  if (auto it = per_operation.find(binding.operation); it != per_operation.end()) return it->second;
  if (!operation_id.empty()) {
    if (auto it = per_operation.find(std::string(operation_id)); it != per_operation.end()) return it->second;
  }
  if (auto it = per_method.find(method); it != per_method.end()) return it->second;
  return 1.0;
}

double WeightTable::resource_weight(std::string_view resource) const {
  auto it = per_resource.find(std::string(resource));
  return it == per_resource.end() ? 1.0 : it->second;
}

json to_json(const WeightTable& w) {
  return {{"per_method", w.per_method},
          {"per_operation", w.per_operation},
          {"per_resource", w.per_resource},
          {"exclude_prefixes", w.exclude_prefixes}};
}

WeightTable weight_table_from_json(const json& j) {
  WeightTable w;
  if (!j.is_object()) throw std::invalid_argument("weights must be an object");
  auto read_map = [&](const char* key, std::map<std::string, double>& out, bool upper) {
    if (!j.contains(key)) return;
    if (!j[key].is_object()) throw std::invalid_argument(std::string("weights.") + key + " must be an object");
    for (const auto& [name, value] : j[key].items()) {
      if (!value.is_number() || value.get<double>() < 0) {
        throw std::invalid_argument(std::string("weights.") + key + "." + name + " must be a number >= 0");
      }
      std::string k = name;
      if (upper) {
        for (auto& c : k) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      out[k] = value.get<double>();
    }
  };
  read_map("per_method", w.per_method, true);
  read_map("per_operation", w.per_operation, false);
  read_map("per_resource", w.per_resource, false);
  if (j.contains("exclude_prefixes")) w.exclude_prefixes = j["exclude_prefixes"].get<std::vector<std::string>>();
  return w;
}

json to_json(const SamplingConfig& c) {
  return {{"mixture", to_json(c.mixture)},
          {"reference_mixture", to_json(c.reference_mixture)},
          {"max_string_length", c.max_string_length},
          {"deleted_pick_probability", c.deleted_pick_probability},
          {"optional_probability", c.optional_probability}};
}

SamplingConfig sampling_config_from_json(const json& j) {
  SamplingConfig c;
  if (!j.is_object()) throw std::invalid_argument("sampling config must be an object");
  if (j.contains("mixture")) c.mixture = mixture_from_json(j["mixture"], c.mixture);
  if (j.contains("reference_mixture")) c.reference_mixture = mixture_from_json(j["reference_mixture"], c.reference_mixture);
  if (j.contains("max_string_length")) c.max_string_length = j["max_string_length"].get<std::size_t>();
  if (j.contains("deleted_pick_probability")) c.deleted_pick_probability = j["deleted_pick_probability"].get<double>();
  if (j.contains("optional_probability")) c.optional_probability = j["optional_probability"].get<double>();
  if (c.max_string_length == 0) throw std::invalid_argument("max_string_length must be positive");
  return c;
}

const OperationBinding& select_operation(const SemanticModel& model, const WeightTable& weights, Rng& rng,
                                         const ApiSpecIR* spec) {
  std::vector<std::vector<std::pair<const OperationBinding*, double>>> per_resource;
  std::vector<double> resource_weights;
  for (const auto& r : model.resources) {
    std::vector<std::pair<const OperationBinding*, double>> ops;
    double sum = 0;
    for (const auto* b : model.bindings_of(r.name)) {
      std::string_view op_id;
      if (spec) {
        if (const auto* op = spec->find_operation(b->operation)) op_id = op->operation_id;
      }
      const double w = std::max(0.0, weights.operation_weight(*b, op_id));
      ops.emplace_back(b, w);
      sum += w;
    }
    resource_weights.push_back(sum > 0 ? std::max(0.0, weights.resource_weight(r.name)) : 0.0);
    per_resource.push_back(std::move(ops));
  }
  const auto ri = rng.weighted(resource_weights);
  if (ri == resource_weights.size()) throw NoSelectableOperation("every operation weight is zero");
  std::vector<double> op_weights;
  for (const auto& [b, w] : per_resource[ri]) op_weights.push_back(w);
  const auto oi = rng.weighted(op_weights);
  if (oi == op_weights.size()) throw NoSelectableOperation("resource " + model.resources[ri].name + " has no weight");
  return *per_resource[ri][oi].first;
}

// ---------------------------------------------------------------------------
// Values

namespace {

constexpr std::string_view kAlnum = "abcdefghijklmnopqrstuvwxyz0123456789";

std::string alnum(Rng& rng, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(kAlnum[rng.below(kAlnum.size())]);
  return out;
}

std::string two_digits(std::int64_t n) { return (n < 10 ? "0" : "") + std::to_string(n); }

std::string format_value(const std::string& format, Rng& rng) {
  if (format == "date-time" || format == "date") {
    std::string date = std::to_string(rng.between(2000, 2030)) + "-" + two_digits(rng.between(1, 12)) + "-" +
                       two_digits(rng.between(1, 28));
    if (format == "date") return date;
    return date + "T" + two_digits(rng.between(0, 23)) + ":" + two_digits(rng.between(0, 59)) + ":" +
           two_digits(rng.between(0, 59)) + "Z";
  }
  if (format == "uuid") {
    static constexpr std::string_view hex = "0123456789abcdef";
    std::string out;
    for (int len : {8, 4, 4, 4, 12}) {
      if (!out.empty()) out += "-";
      for (int i = 0; i < len; ++i) out.push_back(hex[rng.below(16)]);
    }
    return out;
  }
  return alnum(rng, static_cast<std::size_t>(rng.between(1, 10))) + "@" + alnum(rng, 6) + ".com";
}

struct IntBounds {
  std::int64_t lo, hi;
  bool has_lo, has_hi;
};

IntBounds int_bounds(const SchemaNode& s) {
  IntBounds b{-1000, 1000, false, false};
  if (s.minimum) {
    b.lo = static_cast<std::int64_t>(s.exclusive_minimum ? std::floor(*s.minimum) + 1 : std::ceil(*s.minimum));
    b.has_lo = true;
  }
  if (s.maximum) {
    b.hi = static_cast<std::int64_t>(s.exclusive_maximum ? std::ceil(*s.maximum) - 1 : std::floor(*s.maximum));
    b.has_hi = true;
  }
  if (b.has_lo && !b.has_hi) b.hi = b.lo + 1000;
  if (b.has_hi && !b.has_lo) b.lo = b.hi - 1000;
  if (b.hi < b.lo) b.hi = b.lo;
  return b;
}

struct NumBounds {
  double lo, hi;
};

NumBounds num_bounds(const SchemaNode& s) {
  NumBounds b{-1000, 1000};
  if (s.minimum) b.lo = s.exclusive_minimum ? std::nextafter(*s.minimum, INFINITY) : *s.minimum;
  if (s.maximum) b.hi = s.exclusive_maximum ? std::nextafter(*s.maximum, -INFINITY) : *s.maximum;
  if (s.minimum && !s.maximum) b.hi = b.lo + 1000;
  if (s.maximum && !s.minimum) b.lo = b.hi - 1000;
  if (b.hi < b.lo) b.hi = b.lo;
  return b;
}

std::pair<std::size_t, std::size_t> string_length_range(const ValueDomain& d, const SamplingConfig& config) {
  const auto& s = *d.schema;
  std::size_t lo = s.min_length ? *s.min_length : 1;
  if (lo == 0) lo = d.nonempty ? 1 : 0;
  std::size_t hi = s.max_length ? std::min<std::size_t>(*s.max_length, config.max_string_length)
                                : config.max_string_length;
  if (hi < lo) hi = s.max_length ? std::max<std::size_t>(lo, *s.max_length) : lo;
  return {lo, hi};
}

bool string_ok(const SchemaNode& s, const std::string& v) {
  const auto len = utf8_length(v);
  if (s.min_length && len < *s.min_length) return false;
  if (s.max_length && len > *s.max_length) return false;
  if (s.pattern && !pattern_matches(*s.pattern, v)) return false;
  if (s.format && !format_matches(*s.format, v)) return false;
  return true;
}

json valid_value(const ValueDomain& d, Rng& rng, const SamplingConfig& config);
json boundary_value(const ValueDomain& d, Rng& rng, const SamplingConfig& config);

json valid_string(const ValueDomain& d, Rng& rng, const SamplingConfig& config) {
  const auto& s = *d.schema;
  std::string last;
  for (int attempt = 0; attempt < 50; ++attempt) {
    if (d.pattern) {
      last = d.pattern->generate(rng);
    } else if (s.format && known_formats().count(*s.format)) {
      last = format_value(*s.format, rng);
    } else {
      auto [lo, hi] = string_length_range(d, config);
      last = alnum(rng, static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi))));
    }
    if (string_ok(s, last) && !(d.nonempty && last.empty())) return last;
  }
  return last;  // best effort for patterns outside the generator subset
}

json valid_array(const ValueDomain& d, Rng& rng, const SamplingConfig& config, std::size_t count) {
  json out = json::array();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < count; ++i) {
    json v;
    for (int attempt = 0; attempt < 20; ++attempt) {
      v = valid_value(*d.element, rng, config);
      if (!d.schema->unique_items || !seen.count(v.dump())) break;
    }
    seen.insert(v.dump());
    out.push_back(std::move(v));
  }
  return out;
}

std::pair<std::size_t, std::size_t> item_count_range(const SchemaNode& s) {
  const std::size_t lo = s.min_items ? *s.min_items : 0;
  std::size_t hi = lo + 3;
  if (s.max_items) hi = std::min<std::size_t>(hi, *s.max_items);
  if (hi < lo) hi = lo;
  return {lo, hi};
}

json object_value(const ValueDomain& d, Rng& rng, const SamplingConfig& config, bool boundary) {
  json out = json::object();
  const auto& required = d.schema->required;
  for (const auto& [name, child] : d.fields) {
    const bool req = std::find(required.begin(), required.end(), name) != required.end();
    const bool pinned = boundary && child->has_boundary();
    if (!req && !pinned && !rng.chance(config.optional_probability)) continue;
    out[name] = pinned ? boundary_value(*child, rng, config) : valid_value(*child, rng, config);
  }
  return out;
}

json valid_value(const ValueDomain& d, Rng& rng, const SamplingConfig& config) {
  const auto& s = *d.schema;
  switch (d.kind) {
    case DomainKind::EnumSet: {
      std::vector<json> options;
      for (const auto& e : s.enum_values) {
        if (!e.is_null()) options.push_back(e);
      }
      return options.empty() ? json(nullptr) : rng.pick(options);
    }
    case DomainKind::IntegerRange: {
      auto b = int_bounds(s);
      return rng.between(b.lo, b.hi);
    }
    case DomainKind::NumberRange: {
      auto b = num_bounds(s);
      for (int attempt = 0; attempt < 20; ++attempt) {
        double x = std::round((b.lo + rng.unit() * (b.hi - b.lo)) * 100) / 100;
        if (validate(json(x), s).empty()) return x;
      }
      return (b.lo + b.hi) / 2;
    }
    case DomainKind::StringPattern:
      return valid_string(d, rng, config);
    case DomainKind::Boolean:
      return rng.chance(0.5);
    case DomainKind::Reference:
      if (d.many) {
        auto [lo, hi] = item_count_range(s);
        if (lo == 0) lo = 1;
        if (hi < lo) hi = lo;
        return valid_array(d, rng, config, static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi))));
      }
      return valid_value(*d.element, rng, config);
    case DomainKind::CompositeObject:
      return object_value(d, rng, config, false);
    case DomainKind::CompositeArray: {
      auto [lo, hi] = item_count_range(s);
      return valid_array(d, rng, config, static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi))));
    }
    case DomainKind::Any:
      return alnum(rng, static_cast<std::size_t>(rng.between(1, 8)));
  }
  return nullptr;
}

json boundary_value(const ValueDomain& d, Rng& rng, const SamplingConfig& config) {
  const auto& s = *d.schema;
  switch (d.kind) {
    case DomainKind::IntegerRange: {
      auto b = int_bounds(s);
      std::vector<std::int64_t> options;
      if (b.has_lo) options.push_back(b.lo);
      if (b.has_hi) options.push_back(b.hi);
      if (options.empty()) break;
      return rng.pick(options);
    }
    case DomainKind::NumberRange: {
      auto b = num_bounds(s);
      std::vector<double> options;
      if (s.minimum) options.push_back(b.lo);
      if (s.maximum) options.push_back(b.hi);
      if (options.empty()) break;
      return rng.pick(options);
    }
    case DomainKind::StringPattern: {
      std::vector<std::size_t> lengths;
      if (s.min_length) lengths.push_back(std::max<std::size_t>(*s.min_length, d.nonempty ? 1 : 0));
      if (s.max_length) lengths.push_back(*s.max_length);
      if (lengths.empty()) break;
      return alnum(rng, rng.pick(lengths));
    }
    case DomainKind::CompositeArray: {
      std::vector<std::size_t> counts;
      if (s.min_items) counts.push_back(*s.min_items);
      if (s.max_items) counts.push_back(*s.max_items);
      if (counts.empty()) break;
      return valid_array(d, rng, config, rng.pick(counts));
    }
    case DomainKind::CompositeObject:
      return object_value(d, rng, config, true);
    default:
      break;
  }
  return valid_value(d, rng, config);
}

/// Candidate values that should break the domain; each is verified by the
/// caller.
std::vector<json> invalid_candidates(const ValueDomain& d, Rng& rng, const SamplingConfig& config) {
  const auto& s = *d.schema;
  std::vector<json> out;
  auto text = [&](std::string v) { out.emplace_back(std::move(v)); };
  switch (d.kind) {
    case DomainKind::EnumSet:
      text("zz" + alnum(rng, 4));
      if (!d.wire) out.emplace_back(12345);
      break;
    case DomainKind::IntegerRange: {
      auto b = int_bounds(s);
      if (b.has_lo) out.emplace_back(b.lo - 1);
      if (b.has_hi) out.emplace_back(b.hi + 1);
      if (d.wire) {
        text("abc");
        text("1.5");
      } else {
        out.emplace_back(1.5);
        text("not-a-number");
      }
      break;
    }
    case DomainKind::NumberRange: {
      if (s.minimum) out.emplace_back(*s.minimum - 1);
      if (s.maximum) out.emplace_back(*s.maximum + 1);
      text(d.wire ? "abc" : "not-a-number");
      break;
    }
    case DomainKind::Boolean:
      text(d.wire ? "maybe" : "yes");
      break;
    case DomainKind::StringPattern: {
      if (s.pattern) {
        text("9" + alnum(rng, 3));
        text("_" + alnum(rng, 3));
        text("ABC" + alnum(rng, 2));
        text("a");
        text("x!" + alnum(rng, 3));
      }
      if (s.max_length) text(alnum(rng, *s.max_length + 1));
      if (s.min_length && *s.min_length > (d.nonempty ? 1u : 0u)) text(alnum(rng, *s.min_length - 1));
      if (s.format && known_formats().count(*s.format)) text("not-a-" + *s.format);
      if (!d.wire) out.emplace_back(12345);
      break;
    }
    case DomainKind::Reference:
      if (d.many) {
        auto bad = invalid_candidates(*d.element, rng, config);
        if (!bad.empty()) out.push_back(json::array({rng.pick(bad)}));
        if (s.min_items && *s.min_items > 0) out.push_back(json::array());
        text("not-an-array");
      } else {
        out = invalid_candidates(*d.element, rng, config);
      }
      break;
    case DomainKind::CompositeObject: {
      std::vector<const std::pair<std::string, std::shared_ptr<const ValueDomain>>*> breakable;
      for (const auto& f : d.fields) {
        if (f.second->has_invalid()) breakable.push_back(&f);
      }
      if (!breakable.empty()) {
        const auto* f = breakable[rng.below(breakable.size())];
        auto bad = invalid_candidates(*f->second, rng, config);
        if (!bad.empty()) {
          json obj = object_value(d, rng, config, false);
          obj[f->first] = rng.pick(bad);
          out.push_back(std::move(obj));
        }
      }
      text("not-an-object");
      break;
    }
    case DomainKind::CompositeArray: {
      if (s.min_items && *s.min_items > 0) out.push_back(json::array());
      if (s.max_items) out.push_back(valid_array(d, rng, config, *s.max_items + 1));
      auto bad = invalid_candidates(*d.element, rng, config);
      if (!bad.empty()) {
        auto [lo, hi] = item_count_range(s);
        json arr = valid_array(d, rng, config, std::max<std::size_t>(lo, 1));
        arr[0] = rng.pick(bad);
        out.push_back(std::move(arr));
      }
      text("not-an-array");
      break;
    }
    case DomainKind::Any:
      break;
  }
  return out;
}

std::vector<Violation> violations_of(const ValueDomain& d, const json& v) {
  if (d.wire) {
    const std::string w = wire_string(v);
    if (d.nonempty && w.empty()) return {{"$", "minLength", "empty path segment"}};
    return validate_wire(w, *d.schema);
  }
  return validate(v, *d.schema);
}

std::optional<SampledValue> invalid_value(const ValueDomain& d, Rng& rng, const SamplingConfig& config) {
  auto candidates = invalid_candidates(d, rng, config);
  // Shuffle so every violated constraint gets exercised over time.
  for (std::size_t i = candidates.size(); i > 1; --i) std::swap(candidates[i - 1], candidates[rng.below(i)]);
  for (auto& c : candidates) {
    if (d.wire && d.nonempty && wire_string(c).empty()) continue;
    auto v = violations_of(d, c);
    if (!v.empty()) return SampledValue{std::move(c), Component::InvalidTyped, v.front().constraint};
  }
  return std::nullopt;
}

std::optional<SampledValue> from_state_value(const ValueDomain& d, const StateStore& state, Rng& rng,
                                             const SamplingConfig& config) {
  if (d.kind != DomainKind::Reference) return std::nullopt;
  const auto live = state.query_ids(d.reference, {Lifecycle::Live});
  if (d.many) {
    const auto& s = *d.schema;
    const std::size_t lo = std::max<std::size_t>(1, s.min_items ? *s.min_items : 1);
    std::size_t hi = std::min<std::size_t>(live.size(), s.max_items ? *s.max_items : live.size());
    if (live.size() < lo || hi < lo) return std::nullopt;
    const auto k = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
    // Partial Fisher-Yates over indices keeps the subset uniform.
    std::vector<std::size_t> idx(live.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    json out = json::array();
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
      out.push_back(live[idx[i]]);
    }
    return SampledValue{std::move(out), Component::FromState, {}};
  }
  const auto deleted = state.query_ids(d.reference, {Lifecycle::Deleted});
  const std::vector<std::string>* pool = nullptr;
  if (!deleted.empty() && (live.empty() || rng.chance(config.deleted_pick_probability))) pool = &deleted;
  else if (!live.empty()) pool = &live;
  if (!pool) return std::nullopt;
  // Integer-typed ids go back out as numbers.
  const std::string& id = rng.pick(*pool);
  json value = id;
  if (d.element && d.element->schema->kind == SchemaKind::Integer) {
    if (auto n = coerce_wire(id, *d.element->schema)) value = *n;
  }
  return SampledValue{std::move(value), Component::FromState, {}};
}

}  // namespace

SampledValue sample_component(const ValueDomain& domain, Component component, const StateStore& state, Rng& rng,
                              const SamplingConfig& config) {
  switch (component) {
    case Component::FromState:
      if (auto v = from_state_value(domain, state, rng, config)) return *v;
      break;
    case Component::Boundary:
      if (domain.has_boundary()) return {boundary_value(domain, rng, config), Component::Boundary, {}};
      break;
    case Component::InvalidTyped:
      if (domain.has_invalid()) {
        if (auto v = invalid_value(domain, rng, config)) return *v;
      }
      break;
    case Component::ValidRandom:
      break;
  }
  return {valid_value(domain, rng, config), Component::ValidRandom, {}};
}

SampledValue sample_value(const ValueDomain& domain, const StateStore& state, Rng& rng, const SamplingConfig& config) {
  const auto& m = domain.mixture;
  const auto idx = rng.weighted({m.valid_random, m.from_state, m.boundary, m.invalid_typed});
  static constexpr Component order[] = {Component::ValidRandom, Component::FromState, Component::Boundary,
                                        Component::InvalidTyped};
  return sample_component(domain, idx < 4 ? order[idx] : Component::ValidRandom, state, rng, config);
}

}  // namespace restex
