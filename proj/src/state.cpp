#include "restex/state.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace restex {

std::string_view to_string(Lifecycle lifecycle) {
  switch (lifecycle) {
    case Lifecycle::Live: return "live";
    case Lifecycle::Deleted: return "deleted";
    case Lifecycle::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(PredictionBasis basis) {
  return basis == PredictionBasis::ExactState ? "exact-state" : "stale-possible";
}

PredictionBasis prediction_basis_from_string(std::string_view text) {
  if (text == "exact-state") return PredictionBasis::ExactState;
  if (text == "stale-possible") return PredictionBasis::StalePossible;
  throw std::invalid_argument("unknown prediction basis: " + std::string(text));
}

bool StatusPrediction::admits(int status) const {
  for (const auto& e : expected) {
    if (StatusPattern::parse(e).matches(status)) return true;
  }
  return false;
}

std::string StatusPrediction::expected_str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < expected.size(); ++i) out += (i ? ", " : "") + expected[i];
  return out + "}";
}

json to_json(const StatusPrediction& p) {
  return {{"expected", p.expected}, {"basis", std::string(to_string(p.basis))}, {"rationale", p.rationale}};
}

StatusPrediction prediction_from_json(const json& j) {
  StatusPrediction p;
  p.expected = j.at("expected").get<std::vector<std::string>>();
  p.basis = prediction_basis_from_string(j.at("basis").get<std::string>());
  p.rationale = j.value("rationale", "");
  return p;
}

namespace {

const PlanParam* item_target(const RequestPlan& plan) {
  if (!is_item_path(plan.path_template)) return nullptr;
  return plan.param(path_param_names(plan.path_template).back(), ParamLocation::Path);
}

bool is_item_kind(CrudKind kind) {
  return kind == CrudKind::Read || kind == CrudKind::Update || kind == CrudKind::Delete;
}

void add_ids(const std::string& resource, const json& value, std::vector<std::pair<std::string, std::string>>& out) {
  if (value.is_string()) {
    out.emplace_back(resource, value.get<std::string>());
  } else if (value.is_array()) {
    for (const auto& v : value) {
      if (v.is_string()) out.emplace_back(resource, v.get<std::string>());
    }
  }
}

const json* list_items(const json& body) {
  if (body.is_array()) return &body;
  if (body.is_object()) {
    for (const char* key : {"items", "data", "results"}) {
      auto it = body.find(key);
      if (it != body.end() && it->is_array()) return &*it;
    }
  }
  return nullptr;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> touched_instances(const RequestPlan& plan) {
  std::vector<std::pair<std::string, std::string>> out;
  const PlanParam* target = is_item_kind(plan.binding.crud_kind) ? item_target(plan) : nullptr;
  if (target && target->component != Component::InvalidTyped) {
    add_ids(target->reference.empty() ? plan.binding.resource : target->reference, target->value, out);
  }
  if (plan.binding.crud_kind == CrudKind::ReadList) return out;
  for (const auto& p : plan.params) {
    if (&p == target || p.reference.empty() || p.component == Component::InvalidTyped) continue;
    add_ids(p.reference, p.value, out);
  }
  return out;
}

StateStore::StateStore(SemanticModel model, std::size_t capacity)
    : model_(std::move(model)), capacity_(std::max<std::size_t>(capacity, 1)) {}

std::uint64_t StateStore::epoch() const {
  std::shared_lock lock(mu_);
  return epoch_;
}

std::size_t StateStore::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

bool StateStore::evicted_live(std::string_view resource) const {
  std::shared_lock lock(mu_);
  return evicted_live_.count(resource) > 0;
}

std::vector<std::string> StateStore::query_ids(std::string_view resource, const std::set<Lifecycle>& filter) const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  auto it = order_.find(resource);
  if (it == order_.end()) return out;
  for (const auto& [seq, id] : it->second) {
    const auto& inst = entries_.at({it->first, id}).instance;
    if (filter.count(inst.lifecycle)) out.push_back(id);
  }
  return out;
}

std::optional<ResourceInstance> StateStore::find(std::string_view resource, std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find({std::string(resource), std::string(id)});
  if (it == entries_.end()) return std::nullopt;
  return it->second.instance;
}

void StateStore::put(ResourceInstance instance) {
  std::unique_lock lock(mu_);
  const Key key{instance.resource, instance.id};
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    deleted_by_age_.erase({it->second.seq, key});
    live_by_age_.erase({it->second.seq, key});
    it->second.instance = std::move(instance);
    (it->second.instance.lifecycle == Lifecycle::Deleted ? deleted_by_age_ : live_by_age_).insert({it->second.seq, key});
  } else {
    const auto seq = next_seq_++;
    (instance.lifecycle == Lifecycle::Deleted ? deleted_by_age_ : live_by_age_).insert({seq, key});
    order_[key.first][seq] = key.second;
    entries_.emplace(key, Entry{std::move(instance), seq});
    evict_locked();
  }
  ++epoch_;
}

void StateStore::erase_locked(const Key& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return;
  deleted_by_age_.erase({it->second.seq, key});
  live_by_age_.erase({it->second.seq, key});
  auto ord = order_.find(key.first);
  if (ord != order_.end()) ord->second.erase(it->second.seq);
  entries_.erase(it);
}

void StateStore::evict_locked() {
  while (entries_.size() > capacity_) {
    if (!deleted_by_age_.empty()) {
      erase_locked(deleted_by_age_.begin()->second);
    } else {
      const Key key = live_by_age_.begin()->second;
      evicted_live_.insert(key.first);
      erase_locked(key);
    }
  }
}

/// Inserts a new instance or refreshes an existing one without ever moving
/// a deleted instance back to live. Returns true when something changed.
bool StateStore::upsert_locked(ResourceInstance instance, bool discovered) {
  const Key key{instance.resource, instance.id};
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    const auto seq = next_seq_++;
    (instance.lifecycle == Lifecycle::Deleted ? deleted_by_age_ : live_by_age_).insert({seq, key});
    order_[key.first][seq] = key.second;
    entries_.emplace(key, Entry{std::move(instance), seq});
    evict_locked();
    return true;
  }
  auto& cur = it->second.instance;
  if (cur.lifecycle == Lifecycle::Deleted) return false;
  if (discovered && cur.lifecycle == Lifecycle::Live && !cur.uncertain) return false;
  cur.lifecycle = Lifecycle::Live;
  cur.uncertain = false;
  if (instance.last_representation) cur.last_representation = std::move(instance.last_representation);
  return true;
}

std::optional<std::string> StateStore::extract_id(const std::string& resource, const json& body) const {
  if (!body.is_object()) return std::nullopt;
  const Resource* res = model_.find_resource(resource);
  if (!res) return std::nullopt;
  auto as_id = [](const json& v) -> std::optional<std::string> {
    if (v.is_string() && !v.get_ref<const std::string&>().empty()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    return std::nullopt;
  };
  for (const auto& f : res->id_field_names) {
    auto it = body.find(f);
    if (it != body.end()) {
      if (auto id = as_id(*it)) return id;
    }
  }
  for (const auto& [key, value] : body.items()) {
    if (model_.id_match(qualify_name(key, resource), *res) >= model_.name_threshold) {
      if (auto id = as_id(value)) return id;
    }
  }
  return std::nullopt;
}

EffectDelta StateStore::apply_effect(const RequestPlan& plan, const HttpExchangeResult& result,
                                     std::uint64_t event_id) {
  std::unique_lock lock(mu_);
  EffectDelta delta;
  const auto kind = plan.binding.crud_kind;
  const std::string& resource = plan.binding.resource;
  const PlanParam* target = is_item_kind(kind) ? item_target(plan) : nullptr;
  const bool target_ok = target && target->value.is_string() && target->component != Component::InvalidTyped;
  const std::string target_resource = target && !target->reference.empty() ? target->reference : resource;

  const bool success = result.status && *result.status >= 200 && *result.status < 300;
  const bool unclear = !result.status || *result.status >= 500;

  if (unclear) {
    if ((kind == CrudKind::Update || kind == CrudKind::Delete) && target_ok) {
      auto it = entries_.find({target_resource, target->value.get<std::string>()});
      if (it != entries_.end() && it->second.instance.lifecycle != Lifecycle::Deleted &&
          !it->second.instance.uncertain) {
        it->second.instance.uncertain = true;
        delta.changed = true;
      }
    }
  } else if (success) {
    const json* body = result.json_body ? &*result.json_body : nullptr;
    switch (kind) {
      case CrudKind::Create: {
        auto id = body ? extract_id(resource, *body) : std::nullopt;
        if (!id) {
          delta.id_extraction_failure = "no id field of " + resource + " in the " +
                                        std::to_string(*result.status) + " response";
          break;
        }
        delta.changed = upsert_locked({resource, *id, Lifecycle::Live, *body, event_id, false}, false);
        break;
      }
      case CrudKind::Read:
      case CrudKind::Update:
        if (target_ok) {
          std::optional<json> repr;
          if (body) repr = *body;
          delta.changed = upsert_locked(
              {target_resource, target->value.get<std::string>(), Lifecycle::Live, repr, event_id, false}, false);
        }
        break;
      case CrudKind::ReadList:
        if (const json* items = body ? list_items(*body) : nullptr) {
          for (const auto& item : *items) {
            if (auto id = extract_id(resource, item)) {
              delta.changed |= upsert_locked({resource, *id, Lifecycle::Live, item, event_id, false}, true);
            }
          }
        }
        break;
      case CrudKind::Delete:
        if (target_ok) {
          const Key key{target_resource, target->value.get<std::string>()};
          auto it = entries_.find(key);
          if (it == entries_.end()) {
            delta.changed = upsert_locked({key.first, key.second, Lifecycle::Deleted, std::nullopt, event_id, false},
                                          false);
          } else if (it->second.instance.lifecycle != Lifecycle::Deleted) {
            it->second.instance.lifecycle = Lifecycle::Deleted;
            it->second.instance.uncertain = false;
            live_by_age_.erase({it->second.seq, key});
            deleted_by_age_.insert({it->second.seq, key});
            delta.changed = true;
          }
        }
        break;
      case CrudKind::Other:
        break;
    }
  }
  if (delta.changed) ++epoch_;
  delta.epoch = epoch_;
  return delta;
}

StatusPrediction StateStore::predict_status(const RequestPlan& plan, PredictionMode mode) const {
  const auto basis = mode == PredictionMode::Sequential ? PredictionBasis::ExactState : PredictionBasis::StalePossible;
  for (const auto& p : plan.params) {
    if (p.component == Component::InvalidTyped) {
      return {{"4XX"}, basis,
              "invalid value for " + p.name + (p.violated.empty() ? "" : " (" + p.violated + ")")};
    }
  }
  const auto kind = plan.binding.crud_kind;
  if (kind == CrudKind::Other) {
    return {{"2XX", "3XX", "4XX"}, PredictionBasis::StalePossible, "operation has no CRUD binding"};
  }
  if (kind == CrudKind::ReadList) return {{"2XX"}, basis, "collection read"};

  std::shared_lock lock(mu_);
  std::vector<std::string> missing;
  std::vector<std::string> unsure;
  for (const auto& [res, id] : touched_instances(plan)) {
    auto it = entries_.find({res, id});
    const std::string label = res + " " + id;
    if (it == entries_.end()) {
      (evicted_live_.count(res) ? unsure : missing).push_back(label + " never seen");
    } else if (it->second.instance.lifecycle == Lifecycle::Deleted) {
      missing.push_back(label + " deleted");
    } else if (it->second.instance.lifecycle == Lifecycle::Unknown || it->second.instance.uncertain) {
      unsure.push_back(label + " state unknown");
    }
  }
  auto join = [](const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
    return out;
  };
  if (!unsure.empty()) {
    std::vector<std::string> reasons = missing;
    reasons.insert(reasons.end(), unsure.begin(), unsure.end());
    return {{"2XX", "404", "410"}, PredictionBasis::StalePossible, join(reasons)};
  }
  if (!missing.empty()) return {{"404", "410"}, basis, join(missing)};
  return {{"2XX"}, basis, "all referenced instances live"};
}

json StateStore::snapshot() const {
  std::shared_lock lock(mu_);
  json instances = json::array();
  for (const auto& [resource, ids] : order_) {
    for (const auto& [seq, id] : ids) {
      const auto& inst = entries_.at({resource, id}).instance;
      json j = {{"resource", resource},
                {"id", id},
                {"lifecycle", std::string(to_string(inst.lifecycle))},
                {"created_by", inst.created_by}};
      if (inst.uncertain) j["uncertain"] = true;
      instances.push_back(std::move(j));
    }
  }
  return {{"epoch", epoch_}, {"instances", std::move(instances)}};
}

StatusPrediction widen_prediction(const StatusPrediction& prediction, const RequestPlan& plan,
                                  const std::vector<const RequestPlan*>& overlapping) {
  StatusPrediction out = prediction;
  out.basis = PredictionBasis::StalePossible;
  if (plan.has_invalid() || plan.binding.crud_kind == CrudKind::ReadList ||
      plan.binding.crud_kind == CrudKind::Other) {
    return out;
  }
  const auto mine = touched_instances(plan);
  std::set<std::string> my_resources;
  for (const auto& [res, id] : mine) my_resources.insert(res);
  std::string cause;
  for (const auto* other : overlapping) {
    if (other == &plan) continue;
    if (other->binding.crud_kind == CrudKind::Create && my_resources.count(other->binding.resource)) {
      cause = "concurrent create of " + other->binding.resource;
      break;
    }
    if (other->binding.crud_kind == CrudKind::ReadList || other->binding.crud_kind == CrudKind::Read) continue;
    for (const auto& t : touched_instances(*other)) {
      if (std::find(mine.begin(), mine.end(), t) != mine.end()) {
        cause = "concurrent " + other->binding.operation + " on " + t.first + " " + t.second;
        break;
      }
    }
    if (!cause.empty()) break;
  }
  if (cause.empty()) return out;
  for (const char* e : {"2XX", "404", "410"}) {
    if (std::find(out.expected.begin(), out.expected.end(), e) == out.expected.end()) out.expected.push_back(e);
  }
  out.rationale += "; widened: " + cause;
  return out;
}

}  // namespace restex
