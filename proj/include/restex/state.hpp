#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "restex/model.hpp"
#include "restex/plan.hpp"

namespace restex {

enum class Lifecycle { Live, Deleted, Unknown };

std::string_view to_string(Lifecycle lifecycle);

struct ResourceInstance {
  std::string resource;
  std::string id;
  Lifecycle lifecycle = Lifecycle::Live;
  std::optional<json> last_representation;
  /// Trace event that created or first revealed the instance.
  std::uint64_t created_by = 0;
  /// Set when a mutation of a live instance ended without a clear outcome
  /// (5XX or no response); predictions for it widen until a read settles it.
  bool uncertain = false;
};

enum class PredictionMode { Sequential, Concurrent };
enum class PredictionBasis { ExactState, StalePossible };

std::string_view to_string(PredictionBasis basis);
PredictionBasis prediction_basis_from_string(std::string_view text);

/// Expected outcome of one exchange. Entries are exact codes ("404") or
/// classes ("2XX").
struct StatusPrediction {
  std::vector<std::string> expected;
  PredictionBasis basis = PredictionBasis::ExactState;
  std::string rationale;

  bool admits(int status) const;
  std::string expected_str() const;

  friend bool operator==(const StatusPrediction&, const StatusPrediction&) = default;
};

json to_json(const StatusPrediction& p);
StatusPrediction prediction_from_json(const json& j);

struct EffectDelta {
  std::uint64_t epoch = 0;
  bool changed = false;
  /// Set when a successful create carried no recognizable id.
  std::optional<std::string> id_extraction_failure;
};

/// (resource, id) pairs a plan reads or writes: the item target of
/// read/update/delete plus every referenced id.
std::vector<std::pair<std::string, std::string>> touched_instances(const RequestPlan& plan);

/// Internal state. Readers may run concurrently; mutations are serialized
/// and each one advances the epoch.
class StateStore {
 public:
  static constexpr std::size_t kDefaultCapacity = 10000;

  explicit StateStore(SemanticModel model, std::size_t capacity = kDefaultCapacity);
  StateStore(const StateStore&) = delete;
  StateStore& operator=(const StateStore&) = delete;

  EffectDelta apply_effect(const RequestPlan& plan, const HttpExchangeResult& result, std::uint64_t event_id);

  /// Ids of `resource` whose lifecycle is in `filter`, in insertion order.
  std::vector<std::string> query_ids(std::string_view resource, const std::set<Lifecycle>& filter) const;
  std::optional<ResourceInstance> find(std::string_view resource, std::string_view id) const;
  StatusPrediction predict_status(const RequestPlan& plan, PredictionMode mode) const;

  /// Inserts or replaces an instance directly (tests, seeding).
  void put(ResourceInstance instance);

  std::uint64_t epoch() const;
  std::size_t size() const;
  /// True once a live instance of `resource` has been evicted; unseen ids of
  /// that resource can no longer be assumed absent.
  bool evicted_live(std::string_view resource) const;
  /// Debug dump: {"epoch": n, "instances": [...]}, ordered by resource then
  /// insertion.
  json snapshot() const;

  const SemanticModel& model() const { return model_; }

 private:
  using Key = std::pair<std::string, std::string>;
  struct Entry {
    ResourceInstance instance;
    std::uint64_t seq = 0;
  };

  std::optional<std::string> extract_id(const std::string& resource, const json& body) const;
  bool upsert_locked(ResourceInstance instance, bool discovered);
  void evict_locked();
  void erase_locked(const Key& key);

  SemanticModel model_;
  std::size_t capacity_;
  mutable std::shared_mutex mu_;
  std::map<Key, Entry> entries_;
  /// resource -> (seq -> id), insertion order.
  std::map<std::string, std::map<std::uint64_t, std::string>, std::less<>> order_;
  std::set<std::pair<std::uint64_t, Key>> deleted_by_age_;
  std::set<std::pair<std::uint64_t, Key>> live_by_age_;
  std::set<std::string, std::less<>> evicted_live_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t epoch_ = 0;
};

/// Concurrent-mode widening: when another in-flight plan touches an instance
/// this plan touches (or creates an instance of a referenced resource), the
/// outcome may be either existence state. Invalid-value predictions are
/// left as they are.
StatusPrediction widen_prediction(const StatusPrediction& prediction, const RequestPlan& plan,
                                  const std::vector<const RequestPlan*>& overlapping);

}  // namespace restex
