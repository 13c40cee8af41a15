#pragma once

#include <cstdint>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "restex/checker.hpp"
#include "restex/model.hpp"
#include "restex/plan.hpp"
#include "restex/state.hpp"

namespace restex {

inline constexpr int kTraceVersion = 1;

/// One completed exchange.
struct TraceEvent {
  std::uint64_t event_id = 0;
  RequestPlan plan;
  HttpExchangeResult response;
  StatusPrediction prediction;
  std::vector<Finding> findings;
  /// Logical clock readings at dispatch and completion; event i happened
  /// before event j when i.completion_epoch < j.dispatch_epoch.
  std::uint64_t dispatch_epoch = 0;
  std::uint64_t completion_epoch = 0;
};

json to_json(const TraceEvent& e);
TraceEvent trace_event_from_json(const json& j);

/// Header line of a trace file: version, the API it was run against and the
/// run settings needed to replay it.
json make_trace_header(const ApiSpecIR& spec, const SemanticModel& model, const json& run_settings = json::object());

/// Append-only event sink. record() is serialized by the caller or the sink.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  /// Event ids must arrive as 1, 2, 3, ... Throws SinkWriteError when the
  /// event cannot be stored.
  virtual void record(const TraceEvent& event) = 0;
  virtual std::string ref() const = 0;
};

/// JSON Lines file: header line, then one event per line, flushed per event.
class FileTraceSink : public TraceSink {
 public:
  FileTraceSink(std::string path, const json& header);
  void record(const TraceEvent& event) override;
  std::string ref() const override { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::uint64_t last_ = 0;
  std::mutex mu_;
};

class MemoryTraceSink : public TraceSink {
 public:
  void record(const TraceEvent& event) override;
  std::string ref() const override { return "memory"; }
  std::vector<TraceEvent> events() const;

 private:
  mutable std::mutex mu_;
  std::vector<TraceEvent> events_;
};

/// Counts events and keeps only those that carry findings; for long runs.
class CountingTraceSink : public TraceSink {
 public:
  void record(const TraceEvent& event) override;
  std::string ref() const override { return "counting"; }
  std::uint64_t count() const;
  std::vector<TraceEvent> with_findings() const;

 private:
  mutable std::mutex mu_;
  std::uint64_t count_ = 0;
  std::vector<TraceEvent> kept_;
};

struct Trace {
  json header;
  std::vector<TraceEvent> events;

  const TraceEvent* find(std::uint64_t event_id) const;
};

/// Reads a trace file. Throws ScriptFormatError on malformed content.
Trace read_trace(const std::string& path);

}  // namespace restex
