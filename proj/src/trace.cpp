#include "restex/trace.hpp"

#include <stdexcept>

#include "restex/errors.hpp"

namespace restex {

namespace {

void check_sequence(std::uint64_t& last, std::uint64_t id) {
  if (id != last + 1) {
    throw SinkWriteError("event " + std::to_string(id) + " out of sequence (expected " + std::to_string(last + 1) + ")");
  }
  last = id;
}

}  // namespace

json to_json(const TraceEvent& e) {
  json findings = json::array();
  for (const auto& f : e.findings) findings.push_back(to_json(f));
  return {{"event_id", e.event_id},
          {"plan", to_json(e.plan)},
          {"response", to_json(e.response)},
          {"prediction", to_json(e.prediction)},
          {"findings", std::move(findings)},
          {"dispatch_epoch", e.dispatch_epoch},
          {"completion_epoch", e.completion_epoch}};
}

TraceEvent trace_event_from_json(const json& j) {
  TraceEvent e;
  e.event_id = j.at("event_id").get<std::uint64_t>();
  e.plan = plan_from_json(j.at("plan"));
  e.response = result_from_json(j.at("response"));
  e.prediction = prediction_from_json(j.at("prediction"));
  for (const auto& f : j.at("findings")) e.findings.push_back(finding_from_json(f));
  e.dispatch_epoch = j.at("dispatch_epoch").get<std::uint64_t>();
  e.completion_epoch = j.at("completion_epoch").get<std::uint64_t>();
  return e;
}

json make_trace_header(const ApiSpecIR& spec, const SemanticModel& model, const json& run_settings) {
  return {{"trace_version", kTraceVersion},
          {"spec", canonical_document(spec)},
          {"base_path", spec.base_path()},
          {"model", model_to_json(model)},
          {"run", run_settings}};
}

FileTraceSink::FileTraceSink(std::string path, const json& header) : path_(std::move(path)) {
  out_.open(path_, std::ios::out | std::ios::trunc | std::ios::binary);
  if (!out_) throw SinkWriteError("cannot open trace file " + path_);
  out_ << header.dump() << '\n';
  out_.flush();
  if (!out_) throw SinkWriteError("cannot write trace file " + path_);
}

void FileTraceSink::record(const TraceEvent& event) {
  std::lock_guard lock(mu_);
  check_sequence(last_, event.event_id);
  out_ << to_json(event).dump() << '\n';
  out_.flush();
  if (!out_) throw SinkWriteError("write to " + path_ + " failed");
}

void MemoryTraceSink::record(const TraceEvent& event) {
  std::lock_guard lock(mu_);
  std::uint64_t last = events_.empty() ? 0 : events_.back().event_id;
  check_sequence(last, event.event_id);
  events_.push_back(event);
}

std::vector<TraceEvent> MemoryTraceSink::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

void CountingTraceSink::record(const TraceEvent& event) {
  std::lock_guard lock(mu_);
  check_sequence(count_, event.event_id);
  if (!event.findings.empty()) kept_.push_back(event);
}

std::uint64_t CountingTraceSink::count() const {
  std::lock_guard lock(mu_);
  return count_;
}

std::vector<TraceEvent> CountingTraceSink::with_findings() const {
  std::lock_guard lock(mu_);
  return kept_;
}

const TraceEvent* Trace::find(std::uint64_t event_id) const {
  for (const auto& e : events)
    if (e.event_id == event_id) return &e;
  return nullptr;
}

Trace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScriptFormatError("cannot open trace " + path);
  Trace t;
  std::string line;
  std::size_t lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto j = json::parse(line);
      if (lineno == 1) {
        if (j.value("trace_version", 0) != kTraceVersion) throw ScriptFormatError("unsupported trace version");
        t.header = std::move(j);
      } else {
        t.events.push_back(trace_event_from_json(j));
      }
    }
  } catch (const ScriptFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScriptFormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
  }
  if (t.header.is_null()) throw ScriptFormatError("empty trace " + path);
  return t;
}

}  // namespace restex
