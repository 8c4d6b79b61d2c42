#include "cacesim/engine.hpp"

#include <deque>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace cacesim {

using ordered_json = nlohmann::ordered_json;

std::pair<double, double> service_times(const Request& request,
                                        const ModelDescriptor& descriptor) {
  if (descriptor.prefill_rate_tps <= 0 || descriptor.decode_rate_tps <= 0) {
    throw SimError("service_times: rates must be positive for " +
                   descriptor.model_id);
  }
  const double prefill =
      static_cast<double>(request.prompt_tokens) / descriptor.prefill_rate_tps;
  const double decode = static_cast<double>(std::max(request.output_tokens, 1)) /
                        descriptor.decode_rate_tps;
  return {prefill, decode};
}

LookaheadWindow snapshot_window(const std::vector<std::string>& pending_model_ids,
                                int window_length) {
  return dedup_window(pending_model_ids, window_length);
}

namespace {

enum class EventKind : int {
  LoadComplete = 0,
  ServiceComplete = 1,
  Arrival = 2,
};

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Arrival;
  std::uint64_t seq = 0;
  std::size_t request_index = 0;  // Arrival / ServiceComplete
  std::string model_id;           // LoadComplete / ServiceComplete
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    return a.seq > b.seq;
  }
};

enum class ModelState : int { Loading, Idle, Busy };

struct Resident {
  ModelState state = ModelState::Loading;
  double last_used_s = 0.0;
};

std::uint64_t run_config_hash(const ClusterConfig& cluster,
                              const PolicyConfig& cfg) {
  std::ostringstream ss;
  ss << cluster.num_accelerators << '|' << cluster.models_per_accelerator
     << '|' << cluster.unload_time_s << '|' << to_string(cfg.variant) << '|'
     << cfg.w1 << '|' << cfg.window_length << '|'
     << cfg.output_token_normalizer << '|' << to_string(cfg.p1_mode);
  return fnv1a(ss.str());
}

}  // namespace

SimulationReport run(const Trace& trace, const ModelCatalog& catalog,
                     const ClusterConfig& cluster, const Policy& policy) {
  const PolicyConfig& cfg = policy.config();
  if (cfg.window_length < 1) throw SimError("run: window_length must be >= 1");
  if (cluster.num_accelerators < 1) {
    throw SimError("run: need at least one accelerator");
  }
  const int capacity =
      cluster.num_accelerators * cluster.models_per_accelerator;

  // Resolve every request up front; propagates lookup failures early.
  const std::size_t n = trace.requests.size();
  std::vector<const ModelDescriptor*> model_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    model_of[i] =
        &catalog.lookup(trace.requests[i].language, trace.requests[i].task_class);
  }

  SimulationReport report;
  report.meta.variant = cfg.variant;
  report.meta.seed = trace.seed;
  report.meta.pattern = trace.pattern;
  report.meta.config_hash = run_config_hash(cluster, cfg);
  report.outcomes.resize(n);

  std::priority_queue<Event, std::vector<Event>, EventAfter> events;
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    events.push(Event{trace.requests[i].arrival_time_s, EventKind::Arrival,
                      seq++, i, {}});
  }

  std::deque<std::size_t> pending;
  std::map<std::string, Resident> residents;
  std::vector<char> classified(n, 0);
  std::vector<char> served(n, 0);
  std::vector<double> load_wait(n, 0.0);
  std::size_t served_count = 0;

  auto check_residency = [&]() {
    report.max_resident =
        std::max(report.max_resident, static_cast<int>(residents.size()));
    if (static_cast<int>(residents.size()) > capacity) {
      throw SimError("run: residency bound violated");
    }
  };

  auto start_load = [&](std::size_t req, double now, double unload_delay) {
    const ModelDescriptor& m = *model_of[req];
    residents[m.model_id] = Resident{ModelState::Loading, now};
    check_residency();
    const double ready = now + unload_delay + m.load_time_s;
    load_wait[req] = ready - now;
    report.counters.load_overhead_s += m.load_time_s;
    report.loads += 1;
    events.push(Event{ready, EventKind::LoadComplete, seq++, req, m.model_id});
  };

  auto start_service = [&](std::size_t req, double now) {
    const Request& r = trace.requests[req];
    const ModelDescriptor& m = *model_of[req];
    auto [prefill, decode] = service_times(r, m);
    residents[m.model_id].state = ModelState::Busy;
    RequestOutcome& o = report.outcomes[req];
    o.request_id = r.request_id;
    o.model_id = m.model_id;
    o.task_class = r.task_class;
    o.load_wait_s = load_wait[req];
    o.queue_wait_s = (now - r.arrival_time_s) - o.load_wait_s;
    o.prefill_s = prefill;
    o.decode_s = decode;
    o.ttft_s = (now - r.arrival_time_s) + prefill;
    o.e2e_s = o.ttft_s + decode;
    served[req] = 1;
    served_count += 1;
    events.push(Event{now + prefill + decode, EventKind::ServiceComplete, seq++,
                      req, m.model_id});
  };

  // Head-of-line FIFO dispatch: only the head of the pending queue is
  // considered; it blocks everything behind it while waiting.
  auto dispatch = [&](double now) {
    while (!pending.empty()) {
      const std::size_t req = pending.front();
      const ModelDescriptor& m = *model_of[req];
      auto it = residents.find(m.model_id);

      if (!classified[req]) {
        classified[req] = 1;
        // Resident (idle or busy) at the first dispatch attempt is a hit;
        // a load in flight can only have been started by this request.
        if (it != residents.end() && it->second.state != ModelState::Loading) {
          report.counters.hits += 1;
        } else {
          report.counters.misses += 1;
          report.outcomes[req].cold_start = true;
        }
      }

      if (it != residents.end()) {
        if (it->second.state == ModelState::Idle) {
          pending.pop_front();
          start_service(req, now);
          continue;
        }
        break;  // busy or still loading
      }

      if (static_cast<int>(residents.size()) < capacity) {
        start_load(req, now, 0.0);
        break;
      }

      std::vector<std::string> pending_ids;
      const std::size_t limit = std::min(
          pending.size(), static_cast<std::size_t>(cfg.window_length));
      for (std::size_t k = 0; k < limit; ++k) {
        pending_ids.push_back(model_of[pending[k]]->model_id);
      }
      LookaheadWindow window = snapshot_window(pending_ids, cfg.window_length);

      ResidencySet residency;
      residency.capacity = capacity;
      for (const auto& [id, res] : residents) {
        residency.entries.push_back(
            ResidencyEntry{id, res.last_used_s, res.state != ModelState::Idle});
      }
      auto victim = policy.select_victim(residency, window, catalog, now);
      if (!victim) break;  // everything busy; wait for a completion
      residents.erase(*victim);
      report.counters.evictions += 1;
      start_load(req, now, cluster.unload_time_s);
      break;
    }
  };

  while (!events.empty()) {
    Event ev = events.top();
    events.pop();
    switch (ev.kind) {
      case EventKind::Arrival:
        pending.push_back(ev.request_index);
        break;
      case EventKind::LoadComplete: {
        auto& res = residents.at(ev.model_id);
        res.state = ModelState::Idle;
        res.last_used_s = ev.time;
        break;
      }
      case EventKind::ServiceComplete: {
        auto& res = residents.at(ev.model_id);
        res.state = ModelState::Idle;
        res.last_used_s = ev.time;
        break;
      }
    }
    dispatch(ev.time);
  }

  if (!pending.empty() || served_count != n) {
    throw SimError("run: deadlock — pending requests with no schedulable event");
  }
  return report;
}

std::string serialize_report(const SimulationReport& report) {
  ordered_json doc;
  doc["report_version"] = 1;
  doc["run_meta"] = {{"variant", to_string(report.meta.variant)},
                     {"seed", report.meta.seed},
                     {"pattern", to_string(report.meta.pattern)},
                     {"config_hash", report.meta.config_hash}};
  doc["counters"] = {{"hits", report.counters.hits},
                     {"misses", report.counters.misses},
                     {"evictions", report.counters.evictions},
                     {"load_overhead_s", report.counters.load_overhead_s},
                     {"loads", report.loads},
                     {"max_resident", report.max_resident}};
  ordered_json outcomes = ordered_json::array();
  for (const auto& o : report.outcomes) {
    outcomes.push_back({{"request_id", o.request_id},
                        {"model_id", o.model_id},
                        {"task_class", to_string(o.task_class)},
                        {"cold_start", o.cold_start},
                        {"queue_wait_s", o.queue_wait_s},
                        {"load_wait_s", o.load_wait_s},
                        {"prefill_s", o.prefill_s},
                        {"decode_s", o.decode_s},
                        {"ttft_s", o.ttft_s},
                        {"e2e_s", o.e2e_s}});
  }
  doc["outcomes"] = std::move(outcomes);
  return doc.dump(2) + "\n";
}

void save_report(const SimulationReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("report: cannot open for writing: " + path);
  out << serialize_report(report);
}

}  // namespace cacesim
