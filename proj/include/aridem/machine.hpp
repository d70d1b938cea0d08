#pragma once

// Discrete-event model of the master-worker element machine.
//
// The master owns the unprocessed queue and the partial store. Popping and
// pairing yield ready work units, which go one per message to an idle worker.
// A worker performs the operation and returns each deduced element as its own
// message (a unit that deduces nothing still sends one completion message).
// The master treats a worker as busy until that return arrives.
//
// Time is integral so that metrics are bit-identical across platforms.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <vector>

#include "aridem/work.hpp"

namespace aridem {

using SimTime = std::uint64_t;

enum class DispatchPolicy { kLowestIdle, kRoundRobin };

struct MachineConfig {
  std::uint32_t workers = 1;
  std::uint64_t rng_seed = 0;  // recorded with results; the schedule itself draws no randomness
  DispatchPolicy dispatch = DispatchPolicy::kLowestIdle;
  std::uint64_t max_events = 1'000'000'000;
};

struct CostModel {
  SimTime t_proc = 1;
  SimTime t_msg = 10;
  SimTime t_master = 0;

  void validate() const {
    if (t_proc == 0 && t_msg == 0 && t_master == 0) {
      throw Error(ErrorKind::kInvalidArgument, "cost model must have at least one nonzero cost");
    }
  }
};

struct Metrics {
  std::uint64_t elements_processed = 0;
  std::uint64_t messages = 0;
  SimTime sim_time = 0;
  SimTime idle_time_total = 0;
  std::vector<std::uint64_t> per_worker_processed;
  std::vector<SimTime> per_worker_busy;
  std::uint32_t result_checksum = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct SimulationResult {
  Metrics metrics;
  Outputs outputs;
};

// Checks the Metrics invariants; throws on violation.
inline void validate_metrics(const Metrics& m) {
  const std::uint64_t processed =
      std::accumulate(m.per_worker_processed.begin(), m.per_worker_processed.end(), std::uint64_t{0});
  if (processed != m.elements_processed) {
    throw Error(ErrorKind::kInvalidArgument, "per-worker counts do not sum to elements_processed");
  }
  const SimTime busy =
      std::accumulate(m.per_worker_busy.begin(), m.per_worker_busy.end(), SimTime{0});
  const auto p = m.per_worker_busy.size();
  if (p == 0 || m.per_worker_processed.size() != p) {
    throw Error(ErrorKind::kInvalidArgument, "per-worker vectors malformed");
  }
  if (m.sim_time * p < busy) {
    throw Error(ErrorKind::kInvalidArgument, "sim_time below busy time / workers");
  }
}

// max per-worker busy time over the mean. Falls back to per-worker counts
// when no time was spent computing (t_proc = 0).
inline double worker_busy_profile(const Metrics& m) {
  if (m.elements_processed == 0) {
    throw Error(ErrorKind::kInvalidArgument, "imbalance undefined for zero processed elements");
  }
  auto ratio = [](const auto& loads) {
    const double total = std::accumulate(loads.begin(), loads.end(), 0.0);
    const double peak = static_cast<double>(*std::max_element(loads.begin(), loads.end()));
    return peak * static_cast<double>(loads.size()) / total;
  };
  const bool any_busy = std::any_of(m.per_worker_busy.begin(), m.per_worker_busy.end(),
                                    [](SimTime t) { return t > 0; });
  return any_busy ? ratio(m.per_worker_busy) : ratio(m.per_worker_processed);
}

// Master-side record of the schedule, for audits.
struct MasterEvent {
  enum class Kind { kDispatch, kArrival, kWait };
  Kind kind;
  SimTime time;
  std::uint32_t worker;       // kWait: unused
  std::size_t pending_units;  // after the event
  std::uint32_t idle_workers;
};

using MasterTraceFn = std::function<void(const MasterEvent&)>;

class MachineSimulator {
 public:
  MachineSimulator(const Program& program, MachineConfig machine, CostModel costs)
      : program_(program), machine_(machine), costs_(costs) {
    if (machine_.workers == 0) throw Error(ErrorKind::kInvalidArgument, "need at least one worker");
    costs_.validate();
    workers_.assign(machine_.workers, {});
    metrics_.per_worker_processed.assign(machine_.workers, 0);
    metrics_.per_worker_busy.assign(machine_.workers, 0);
    idle_count_ = machine_.workers;
  }

  void set_trace(MasterTraceFn fn) { trace_ = std::move(fn); }

  SimulationResult run() {
    for (const Element& e : program_.initial_elements) queue_.push_back(e);

    for (;;) {
      absorb_arrivals();
      drain_queue();
      if (!pending_.empty() && idle_count_ > 0) {
        dispatch();
        continue;
      }
      if (in_flight_.empty()) break;
      note(MasterEvent::Kind::kWait, 0);
      master_time_ = std::max(master_time_, in_flight_.top().time);
    }

    if (!partials_.empty()) {
      throw Error(ErrorKind::kDeadlockedJoin,
                  std::to_string(partials_.size()) + " partial elements left at quiescence");
    }
    for (std::uint32_t w = 0; w < machine_.workers; ++w) {
      metrics_.idle_time_total += last_completion_ - metrics_.per_worker_busy[w];
    }
    metrics_.result_checksum = checksum(outputs_);
    return {metrics_, std::move(outputs_)};
  }

 private:
  struct Arrival {
    SimTime time;
    std::uint32_t worker;
    std::uint64_t seq;
  };
  struct Later {
    bool operator()(const Arrival& a, const Arrival& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.worker != b.worker) return a.worker > b.worker;
      return a.seq > b.seq;
    }
  };
  struct WorkerState {
    bool idle = true;
  };

  void absorb_arrivals() {
    while (!in_flight_.empty() && in_flight_.top().time <= master_time_) {
      const Arrival top = in_flight_.top();
      in_flight_.pop();
      auto payload = payloads_.extract(top.seq);
      for (Element& e : payload.mapped()) queue_.push_back(std::move(e));
      const std::uint32_t w = top.worker;
      workers_[w].idle = true;
      ++idle_count_;
      count_event();
      note(MasterEvent::Kind::kArrival, w);
    }
  }

  void drain_queue() {
    while (!queue_.empty()) {
      Element e = std::move(queue_.front());
      queue_.pop_front();
      ++metrics_.elements_processed;
      scratch_.clear();
      expand(program_, std::move(e), partials_, scratch_);
      for (WorkUnit& u : scratch_) pending_.push_back(std::move(u));
    }
  }

  std::uint32_t choose_worker() {
    const std::uint32_t p = machine_.workers;
    const std::uint32_t start = machine_.dispatch == DispatchPolicy::kRoundRobin ? rr_cursor_ : 0;
    for (std::uint32_t k = 0; k < p; ++k) {
      const std::uint32_t w = (start + k) % p;
      if (workers_[w].idle) {
        rr_cursor_ = (w + 1) % p;
        return w;
      }
    }
    throw Error(ErrorKind::kInvalidArgument, "no idle worker");  // unreachable
  }

  void dispatch() {
    WorkUnit unit = std::move(pending_.front());
    pending_.pop_front();
    const std::uint32_t w = choose_worker();
    workers_[w].idle = false;
    --idle_count_;

    master_time_ += costs_.t_master;
    const SimTime finish = master_time_ + costs_.t_msg + costs_.t_proc;
    last_completion_ = std::max(last_completion_, finish);
    const SimTime arrival = finish + costs_.t_msg;
    metrics_.sim_time = std::max(metrics_.sim_time, arrival);

    UnitOutcome outcome = execute(program_, unit);
    if (outcome.result) {
      record_output(outputs_, program_, std::move(outcome.result->first), outcome.result->second);
    }
    metrics_.per_worker_processed[w] += unit.credited;
    metrics_.per_worker_busy[w] += costs_.t_proc;
    metrics_.messages += 1 + std::max<std::size_t>(1, outcome.created.size());

    payloads_.emplace(seq_, std::move(outcome.created));
    in_flight_.push({arrival, w, seq_++});
    count_event();
    note(MasterEvent::Kind::kDispatch, w);
  }

  void count_event() {
    if (++events_ > machine_.max_events) {
      throw Error(ErrorKind::kEventLimit, std::to_string(machine_.max_events) + " events");
    }
  }

  void note(MasterEvent::Kind kind, std::uint32_t worker) {
    if (trace_) trace_(MasterEvent{kind, master_time_, worker, pending_.size(), idle_count_});
  }

  const Program& program_;
  MachineConfig machine_;
  CostModel costs_;
  MasterTraceFn trace_;

  std::deque<Element> queue_;
  PartialStore partials_;
  std::deque<WorkUnit> pending_;
  std::vector<WorkUnit> scratch_;
  std::vector<WorkerState> workers_;
  std::uint32_t idle_count_ = 0;
  std::uint32_t rr_cursor_ = 0;
  std::priority_queue<Arrival, std::vector<Arrival>, Later> in_flight_;
  std::unordered_map<std::uint64_t, std::vector<Element>> payloads_;  // by Arrival::seq

  SimTime master_time_ = 0;
  SimTime last_completion_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t events_ = 0;
  Metrics metrics_;
  Outputs outputs_;
};

inline SimulationResult simulate(const Program& program, const MachineConfig& machine,
                                 const CostModel& costs) {
  return MachineSimulator(program, machine, costs).run();
}

}  // namespace aridem
