#pragma once

// Sequential reference execution: pop an element, get its relations, perform
// the operation, push the results. Runs until no element is left.

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_set>

#include "aridem/work.hpp"

namespace aridem {

enum class QueueDiscipline { kFifo, kLifo };
enum class StepStatus { kProgressed, kQuiescent };

struct TraceEvent {
  enum class Kind { kPop, kStore, kApply, kCreate, kResult };
  Kind kind;
  const Element* element = nullptr;
  const Relation* relation = nullptr;
};

using TraceFn = std::function<void(const TraceEvent&)>;

struct RunOptions {
  QueueDiscipline discipline = QueueDiscipline::kFifo;
  TraceFn trace;
};

struct RunResult {
  Outputs outputs;
  std::uint64_t elements_processed = 0;
  std::uint64_t elements_created = 0;
  std::size_t max_queue_depth = 0;
  std::size_t max_partial_depth = 0;
};

namespace detail {

struct LiveKey {
  Identifier identifier;
  IndexList indices;
  friend bool operator==(const LiveKey&, const LiveKey&) = default;
};

struct LiveKeyHash {
  std::size_t operator()(const LiveKey& k) const noexcept {
    std::size_t h = IndexListHash{}(k.indices);
    boost::hash_combine(h, k.identifier.value);
    return h;
  }
};

}  // namespace detail

class DeductionEngine {
 public:
  explicit DeductionEngine(const Program& program, RunOptions options = {})
      : program_(program), options_(std::move(options)) {
    for (const Element& e : program_.initial_elements) push(e);
  }

  StepStatus step() {
    if (queue_.empty()) return StepStatus::kQuiescent;

    Element element;
    if (options_.discipline == QueueDiscipline::kFifo) {
      element = std::move(queue_.front());
      queue_.pop_front();
    } else {
      element = std::move(queue_.back());
      queue_.pop_back();
    }
    live_.erase({element.identifier, element.indices});
    ++result_.elements_processed;
    emit(TraceEvent::Kind::kPop, &element);

    units_.clear();
    const std::size_t partials_before = partials_.size();
    const Element popped = options_.trace ? element : Element{};
    expand(program_, std::move(element), partials_, units_);
    if (partials_.size() > partials_before) emit(TraceEvent::Kind::kStore, &popped);
    result_.max_partial_depth = std::max(result_.max_partial_depth, partials_.size());

    for (const WorkUnit& unit : units_) {
      emit(TraceEvent::Kind::kApply, &unit.left, unit.relation);
      UnitOutcome outcome = execute(program_, unit);
      if (outcome.result) {
        const Element out{program_.result_identifier, outcome.result->first, outcome.result->second};
        emit(TraceEvent::Kind::kResult, &out, unit.relation);
        record_output(result_.outputs, program_, std::move(outcome.result->first),
                      outcome.result->second);
      }
      for (Element& e : outcome.created) {
        emit(TraceEvent::Kind::kCreate, &e, unit.relation);
        push(std::move(e));
      }
    }
    return StepStatus::kProgressed;
  }

  const RunResult& result() const { return result_; }
  const PartialStore& partials() const { return partials_; }
  std::size_t queue_depth() const { return queue_.size(); }

 private:
  void push(Element e) {
    if (!live_.insert({e.identifier, e.indices}).second) {
      throw Error(ErrorKind::kDuplicateElement, program_.describe(e) + " is already live");
    }
    queue_.push_back(std::move(e));
    ++result_.elements_created;
    result_.max_queue_depth = std::max(result_.max_queue_depth, queue_.size());
  }

  void emit(TraceEvent::Kind kind, const Element* e, const Relation* r = nullptr) const {
    if (options_.trace) options_.trace(TraceEvent{kind, e, r});
  }

  const Program& program_;
  RunOptions options_;
  std::deque<Element> queue_;
  PartialStore partials_;
  std::unordered_set<detail::LiveKey, detail::LiveKeyHash> live_;
  std::vector<WorkUnit> units_;
  RunResult result_;
};

// Runs to quiescence. Partial elements left over mean a join never found its
// partner, which is an encoding bug.
inline RunResult run(const Program& program, RunOptions options = {}) {
  DeductionEngine engine(program, std::move(options));
  while (engine.step() == StepStatus::kProgressed) {
  }
  if (!engine.partials().empty()) {
    throw Error(ErrorKind::kDeadlockedJoin,
                std::to_string(engine.partials().size()) + " partial elements left at quiescence");
  }
  return engine.result();
}

}  // namespace aridem
