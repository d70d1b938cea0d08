#pragma once

// Work units: what a popped element turns into once its relations are known.
// Unary relations yield one unit per relation; a binary relation yields a unit
// only when the partial store completes the pair. The sequential engine runs
// units immediately; the machine simulator ships them to workers.

#include <optional>
#include <vector>

#include "aridem/program.hpp"

namespace aridem {

struct WorkUnit {
  const Relation* relation = nullptr;  // null: element without relations, discarded
  Element left;
  std::optional<Element> right;
  std::uint32_t credited = 0;  // pops attributed to whoever executes the unit
};

struct UnitOutcome {
  std::vector<Element> created;
  std::optional<std::pair<IndexList, Scalar>> result;  // Sink on the result identifier
};

// Master side of one pop. Appends ready units to `out` in relation-store order.
inline void expand(const Program& program, Element element, PartialStore& partials,
                   std::vector<WorkUnit>& out) {
  const auto rels = program.relations.lookup(element.identifier);
  if (rels.empty()) {
    out.push_back({nullptr, std::move(element), std::nullopt, 1});
    return;
  }
  // validate_program guarantees a join input has exactly one relation.
  if (const Relation& first = program.relations[rels.front()]; first.binary()) {
    auto offered = partials.offer(first, std::move(element));
    if (auto* pair = std::get_if<MatchedPair>(&offered)) {
      out.push_back({&first, std::move(pair->left), std::move(pair->right), 2});
    }
    return;
  }
  for (std::size_t k = 0; k < rels.size(); ++k) {
    out.push_back({&program.relations[rels[k]], element, std::nullopt, k == 0 ? 1u : 0u});
  }
}

// Worker side: perform the unit's operation.
inline UnitOutcome execute(const Program& program, const WorkUnit& unit) {
  UnitOutcome outcome;
  if (unit.relation == nullptr) return outcome;
  const Relation& r = *unit.relation;

  if (r.operation == Operation::kSink) {
    if (unit.left.identifier == program.result_identifier) {
      outcome.result.emplace(unit.left.indices, unit.left.value.scalar());
    }
    return outcome;
  }

  if (unit.right) {
    const Element operands[2] = {unit.left, *unit.right};
    outcome.created = apply_relation(r, operands);
  } else {
    outcome.created = apply_relation(r, std::span<const Element>(&unit.left, 1));
  }
  for (const Element& e : outcome.created) {
    if (!program.declared(e.identifier) || e.indices.size() != program.arity(e.identifier)) {
      throw Error(ErrorKind::kProgramConstruction,
                  "deduced element " + program.describe(e) + " violates its registered arity");
    }
  }
  return outcome;
}

inline void record_output(Outputs& outputs, const Program& program, IndexList indices, Scalar value) {
  auto [it, inserted] = outputs.emplace(std::move(indices), value);
  if (!inserted) {
    throw Error(ErrorKind::kDuplicateResult,
                "result " + program.describe({program.result_identifier, it->first, it->second}) +
                    " collected twice");
  }
}

// Sum of output values modulo 2^32.
inline std::uint32_t checksum(const Outputs& outputs) {
  std::uint64_t sum = 0;
  for (const auto& [idx, v] : outputs) sum += static_cast<std::uint64_t>(v);
  return static_cast<std::uint32_t>(sum);
}

}  // namespace aridem
