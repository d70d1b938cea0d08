#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aridem/element.hpp"

namespace aridem {

// Sink-collected results keyed by index list.
using Outputs = std::map<IndexList, Scalar>;

struct Program {
  RelationStore relations;
  std::vector<Element> initial_elements;
  std::vector<std::size_t> arities;  // indexed by identifier
  std::vector<std::string> names;    // indexed by identifier, for traces
  Identifier result_identifier;

  std::size_t arity(Identifier id) const { return arities.at(id.value); }
  bool declared(Identifier id) const { return id.value < arities.size(); }

  std::string describe(const Element& e) const {
    std::ostringstream os;
    os << (e.identifier.value < names.size() ? names[e.identifier.value]
                                              : "#" + std::to_string(e.identifier.value));
    if (!e.indices.empty()) {
      os << '(';
      for (std::size_t k = 0; k < e.indices.size(); ++k) os << (k ? "," : "") << e.indices[k];
      os << ')';
    }
    os << " = ";
    if (e.value.is_pair()) {
      os << '(' << e.value.pair().first << ", " << e.value.pair().second << ')';
    } else {
      os << e.value.scalar();
    }
    return os.str();
  }

  std::string name(Identifier id) const {
    return id.value < names.size() ? names[id.value] : "#" + std::to_string(id.value);
  }
};

// Checks every cross-relation rule: identifiers declared, index arities
// consistent through each transform, initial elements well-shaped, and at
// most one consumer for any identifier feeding a binary join.
inline void validate_program(const Program& p) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::kProgramConstruction, why); };
  auto require_declared = [&](Identifier id) {
    if (!p.declared(id)) fail("identifier " + std::to_string(id.value) + " has no registered arity");
  };

  require_declared(p.result_identifier);
  for (const Relation& r : p.relations.all()) {
    for (const Identifier in : r.input_identifiers) require_declared(in);
    require_declared(r.output_identifier);

    const std::size_t in_arity = p.arity(r.input_identifiers[0]);
    if (r.binary() && p.arity(r.input_identifiers[1]) != in_arity) {
      fail("binary relation " + std::to_string(r.id) + " joins operands of different arity");
    }
    if (r.operation == Operation::kSink) continue;

    const long out_arity = r.index_transform.output_arity(in_arity);
    if (out_arity < 0 || static_cast<std::size_t>(out_arity) != p.arity(r.output_identifier)) {
      fail("relation " + std::to_string(r.id) + " produces the wrong index arity for " +
           p.name(r.output_identifier));
    }
    if (r.operation == Operation::kSumStep) {
      require_declared(r.result_identifier());
      if (r.result_arity() > in_arity || p.arity(r.result_identifier()) != r.result_arity()) {
        fail("sumstep " + std::to_string(r.id) + " result arity mismatch");
      }
    }
  }

  for (std::uint32_t id = 0; id < p.arities.size(); ++id) {
    const auto rels = p.relations.lookup(Identifier{id});
    bool feeds_join = false;
    for (const RelationId rid : rels) feeds_join |= p.relations[rid].binary();
    if (feeds_join && rels.size() != 1) {
      fail("identifier " + p.name(Identifier{id}) + " feeds a join and must have no other relation");
    }
  }

  for (const Element& e : p.initial_elements) {
    require_declared(e.identifier);
    if (e.value.is_pair()) fail("initial element " + p.describe(e) + " carries a pair value");
    if (e.indices.size() != p.arity(e.identifier)) {
      fail("initial element " + p.describe(e) + " has the wrong index arity");
    }
  }
}

// Incremental construction; build() validates.
class ProgramBuilder {
 public:
  Identifier declare(std::string name, std::size_t arity) {
    Identifier id{static_cast<std::uint32_t>(program_.arities.size())};
    program_.arities.push_back(arity);
    program_.names.push_back(std::move(name));
    return id;
  }

  RelationId unary(Identifier in, Operation op, Identifier out,
                   IndexTransform transform = IndexTransform::keep(),
                   std::vector<std::int64_t> parameters = {}) {
    return program_.relations.add(Relation{0, {in}, op, std::move(parameters), out, transform});
  }

  RelationId sink(Identifier in) { return unary(in, Operation::kSink, in); }

  RelationId replicate(Identifier in, Identifier out, std::uint32_t position, std::uint32_t n) {
    return unary(in, Operation::kReplicate, out, IndexTransform::insert_varied(position, n),
                 {static_cast<std::int64_t>(n)});
  }

  RelationId mul_pair(Identifier left, Identifier right, Identifier out) {
    return program_.relations.add(
        Relation{0, {left, right}, Operation::kMulPair, {}, out, IndexTransform::keep()});
  }

  RelationId sum_step(Identifier acc, Identifier term, Identifier out, std::int64_t limit,
                      Identifier result, std::uint32_t result_arity) {
    return program_.relations.add(Relation{0,
                                           {acc, term},
                                           Operation::kSumStep,
                                           {limit, static_cast<std::int64_t>(result.value),
                                            static_cast<std::int64_t>(result_arity)},
                                           out,
                                           IndexTransform::increment_last()});
  }

  void element(Identifier id, IndexList indices, Scalar value) {
    program_.initial_elements.push_back({id, std::move(indices), value});
  }

  void result(Identifier id) { program_.result_identifier = id; }

  std::size_t element_count() const { return program_.initial_elements.size(); }
  void reserve_elements(std::size_t n) { program_.initial_elements.reserve(n); }

  Program build() && {
    validate_program(program_);
    return std::move(program_);
  }

 private:
  Program program_;
};

}  // namespace aridem
