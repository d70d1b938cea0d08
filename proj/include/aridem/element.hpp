#pragma once

// Elements, relations and the single-step deduction rules.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <boost/container_hash/hash.hpp>

#include "aridem/error.hpp"

namespace aridem {

struct Identifier {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(Identifier, Identifier) = default;
};

using IndexList = boost::container::small_vector<std::uint32_t, 4>;
using Scalar = std::int64_t;
using ScalarPair = std::pair<Scalar, Scalar>;

struct IndexListHash {
  std::size_t operator()(const IndexList& indices) const noexcept {
    return boost::hash_range(indices.begin(), indices.end());
  }
};

// One or two 64-bit values. Pairs only appear as the joined operand of a
// binary relation; anything on a queue holds a scalar.
class Value {
 public:
  Value() = default;
  Value(Scalar v) : data_(v) {}  // NOLINT(google-explicit-constructor)
  Value(Scalar left, Scalar right) : data_(ScalarPair{left, right}) {}

  bool is_pair() const noexcept { return std::holds_alternative<ScalarPair>(data_); }

  Scalar scalar() const {
    if (is_pair()) throw Error(ErrorKind::kProgramConstruction, "scalar requested from pair value");
    return std::get<Scalar>(data_);
  }

  const ScalarPair& pair() const {
    if (!is_pair()) throw Error(ErrorKind::kProgramConstruction, "pair requested from scalar value");
    return std::get<ScalarPair>(data_);
  }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  std::variant<Scalar, ScalarPair> data_{Scalar{0}};
};

struct Element {
  Identifier identifier;
  IndexList indices;
  Value value;

  friend bool operator==(const Element&, const Element&) = default;
};

enum class Operation { kNegate, kSquare, kReplicate, kMulPair, kSumStep, kSink };

inline std::string_view to_string(Operation op) {
  switch (op) {
    case Operation::kNegate: return "negate";
    case Operation::kSquare: return "square";
    case Operation::kReplicate: return "replicate";
    case Operation::kMulPair: return "mulpair";
    case Operation::kSumStep: return "sumstep";
    case Operation::kSink: return "sink";
  }
  return "?";
}

constexpr bool is_binary(Operation op) {
  return op == Operation::kMulPair || op == Operation::kSumStep;
}

// How output indices derive from the (shared) input index list.
struct IndexTransform {
  enum class Kind { kKeep, kDrop, kInsertVaried, kIncrementLast, kTruncateTo };

  Kind kind = Kind::kKeep;
  std::uint32_t position = 0;  // Drop, InsertVaried
  std::uint32_t count = 0;     // InsertVaried fan-out, TruncateTo length

  static IndexTransform keep() { return {}; }
  static IndexTransform drop(std::uint32_t pos) { return {Kind::kDrop, pos, 0}; }
  static IndexTransform insert_varied(std::uint32_t pos, std::uint32_t n) {
    return {Kind::kInsertVaried, pos, n};
  }
  static IndexTransform increment_last() { return {Kind::kIncrementLast, 0, 0}; }
  static IndexTransform truncate_to(std::uint32_t k) { return {Kind::kTruncateTo, 0, k}; }

  // Arity of the transformed list, or -1 when the transform does not apply
  // to lists of this arity.
  long output_arity(std::size_t input_arity) const {
    const auto in = static_cast<long>(input_arity);
    switch (kind) {
      case Kind::kKeep: return in;
      case Kind::kDrop: return position < input_arity ? in - 1 : -1;
      case Kind::kInsertVaried: return position <= input_arity ? in + 1 : -1;
      case Kind::kIncrementLast: return input_arity > 0 ? in : -1;
      case Kind::kTruncateTo: return count <= input_arity ? static_cast<long>(count) : -1;
    }
    return -1;
  }

  // Number of index lists produced per input list.
  std::size_t fan_out() const { return kind == Kind::kInsertVaried ? count : 1; }

  // Produces the `which`-th output list (which < fan_out()).
  IndexList apply(const IndexList& in, std::uint32_t which = 0) const {
    if (output_arity(in.size()) < 0) {
      throw Error(ErrorKind::kProgramConstruction, "index transform does not fit index arity");
    }
    IndexList out = in;
    switch (kind) {
      case Kind::kKeep:
        break;
      case Kind::kDrop:
        out.erase(out.begin() + position);
        break;
      case Kind::kInsertVaried:
        out.insert(out.begin() + position, which);
        break;
      case Kind::kIncrementLast:
        ++out.back();
        break;
      case Kind::kTruncateTo:
        out.resize(count);
        break;
    }
    return out;
  }

  friend bool operator==(const IndexTransform&, const IndexTransform&) = default;
};

using RelationId = std::uint32_t;

// A deduction rule. Parameter layout by operation:
//   Replicate: {fan_out}
//   SumStep:   {limit, result_identifier, result_arity}
//   others:    {}
struct Relation {
  RelationId id = 0;
  std::vector<Identifier> input_identifiers;
  Operation operation = Operation::kSink;
  std::vector<std::int64_t> parameters;
  Identifier output_identifier;
  IndexTransform index_transform;

  bool binary() const noexcept { return input_identifiers.size() == 2; }

  std::int64_t fan_out() const { return parameters.at(0); }
  std::int64_t limit() const { return parameters.at(0); }
  Identifier result_identifier() const {
    return Identifier{static_cast<std::uint32_t>(parameters.at(1))};
  }
  std::uint32_t result_arity() const { return static_cast<std::uint32_t>(parameters.at(2)); }
};

// Checks the structural rules of one relation in isolation.
inline void validate_relation(const Relation& r) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::kProgramConstruction,
                "relation " + std::to_string(r.id) + " (" + std::string(to_string(r.operation)) +
                    "): " + why);
  };
  const std::size_t arity = is_binary(r.operation) ? 2 : 1;
  if (r.input_identifiers.size() != arity) fail("wrong number of inputs");
  if (arity == 2 && r.input_identifiers[0] == r.input_identifiers[1]) {
    fail("binary relation inputs must be distinct identifiers");
  }
  switch (r.operation) {
    case Operation::kReplicate:
      if (r.parameters.size() != 1 || r.parameters[0] < 1) fail("needs one fan-out parameter >= 1");
      if (r.index_transform.kind != IndexTransform::Kind::kInsertVaried ||
          r.index_transform.count != static_cast<std::uint64_t>(r.parameters[0])) {
        fail("fan-out must be expressed as InsertVaried with matching count");
      }
      break;
    case Operation::kSumStep:
      if (r.parameters.size() != 3 || r.parameters[0] < 1) fail("needs {limit >= 1, result id, result arity}");
      if (r.parameters[1] < 0 || r.parameters[2] < 0) fail("negative result parameters");
      if (r.index_transform.kind != IndexTransform::Kind::kIncrementLast) {
        fail("accumulation must use IncrementLast");
      }
      break;
    default:
      if (!r.parameters.empty()) fail("takes no parameters");
      if (r.index_transform.kind == IndexTransform::Kind::kInsertVaried) {
        fail("only Replicate may fan out");
      }
      break;
  }
}

namespace detail {

inline Scalar checked_mul(Scalar a, Scalar b) {
  Scalar out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorKind::kOverflow, std::to_string(a) + " * " + std::to_string(b));
  }
  return out;
}

inline Scalar checked_add(Scalar a, Scalar b) {
  Scalar out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorKind::kOverflow, std::to_string(a) + " + " + std::to_string(b));
  }
  return out;
}

inline Scalar checked_neg(Scalar a) {
  Scalar out;
  if (__builtin_sub_overflow(Scalar{0}, a, &out)) {
    throw Error(ErrorKind::kOverflow, "-(" + std::to_string(a) + ")");
  }
  return out;
}

}  // namespace detail

// Applies one relation to its operands: a single element for unary
// relations, the (left, right) pair in input_identifiers order for binary
// ones. Pure; the result order is the fan-out order.
inline std::vector<Element> apply_relation(const Relation& relation,
                                           std::span<const Element> operands) {
  if (operands.size() != relation.input_identifiers.size()) {
    throw Error(ErrorKind::kProgramConstruction, "operand count does not match relation arity");
  }
  for (std::size_t k = 0; k < operands.size(); ++k) {
    if (operands[k].identifier != relation.input_identifiers[k]) {
      throw Error(ErrorKind::kProgramConstruction, "operand identifier does not match relation input");
    }
  }

  std::vector<Element> out;
  const auto& idx = operands[0].indices;

  if (relation.binary()) {
    if (operands[0].indices != operands[1].indices) {
      throw Error(ErrorKind::kProgramConstruction, "binary operands carry different index lists");
    }
    const Element joined{relation.input_identifiers[0], idx,
                         Value(operands[0].value.scalar(), operands[1].value.scalar())};
    const auto [l, r] = joined.value.pair();
    if (relation.operation == Operation::kMulPair) {
      out.push_back({relation.output_identifier, relation.index_transform.apply(idx),
                     detail::checked_mul(l, r)});
    } else {
      IndexList next = relation.index_transform.apply(idx);
      Identifier id = relation.output_identifier;
      if (static_cast<std::int64_t>(next.back()) == relation.limit()) {
        id = relation.result_identifier();
        next = IndexTransform::truncate_to(relation.result_arity()).apply(next);
      }
      out.push_back({id, std::move(next), detail::checked_add(l, r)});
    }
    return out;
  }

  const Scalar v = operands[0].value.scalar();
  switch (relation.operation) {
    case Operation::kNegate:
      out.push_back({relation.output_identifier, relation.index_transform.apply(idx),
                     detail::checked_neg(v)});
      break;
    case Operation::kSquare:
      out.push_back({relation.output_identifier, relation.index_transform.apply(idx),
                     detail::checked_mul(v, v)});
      break;
    case Operation::kReplicate: {
      const auto n = static_cast<std::uint32_t>(relation.fan_out());
      out.reserve(n);
      for (std::uint32_t j = 0; j < n; ++j) {
        out.push_back({relation.output_identifier, relation.index_transform.apply(idx, j), v});
      }
      break;
    }
    case Operation::kSink:
      break;
    default:
      throw Error(ErrorKind::kProgramConstruction, "binary operation applied to one operand");
  }
  return out;
}

// Relations indexed by their input identifiers. Identifiers are dense, so the
// index is a vector; unknown identifiers map to an empty list.
class RelationStore {
 public:
  RelationId add(Relation relation) {
    relation.id = static_cast<RelationId>(relations_.size());
    validate_relation(relation);
    for (const Identifier in : relation.input_identifiers) {
      if (by_input_.size() <= in.value) by_input_.resize(in.value + 1);
      by_input_[in.value].push_back(relation.id);
    }
    relations_.push_back(std::move(relation));
    return relations_.back().id;
  }

  std::span<const RelationId> lookup(Identifier identifier) const {
    if (identifier.value >= by_input_.size()) return {};
    return by_input_[identifier.value];
  }

  const Relation& operator[](RelationId id) const { return relations_.at(id); }
  std::span<const Relation> all() const { return relations_; }
  std::size_t size() const { return relations_.size(); }

 private:
  std::vector<Relation> relations_;
  std::vector<std::vector<RelationId>> by_input_;
};

// Convenience: the relations themselves rather than their ids.
inline std::vector<std::reference_wrapper<const Relation>> lookup_relations(
    const RelationStore& store, Identifier identifier) {
  std::vector<std::reference_wrapper<const Relation>> out;
  for (const RelationId id : store.lookup(identifier)) out.emplace_back(store[id]);
  return out;
}

struct Stored {};
struct MatchedPair {
  Element left;
  Element right;
};
using OfferResult = std::variant<Stored, MatchedPair>;

// First-arrived operands of binary relations, waiting for their partner.
// Keyed by (relation, full index list).
class PartialStore {
 public:
  OfferResult offer(const Relation& relation, Element element) {
    if (!relation.binary()) {
      throw Error(ErrorKind::kProgramConstruction, "offer on a unary relation");
    }
    const bool is_left = element.identifier == relation.input_identifiers[0];
    if (!is_left && element.identifier != relation.input_identifiers[1]) {
      throw Error(ErrorKind::kProgramConstruction, "element is not an operand of this relation");
    }
    auto& slots = by_relation_[relation.id];
    auto it = slots.find(element.indices);
    if (it == slots.end()) {
      IndexList key = element.indices;
      slots.emplace(std::move(key), std::move(element));
      ++size_;
      return Stored{};
    }
    if (it->second.identifier == element.identifier) {
      throw Error(ErrorKind::kDuplicateOperand,
                  "relation " + std::to_string(relation.id) + " already holds this operand");
    }
    Element partner = std::move(it->second);
    slots.erase(it);
    --size_;
    if (is_left) return MatchedPair{std::move(element), std::move(partner)};
    return MatchedPair{std::move(partner), std::move(element)};
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

 private:
  std::unordered_map<RelationId, std::unordered_map<IndexList, Element, IndexListHash>> by_relation_;
  std::size_t size_ = 0;
};

}  // namespace aridem

template <>
struct std::hash<aridem::Identifier> {
  std::size_t operator()(aridem::Identifier id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
