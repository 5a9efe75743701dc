#ifndef RELNET_LOGIC_H_
#define RELNET_LOGIC_H_

// Typed relational vocabulary, ground atoms and the evidence store.
//
// Every predicate is binary. A predicate may be traversed backwards through
// its inverse, which is a distinct Predicate value with swapped argument
// types. Atoms over an inverse predicate are stored in canonical (forward)
// orientation, so P^-1(x, y) and P(y, x) denote the same fact.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace relnet {

using TypeId = std::uint32_t;
using PredId = std::uint32_t;
using ConstId = std::uint32_t;

inline constexpr std::string_view kInverseSuffix = "^-1";

struct Predicate {
  PredId id = 0;
  bool inverse = false;

  Predicate inverted() const { return {id, !inverse}; }

  friend auto operator<=>(const Predicate&, const Predicate&) = default;
};

struct PredicateDecl {
  std::string name;
  TypeId arg1_type;
  TypeId arg2_type;
};

struct Atom {
  Predicate pred;
  ConstId arg1 = 0;
  ConstId arg2 = 0;

  // Same fact expressed over the forward predicate.
  Atom canonical() const {
    return pred.inverse ? Atom{pred.inverted(), arg2, arg1} : *this;
  }

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct AtomHash {
  std::size_t operator()(const Atom& a) const {
    std::uint64_t h = (std::uint64_t{a.pred.id} << 1) | a.pred.inverse;
    h = h * 0x9e3779b97f4a7c15ULL ^ a.arg1;
    h = h * 0x9e3779b97f4a7c15ULL ^ a.arg2;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Types, declared predicates and interned constants. A constant is
/// identified by (type, symbol); the same symbol may name constants of
/// different types.
class Vocabulary {
 public:
  // Idempotent. Throws TypeError on an empty name.
  TypeId add_type(std::string_view name);
  std::optional<TypeId> find_type(std::string_view name) const;
  const std::string& type_name(TypeId t) const { return types_.at(t); }
  std::size_t num_types() const { return types_.size(); }

  // Redeclaring a predicate with identical types returns the existing id;
  // conflicting types throw TypeError.
  PredId declare(std::string_view name, TypeId arg1_type, TypeId arg2_type);
  std::optional<PredId> find_predicate(std::string_view name) const;
  const PredicateDecl& decl(PredId p) const { return preds_.at(p); }
  std::size_t num_predicates() const { return preds_.size(); }
  bool is_declared(Predicate p) const { return p.id < preds_.size(); }

  TypeId domain(Predicate p) const {
    const auto& d = preds_.at(p.id);
    return p.inverse ? d.arg2_type : d.arg1_type;
  }
  TypeId range(Predicate p) const {
    const auto& d = preds_.at(p.id);
    return p.inverse ? d.arg1_type : d.arg2_type;
  }

  // "actedin" or "actedin^-1".
  std::string predicate_name(Predicate p) const;
  std::optional<Predicate> parse_predicate(std::string_view text) const;

  ConstId intern(TypeId type, std::string_view symbol);
  std::optional<ConstId> find_constant(TypeId type, std::string_view symbol) const;
  const std::string& symbol(ConstId c) const { return constants_.at(c).symbol; }
  TypeId type_of(ConstId c) const { return constants_.at(c).type; }
  std::size_t num_constants() const { return constants_.size(); }
  // Constants of one type in interning order.
  std::span<const ConstId> constants_of(TypeId type) const;

  std::string atom_to_string(const Atom& atom) const;

 private:
  struct ConstantInfo {
    std::string symbol;
    TypeId type;
  };

  std::vector<std::string> types_;
  std::map<std::string, TypeId, std::less<>> type_index_;
  std::vector<PredicateDecl> preds_;
  std::map<std::string, PredId, std::less<>> pred_index_;
  std::vector<ConstantInfo> constants_;
  std::map<std::pair<TypeId, std::string>, ConstId> const_index_;
  std::vector<std::vector<ConstId>> by_type_;
};

/// The evidence: a set of ground binary atoms, indexed by (predicate, first
/// argument) in both directions. Facts are Boolean; presence means true.
///
/// Built single-threaded; all const member functions are safe to call
/// concurrently once construction has finished.
class FactStore {
 public:
  FactStore() = default;
  explicit FactStore(Vocabulary vocab) : vocab_(std::move(vocab)) {}

  Vocabulary& vocab() { return vocab_; }
  const Vocabulary& vocab() const { return vocab_; }

  // Returns true when the fact was new. Throws TypeError for an undeclared
  // predicate or when an argument's type does not match the declaration.
  bool add_fact(const Atom& atom);

  bool contains(const Atom& atom) const;

  // { z : pred(c, z) is a fact }, sorted by constant id. Throws TypeError when
  // c is not of the predicate's domain type.
  std::span<const ConstId> successors(Predicate pred, ConstId c) const;

  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }
  // Canonical atoms in insertion order.
  const std::vector<Atom>& facts() const { return facts_; }

 private:
  static std::uint64_t key(PredId p, ConstId c) {
    return (std::uint64_t{p} << 32) | c;
  }
  void check_types(const Atom& atom) const;

  Vocabulary vocab_;
  std::vector<Atom> facts_;
  std::unordered_set<Atom, AtomHash> fact_set_;
  std::unordered_map<std::uint64_t, std::vector<ConstId>> forward_;
  std::unordered_map<std::uint64_t, std::vector<ConstId>> backward_;
};

// Binarization of unary and ternary relations.

inline constexpr std::string_view kBoolTypeName = "BoolVal";
inline constexpr std::string_view kTrueSymbol = "true";

struct RawDecl {
  std::string name;
  std::vector<std::string> arg_types;
};

struct RawAtom {
  std::string name;
  std::vector<std::string> args;
  int line = 0;  // source line, 0 when not from a file
};

struct RawDatabase {
  std::vector<RawDecl> decls;
  std::vector<RawAtom> facts;
  // Binary atoms whose constants are interned but which are not added as
  // evidence (labeled examples of the target).
  std::vector<RawAtom> queries;
};

// Names of the binary predicates a declaration of the given arity maps to.
std::vector<std::string> binarized_names(const std::string& name, std::size_t arity);

/// Builds a store containing only binary predicates:
///   Q(a)       -> Q(a, true), with `true` the single constant of BoolVal
///   R(a, b, c) -> R_12(a, b), R_13(a, c), R_23(b, c)
/// Binary declarations and facts pass through. Constants are interned in
/// sorted (type name, symbol) order and facts are inserted in sorted order,
/// so the resulting ids do not depend on input line order.
FactStore binarize(const RawDatabase& db);

}  // namespace relnet

#endif  // RELNET_LOGIC_H_
