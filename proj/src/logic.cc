#include "relnet/logic.h"

#include <algorithm>
#include <set>
#include <tuple>

#include "relnet/error.h"

namespace relnet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kType: return "type";
    case ErrorKind::kUndefinedMetric: return "undefined-metric";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kRuntime: return "runtime";
  }
  return "runtime";
}

ParseError::ParseError(const std::string& source, int line, int column,
                       const std::string& message)
    : Error(ErrorKind::kParse, source + ":" + std::to_string(line) + ":" +
                                   std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

TypeId Vocabulary::add_type(std::string_view name) {
  if (name.empty()) throw TypeError("type name must not be empty");
  if (auto it = type_index_.find(name); it != type_index_.end()) return it->second;
  const auto id = static_cast<TypeId>(types_.size());
  types_.emplace_back(name);
  type_index_.emplace(std::string(name), id);
  by_type_.emplace_back();
  return id;
}

std::optional<TypeId> Vocabulary::find_type(std::string_view name) const {
  if (auto it = type_index_.find(name); it != type_index_.end()) return it->second;
  return std::nullopt;
}

PredId Vocabulary::declare(std::string_view name, TypeId arg1_type, TypeId arg2_type) {
  if (name.empty()) throw TypeError("predicate name must not be empty");
  if (name.ends_with(kInverseSuffix)) {
    throw TypeError("predicate name '" + std::string(name) +
                    "' must not carry the inverse suffix");
  }
  if (arg1_type >= types_.size() || arg2_type >= types_.size()) {
    throw TypeError("predicate '" + std::string(name) + "' uses an unknown type");
  }
  if (auto it = pred_index_.find(name); it != pred_index_.end()) {
    const auto& d = preds_[it->second];
    if (d.arg1_type != arg1_type || d.arg2_type != arg2_type) {
      throw TypeError("predicate '" + std::string(name) +
                      "' redeclared with different argument types");
    }
    return it->second;
  }
  const auto id = static_cast<PredId>(preds_.size());
  preds_.push_back({std::string(name), arg1_type, arg2_type});
  pred_index_.emplace(std::string(name), id);
  return id;
}

std::optional<PredId> Vocabulary::find_predicate(std::string_view name) const {
  if (auto it = pred_index_.find(name); it != pred_index_.end()) return it->second;
  return std::nullopt;
}

std::string Vocabulary::predicate_name(Predicate p) const {
  std::string name = preds_.at(p.id).name;
  if (p.inverse) name += kInverseSuffix;
  return name;
}

std::optional<Predicate> Vocabulary::parse_predicate(std::string_view text) const {
  bool inverse = false;
  if (text.ends_with(kInverseSuffix)) {
    inverse = true;
    text.remove_suffix(kInverseSuffix.size());
  }
  auto id = find_predicate(text);
  if (!id) return std::nullopt;
  return Predicate{*id, inverse};
}

ConstId Vocabulary::intern(TypeId type, std::string_view symbol) {
  if (type >= types_.size()) throw TypeError("constant of unknown type");
  if (symbol.empty()) throw TypeError("constant symbol must not be empty");
  auto key = std::make_pair(type, std::string(symbol));
  if (auto it = const_index_.find(key); it != const_index_.end()) return it->second;
  const auto id = static_cast<ConstId>(constants_.size());
  constants_.push_back({key.second, type});
  const_index_.emplace(std::move(key), id);
  by_type_[type].push_back(id);
  return id;
}

std::optional<ConstId> Vocabulary::find_constant(TypeId type,
                                                 std::string_view symbol) const {
  auto it = const_index_.find(std::make_pair(type, std::string(symbol)));
  if (it == const_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const ConstId> Vocabulary::constants_of(TypeId type) const {
  if (type >= by_type_.size()) return {};
  return by_type_[type];
}

std::string Vocabulary::atom_to_string(const Atom& atom) const {
  return predicate_name(atom.pred) + "(" + symbol(atom.arg1) + "," +
         symbol(atom.arg2) + ")";
}

void FactStore::check_types(const Atom& atom) const {
  if (!vocab_.is_declared(atom.pred)) {
    throw TypeError("undeclared predicate in atom with predicate id " +
                    std::to_string(atom.pred.id));
  }
  if (atom.arg1 >= vocab_.num_constants() || atom.arg2 >= vocab_.num_constants()) {
    throw TypeError("atom over " + vocab_.predicate_name(atom.pred) +
                    " references an unknown constant");
  }
  if (vocab_.type_of(atom.arg1) != vocab_.domain(atom.pred) ||
      vocab_.type_of(atom.arg2) != vocab_.range(atom.pred)) {
    throw TypeError("type mismatch in " + vocab_.atom_to_string(atom) + ": expected (" +
                    vocab_.type_name(vocab_.domain(atom.pred)) + "," +
                    vocab_.type_name(vocab_.range(atom.pred)) + "), got (" +
                    vocab_.type_name(vocab_.type_of(atom.arg1)) + "," +
                    vocab_.type_name(vocab_.type_of(atom.arg2)) + ")");
  }
}

namespace {

void insert_sorted(std::vector<ConstId>& v, ConstId c) {
  auto it = std::lower_bound(v.begin(), v.end(), c);
  if (it == v.end() || *it != c) v.insert(it, c);
}

}  // namespace

bool FactStore::add_fact(const Atom& atom) {
  check_types(atom);
  const Atom fact = atom.canonical();
  if (!fact_set_.insert(fact).second) return false;
  facts_.push_back(fact);
  insert_sorted(forward_[key(fact.pred.id, fact.arg1)], fact.arg2);
  insert_sorted(backward_[key(fact.pred.id, fact.arg2)], fact.arg1);
  return true;
}

bool FactStore::contains(const Atom& atom) const {
  return fact_set_.contains(atom.canonical());
}

std::span<const ConstId> FactStore::successors(Predicate pred, ConstId c) const {
  if (!vocab_.is_declared(pred)) throw TypeError("successors of undeclared predicate");
  if (c >= vocab_.num_constants() || vocab_.type_of(c) != vocab_.domain(pred)) {
    throw TypeError("successors(" + vocab_.predicate_name(pred) +
                    "): constant is not of type " +
                    vocab_.type_name(vocab_.domain(pred)));
  }
  const auto& index = pred.inverse ? backward_ : forward_;
  auto it = index.find(key(pred.id, c));
  if (it == index.end()) return {};
  return it->second;
}

std::vector<std::string> binarized_names(const std::string& name, std::size_t arity) {
  switch (arity) {
    case 1:
    case 2:
      return {name};
    case 3:
      return {name + "_12", name + "_13", name + "_23"};
    default:
      throw TypeError("predicate '" + name + "' has unsupported arity " +
                      std::to_string(arity));
  }
}

namespace {

// Binary projections of a raw tuple: (position pairs) matching binarized_names.
std::vector<std::pair<std::size_t, std::size_t>> projections(std::size_t arity) {
  if (arity == 3) return {{0, 1}, {0, 2}, {1, 2}};
  return {{0, 1}};
}

}  // namespace

FactStore binarize(const RawDatabase& db) {
  Vocabulary vocab;

  // Declarations, in file order.
  std::map<std::string, std::vector<std::string>, std::less<>> arg_types;
  bool needs_bool = false;
  for (const auto& d : db.decls) {
    if (d.arg_types.empty() || d.arg_types.size() > 3) {
      throw TypeError("predicate '" + d.name + "' has unsupported arity " +
                      std::to_string(d.arg_types.size()));
    }
    if (auto it = arg_types.find(d.name); it != arg_types.end() && it->second != d.arg_types) {
      throw TypeError("predicate '" + d.name + "' redeclared with different argument types");
    }
    arg_types[d.name] = d.arg_types;
    if (d.arg_types.size() == 1) needs_bool = true;
  }
  for (const auto& d : db.decls) {
    for (const auto& t : d.arg_types) vocab.add_type(t);
  }
  if (needs_bool) vocab.add_type(kBoolTypeName);
  for (const auto& d : db.decls) {
    const auto names = binarized_names(d.name, d.arg_types.size());
    const auto proj = projections(d.arg_types.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (d.arg_types.size() == 1) {
        vocab.declare(names[i], *vocab.find_type(d.arg_types[0]),
                      *vocab.find_type(kBoolTypeName));
      } else {
        vocab.declare(names[i], *vocab.find_type(d.arg_types[proj[i].first]),
                      *vocab.find_type(d.arg_types[proj[i].second]));
      }
    }
  }

  auto describe = [](const RawAtom& a) {
    std::string s = a.name + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) s += ",";
      s += a.args[i];
    }
    s += ")";
    if (a.line > 0) s += " at line " + std::to_string(a.line);
    return s;
  };

  // Resolve every raw atom into binary (type, symbol) triples.
  struct Pending {
    std::string pred;
    std::pair<std::string, std::string> left;   // (type, symbol)
    std::pair<std::string, std::string> right;
  };
  std::vector<Pending> pending;
  std::set<std::pair<std::string, std::string>> constants;

  auto resolve = [&](const RawAtom& a, bool is_fact) {
    auto it = arg_types.find(a.name);
    if (it == arg_types.end()) {
      throw TypeError("undeclared predicate in " + describe(a));
    }
    const auto& types = it->second;
    if (types.size() != a.args.size()) {
      throw TypeError("arity mismatch in " + describe(a) + ": declared with " +
                      std::to_string(types.size()) + " arguments");
    }
    if (!is_fact && types.size() != 2) {
      throw TypeError("example atoms must be binary: " + describe(a));
    }
    for (std::size_t i = 0; i < types.size(); ++i) {
      constants.emplace(types[i], a.args[i]);
    }
    if (!is_fact) return;
    const auto names = binarized_names(a.name, types.size());
    if (types.size() == 1) {
      constants.emplace(std::string(kBoolTypeName), std::string(kTrueSymbol));
      pending.push_back({names[0], {types[0], a.args[0]},
                         {std::string(kBoolTypeName), std::string(kTrueSymbol)}});
      return;
    }
    const auto proj = projections(types.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto [l, r] = proj[i];
      pending.push_back({names[i], {types[l], a.args[l]}, {types[r], a.args[r]}});
    }
  };
  for (const auto& a : db.facts) resolve(a, true);
  for (const auto& a : db.queries) resolve(a, false);

  // Canonical interning order: sorted by (type name, symbol).
  for (const auto& [type, symbol] : constants) {
    vocab.intern(*vocab.find_type(type), symbol);
  }

  std::vector<Atom> atoms;
  atoms.reserve(pending.size());
  for (const auto& p : pending) {
    const PredId pid = *vocab.find_predicate(p.pred);
    atoms.push_back({Predicate{pid, false},
                     *vocab.find_constant(*vocab.find_type(p.left.first), p.left.second),
                     *vocab.find_constant(*vocab.find_type(p.right.first), p.right.second)});
  }
  std::sort(atoms.begin(), atoms.end());

  FactStore store(std::move(vocab));
  for (const auto& a : atoms) store.add_fact(a);
  return store;
}

}  // namespace relnet
