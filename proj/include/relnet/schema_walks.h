#ifndef RELNET_SCHEMA_WALKS_H_
#define RELNET_SCHEMA_WALKS_H_

// Lifted random walks over the type-level schema graph. A walk is a chain of
// predicates Q_1 ... Q_l whose argument types chain end to end, starting at
// the target's first argument type and ending at its second; it is the body
// of the rule  Q_1(X, V_1) ^ ... ^ Q_l(V_{l-1}, Z) => Target(X, Z).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relnet/logic.h"

namespace relnet {

/// Nodes are types; each declared predicate contributes two directed edges,
/// itself (arg1 -> arg2) and its inverse (arg2 -> arg1).
class SchemaGraph {
 public:
  SchemaGraph() = default;

  const std::vector<TypeId>& nodes() const { return nodes_; }
  const std::vector<Predicate>& edges() const { return edges_; }
  // Edges leaving `type`, in edge order.
  std::span<const Predicate> outgoing(TypeId type) const;
  bool has_node(TypeId type) const;

 private:
  friend SchemaGraph build_schema_graph(const Vocabulary&, std::span<const PredId>);

  std::vector<TypeId> nodes_;
  std::vector<Predicate> edges_;
  std::vector<std::vector<Predicate>> outgoing_;  // indexed by TypeId
};

SchemaGraph build_schema_graph(const Vocabulary& vocab, std::span<const PredId> decls);
// Graph over every declared predicate.
SchemaGraph build_schema_graph(const Vocabulary& vocab);

struct LiftedWalk {
  int rule_id = 0;  // 1-based
  std::vector<Predicate> chain;

  std::size_t length() const { return chain.size(); }
  friend bool operator==(const LiftedWalk&, const LiftedWalk&) = default;
};

/// True iff the walk is non-empty, type-chains at every junction, starts at
/// the target's first argument type, ends at its second, never uses the
/// target (either direction), and never follows a predicate immediately by
/// its own inverse.
bool validate_walk(const Vocabulary& vocab, const LiftedWalk& walk, Predicate target);

struct WalkOptions {
  std::size_t num_walks = 100;
  std::size_t max_len = 6;
  // 0 selects 1000 * num_walks.
  std::size_t max_attempts = 0;
  std::uint64_t seed = 1;
};

struct WalkGeneration {
  std::vector<LiftedWalk> walks;
  std::size_t attempts = 0;
  // Set when fewer than num_walks walks were produced.
  std::string diagnostic;
};

/// Samples distinct walks. Each attempt starts at the target's first
/// argument type and repeatedly takes a uniformly chosen admissible outgoing
/// edge. Whenever the walk stands on the target's second argument type it
/// stops with probability 1/2 (always at max_len); an attempt that cannot
/// continue, or ends on the wrong type, is discarded. Output order is the
/// order of first discovery and is a pure function of (graph, target,
/// options).
WalkGeneration generate_walks(const SchemaGraph& graph, const Vocabulary& vocab,
                              Predicate target, const WalkOptions& options);

// Walks file: one walk per line, "j: pred1 ; pred2^-1 ; ...". Lines that are
// blank or start with '%' are ignored on read.
std::string format_walk(const Vocabulary& vocab, const LiftedWalk& walk);
void write_walks(std::ostream& out, const Vocabulary& vocab,
                 std::span<const LiftedWalk> walks);
std::vector<LiftedWalk> read_walks(std::istream& in, const Vocabulary& vocab,
                                   const std::string& source = "<walks>");

}  // namespace relnet

#endif  // RELNET_SCHEMA_WALKS_H_
