#ifndef RELNET_GROUNDER_H_
#define RELNET_GROUNDER_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "relnet/logic.h"
#include "relnet/schema_walks.h"

namespace relnet {

enum class Label : int { kNegative = 0, kPositive = 1 };

/// A labeled ground atom of the target predicate, Target(a, b).
struct TargetExample {
  Predicate target;
  ConstId arg1 = 0;
  ConstId arg2 = 0;
  Label label = Label::kPositive;

  Atom atom() const { return {target, arg1, arg2}; }
  friend auto operator<=>(const TargetExample&, const TargetExample&) = default;
};

/// One substitution for a walk body: bindings[0] = a, bindings[l] = b and
/// chain[k](bindings[k], bindings[k+1]) is a fact for every k.
struct Grounding {
  int walk_id = 0;
  std::vector<ConstId> bindings;

  friend auto operator<=>(const Grounding&, const Grounding&) = default;
};

struct GroundingSet {
  int walk_id = 0;
  // Distinct, sorted by bindings.
  std::vector<Grounding> groundings;
  // The set is a strict subset of all groundings (sampling budget hit).
  bool truncated = false;

  std::size_t size() const { return groundings.size(); }
};

// Every grounding of `walk` that connects ex.arg1 to ex.arg2. Enumeration is
// a forward join over the successor index, pruned by the set of constants
// that can still reach ex.arg2 in the remaining steps.
GroundingSet ground_exhaustive(const LiftedWalk& walk, const TargetExample& ex,
                               const FactStore& store);

// At most `budget` distinct groundings, a subset of ground_exhaustive.
// Returns the full set when it has at most `budget` members. Otherwise draws
// complete groundings uniformly (path-count weighted forward walks), without
// duplicates, stopping after `budget` accepts or 50 * budget draws.
GroundingSet ground_sampled(const LiftedWalk& walk, const TargetExample& ex,
                            const FactStore& store, std::size_t budget,
                            std::uint64_t seed);

// Number of groundings, computed without enumerating them.
double count_groundings(const LiftedWalk& walk, const TargetExample& ex,
                        const FactStore& store);

// Debug dump, one line per grounding: "j | a,b | c_0;c_1;...;c_l".
void write_grounding_dump(std::ostream& out, const Vocabulary& vocab,
                          const TargetExample& ex, const GroundingSet& set);

}  // namespace relnet

#endif  // RELNET_GROUNDER_H_
