#include "relnet/grounder.h"

#include <algorithm>
#include <ostream>
#include <set>
#include <unordered_map>

#include "relnet/error.h"
#include "relnet/random.h"

namespace relnet {

namespace {

using CountMap = std::unordered_map<ConstId, double>;

// layers[k] maps each constant that can stand at position k and still reach b
// at position l to the number of chain completions from it. layers[l] = {b}.
std::vector<CountMap> backward_layers(const LiftedWalk& walk, const TargetExample& ex,
                                      const FactStore& store) {
  const auto& chain = walk.chain;
  const auto& vocab = store.vocab();
  std::vector<CountMap> layers(chain.size() + 1);
  if (chain.empty() || vocab.type_of(ex.arg1) != vocab.domain(chain.front()) ||
      vocab.type_of(ex.arg2) != vocab.range(chain.back())) {
    return layers;
  }
  layers[chain.size()][ex.arg2] = 1.0;
  for (std::size_t k = chain.size(); k-- > 0;) {
    const Predicate back = chain[k].inverted();
    auto& layer = layers[k];
    if (k == 0) {
      // Only a can stand at position 0.
      double total = 0.0;
      for (ConstId z : store.successors(chain[0], ex.arg1)) {
        if (auto it = layers[1].find(z); it != layers[1].end()) total += it->second;
      }
      if (total > 0.0) layer[ex.arg1] = total;
      break;
    }
    for (const auto& [y, count] : layers[k + 1]) {
      for (ConstId x : store.successors(back, y)) layer[x] += count;
    }
    if (layer.empty()) break;
  }
  return layers;
}

void enumerate(const LiftedWalk& walk, const std::vector<CountMap>& layers,
               const FactStore& store, std::vector<ConstId>& prefix,
               std::vector<Grounding>& out) {
  const std::size_t k = prefix.size() - 1;
  if (k == walk.chain.size()) {
    out.push_back({walk.rule_id, prefix});
    return;
  }
  for (ConstId z : store.successors(walk.chain[k], prefix.back())) {
    if (!layers[k + 1].contains(z)) continue;
    prefix.push_back(z);
    enumerate(walk, layers, store, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

GroundingSet ground_exhaustive(const LiftedWalk& walk, const TargetExample& ex,
                               const FactStore& store) {
  GroundingSet set{walk.rule_id, {}, false};
  const auto layers = backward_layers(walk, ex, store);
  if (layers.empty() || !layers[0].contains(ex.arg1)) return set;
  std::vector<ConstId> prefix{ex.arg1};
  // Successor lists are sorted, so depth-first order is lexicographic.
  enumerate(walk, layers, store, prefix, set.groundings);
  return set;
}

double count_groundings(const LiftedWalk& walk, const TargetExample& ex,
                        const FactStore& store) {
  const auto layers = backward_layers(walk, ex, store);
  auto it = layers[0].find(ex.arg1);
  return it == layers[0].end() ? 0.0 : it->second;
}

GroundingSet ground_sampled(const LiftedWalk& walk, const TargetExample& ex,
                            const FactStore& store, std::size_t budget,
                            std::uint64_t seed) {
  if (budget == 0) throw ConfigError("grounding budget must be at least 1");
  GroundingSet set{walk.rule_id, {}, false};
  const auto layers = backward_layers(walk, ex, store);
  auto root = layers[0].find(ex.arg1);
  if (root == layers[0].end()) return set;
  const double total = root->second;
  if (total <= static_cast<double>(budget)) {
    std::vector<ConstId> prefix{ex.arg1};
    enumerate(walk, layers, store, prefix, set.groundings);
    return set;
  }

  Rng rng(seed);
  std::set<std::vector<ConstId>> accepted;
  std::vector<ConstId> path;
  std::vector<ConstId> options;
  std::vector<double> weights;
  const std::size_t max_trials = 50 * budget;
  for (std::size_t trial = 0; trial < max_trials && accepted.size() < budget; ++trial) {
    path.assign(1, ex.arg1);
    for (std::size_t k = 0; k < walk.chain.size(); ++k) {
      options.clear();
      weights.clear();
      double sum = 0.0;
      for (ConstId z : store.successors(walk.chain[k], path.back())) {
        auto it = layers[k + 1].find(z);
        if (it == layers[k + 1].end()) continue;
        options.push_back(z);
        weights.push_back(it->second);
        sum += it->second;
      }
      // Every constant kept in a layer has at least one completion.
      double r = rng.uniform01() * sum;
      std::size_t pick = 0;
      while (pick + 1 < options.size() && r >= weights[pick]) {
        r -= weights[pick];
        ++pick;
      }
      path.push_back(options[pick]);
    }
    accepted.insert(path);
  }
  set.groundings.reserve(accepted.size());
  for (const auto& b : accepted) set.groundings.push_back({walk.rule_id, b});
  set.truncated = true;
  return set;
}

void write_grounding_dump(std::ostream& out, const Vocabulary& vocab,
                          const TargetExample& ex, const GroundingSet& set) {
  for (const auto& g : set.groundings) {
    out << set.walk_id << " | " << vocab.symbol(ex.arg1) << "," << vocab.symbol(ex.arg2)
        << " | ";
    for (std::size_t i = 0; i < g.bindings.size(); ++i) {
      if (i) out << ';';
      out << vocab.symbol(g.bindings[i]);
    }
    out << '\n';
  }
}

}  // namespace relnet
