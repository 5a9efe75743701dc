#ifndef RELNET_NETWORK_H_
#define RELNET_NETWORK_H_

// The per-example unrolled network:
//
//   fact nodes -> ground rule nodes -> rule combination nodes -> softmax
//
// Ground rule node (j, i) exists only when grounding i of walk j is fully
// true in the evidence, so its l_j fact inputs are all 1. Every fact->ground
// edge of rule j carries the same tied weight w_j, giving the pre-activation
// w_j * l_j. Rule node j combines its N_j ground activations (average, max or
// noisy-or; 0 when N_j = 0) and feeds the output layer through u_{j,c}.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relnet/grounder.h"
#include "relnet/logic.h"
#include "relnet/schema_walks.h"

namespace relnet {

enum class CombinerMode { kAverage, kMax, kNoisyOr };

std::string_view to_string(CombinerMode mode);
// Accepts "average", "max", "noisyor". Throws ConfigError otherwise.
CombinerMode parse_combiner(std::string_view text);

inline constexpr std::size_t kBinaryClasses = 2;

inline std::size_t class_index(Label label) { return static_cast<std::size_t>(label); }

struct ModelParams {
  std::size_t num_rules = 0;
  std::size_t num_classes = kBinaryClasses;
  std::vector<double> w;  // num_rules
  std::vector<double> u;  // num_rules x num_classes, row-major
  std::vector<double> b;  // num_classes

  static ModelParams zeros(std::size_t rules, std::size_t classes = kBinaryClasses);
  // w, u ~ Uniform(-scale, scale); b = 0.
  static ModelParams random(std::size_t rules, std::uint64_t seed, double scale = 0.1,
                            std::size_t classes = kBinaryClasses);

  double& u_at(std::size_t j, std::size_t c) { return u[j * num_classes + c]; }
  double u_at(std::size_t j, std::size_t c) const { return u[j * num_classes + c]; }

  bool all_finite() const;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct GroundNetwork {
  TargetExample example;
  std::vector<std::vector<Predicate>> bodies;  // chain of walk j
  std::vector<GroundingSet> per_rule;          // groundings of walk j

  std::size_t num_rules() const { return per_rule.size(); }
  std::size_t body_length(std::size_t j) const { return bodies[j].size(); }
  std::size_t num_groundings(std::size_t j) const { return per_rule[j].size(); }

  // Distinct facts feeding the grounding layer, sorted (one node per fact).
  std::vector<Atom> fact_nodes() const;
};

struct GroundingMode {
  // 0 grounds exhaustively; otherwise at most this many groundings per walk.
  std::size_t samples_per_walk = 0;
  std::uint64_t seed = 0;
};

// Seed used by the sampler for one (walk, example) pair. Depends only on the
// base seed and the pair, so networks can be built in any order.
std::uint64_t grounding_seed(std::uint64_t base, int walk_id, const TargetExample& ex);

GroundNetwork instantiate(std::span<const LiftedWalk> walks, const TargetExample& ex,
                          const FactStore& store, const GroundingMode& mode);

// Builds one network per example using up to `threads` worker threads. The
// result is identical for any thread count.
std::vector<GroundNetwork> instantiate_all(std::span<const LiftedWalk> walks,
                                           std::span<const TargetExample> examples,
                                           const FactStore& store,
                                           const GroundingMode& mode,
                                           std::size_t threads = 1);

double ground_activation(double weight, std::size_t body_length, CombinerMode mode);
// Derivative of the ground activation with respect to its pre-activation,
// expressed through the activation value.
double ground_activation_slope(double activation, CombinerMode mode);

// Empty input yields 0. NoisyOr requires inputs in [0, 1].
double combine(std::span<const double> acts, CombinerMode mode);

struct ForwardTrace {
  std::vector<std::vector<double>> ground_acts;  // a_{ji}
  std::vector<double> rule_acts;                 // c_j
  std::vector<double> logits;                    // z_c
  std::vector<double> probs;                     // softmax(z)

  double score() const { return probs[class_index(Label::kPositive)]; }
};

// Throws NumericError on a non-finite intermediate value.
ForwardTrace forward(const GroundNetwork& net, const ModelParams& params, CombinerMode mode);

/// A trained model together with the rule templates it was trained on.
struct Model {
  std::string target;
  CombinerMode combiner = CombinerMode::kAverage;
  std::vector<LiftedWalk> walks;
  ModelParams params;
};

// Text format, version 1:
//   relnet-model 1
//   target <name>
//   combiner <mode>
//   rules <M>
//   classes <C>
//   walk <walk line>      (M lines)
//   w <M values>
//   u <M*C values>
//   b <C values>
// Values are written in shortest round-trip form, so a reloaded model
// reproduces scores exactly.
void write_model(std::ostream& out, const Vocabulary& vocab, const Model& model);
Model read_model(std::istream& in, const Vocabulary& vocab,
                 const std::string& source = "<model>");

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace relnet

#endif  // RELNET_NETWORK_H_
