#ifndef RELNET_TRAINER_H_
#define RELNET_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relnet/grounder.h"
#include "relnet/logic.h"
#include "relnet/metrics.h"
#include "relnet/network.h"
#include "relnet/schema_walks.h"

namespace relnet {

struct Gradients {
  std::vector<double> dw;
  std::vector<double> du;  // row-major, like ModelParams::u
  std::vector<double> db;

  static Gradients zeros_like(const ModelParams& params);
};

struct AdaGradState {
  std::vector<double> gw, gu, gb;  // accumulated squared gradients
  double learning_rate = 0.05;
  double l1 = 1e-4;
  double epsilon = 1e-8;

  static AdaGradState for_params(const ModelParams& params, double learning_rate,
                                 double l1, double epsilon = 1e-8);
};

struct TrainConfig {
  CombinerMode combiner = CombinerMode::kAverage;
  double learning_rate = 0.05;
  std::size_t batch_size = 1;
  std::size_t epochs = 1;
  double l1 = 1e-4;
  double epsilon = 1e-8;
  double init_scale = 0.1;
  std::uint64_t seed = 1;
  std::size_t neg_ratio = 2;
  std::size_t num_walks = 100;
  // 0 grounds exhaustively.
  std::size_t samples_per_walk = 100;
  std::size_t max_len = 6;
  // 0 selects 1000 * num_walks.
  std::size_t max_attempts = 0;
  std::size_t threads = 1;

  // Throws ConfigError on an invalid combination.
  void validate() const;
  GroundingMode grounding() const;
};

// Categorical cross-entropy -log p_label, with p floored at 1e-12.
double loss(const ForwardTrace& trace, Label label);

Gradients backward(const GroundNetwork& net, const ModelParams& params,
                   CombinerMode mode, Label label);
// Same, reusing a trace already computed for (net, params, mode).
Gradients backward(const GroundNetwork& net, const ModelParams& params,
                   CombinerMode mode, const ForwardTrace& trace, Label label);

/// Composite-objective AdaGrad with an L1 soft threshold. For each
/// coordinate with a nonzero gradient g:
///   G += g^2
///   x' = x - lr * g / sqrt(G + eps)
///   x  = sign(x') * max(0, |x'| - lr * l1 / sqrt(G + eps))
/// Coordinates whose gradient is exactly zero are left untouched
/// (parameter and accumulator).
void adagrad_l1_step(ModelParams& params, const Gradients& grads, AdaGradState& state);

struct NegativeSampling {
  std::vector<TargetExample> negatives;
  std::size_t requested = 0;
  // Set when the candidate pool was smaller than requested.
  std::string warning;
};

/// Closed-world negatives Target(a, b') where a is a subject of some
/// positive and b' any constant of the target's second type, excluding
/// facts in evidence, positives and a == b'. Draws ratio * |positives|
/// distinct pairs uniformly from that pool, or the whole pool when smaller.
NegativeSampling generate_negatives(const FactStore& store, Predicate target,
                                    std::span<const TargetExample> positives,
                                    std::size_t ratio, std::uint64_t seed);

struct TrainStep {
  std::size_t step = 0;
  std::size_t example = 0;  // index into the training examples
  double loss = 0.0;
  double score = 0.0;       // positive-class probability before the update
};

struct TrainResult {
  ModelParams params;
  std::vector<TrainStep> log;
};

// Batch size 1: for each example in a seeded shuffle, forward, backward and
// one AdaGrad step. Parameters start at w, u ~ U(-init_scale, init_scale),
// b = 0.
TrainResult train(const FactStore& store, std::span<const LiftedWalk> walks,
                  std::span<const TargetExample> examples, const TrainConfig& cfg);
// Training on networks that were already instantiated.
TrainResult train_networks(std::span<const GroundNetwork> nets, std::size_t num_rules,
                           const TrainConfig& cfg);

std::vector<double> score_networks(std::span<const GroundNetwork> nets,
                                   const ModelParams& params, CombinerMode mode);

// Stratified fold index per example. Membership depends only on the set of
// examples (not their order) and the seed.
std::vector<std::size_t> assign_folds(const Vocabulary& vocab,
                                      std::span<const TargetExample> examples,
                                      std::size_t k, std::uint64_t seed);

struct FoldResult {
  std::size_t fold = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::vector<double> test_scores;  // aligned with test_indices
  std::optional<double> auc_roc;    // empty when undefined for this fold
  std::optional<double> auc_pr;
  TrainResult training;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::size_t folds = 0;
};

struct CrossValidation {
  std::vector<FoldResult> folds;
  MetricSummary roc;
  MetricSummary pr;
};

MetricSummary summarize(std::span<const std::optional<double>> values);

// `folds`, when given, holds one fold index in [0, k) per example.
CrossValidation cross_validate(const FactStore& store, std::span<const LiftedWalk> walks,
                               std::span<const TargetExample> examples, std::size_t k,
                               const TrainConfig& cfg,
                               std::optional<std::span<const std::size_t>> folds = {});

}  // namespace relnet

#endif  // RELNET_TRAINER_H_
