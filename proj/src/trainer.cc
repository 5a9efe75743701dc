#include "relnet/trainer.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <set>
#include <tuple>

#include "relnet/error.h"
#include "relnet/random.h"

namespace relnet {

Gradients Gradients::zeros_like(const ModelParams& params) {
  return {std::vector<double>(params.w.size(), 0.0),
          std::vector<double>(params.u.size(), 0.0),
          std::vector<double>(params.b.size(), 0.0)};
}

AdaGradState AdaGradState::for_params(const ModelParams& params, double learning_rate,
                                      double l1, double epsilon) {
  AdaGradState s;
  s.gw.assign(params.w.size(), 0.0);
  s.gu.assign(params.u.size(), 0.0);
  s.gb.assign(params.b.size(), 0.0);
  s.learning_rate = learning_rate;
  s.l1 = l1;
  s.epsilon = epsilon;
  return s;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size != 1) throw ConfigError("only batch size 1 is supported");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (l1 < 0.0) throw ConfigError("L1 strength must be non-negative");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (neg_ratio < 1) throw ConfigError("negative ratio must be at least 1");
  if (num_walks < 1) throw ConfigError("number of walks must be at least 1");
  if (max_len < 1) throw ConfigError("maximum walk length must be at least 1");
}

GroundingMode TrainConfig::grounding() const {
  return {samples_per_walk, derive_seed(seed, "ground")};
}

double loss(const ForwardTrace& trace, Label label) {
  return -std::log(std::max(trace.probs.at(class_index(label)), 1e-12));
}

Gradients backward(const GroundNetwork& net, const ModelParams& params,
                   CombinerMode mode, Label label) {
  return backward(net, params, mode, forward(net, params, mode), label);
}

Gradients backward(const GroundNetwork& net, const ModelParams& params,
                   CombinerMode mode, const ForwardTrace& trace, Label label) {
  const std::size_t rules = params.num_rules;
  const std::size_t classes = params.num_classes;
  Gradients g = Gradients::zeros_like(params);

  std::vector<double> delta(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    delta[c] = trace.probs[c] - (c == class_index(label) ? 1.0 : 0.0);
    g.db[c] = delta[c];
  }

  std::vector<double> share;
  for (std::size_t j = 0; j < rules; ++j) {
    const double cj = trace.rule_acts[j];
    double dc = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      g.du[j * classes + c] = delta[c] * cj;
      dc += delta[c] * params.u_at(j, c);
    }
    const auto& acts = trace.ground_acts[j];
    const std::size_t n = acts.size();
    if (n == 0) continue;

    // d c_j / d a_ji for every grounding i.
    share.assign(n, 0.0);
    switch (mode) {
      case CombinerMode::kAverage:
        std::fill(share.begin(), share.end(), 1.0 / static_cast<double>(n));
        break;
      case CombinerMode::kMax:
        // Lowest index among the maxima takes the whole subgradient.
        share[std::max_element(acts.begin(), acts.end()) - acts.begin()] = 1.0;
        break;
      case CombinerMode::kNoisyOr: {
        // prod_{i' != i} (1 - a_ji') via prefix and suffix products.
        double prefix = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          share[i] = prefix;
          prefix *= 1.0 - acts[i];
        }
        double suffix = 1.0;
        for (std::size_t i = n; i-- > 0;) {
          share[i] *= suffix;
          suffix *= 1.0 - acts[i];
        }
        break;
      }
    }

    // Tied weight: contributions from every grounding accumulate into w_j.
    const double len = static_cast<double>(net.body_length(j));
    double dw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dw += dc * share[i] * ground_activation_slope(acts[i], mode) * len;
    }
    g.dw[j] = dw;
  }

  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(g.dw) || !finite(g.du) || !finite(g.db)) {
    throw NumericError("non-finite gradient");
  }
  return g;
}

namespace {

void adagrad_update(std::vector<double>& x, const std::vector<double>& g,
                    std::vector<double>& acc, const AdaGradState& s) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (g[i] == 0.0) continue;
    acc[i] += g[i] * g[i];
    const double scale = s.learning_rate / std::sqrt(acc[i] + s.epsilon);
    const double moved = x[i] - scale * g[i];
    const double shrunk = std::max(0.0, std::abs(moved) - scale * s.l1);
    x[i] = std::copysign(shrunk, moved);
    if (x[i] == 0.0) x[i] = 0.0;  // drop negative zero
  }
}

}  // namespace

void adagrad_l1_step(ModelParams& params, const Gradients& grads, AdaGradState& state) {
  if (grads.dw.size() != params.w.size() || grads.du.size() != params.u.size() ||
      grads.db.size() != params.b.size() || state.gw.size() != params.w.size() ||
      state.gu.size() != params.u.size() || state.gb.size() != params.b.size()) {
    throw ConfigError("AdaGrad step: dimension mismatch");
  }
  adagrad_update(params.w, grads.dw, state.gw, state);
  adagrad_update(params.u, grads.du, state.gu, state);
  adagrad_update(params.b, grads.db, state.gb, state);
}

NegativeSampling generate_negatives(const FactStore& store, Predicate target,
                                    std::span<const TargetExample> positives,
                                    std::size_t ratio, std::uint64_t seed) {
  const auto& vocab = store.vocab();
  NegativeSampling out;
  out.requested = ratio * positives.size();

  std::set<ConstId> subject_set;
  std::set<std::pair<ConstId, ConstId>> excluded;
  for (const auto& p : positives) {
    subject_set.insert(p.arg1);
    excluded.emplace(p.arg1, p.arg2);
  }
  const std::vector<ConstId> subjects(subject_set.begin(), subject_set.end());
  const auto objects = vocab.constants_of(vocab.range(target));

  auto admissible = [&](ConstId a, ConstId b) {
    return a != b && !excluded.contains({a, b}) && !store.contains(Atom{target, a, b});
  };
  auto emit = [&](ConstId a, ConstId b) {
    out.negatives.push_back({target, a, b, Label::kNegative});
  };

  Rng rng(seed);
  const std::size_t upper = subjects.size() * objects.size();
  if (out.requested == 0 || upper == 0) return out;

  if (upper >= 4 * out.requested) {
    // Sparse request: rejection sampling over subject x object.
    std::set<std::pair<ConstId, ConstId>> chosen;
    const std::size_t max_tries = 100 * out.requested;
    for (std::size_t t = 0; t < max_tries && chosen.size() < out.requested; ++t) {
      const ConstId a = subjects[rng.uniform_index(subjects.size())];
      const ConstId b = objects[rng.uniform_index(objects.size())];
      if (!admissible(a, b) || !chosen.emplace(a, b).second) continue;
      emit(a, b);
    }
    if (chosen.size() == out.requested) return out;
    out.negatives.clear();
  }

  std::vector<std::pair<ConstId, ConstId>> pool;
  for (ConstId a : subjects) {
    for (ConstId b : objects) {
      if (admissible(a, b)) pool.emplace_back(a, b);
    }
  }
  if (pool.size() <= out.requested) {
    if (pool.size() < out.requested) {
      out.warning = "candidate pool has " + std::to_string(pool.size()) +
                    " negatives, fewer than the " + std::to_string(out.requested) +
                    " requested";
    }
    for (auto [a, b] : pool) emit(a, b);
    return out;
  }
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < out.requested; ++i) {
    std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
    emit(pool[i].first, pool[i].second);
  }
  return out;
}

TrainResult train_networks(std::span<const GroundNetwork> nets, std::size_t num_rules,
                           const TrainConfig& cfg) {
  cfg.validate();
  if (nets.empty()) throw ConfigError("no training examples");
  TrainResult result;
  result.params = ModelParams::random(num_rules, derive_seed(cfg.seed, "init"),
                                      cfg.init_scale);
  AdaGradState state =
      AdaGradState::for_params(result.params, cfg.learning_rate, cfg.l1, cfg.epsilon);

  std::vector<std::size_t> order(nets.size());
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, {0x5368756666ULL, epoch}));
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      const auto& net = nets[idx];
      const Label label = net.example.label;
      const ForwardTrace trace = forward(net, result.params, cfg.combiner);
      const Gradients grads = backward(net, result.params, cfg.combiner, trace, label);
      result.log.push_back({step++, idx, loss(trace, label), trace.score()});
      adagrad_l1_step(result.params, grads, state);
    }
  }
  if (!result.params.all_finite()) throw NumericError("training produced non-finite weights");
  return result;
}

TrainResult train(const FactStore& store, std::span<const LiftedWalk> walks,
                  std::span<const TargetExample> examples, const TrainConfig& cfg) {
  cfg.validate();
  if (walks.empty()) throw ConfigError("no walks to train on");
  if (examples.empty()) throw ConfigError("no training examples");
  // Networks are built once and reused by every epoch.
  const auto nets = instantiate_all(walks, examples, store, cfg.grounding(), cfg.threads);
  return train_networks(nets, walks.size(), cfg);
}

std::vector<double> score_networks(std::span<const GroundNetwork> nets,
                                   const ModelParams& params, CombinerMode mode) {
  std::vector<double> scores;
  scores.reserve(nets.size());
  for (const auto& net : nets) scores.push_back(forward(net, params, mode).score());
  return scores;
}

std::vector<std::size_t> assign_folds(const Vocabulary& vocab,
                                      std::span<const TargetExample> examples,
                                      std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (examples.size() < k) {
    throw ConfigError("cannot split " + std::to_string(examples.size()) +
                      " examples into " + std::to_string(k) + " folds");
  }
  auto sort_key = [&](std::size_t i) {
    const auto& e = examples[i];
    return std::make_tuple(-static_cast<int>(e.label), vocab.symbol(e.arg1),
                           vocab.symbol(e.arg2));
  };
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sort_key(a) < sort_key(b); });

  Rng rng(seed);
  std::vector<std::size_t> fold(examples.size());
  std::size_t dealt = 0;
  for (Label cls : {Label::kPositive, Label::kNegative}) {
    std::vector<std::size_t> members;
    for (std::size_t i : order) {
      if (examples[i].label == cls) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t i : members) fold[i] = dealt++ % k;
  }
  return fold;
}

MetricSummary summarize(std::span<const std::optional<double>> values) {
  MetricSummary s;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++s.folds;
  }
  if (s.folds == 0) {
    s.mean = s.stddev = std::nan("");
    return s;
  }
  s.mean = sum / static_cast<double>(s.folds);
  if (s.folds > 1) {
    double ss = 0.0;
    for (const auto& v : values) {
      if (v) ss += (*v - s.mean) * (*v - s.mean);
    }
    s.stddev = std::sqrt(ss / static_cast<double>(s.folds - 1));
  }
  return s;
}

CrossValidation cross_validate(const FactStore& store, std::span<const LiftedWalk> walks,
                               std::span<const TargetExample> examples, std::size_t k,
                               const TrainConfig& cfg,
                               std::optional<std::span<const std::size_t>> folds) {
  cfg.validate();
  if (walks.empty()) throw ConfigError("no walks to train on");
  std::vector<std::size_t> assignment;
  if (folds) {
    if (folds->size() != examples.size()) {
      throw ConfigError("fold assignment does not cover every example");
    }
    assignment.assign(folds->begin(), folds->end());
    for (std::size_t f : assignment) {
      if (f >= k) throw ConfigError("fold index out of range");
    }
  } else {
    assignment = assign_folds(store.vocab(), examples, k, derive_seed(cfg.seed, "folds"));
  }

  // A network depends only on its example, so one instantiation serves every
  // fold for both training and scoring.
  const auto nets = instantiate_all(walks, examples, store, cfg.grounding(), cfg.threads);

  auto run_fold = [&](std::size_t f) {
    FoldResult r;
    r.fold = f;
    std::vector<GroundNetwork> train_nets;
    std::vector<GroundNetwork> test_nets;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (assignment[i] == f) {
        r.test_indices.push_back(i);
        test_nets.push_back(nets[i]);
      } else {
        r.train_indices.push_back(i);
        train_nets.push_back(nets[i]);
      }
    }
    if (train_nets.empty() || test_nets.empty()) {
      throw ConfigError("fold " + std::to_string(f) + " is empty");
    }
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = derive_seed(cfg.seed, {0x666f6c64ULL, f});
    r.training = train_networks(train_nets, walks.size(), fold_cfg);
    r.test_scores = score_networks(test_nets, r.training.params, cfg.combiner);
    std::vector<ScoredExample> scored;
    for (std::size_t t = 0; t < r.test_indices.size(); ++t) {
      scored.push_back({r.test_scores[t], examples[r.test_indices[t]].label});
    }
    try {
      r.auc_roc = auc_roc(scored);
    } catch (const UndefinedMetricError&) {
    }
    try {
      r.auc_pr = auc_pr(scored);
    } catch (const UndefinedMetricError&) {
    }
    return r;
  };

  CrossValidation cv;
  cv.folds.resize(k);
  if (cfg.threads > 1) {
    std::vector<std::future<FoldResult>> pending;
    for (std::size_t f = 0; f < k; ++f) {
      pending.push_back(std::async(std::launch::async, run_fold, f));
    }
    for (std::size_t f = 0; f < k; ++f) cv.folds[f] = pending[f].get();
  } else {
    for (std::size_t f = 0; f < k; ++f) cv.folds[f] = run_fold(f);
  }

  std::vector<std::optional<double>> roc, pr;
  for (const auto& f : cv.folds) {
    roc.push_back(f.auc_roc);
    pr.push_back(f.auc_pr);
  }
  cv.roc = summarize(roc);
  cv.pr = summarize(pr);
  return cv;
}

}  // namespace relnet
