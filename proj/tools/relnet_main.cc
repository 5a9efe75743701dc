// relnet: command-line front end for relational network experiments.
//
//   relnet walks   generate lifted random walks for a target
//   relnet ground  dump the groundings of walks for examples
//   relnet train   train a model on all examples
//   relnet cv      k-fold cross-validation with artifacts (run_pipeline)
//   relnet predict score examples with a saved model
//   relnet eval    AUC-ROC / AUC-PR of a scores file
//   relnet synth   write a synthetic movie-style dataset
//
// Exit codes: 0 success, 2 configuration error, 3 parse/type error,
// 4 runtime error.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "relnet/dataset.h"
#include "relnet/error.h"
#include "relnet/metrics.h"
#include "relnet/network.h"
#include "relnet/pipeline.h"
#include "relnet/random.h"
#include "relnet/schema_walks.h"
#include "relnet/synthetic.h"
#include "relnet/trainer.h"

namespace {

using namespace relnet;

constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitRuntime = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return kExitConfig;
    case ErrorKind::kParse:
    case ErrorKind::kType: return kExitParse;
    default: return kExitRuntime;
  }
}

// Flag values collected per subcommand; applied on top of --config.
struct Settings {
  std::string config;
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        "--" + key, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_config(config);
    for (const auto& [k, v] : values) cfg.set(k, v);
    return cfg;
  }
};

void add_data_options(CLI::App* app, Settings& s) {
  app->add_option("--config", s.config, "Key-value config file (flags override it)");
  s.add(app, "types", "Type declarations file");
  s.add(app, "facts", "Facts file");
  s.add(app, "pos", "Positive examples file");
  s.add(app, "neg", "Negative examples file (generated when absent)");
  s.add(app, "target", "Target predicate name");
  s.add(app, "seed", "Master seed");
}

void add_walk_options(CLI::App* app, Settings& s) {
  s.add(app, "walks", "Walks file to use instead of generating walks");
  s.add(app, "num-walks", "Number of lifted random walks");
  s.add(app, "max-len", "Maximum walk length");
  s.add(app, "max-attempts", "Walk generation attempts (0 = 1000 x num-walks)");
}

void add_train_options(CLI::App* app, Settings& s) {
  s.add(app, "samples-per-walk", "Grounding samples per walk and example (0 = exhaustive)");
  s.add(app, "combiner", "Combining rule: average, max or noisyor");
  s.add(app, "lr", "AdaGrad learning rate");
  s.add(app, "l1", "L1 regularization strength");
  s.add(app, "epochs", "Training epochs");
  s.add(app, "batch-size", "Batch size (only 1 is supported)");
  s.add(app, "neg-ratio", "Negatives generated per positive");
  s.add(app, "init-scale", "Initial weight range");
  s.add(app, "threads", "Worker threads for grounding and folds");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

// Writes to the file at `path`, or stdout when empty.
template <typename F>
void emit(const std::string& path, F&& body) {
  if (path.empty()) {
    body(std::cout);
  } else {
    auto out = open_output(path);
    body(out);
  }
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

Dataset types_only(const ExperimentConfig& cfg) {
  if (cfg.types.empty()) throw ConfigError("missing --types");
  if (cfg.target.empty()) throw ConfigError("missing --target");
  std::istringstream in(read_file(cfg.types));
  RawDatabase db{parse_type_decls(in, cfg.types), {}, {}};
  Dataset data{binarize(db), {}, {}, 0, false};
  auto target = data.store.vocab().find_predicate(cfg.target);
  if (!target) throw ConfigError("target predicate '" + cfg.target + "' is not declared");
  data.target = Predicate{*target, false};
  return data;
}

int run_walks(const Settings& s) {
  const auto cfg = s.resolve();
  const Dataset data = types_only(cfg);
  std::vector<std::string> warnings;
  const auto walks = obtain_walks(cfg, data, &warnings);
  warn(warnings);
  emit(cfg.out, [&](std::ostream& out) { write_walks(out, data.store.vocab(), walks); });
  return 0;
}

int run_ground(const Settings& s) {
  const auto cfg = s.resolve();
  const Dataset data = load_dataset(cfg);
  std::vector<std::string> warnings;
  const auto walks = obtain_walks(cfg, data, &warnings);
  warn(warnings);
  const auto mode = cfg.train.grounding();
  emit(cfg.out, [&](std::ostream& out) {
    for (const auto& ex : data.examples) {
      const auto net = instantiate(walks, ex, data.store, mode);
      for (const auto& set : net.per_rule) {
        write_grounding_dump(out, data.store.vocab(), ex, set);
      }
    }
  });
  return 0;
}

int run_train(const Settings& s, const std::string& log_path) {
  const auto cfg = s.resolve();
  cfg.train.validate();
  Dataset data = load_dataset(cfg);
  std::vector<std::string> warnings;
  const auto walks = obtain_walks(cfg, data, &warnings);
  ensure_negatives(cfg, data, &warnings);
  warn(warnings);
  const auto result = train(data.store, walks, data.examples, cfg.train);
  emit(cfg.out, [&](std::ostream& out) {
    write_model(out, data.store.vocab(),
                Model{cfg.target, cfg.train.combiner, walks, result.params});
  });
  if (!log_path.empty()) {
    auto log = open_output(log_path);
    log << "step,example,loss,score\n";
    for (const auto& st : result.log) {
      log << st.step << ',' << st.example << ',' << format_double(st.loss) << ','
          << format_double(st.score) << '\n';
    }
  }
  return 0;
}

int run_cv(const Settings& s) {
  const auto cfg = s.resolve();
  const auto result = run_pipeline(cfg);
  warn(result.warnings);
  std::cout << format_results(result.cv);
  return 0;
}

int run_predict(const Settings& s, const std::string& model_path) {
  const auto cfg = s.resolve();
  if (model_path.empty()) throw ConfigError("missing --model");
  Dataset data = load_dataset(cfg);
  std::vector<std::string> warnings;
  ensure_negatives(cfg, data, &warnings);
  warn(warnings);
  std::istringstream in(read_file(model_path));
  const Model model = read_model(in, data.store.vocab(), model_path);
  if (model.target != cfg.target) {
    throw ConfigError("model was trained for target '" + model.target + "'");
  }
  const auto mode = cfg.train.grounding();
  const auto nets = instantiate_all(model.walks, data.examples, data.store, mode,
                                    cfg.train.threads);
  const auto scores = score_networks(nets, model.params, model.combiner);
  std::vector<ScoreRow> rows;
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    const auto& e = data.examples[i];
    rows.push_back({format_example(data.store.vocab(), e), scores[i], e.label});
  }
  emit(cfg.out, [&](std::ostream& out) { write_scores(out, rows); });
  return 0;
}

int run_eval(const std::string& scores_path) {
  if (scores_path.empty()) throw ConfigError("missing --scores");
  std::istringstream in(read_file(scores_path));
  const auto rows = read_scores(in, scores_path);
  std::vector<ScoredExample> items;
  for (const auto& r : rows) items.push_back({r.score, r.label});
  std::cout << "auc_roc\t" << format_double(auc_roc(items)) << '\n';
  std::cout << "auc_pr\t" << format_double(auc_pr(items)) << '\n';
  return 0;
}

struct SynthOptions {
  std::string out;
  SyntheticSpec spec = SyntheticSpec::movie_default();
  double planted_probability = 0.9;
};

int run_synth(const SynthOptions& o) {
  if (o.out.empty()) throw ConfigError("missing --out");
  SyntheticSpec spec = o.spec;
  for (auto& r : spec.rules) r.probability = o.planted_probability;
  const auto data = generate_synthetic(spec);
  write_synthetic(data, o.out);
  std::cout << "wrote synthetic dataset to " << o.out << " ("
            << data.planted_positives << " planted positives)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relational neural networks over lifted random walks"};
  app.require_subcommand(1);

  Settings walks_s, ground_s, train_s, cv_s, predict_s;
  std::string train_log, model_path, scores_path;
  SynthOptions synth;

  auto* walks = app.add_subcommand("walks", "Generate lifted random walks");
  walks->add_option("--config", walks_s.config, "Key-value config file");
  walks_s.add(walks, "types", "Type declarations file");
  walks_s.add(walks, "target", "Target predicate name");
  walks_s.add(walks, "seed", "Master seed");
  add_walk_options(walks, walks_s);
  walks_s.add(walks, "out", "Output walks file (stdout when omitted)");

  auto* ground = app.add_subcommand("ground", "Dump groundings of walks for examples");
  add_data_options(ground, ground_s);
  add_walk_options(ground, ground_s);
  ground_s.add(ground, "samples-per-walk", "Grounding samples per walk (0 = exhaustive)");
  ground_s.add(ground, "out", "Output dump file (stdout when omitted)");

  auto* trainc = app.add_subcommand("train", "Train a model on all examples");
  add_data_options(trainc, train_s);
  add_walk_options(trainc, train_s);
  add_train_options(trainc, train_s);
  train_s.add(trainc, "out", "Output model file (stdout when omitted)");
  trainc->add_option("--log", train_log, "Training log file (step,example,loss,score)");

  auto* cv = app.add_subcommand("cv", "Cross-validated experiment with artifacts");
  add_data_options(cv, cv_s);
  add_walk_options(cv, cv_s);
  add_train_options(cv, cv_s);
  cv_s.add(cv, "folds", "Fold assignment file");
  cv_s.add(cv, "num-folds", "Number of folds");
  cv_s.add(cv, "out", "Output directory");

  auto* predict = app.add_subcommand("predict", "Score examples with a saved model");
  add_data_options(predict, predict_s);
  predict_s.add(predict, "samples-per-walk", "Grounding samples per walk (0 = exhaustive)");
  predict_s.add(predict, "threads", "Worker threads");
  predict_s.add(predict, "neg-ratio", "Generated negatives per positive (without --neg)");
  predict_s.add(predict, "out", "Output scores file (stdout when omitted)");
  predict->add_option("--model", model_path, "Model file");

  auto* eval = app.add_subcommand("eval", "AUC-ROC and AUC-PR of a scores file");
  eval->add_option("--scores", scores_path, "Scores file (example_id, score, label)");

  auto* synthc = app.add_subcommand("synth", "Write a synthetic movie-style dataset");
  synthc->add_option("--out", synth.out, "Output directory");
  synthc->add_option("--seed", synth.spec.seed, "Seed");
  synthc->add_option("--persons", synth.spec.persons, "Number of persons");
  synthc->add_option("--movies", synth.spec.movies, "Number of movies");
  synthc->add_option("--genres", synth.spec.genres, "Number of genres");
  synthc->add_option("--num-positives", synth.spec.num_positives, "Number of positives");
  synthc->add_option("--noise", synth.spec.noise, "Fraction of random positives");
  synthc->add_option("--planted-prob", synth.planted_probability,
                     "Firing probability of the planted rules");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: stage=config kind=config " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*walks) return run_walks(walks_s);
    if (*ground) return run_ground(ground_s);
    if (*trainc) return run_train(train_s, train_log);
    if (*cv) return run_cv(cv_s);
    if (*predict) return run_predict(predict_s, model_path);
    if (*eval) return run_eval(scores_path);
    if (*synthc) return run_synth(synth);
  } catch (const Error& e) {
    std::cerr << "error: stage=" << (e.stage().empty() ? "run" : e.stage())
              << " kind=" << to_string(e.kind()) << ' ' << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: stage=run kind=runtime " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
