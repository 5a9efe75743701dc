#include "relnet/pipeline.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "relnet/error.h"
#include "relnet/random.h"

namespace relnet {

namespace {

std::size_t to_count(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return out;
}

double to_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Runs `body`, tagging any error with `stage`.
template <typename F>
auto in_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  } catch (const std::exception& e) {
    Error wrapped(ErrorKind::kRuntime, e.what());
    wrapped.set_stage(stage);
    throw wrapped;
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "types",       "facts",   "pos",    "neg",     "folds",     "walks",
      "target",      "num-folds", "num-walks", "max-len", "max-attempts",
      "samples-per-walk", "combiner", "lr", "l1", "epochs", "batch-size",
      "neg-ratio",   "init-scale", "seed", "threads"};
  return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "types") types = value;
  else if (key == "facts") facts = value;
  else if (key == "pos") pos = value;
  else if (key == "neg") neg = value;
  else if (key == "folds") folds = value;
  else if (key == "walks") walks = value;
  else if (key == "target") target = value;
  else if (key == "out") out = value;
  else if (key == "num-folds") num_folds = to_count(key, value);
  else if (key == "num-walks") train.num_walks = to_count(key, value);
  else if (key == "max-len") train.max_len = to_count(key, value);
  else if (key == "max-attempts") train.max_attempts = to_count(key, value);
  else if (key == "samples-per-walk") train.samples_per_walk = to_count(key, value);
  else if (key == "combiner") train.combiner = parse_combiner(value);
  else if (key == "lr") train.learning_rate = to_real(key, value);
  else if (key == "l1") train.l1 = to_real(key, value);
  else if (key == "epochs") train.epochs = to_count(key, value);
  else if (key == "batch-size") train.batch_size = to_count(key, value);
  else if (key == "neg-ratio") train.neg_ratio = to_count(key, value);
  else if (key == "init-scale") train.init_scale = to_real(key, value);
  else if (key == "seed") train.seed = to_count(key, value);
  else if (key == "threads") train.threads = to_count(key, value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

void ExperimentConfig::validate() const {
  if (types.empty()) throw ConfigError("missing 'types' (type declarations file)");
  if (facts.empty()) throw ConfigError("missing 'facts' (facts file)");
  if (pos.empty()) throw ConfigError("missing 'pos' (positive examples file)");
  if (target.empty()) throw ConfigError("missing 'target' (target predicate)");
  if (num_folds < 2) throw ConfigError("num-folds must be at least 2");
  train.validate();
  for (const auto* path : {&types, &facts, &pos, &neg, &folds, &walks}) {
    if (!path->empty() && !std::filesystem::exists(*path)) {
      throw ConfigError("file not found: '" + *path + "'");
    }
  }
}

std::string ExperimentConfig::manifest() const {
  auto path = [](const std::string& p) {
    return p.empty() ? p : std::filesystem::absolute(p).lexically_normal().string();
  };
  std::ostringstream m;
  m << "types = " << path(types) << '\n'
    << "facts = " << path(facts) << '\n'
    << "pos = " << path(pos) << '\n';
  if (!neg.empty()) m << "neg = " << path(neg) << '\n';
  if (!folds.empty()) m << "folds = " << path(folds) << '\n';
  if (!walks.empty()) m << "walks = " << path(walks) << '\n';
  m << "target = " << target << '\n'
    << "num-folds = " << num_folds << '\n'
    << "num-walks = " << train.num_walks << '\n'
    << "max-len = " << train.max_len << '\n'
    << "max-attempts = " << train.max_attempts << '\n'
    << "samples-per-walk = " << train.samples_per_walk << '\n'
    << "combiner = " << to_string(train.combiner) << '\n'
    << "lr = " << format_double(train.learning_rate) << '\n'
    << "l1 = " << format_double(train.l1) << '\n'
    << "epochs = " << train.epochs << '\n'
    << "batch-size = " << train.batch_size << '\n'
    << "neg-ratio = " << train.neg_ratio << '\n'
    << "init-scale = " << format_double(train.init_scale) << '\n'
    << "seed = " << train.seed << '\n'
    << "threads = " << train.threads << '\n';
  return m.str();
}

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& source) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, 1, "expected 'key = value'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const auto kv = parse_key_values(read_file(path), path.string());
  ExperimentConfig cfg;
  const auto base = path.parent_path();
  for (const auto& [key, value] : kv) {
    const bool is_path = key == "types" || key == "facts" || key == "pos" || key == "neg" ||
                         key == "folds" || key == "walks" || key == "out";
    if (is_path && !value.empty() && std::filesystem::path(value).is_relative()) {
      cfg.set(key, (base / value).lexically_normal().string());
    } else {
      cfg.set(key, value);
    }
  }
  return cfg;
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  DatasetPaths paths{cfg.types, cfg.facts, cfg.pos, std::nullopt, cfg.target};
  if (!cfg.neg.empty()) paths.negatives = cfg.neg;
  return parse_dataset(paths);
}

std::vector<LiftedWalk> obtain_walks(const ExperimentConfig& cfg, const Dataset& data,
                                     std::vector<std::string>* warnings) {
  const auto& vocab = data.store.vocab();
  if (!cfg.walks.empty()) {
    std::istringstream in(read_file(cfg.walks));
    auto walks = read_walks(in, vocab, cfg.walks);
    for (const auto& w : walks) {
      if (!validate_walk(vocab, w, data.target)) {
        throw ConfigError("walk " + std::to_string(w.rule_id) + " is not valid for target " +
                          cfg.target);
      }
    }
    if (walks.empty()) throw ConfigError("walks file is empty");
    return walks;
  }
  const SchemaGraph graph = build_schema_graph(vocab);
  WalkOptions options{cfg.train.num_walks, cfg.train.max_len, cfg.train.max_attempts,
                      derive_seed(cfg.train.seed, "walks")};
  auto gen = generate_walks(graph, vocab, data.target, options);
  if (!gen.diagnostic.empty() && warnings) warnings->push_back(gen.diagnostic);
  if (gen.walks.empty()) {
    throw Error(ErrorKind::kRuntime, "no walks generated: " + gen.diagnostic);
  }
  return gen.walks;
}

void ensure_negatives(const ExperimentConfig& cfg, Dataset& data,
                      std::vector<std::string>* warnings) {
  if (data.has_negatives) return;
  std::vector<TargetExample> positives(data.examples.begin(),
                                       data.examples.begin() +
                                           static_cast<std::ptrdiff_t>(data.num_positives));
  auto neg = generate_negatives(data.store, data.target, positives, cfg.train.neg_ratio,
                                derive_seed(cfg.train.seed, "negatives"));
  if (!neg.warning.empty() && warnings) warnings->push_back(neg.warning);
  data.examples.insert(data.examples.end(), neg.negatives.begin(), neg.negatives.end());
  data.has_negatives = true;
}

std::string format_results(const CrossValidation& cv) {
  auto value = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("undefined");
  };
  auto summary = [](const MetricSummary& s) {
    return s.folds ? std::make_pair(format_double(s.mean), format_double(s.stddev))
                   : std::make_pair(std::string("undefined"), std::string("undefined"));
  };
  std::ostringstream out;
  out << "# fold\tn_train\tn_test\tauc_roc\tauc_pr\n";
  for (const auto& f : cv.folds) {
    out << f.fold << '\t' << f.train_indices.size() << '\t' << f.test_indices.size() << '\t'
        << value(f.auc_roc) << '\t' << value(f.auc_pr) << '\n';
  }
  const auto roc = summary(cv.roc);
  const auto pr = summary(cv.pr);
  out << "mean\t-\t-\t" << roc.first << '\t' << pr.first << '\n';
  out << "std\t-\t-\t" << roc.second << '\t' << pr.second << '\n';
  return out.str();
}

PipelineResult run_pipeline(const ExperimentConfig& cfg) {
  PipelineResult result;
  in_stage("config", [&] {
    cfg.validate();
    if (cfg.out.empty()) throw ConfigError("missing 'out' (output directory)");
  });
  result.data = in_stage("parse", [&] { return load_dataset(cfg); });
  result.walks = in_stage("walks", [&] { return obtain_walks(cfg, result.data, &result.warnings); });
  in_stage("negatives", [&] { ensure_negatives(cfg, result.data, &result.warnings); });
  result.cv = in_stage("cv", [&] {
    std::vector<std::size_t> folds;
    if (!cfg.folds.empty()) folds = read_folds(cfg.folds, result.data, cfg.num_folds);
    std::optional<std::span<const std::size_t>> assignment;
    if (!folds.empty()) assignment = std::span<const std::size_t>(folds);
    return cross_validate(result.data.store, result.walks, result.data.examples,
                          cfg.num_folds, cfg.train, assignment);
  });

  in_stage("write", [&] {
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    const auto& vocab = result.data.store.vocab();
    auto open = [&](const std::string& name) {
      std::ofstream f(dir / name, std::ios::binary);
      if (!f) throw ConfigError("cannot write '" + (dir / name).string() + "'");
      return f;
    };
    open("manifest.txt") << cfg.manifest();
    {
      auto f = open("walks.txt");
      write_walks(f, vocab, result.walks);
    }
    {
      auto f = open("examples.txt");
      for (std::size_t i = 0; i < result.data.examples.size(); ++i) {
        const auto& e = result.data.examples[i];
        f << i << '\t' << format_example(vocab, e) << '\t'
          << (e.label == Label::kPositive ? 1 : 0) << '\n';
      }
    }
    for (const auto& fold : result.cv.folds) {
      const std::string k = std::to_string(fold.fold);
      {
        auto f = open("model_fold" + k + ".txt");
        write_model(f, vocab,
                    Model{cfg.target, cfg.train.combiner, result.walks, fold.training.params});
      }
      {
        std::vector<ScoreRow> rows;
        for (std::size_t t = 0; t < fold.test_indices.size(); ++t) {
          const auto& e = result.data.examples[fold.test_indices[t]];
          rows.push_back({format_example(vocab, e), fold.test_scores[t], e.label});
        }
        auto f = open("scores_fold" + k + ".tsv");
        write_scores(f, rows);
      }
      {
        auto f = open("train_log_fold" + k + ".csv");
        f << "step,example,loss,score\n";
        for (const auto& s : fold.training.log) {
          f << s.step << ',' << fold.train_indices[s.example] << ',' << format_double(s.loss)
            << ',' << format_double(s.score) << '\n';
        }
      }
    }
    open("results.tsv") << format_results(result.cv);
  });
  return result;
}

}  // namespace relnet
