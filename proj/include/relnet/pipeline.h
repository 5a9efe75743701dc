#ifndef RELNET_PIPELINE_H_
#define RELNET_PIPELINE_H_

// End-to-end experiment: parse -> walks -> negatives -> cross-validation ->
// artifacts. Configuration is a flat "key = value" file whose keys are the
// long CLI flag names; the run writes a manifest in the same format so a run
// can be replayed exactly.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "relnet/dataset.h"
#include "relnet/schema_walks.h"
#include "relnet/trainer.h"

namespace relnet {

struct ExperimentConfig {
  std::string types;
  std::string facts;
  std::string pos;
  std::string neg;    // optional
  std::string folds;  // optional fold assignment file
  std::string walks;  // optional precomputed walks file
  std::string target;
  std::string out;
  std::size_t num_folds = 5;
  TrainConfig train;

  // Sets one key. Throws ConfigError on an unknown key or malformed value.
  void set(const std::string& key, const std::string& value);
  // Throws ConfigError when required fields are missing or out of range.
  void validate() const;
  // Every setting except `out`, one "key = value" per line, with input paths
  // made absolute.
  std::string manifest() const;
};

// Reads a config file. Relative paths inside it are resolved against the
// file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& source);

// Keys accepted by ExperimentConfig::set, in manifest order.
const std::vector<std::string>& config_keys();

struct PipelineResult {
  Dataset data;
  std::vector<LiftedWalk> walks;
  std::vector<std::string> warnings;
  CrossValidation cv;
};

// Runs the experiment and writes into cfg.out:
//   manifest.txt, walks.txt, examples.txt, results.tsv,
//   model_fold<k>.txt, scores_fold<k>.tsv, train_log_fold<k>.csv
// Nothing is written unless every stage succeeds. Errors carry the name of
// the failing stage (config, parse, walks, negatives, cv, write).
PipelineResult run_pipeline(const ExperimentConfig& cfg);

// Stages shared with the individual subcommands.
Dataset load_dataset(const ExperimentConfig& cfg);
std::vector<LiftedWalk> obtain_walks(const ExperimentConfig& cfg, const Dataset& data,
                                     std::vector<std::string>* warnings);
// Appends generated negatives unless the dataset already has some.
void ensure_negatives(const ExperimentConfig& cfg, Dataset& data,
                      std::vector<std::string>* warnings);

std::string format_results(const CrossValidation& cv);

}  // namespace relnet

#endif  // RELNET_PIPELINE_H_
