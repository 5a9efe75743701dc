#ifndef RELNET_SYNTHETIC_H_
#define RELNET_SYNTHETIC_H_

// Movie-style synthetic domains with planted rules, used as a desk-scale
// learning benchmark.
//
// Types Person, Movie, Genre; relations directed(Person,Movie),
// actedin(Person,Movie), ingenre(Movie,Genre), sameperson(Person,Person),
// samegenre(Genre,Genre); target workedunder(Person,Person).
//
// A planted rule is a walk over these relations. Every ordered pair of
// distinct persons that satisfies planted rule r "fires" with probability
// p_r. Positives are drawn from the firing pairs; a fraction `noise` of them
// (and any shortfall when too few pairs fire) is instead drawn uniformly from
// all remaining pairs.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace relnet {

struct PlantedRule {
  std::vector<std::string> chain;  // predicate names, "^-1" for inverses
  double probability = 1.0;
};

struct SyntheticSpec {
  std::size_t persons = 25;
  std::size_t movies = 20;
  std::size_t genres = 5;
  std::size_t actors_per_movie = 3;
  std::size_t alias_pairs = 3;
  std::size_t num_positives = 60;
  std::vector<PlantedRule> rules;
  double noise = 0.05;
  std::uint64_t seed = 7;

  // Two planted rules: actedin ; directed^-1 and directed ; actedin^-1.
  static SyntheticSpec movie_default();
  void validate() const;
};

struct SyntheticDataset {
  std::string types;
  std::string facts;
  std::string positives;
  std::string truth;  // planted rules in walks-file format
  std::string target = "workedunder";
  std::size_t planted_positives = 0;  // positives drawn from firing pairs
};

SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

// Writes types.txt, facts.txt, pos.txt, truth.txt and experiment.cfg (a
// config file for the cv subcommand) into `dir`.
void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace relnet

#endif  // RELNET_SYNTHETIC_H_
