#include "relnet/synthetic.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "relnet/dataset.h"
#include "relnet/error.h"
#include "relnet/grounder.h"
#include "relnet/schema_walks.h"

namespace relnet {
namespace {

TEST(Synthetic, NoNoiseEveryPositiveGrounded) {
  SyntheticSpec spec = SyntheticSpec::movie_default();
  spec.rules = {{{"actedin", "directed^-1"}, 1.0}};
  spec.noise = 0.0;
  spec.num_positives = 40;
  const auto syn = generate_synthetic(spec);
  const Dataset d = parse_dataset_text(syn.types, syn.facts, syn.positives, "", syn.target);
  ASSERT_EQ(d.num_positives, 40u);
  EXPECT_EQ(syn.planted_positives, 40u);
  std::istringstream truth(syn.truth);
  const auto rules = read_walks(truth, d.store.vocab());
  ASSERT_EQ(rules.size(), 1u);
  for (const auto& ex : d.examples) {
    EXPECT_GE(count_groundings(rules[0], ex, d.store), 1.0)
        << format_example(d.store.vocab(), ex);
  }
}

TEST(Synthetic, DefaultParsesCleanly) {
  const SyntheticSpec spec = SyntheticSpec::movie_default();
  EXPECT_EQ(spec.persons + spec.movies + spec.genres, 50u);
  ASSERT_EQ(spec.rules.size(), 2u);
  const auto syn = generate_synthetic(spec);
  const Dataset d = parse_dataset_text(syn.types, syn.facts, syn.positives, "", syn.target);
  EXPECT_EQ(d.num_positives, spec.num_positives);
  EXPECT_GT(d.store.size(), 0u);
  std::istringstream truth(syn.truth);
  const auto rules = read_walks(truth, d.store.vocab());
  EXPECT_EQ(rules.size(), 2u);
  for (const auto& r : rules) EXPECT_TRUE(validate_walk(d.store.vocab(), r, d.target));
  // Sorted, distinct positives and deterministic output.
  const auto again = generate_synthetic(spec);
  EXPECT_EQ(again.facts, syn.facts);
  EXPECT_EQ(again.positives, syn.positives);
}

TEST(Synthetic, ZeroProbabilityPlantsNothing) {
  SyntheticSpec spec = SyntheticSpec::movie_default();
  for (auto& r : spec.rules) r.probability = 0.0;
  const auto syn = generate_synthetic(spec);
  EXPECT_EQ(syn.planted_positives, 0u);
  const Dataset d = parse_dataset_text(syn.types, syn.facts, syn.positives, "", syn.target);
  EXPECT_EQ(d.num_positives, spec.num_positives);
}

TEST(Synthetic, ValidateRejects) {
  SyntheticSpec spec = SyntheticSpec::movie_default();
  spec.noise = 1.5;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = SyntheticSpec::movie_default();
  spec.rules[0].probability = -0.1;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = SyntheticSpec::movie_default();
  spec.rules[0].chain = {"actedin"};
  EXPECT_THROW(generate_synthetic(spec), ConfigError);
}

TEST(Synthetic, WritesFiles) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("relnet_synth_test_" + std::to_string(::getpid()));
  write_synthetic(generate_synthetic(SyntheticSpec::movie_default()), dir);
  for (const char* f : {"types.txt", "facts.txt", "pos.txt", "truth.txt", "experiment.cfg"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const Dataset d = parse_dataset({dir / "types.txt", dir / "facts.txt", dir / "pos.txt",
                                   std::nullopt, "workedunder"});
  EXPECT_EQ(d.num_positives, 60u);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace relnet
