#include "relnet/pipeline.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "relnet/error.h"
#include "relnet/synthetic.h"

namespace relnet {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) { return read_file(p); }

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("relnet_pipeline_" + std::to_string(::getpid()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    SyntheticSpec spec = SyntheticSpec::movie_default();
    spec.num_positives = 30;
    write_synthetic(generate_synthetic(spec), root_ / "data");
  }
  void TearDown() override { fs::remove_all(root_); }

  ExperimentConfig base(const std::string& out) const {
    ExperimentConfig cfg = load_config(root_ / "data" / "experiment.cfg");
    cfg.train.num_walks = 8;
    cfg.out = (root_ / out).string();
    return cfg;
  }

  fs::path root_;
};

TEST_F(PipelineTest, ConfigKeysAndManifest) {
  ExperimentConfig cfg = base("run");
  cfg.set("num-walks", "80");
  cfg.set("combiner", "noisyor");
  cfg.set("lr", "0.05");
  const std::string m = cfg.manifest();
  EXPECT_NE(m.find("num-walks = 80\n"), std::string::npos) << m;
  EXPECT_NE(m.find("combiner = noisyor\n"), std::string::npos);
  EXPECT_NE(m.find("lr = 0.05\n"), std::string::npos);
  EXPECT_EQ(m.find("out ="), std::string::npos);
  // The manifest is itself a loadable config with the same manifest.
  std::ofstream(root_ / "m.cfg") << m;
  EXPECT_EQ(load_config(root_ / "m.cfg").manifest(), m);
}

TEST_F(PipelineTest, BadConfigValues) {
  ExperimentConfig cfg;
  EXPECT_THROW(cfg.set("num-walks", "many"), ConfigError);
  EXPECT_THROW(cfg.set("lr", "0.05x"), ConfigError);
  EXPECT_THROW(cfg.set("colour", "red"), ConfigError);
  EXPECT_THROW(cfg.set("combiner", "sum"), ConfigError);
  EXPECT_THROW(parse_key_values("just text\n", "c"), ParseError);
  const auto kv = parse_key_values("# comment\n a = b \n\nc=d e\n", "c");
  EXPECT_EQ(kv.at("a"), "b");
  EXPECT_EQ(kv.at("c"), "d e");
}

TEST_F(PipelineTest, RelativePathsResolveAgainstConfig) {
  std::ofstream(root_ / "data" / "rel.cfg")
      << "types = types.txt\nfacts = facts.txt\npos = pos.txt\ntarget = workedunder\n";
  const auto cfg = load_config(root_ / "data" / "rel.cfg");
  EXPECT_TRUE(fs::path(cfg.types).is_absolute());
  EXPECT_NO_THROW(cfg.validate());
}

TEST_F(PipelineTest, RunWritesArtifacts) {
  const auto cfg = base("run");
  const auto result = run_pipeline(cfg);
  for (const char* f : {"manifest.txt", "walks.txt", "examples.txt", "results.tsv"}) {
    EXPECT_TRUE(fs::exists(root_ / "run" / f)) << f;
  }
  for (int k = 0; k < 5; ++k) {
    const std::string s = std::to_string(k);
    EXPECT_TRUE(fs::exists(root_ / "run" / ("model_fold" + s + ".txt")));
    EXPECT_TRUE(fs::exists(root_ / "run" / ("scores_fold" + s + ".tsv")));
    EXPECT_TRUE(fs::exists(root_ / "run" / ("train_log_fold" + s + ".csv")));
  }
  EXPECT_EQ(result.data.examples.size(), 90u);
  const std::string results = slurp(root_ / "run" / "results.tsv");
  EXPECT_EQ(results, format_results(result.cv));
  EXPECT_EQ(results.substr(0, 6), "# fold");
}

TEST_F(PipelineTest, ManifestReplayIsByteIdentical) {
  run_pipeline(base("first"));
  ExperimentConfig replay = load_config(root_ / "first" / "manifest.txt");
  replay.out = (root_ / "second").string();
  run_pipeline(replay);
  for (const auto& entry : fs::directory_iterator(root_ / "first")) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(root_ / "second" / name)) << name;
  }
}

TEST_F(PipelineTest, MissingFactsFileIsStageTagged) {
  ExperimentConfig cfg = base("broken");
  cfg.facts = (root_ / "data" / "nope.txt").string();
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_EQ(e.stage(), "config");
    EXPECT_NE(std::string(e.what()).find("nope.txt"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(root_ / "broken"));
}

TEST_F(PipelineTest, ParseErrorIsStageTagged) {
  std::ofstream(root_ / "data" / "bad_facts.txt") << "actedin(p1,\n";
  ExperimentConfig cfg = base("broken");
  cfg.facts = (root_ / "data" / "bad_facts.txt").string();
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.stage(), "parse");
    EXPECT_EQ(e.line(), 1);
  }
  EXPECT_FALSE(fs::exists(root_ / "broken"));
}

TEST_F(PipelineTest, WalksFileOverridesGeneration) {
  std::ofstream(root_ / "walks.txt") << "1: actedin ; directed^-1\n2: directed ; actedin^-1\n";
  ExperimentConfig cfg = base("w");
  cfg.walks = (root_ / "walks.txt").string();
  const auto result = run_pipeline(cfg);
  EXPECT_EQ(result.walks.size(), 2u);
  EXPECT_EQ(slurp(root_ / "w" / "walks.txt"), slurp(root_ / "walks.txt"));

  std::ofstream(root_ / "badwalk.txt") << "1: actedin\n";
  cfg.walks = (root_ / "badwalk.txt").string();
  cfg.out = (root_ / "w2").string();
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), "walks");
  }
}

}  // namespace
}  // namespace relnet
