#include "relnet/network.h"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.h"
#include "relnet/error.h"
#include "test_util.h"

namespace relnet {
namespace {

using oracle::shaped_network;
using testing::leo_marty;
using testing::leo_marty_walks;

constexpr CombinerMode kModes[] = {CombinerMode::kAverage, CombinerMode::kMax,
                                   CombinerMode::kNoisyOr};

TEST(Instantiate, LeoMartyCounts) {
  const Dataset d = leo_marty();
  const auto walks = leo_marty_walks(d.store.vocab());
  const GroundNetwork net = instantiate(walks, d.examples[0], d.store, GroundingMode{});
  ASSERT_EQ(net.num_rules(), 2u);
  EXPECT_EQ(net.num_groundings(0), 2u);
  EXPECT_EQ(net.num_groundings(1), 1u);
  EXPECT_EQ(net.body_length(0), 2u);
  EXPECT_EQ(net.body_length(1), 3u);
  // actedin(leo, Departed/Aviator), directed(marty, Departed/Aviator),
  // sameperson(leo, leonardo), actedin(leonardo, Departed).
  EXPECT_EQ(net.fact_nodes().size(), 6u);
}

TEST(Instantiate, NoGroundingsStillValid) {
  const Dataset d = leo_marty();
  const auto walks = leo_marty_walks(d.store.vocab());
  // workedunder(kate, leo): kate acted in a movie leo did not direct.
  const GroundNetwork net = instantiate(walks, d.examples[1], d.store, GroundingMode{});
  EXPECT_EQ(net.num_groundings(0), 0u);
  EXPECT_EQ(net.num_groundings(1), 0u);
  EXPECT_TRUE(net.fact_nodes().empty());
  const auto trace = forward(net, ModelParams::random(2, 3), CombinerMode::kAverage);
  EXPECT_NEAR(trace.probs[0] + trace.probs[1], 1.0, 1e-12);
}

TEST(Instantiate, AllIndependentOfThreadCount) {
  const FactStore store = testing::random_movie_store(5, 600);
  const auto& v = store.vocab();
  const Predicate target = *v.parse_predicate("workedunder");
  WalkOptions opt;
  opt.num_walks = 10;
  const auto walks = generate_walks(build_schema_graph(v), v, target, opt).walks;
  std::vector<TargetExample> examples;
  const auto persons = v.constants_of(*v.find_type("Person"));
  for (ConstId a : persons) examples.push_back({target, a, persons[0], Label::kPositive});
  const GroundingMode mode{3, 99};
  const auto one = instantiate_all(walks, examples, store, mode, 1);
  const auto four = instantiate_all(walks, examples, store, mode, 4);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    for (std::size_t j = 0; j < walks.size(); ++j) {
      EXPECT_EQ(one[i].per_rule[j].groundings, four[i].per_rule[j].groundings);
    }
  }
}

TEST(GroundActivation, Examples) {
  EXPECT_EQ(ground_activation(0.0, 4, CombinerMode::kAverage), 0.0);
  EXPECT_EQ(ground_activation(0.0, 3, CombinerMode::kNoisyOr), 0.5);
  EXPECT_DOUBLE_EQ(ground_activation(0.2, 2, CombinerMode::kMax), std::tanh(0.4));
  EXPECT_DOUBLE_EQ(ground_activation(-0.5, 3, CombinerMode::kNoisyOr),
                   1.0 / (1.0 + std::exp(1.5)));
}

TEST(Combine, Examples) {
  const std::vector<double> empty;
  for (auto m : kModes) EXPECT_EQ(combine(empty, m), 0.0);
  const std::vector<double> a{0.2, 0.5, 0.3};
  EXPECT_DOUBLE_EQ(combine(a, CombinerMode::kAverage), 1.0 / 3.0);
  EXPECT_EQ(combine(a, CombinerMode::kMax), 0.5);
  EXPECT_DOUBLE_EQ(combine(a, CombinerMode::kNoisyOr), 1.0 - 0.8 * 0.5 * 0.7);
  const std::vector<double> halves{0.5, 0.5};
  EXPECT_DOUBLE_EQ(combine(halves, CombinerMode::kNoisyOr), 0.75);
}

TEST(Combine, NoisyOrRejectsOutOfRange) {
  const std::vector<double> bad{0.5, 1.5};
  EXPECT_THROW(combine(bad, CombinerMode::kNoisyOr), NumericError);
  const std::vector<double> neg{-0.1};
  EXPECT_THROW(combine(neg, CombinerMode::kNoisyOr), NumericError);
}

TEST(CombineProperty, OrderingOnUnitInterval) {
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> a(1 + rng.uniform_index(8));
    for (auto& x : a) x = rng.uniform01();
    const double avg = combine(a, CombinerMode::kAverage);
    const double mx = combine(a, CombinerMode::kMax);
    const double nor = combine(a, CombinerMode::kNoisyOr);
    const double mn = *std::min_element(a.begin(), a.end());
    EXPECT_LE(mn, avg + 1e-15);
    EXPECT_LE(avg, mx + 1e-15);
    EXPECT_LE(mx, nor + 1e-15);
    EXPECT_LE(nor, 1.0);
  }
}

TEST(Forward, NoGroundingsGivesSoftmaxOfBias) {
  const GroundNetwork net = shaped_network({2, 3}, {0, 0});
  ModelParams p = ModelParams::random(2, 1);
  p.b = {0.3, -0.2};
  for (auto m : kModes) {
    const auto t = forward(net, p, m);
    const double e0 = std::exp(0.3), e1 = std::exp(-0.2);
    EXPECT_NEAR(t.probs[0], e0 / (e0 + e1), 1e-15);
    EXPECT_NEAR(t.score(), e1 / (e0 + e1), 1e-15);
  }
}

TEST(Forward, SingleRuleByHand) {
  const GroundNetwork net = shaped_network({2}, {3});
  ModelParams p = ModelParams::zeros(1);
  p.w = {0.25};
  p.u = {-0.4, 0.7};
  p.b = {0.1, 0.0};
  const auto t = forward(net, p, CombinerMode::kAverage);
  const double c = std::tanh(0.5);
  EXPECT_DOUBLE_EQ(t.rule_acts[0], c);
  const double z0 = 0.1 - 0.4 * c, z1 = 0.7 * c;
  EXPECT_NEAR(t.score(), std::exp(z1) / (std::exp(z0) + std::exp(z1)), 1e-15);
  ASSERT_EQ(t.ground_acts[0].size(), 3u);
}

TEST(Forward, MoreGroundingsAverageUnchangedNoisyOrGrows) {
  ModelParams p = ModelParams::zeros(1);
  p.w = {0.3};
  p.u = {0.0, 1.0};
  const auto few = shaped_network({2}, {2});
  const auto many = shaped_network({2}, {4});
  EXPECT_DOUBLE_EQ(forward(few, p, CombinerMode::kAverage).score(),
                   forward(many, p, CombinerMode::kAverage).score());
  EXPECT_DOUBLE_EQ(forward(few, p, CombinerMode::kMax).score(),
                   forward(many, p, CombinerMode::kMax).score());
  EXPECT_GT(forward(many, p, CombinerMode::kNoisyOr).score(),
            forward(few, p, CombinerMode::kNoisyOr).score());
}

TEST(ForwardProperty, ProbabilitiesNormalized) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    for (auto m : kModes) {
      const auto r = oracle::random_network(s, m);
      const auto t = forward(r.net, r.params, m);
      EXPECT_NEAR(t.probs[0] + t.probs[1], 1.0, 1e-12);
      for (double p : t.probs) EXPECT_TRUE(p >= 0.0 && p <= 1.0);
      const auto again = forward(r.net, r.params, m);
      EXPECT_EQ(t.probs, again.probs);
    }
  }
}

// Raising u_{j,+} for a rule with positive activation raises the score.
TEST(ForwardProperty, MonotoneInPositiveOutputWeight) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    for (auto m : kModes) {
      auto r = oracle::random_network(s, m);
      const auto t = forward(r.net, r.params, m);
      for (std::size_t j = 0; j < r.net.num_rules(); ++j) {
        if (t.rule_acts[j] <= 0.0) continue;
        ModelParams q = r.params;
        q.u_at(j, 1) += 0.5;
        EXPECT_GT(forward(r.net, q, m).score(), t.score());
      }
    }
  }
}

TEST(Forward, DimensionMismatch) {
  const GroundNetwork net = shaped_network({1, 1}, {1, 1});
  EXPECT_THROW(forward(net, ModelParams::zeros(3), CombinerMode::kAverage), ConfigError);
}

TEST(Forward, NonFiniteLogit) {
  const GroundNetwork net = shaped_network({1}, {1});
  ModelParams p = ModelParams::zeros(1);
  p.w = {1.0};
  p.u = {std::numeric_limits<double>::infinity(), 0.0};
  EXPECT_THROW(forward(net, p, CombinerMode::kAverage), NumericError);
}

TEST(ParseCombiner, Names) {
  for (auto m : kModes) EXPECT_EQ(parse_combiner(to_string(m)), m);
  EXPECT_THROW(parse_combiner("sum"), ConfigError);
}

TEST(ModelFile, RoundTripReproducesScores) {
  const Dataset d = leo_marty();
  const auto& v = d.store.vocab();
  Model m{"workedunder", CombinerMode::kNoisyOr, leo_marty_walks(v),
          ModelParams::random(2, 77, 0.9)};
  m.params.b = {0.1 / 3.0, -1e-17};
  std::ostringstream out;
  write_model(out, v, m);
  std::istringstream in(out.str());
  const Model back = read_model(in, v);
  EXPECT_EQ(back.target, m.target);
  EXPECT_EQ(back.combiner, m.combiner);
  EXPECT_EQ(back.walks, m.walks);
  EXPECT_EQ(back.params, m.params);
  for (const auto& ex : d.examples) {
    const auto net = instantiate(m.walks, ex, d.store, GroundingMode{});
    EXPECT_EQ(forward(net, m.params, m.combiner).score(),
              forward(net, back.params, back.combiner).score());
  }
  std::ostringstream again;
  write_model(again, v, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(ModelFile, RejectsMalformed) {
  const Dataset d = leo_marty();
  const auto& v = d.store.vocab();
  std::istringstream wrong_header("relnet-model 9\n");
  EXPECT_THROW(read_model(wrong_header, v), ParseError);
  std::istringstream bad_number(
      "relnet-model 1\ntarget workedunder\ncombiner max\nrules 1\nclasses 2\n"
      "walk 1: actedin ; directed^-1\nw abc\nu 0 0\nb 0 0\n");
  EXPECT_THROW(read_model(bad_number, v), ParseError);
  std::istringstream short_u(
      "relnet-model 1\ntarget workedunder\ncombiner max\nrules 1\nclasses 2\n"
      "walk 1: actedin ; directed^-1\nw 0.5\nu 0\nb 0 0\n");
  EXPECT_THROW(read_model(short_u, v), ParseError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 0.0}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}

}  // namespace
}  // namespace relnet
