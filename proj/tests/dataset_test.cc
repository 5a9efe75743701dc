#include "relnet/dataset.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "relnet/error.h"
#include "test_util.h"

namespace relnet {
namespace {

using testing::kMovieTypes;

TEST(ParseAtomLine, Grammar) {
  const auto a = parse_atom_line("workedunder(leo,marty).", 1, "x");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->name, "workedunder");
  EXPECT_EQ(a->args, (std::vector<std::string>{"leo", "marty"}));
  EXPECT_EQ(a->line, 1);

  const auto q = parse_atom_line("  actedin( leo , \"The \\\"Big\\\" One\" )  % note", 2, "x");
  ASSERT_TRUE(q);
  EXPECT_EQ(q->args[1], "The \"Big\" One");

  EXPECT_FALSE(parse_atom_line("", 3, "x"));
  EXPECT_FALSE(parse_atom_line("   % only a comment", 4, "x"));
  EXPECT_TRUE(parse_atom_line("professor(ana)", 5, "x"));
}

TEST(ParseAtomLine, MalformedNamesLineAndToken) {
  try {
    parse_atom_line("actedin(leo", 7, "facts.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7);
    EXPECT_EQ(e.column(), 12);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("facts.txt"), std::string::npos) << msg;
    EXPECT_NE(msg.find("expected ',' or ')'"), std::string::npos) << msg;
  }
  EXPECT_THROW(parse_atom_line("actedin(leo,)", 1, "x"), ParseError);
  EXPECT_THROW(parse_atom_line("actedin leo", 1, "x"), ParseError);
  EXPECT_THROW(parse_atom_line("a(b). c(d).", 1, "x"), ParseError);
  EXPECT_THROW(parse_atom_line("a(\"open)", 1, "x"), ParseError);
}

TEST(ParseDataset, SinglePositive) {
  const Dataset d = parse_dataset_text(kMovieTypes, "", "workedunder(leo,marty).\n", "",
                                       "workedunder");
  ASSERT_EQ(d.examples.size(), 1u);
  EXPECT_EQ(d.num_positives, 1u);
  EXPECT_FALSE(d.has_negatives);
  EXPECT_EQ(d.examples[0].label, Label::kPositive);
  EXPECT_EQ(format_example(d.store.vocab(), d.examples[0]), "workedunder(leo,marty).");
}

TEST(ParseDataset, UnaryFactIsBinarized) {
  const Dataset d = parse_dataset_text("professor(Person)\nadvisedby(Person,Person)\n",
                                       "professor(ana).\n", "advisedby(bob,ana).\n", "",
                                       "advisedby");
  const auto& v = d.store.vocab();
  const auto p = *v.parse_predicate("professor");
  const ConstId ana = *v.find_constant(*v.find_type("Person"), "ana");
  const ConstId yes = *v.find_constant(*v.find_type(kBoolTypeName), kTrueSymbol);
  EXPECT_TRUE(d.store.contains({p, ana, yes}));
}

TEST(ParseDataset, Errors) {
  // Undeclared predicate in facts.
  EXPECT_THROW(parse_dataset_text(kMovieTypes, "likes(a,b).\n", "", "", "workedunder"),
               TypeError);
  // Example over a predicate other than the target.
  EXPECT_THROW(parse_dataset_text(kMovieTypes, "", "actedin(leo,m).\n", "", "workedunder"),
               TypeError);
  EXPECT_THROW(parse_dataset_text(kMovieTypes, "", "", "", "nosuch"), ConfigError);
  EXPECT_THROW(parse_dataset_text("r(A)\n", "", "", "", "r"), ConfigError);
  EXPECT_THROW(parse_dataset_text(kMovieTypes, "workedunder(a,b).\n", "", "", "workedunder"),
               TypeError);
  EXPECT_THROW(parse_dataset_text("r(A,B,C,D)\n", "", "", "", "r"), ParseError);
  EXPECT_THROW(parse_dataset_text(kMovieTypes, "actedin(a,b", "", "", "workedunder"),
               ParseError);
}

TEST(ParseDataset, NegativesFollowPositives) {
  const Dataset d = parse_dataset_text(kMovieTypes, "", "workedunder(a,b).\n",
                                       "workedunder(b,a).\nworkedunder(a,c).\n",
                                       "workedunder");
  ASSERT_EQ(d.examples.size(), 3u);
  EXPECT_TRUE(d.has_negatives);
  EXPECT_EQ(d.examples[0].label, Label::kPositive);
  EXPECT_EQ(d.examples[1].label, Label::kNegative);
  EXPECT_EQ(d.examples[2].label, Label::kNegative);
}

TEST(Serialization, ParseWriteParseRoundTrip) {
  const std::string types = std::string(kMovieTypes) + "professor(Person)\n"
                            "taughtby(Course,Person,Quarter)\n";
  const std::string facts = std::string(testing::kLeoMartyFacts) +
                            "professor(marty).\ntaughtby(c1,marty,\"fall 07\").\n";
  const Dataset a = parse_dataset_text(types, facts, "workedunder(leo,marty).\n",
                                       "workedunder(kate,leo).\n", "workedunder");
  std::ostringstream t, f, p, n;
  write_type_decls(t, a.store.vocab());
  write_facts(f, a.store);
  std::vector<TargetExample> pos(a.examples.begin(), a.examples.begin() + 1);
  std::vector<TargetExample> neg(a.examples.begin() + 1, a.examples.end());
  write_examples(p, a.store.vocab(), pos);
  write_examples(n, a.store.vocab(), neg);
  const Dataset b = parse_dataset_text(t.str(), f.str(), p.str(), n.str(), "workedunder");

  const auto& va = a.store.vocab();
  const auto& vb = b.store.vocab();
  ASSERT_EQ(va.num_constants(), vb.num_constants());
  for (ConstId c = 0; c < va.num_constants(); ++c) {
    EXPECT_EQ(va.symbol(c), vb.symbol(c));
    EXPECT_EQ(va.type_name(va.type_of(c)), vb.type_name(vb.type_of(c)));
  }
  ASSERT_EQ(va.num_predicates(), vb.num_predicates());
  EXPECT_EQ(a.store.facts(), b.store.facts());
  EXPECT_EQ(a.examples, b.examples);

  std::ostringstream f2;
  write_facts(f2, b.store);
  EXPECT_EQ(f2.str(), f.str());
}

TEST(Serialization, QuoteSymbol) {
  EXPECT_EQ(quote_symbol("leo"), "leo");
  EXPECT_EQ(quote_symbol("The Departed"), "\"The Departed\"");
  EXPECT_EQ(quote_symbol("a\"b"), "\"a\\\"b\"");
}

class DatasetFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("relnet_dataset_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
    write("types.txt", kMovieTypes);
    write("facts.txt", testing::kLeoMartyFacts);
    write("pos.txt", "workedunder(leo,marty).\nworkedunder(kate,leo).\n");
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  void write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
  }
  DatasetPaths paths() const {
    return {dir_ / "types.txt", dir_ / "facts.txt", dir_ / "pos.txt", std::nullopt,
            "workedunder"};
  }
  std::filesystem::path dir_;
};

TEST_F(DatasetFiles, ParsesFromDisk) {
  const Dataset d = parse_dataset(paths());
  EXPECT_EQ(d.store.size(), 11u);
  EXPECT_EQ(d.num_positives, 2u);
}

TEST_F(DatasetFiles, MissingFileIsConfigError) {
  DatasetPaths p = paths();
  p.facts = dir_ / "absent.txt";
  EXPECT_THROW(parse_dataset(p), ConfigError);
}

TEST_F(DatasetFiles, FoldsFile) {
  const Dataset d = parse_dataset(paths());
  write("folds.txt", "1 workedunder(leo,marty).\n0 workedunder(kate,leo).\n");
  EXPECT_EQ(read_folds(dir_ / "folds.txt", d, 2), (std::vector<std::size_t>{1, 0}));
  write("bad.txt", "3 workedunder(leo,marty).\n0 workedunder(kate,leo).\n");
  EXPECT_THROW(read_folds(dir_ / "bad.txt", d, 2), ParseError);
  write("partial.txt", "0 workedunder(leo,marty).\n");
  EXPECT_THROW(read_folds(dir_ / "partial.txt", d, 2), ConfigError);
}

}  // namespace
}  // namespace relnet
