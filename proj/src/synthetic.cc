#include "relnet/synthetic.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "relnet/dataset.h"
#include "relnet/error.h"
#include "relnet/grounder.h"
#include "relnet/random.h"

namespace relnet {

SyntheticSpec SyntheticSpec::movie_default() {
  SyntheticSpec spec;
  spec.rules = {{{"actedin", "directed^-1"}, 0.9}, {{"directed", "actedin^-1"}, 0.9}};
  return spec;
}

void SyntheticSpec::validate() const {
  if (persons < 2 || movies < 1 || genres < 1) {
    throw ConfigError("synthetic domain needs at least 2 persons, 1 movie and 1 genre");
  }
  if (actors_per_movie + 1 > persons) {
    throw ConfigError("more actors per movie than available persons");
  }
  if (!(noise >= 0.0 && noise <= 1.0)) throw ConfigError("noise must lie in [0, 1]");
  for (const auto& r : rules) {
    if (!(r.probability >= 0.0 && r.probability <= 1.0)) {
      throw ConfigError("planted rule probability must lie in [0, 1]");
    }
    if (r.chain.empty()) throw ConfigError("planted rule with empty chain");
  }
}

namespace {

std::string name(char prefix, std::size_t i, std::size_t count) {
  const std::size_t width = std::to_string(count).size();
  std::string digits = std::to_string(i + 1);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

std::string atom(const std::string& pred, const std::string& a, const std::string& b) {
  return pred + "(" + a + "," + b + ").";
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticDataset out;
  out.types =
      "directed(Person,Movie)\n"
      "actedin(Person,Movie)\n"
      "ingenre(Movie,Genre)\n"
      "sameperson(Person,Person)\n"
      "samegenre(Genre,Genre)\n"
      "workedunder(Person,Person)\n";

  std::vector<std::string> persons, movies, genres;
  for (std::size_t i = 0; i < spec.persons; ++i) persons.push_back(name('p', i, spec.persons));
  for (std::size_t i = 0; i < spec.movies; ++i) movies.push_back(name('m', i, spec.movies));
  for (std::size_t i = 0; i < spec.genres; ++i) genres.push_back(name('g', i, spec.genres));

  Rng rng(derive_seed(spec.seed, "facts"));
  std::set<std::string> facts;
  for (const auto& m : movies) {
    const std::size_t director = rng.uniform_index(persons.size());
    facts.insert(atom("directed", persons[director], m));
    std::vector<std::size_t> cast;
    for (std::size_t i = 0; i < persons.size(); ++i) {
      if (i != director) cast.push_back(i);
    }
    for (std::size_t k = 0; k < spec.actors_per_movie; ++k) {
      std::swap(cast[k], cast[k + rng.uniform_index(cast.size() - k)]);
      facts.insert(atom("actedin", persons[cast[k]], m));
    }
    facts.insert(atom("ingenre", m, genres[rng.uniform_index(genres.size())]));
  }
  for (const auto& g : genres) facts.insert(atom("samegenre", g, g));
  if (genres.size() > 1) {
    const std::size_t a = rng.uniform_index(genres.size());
    const std::size_t b = (a + 1 + rng.uniform_index(genres.size() - 1)) % genres.size();
    facts.insert(atom("samegenre", genres[a], genres[b]));
    facts.insert(atom("samegenre", genres[b], genres[a]));
  }
  for (std::size_t k = 0; k < spec.alias_pairs; ++k) {
    const std::size_t a = rng.uniform_index(persons.size());
    const std::size_t b = (a + 1 + rng.uniform_index(persons.size() - 1)) % persons.size();
    facts.insert(atom("sameperson", persons[a], persons[b]));
    facts.insert(atom("sameperson", persons[b], persons[a]));
  }
  std::ostringstream facts_text;
  for (const auto& f : facts) facts_text << f << '\n';
  out.facts = facts_text.str();

  // Evaluate the planted rules on the generated evidence.
  const Dataset data = parse_dataset_text(out.types, out.facts, "", "", out.target);
  const auto& vocab = data.store.vocab();
  std::vector<LiftedWalk> planted;
  std::ostringstream truth;
  for (std::size_t r = 0; r < spec.rules.size(); ++r) {
    LiftedWalk w{static_cast<int>(r) + 1, {}};
    for (const auto& p : spec.rules[r].chain) {
      auto pred = vocab.parse_predicate(p);
      if (!pred) throw ConfigError("planted rule uses unknown predicate '" + p + "'");
      w.chain.push_back(*pred);
    }
    if (!validate_walk(vocab, w, data.target)) {
      throw ConfigError("planted rule " + std::to_string(r + 1) + " is not a valid walk");
    }
    truth << format_walk(vocab, w) << '\n';
    planted.push_back(std::move(w));
  }
  out.truth = truth.str();

  const TypeId person = vocab.domain(data.target);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::size_t> pool, rest;
  Rng fire(derive_seed(spec.seed, "fire"));
  for (const auto& a : persons) {
    for (const auto& b : persons) {
      if (a == b) continue;
      bool fired = false;
      auto x = vocab.find_constant(person, a);
      auto y = vocab.find_constant(person, b);
      for (std::size_t r = 0; r < planted.size(); ++r) {
        const bool draw = fire.bernoulli(spec.rules[r].probability);
        if (!x || !y || !draw) continue;
        const TargetExample ex{data.target, *x, *y, Label::kPositive};
        if (count_groundings(planted[r], ex, data.store) > 0) fired = true;
      }
      (fired ? pool : rest).push_back(pairs.size());
      pairs.emplace_back(a, b);
    }
  }

  Rng pick(derive_seed(spec.seed, "positives"));
  const auto want_planted = static_cast<std::size_t>(
      std::llround((1.0 - spec.noise) * static_cast<double>(spec.num_positives)));
  const std::size_t from_pool = std::min(pool.size(), want_planted);
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < from_pool; ++i) {
    std::swap(pool[i], pool[i + pick.uniform_index(pool.size() - i)]);
    chosen.push_back(pool[i]);
  }
  // Noise and shortfall: uniform over every pair not yet chosen.
  std::vector<std::size_t> others(pool.begin() + static_cast<std::ptrdiff_t>(from_pool),
                                  pool.end());
  others.insert(others.end(), rest.begin(), rest.end());
  std::sort(others.begin(), others.end());
  const std::size_t from_rest =
      std::min(others.size(), spec.num_positives - std::min(spec.num_positives, from_pool));
  for (std::size_t i = 0; i < from_rest; ++i) {
    std::swap(others[i], others[i + pick.uniform_index(others.size() - i)]);
    chosen.push_back(others[i]);
  }
  out.planted_positives = from_pool;

  std::sort(chosen.begin(), chosen.end());
  std::ostringstream pos;
  for (std::size_t i : chosen) pos << atom(out.target, pairs[i].first, pairs[i].second) << '\n';
  out.positives = pos.str();
  return out;
}

void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* file, const std::string& text) {
    std::ofstream f(dir / file, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + (dir / file).string() + "'");
    f << text;
  };
  write("types.txt", data.types);
  write("facts.txt", data.facts);
  write("pos.txt", data.positives);
  write("truth.txt", data.truth);
  const auto abs = std::filesystem::absolute(dir);
  write("experiment.cfg", "types = " + (abs / "types.txt").string() + "\n" +
                              "facts = " + (abs / "facts.txt").string() + "\n" +
                              "pos = " + (abs / "pos.txt").string() + "\n" +
                              "target = " + data.target + "\n");
}

}  // namespace relnet
