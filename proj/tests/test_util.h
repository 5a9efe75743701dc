#ifndef RELNET_TESTS_TEST_UTIL_H_
#define RELNET_TESTS_TEST_UTIL_H_

#include <string>
#include <vector>

#include "relnet/dataset.h"
#include "relnet/logic.h"
#include "relnet/random.h"
#include "relnet/schema_walks.h"

namespace relnet::testing {

inline const char* kMovieTypes =
    "directed(Person,Movie)\n"
    "actedin(Person,Movie)\n"
    "ingenre(Movie,Genre)\n"
    "sameperson(Person,Person)\n"
    "samegenre(Genre,Genre)\n"
    "workedunder(Person,Person)\n";

// Leo acted in two of Marty's movies; his alias Leonardo acted in one.
inline const char* kLeoMartyFacts =
    "actedin(leo,\"The Departed\").\n"
    "actedin(leo,\"The Aviator\").\n"
    "actedin(leonardo,\"The Departed\").\n"
    "directed(marty,\"The Departed\").\n"
    "directed(marty,\"The Aviator\").\n"
    "sameperson(leo,leonardo).\n"
    "ingenre(\"The Departed\",crime).\n"
    "ingenre(\"The Aviator\",drama).\n"
    "samegenre(crime,crime).\n"
    "samegenre(drama,drama).\n"
    "actedin(kate,\"The Aviator\").\n";

inline Dataset leo_marty() {
  return parse_dataset_text(kMovieTypes, kLeoMartyFacts,
                            "workedunder(leo,marty).\nworkedunder(kate,leo).\n", "",
                            "workedunder");
}

inline LiftedWalk walk_of(const Vocabulary& vocab, int id,
                          const std::vector<std::string>& names) {
  LiftedWalk w{id, {}};
  for (const auto& n : names) w.chain.push_back(*vocab.parse_predicate(n));
  return w;
}

// R1: actedin ; directed^-1     R2: sameperson ; actedin ; directed^-1
inline std::vector<LiftedWalk> leo_marty_walks(const Vocabulary& vocab) {
  return {walk_of(vocab, 1, {"actedin", "directed^-1"}),
          walk_of(vocab, 2, {"sameperson", "actedin", "directed^-1"})};
}

// A random store over the movie schema: `persons`, `movies`, `genres`
// constants and `num_facts` uniformly drawn facts (duplicates collapse).
inline FactStore random_movie_store(std::uint64_t seed, std::size_t num_facts,
                                    std::size_t persons = 12, std::size_t movies = 10,
                                    std::size_t genres = 4) {
  Dataset d = parse_dataset_text(kMovieTypes, "", "", "", "workedunder");
  FactStore store = std::move(d.store);
  Vocabulary& v = store.vocab();
  const TypeId tp = *v.find_type("Person");
  const TypeId tm = *v.find_type("Movie");
  const TypeId tg = *v.find_type("Genre");
  std::vector<ConstId> ps, ms, gs;
  for (std::size_t i = 0; i < persons; ++i) ps.push_back(v.intern(tp, "p" + std::to_string(i)));
  for (std::size_t i = 0; i < movies; ++i) ms.push_back(v.intern(tm, "m" + std::to_string(i)));
  for (std::size_t i = 0; i < genres; ++i) gs.push_back(v.intern(tg, "g" + std::to_string(i)));
  const std::vector<std::string> preds = {"directed", "actedin", "ingenre", "sameperson",
                                          "samegenre"};
  Rng rng(seed);
  auto pick = [&](const std::vector<ConstId>& pool) { return pool[rng.uniform_index(pool.size())]; };
  auto pool_of = [&](TypeId t) -> const std::vector<ConstId>& {
    return t == tp ? ps : t == tm ? ms : gs;
  };
  for (std::size_t i = 0; i < num_facts; ++i) {
    const Predicate p = *v.parse_predicate(preds[rng.uniform_index(preds.size())]);
    const ConstId a = pick(pool_of(v.domain(p)));
    const ConstId b = pick(pool_of(v.range(p)));
    store.add_fact({p, a, b});
  }
  return store;
}

}  // namespace relnet::testing

#endif  // RELNET_TESTS_TEST_UTIL_H_
