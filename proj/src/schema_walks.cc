#include "relnet/schema_walks.h"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <set>

#include "relnet/error.h"
#include "relnet/random.h"

namespace relnet {

std::span<const Predicate> SchemaGraph::outgoing(TypeId type) const {
  if (type >= outgoing_.size()) return {};
  return outgoing_[type];
}

bool SchemaGraph::has_node(TypeId type) const {
  return std::find(nodes_.begin(), nodes_.end(), type) != nodes_.end();
}

SchemaGraph build_schema_graph(const Vocabulary& vocab, std::span<const PredId> decls) {
  SchemaGraph g;
  g.outgoing_.resize(vocab.num_types());
  std::set<PredId> seen;
  for (PredId p : decls) {
    if (!seen.insert(p).second) continue;
    const auto& d = vocab.decl(p);
    for (TypeId t : {d.arg1_type, d.arg2_type}) {
      if (!g.has_node(t)) g.nodes_.push_back(t);
    }
    for (bool inverse : {false, true}) {
      const Predicate e{p, inverse};
      g.edges_.push_back(e);
      g.outgoing_[vocab.domain(e)].push_back(e);
    }
  }
  return g;
}

SchemaGraph build_schema_graph(const Vocabulary& vocab) {
  std::vector<PredId> all(vocab.num_predicates());
  for (PredId p = 0; p < all.size(); ++p) all[p] = p;
  return build_schema_graph(vocab, all);
}

bool validate_walk(const Vocabulary& vocab, const LiftedWalk& walk, Predicate target) {
  const auto& chain = walk.chain;
  if (chain.empty() || !vocab.is_declared(target)) return false;
  for (const auto& p : chain) {
    if (!vocab.is_declared(p) || p.id == target.id) return false;
  }
  if (vocab.domain(chain.front()) != vocab.domain(target)) return false;
  if (vocab.range(chain.back()) != vocab.range(target)) return false;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (vocab.range(chain[i]) != vocab.domain(chain[i + 1])) return false;
    if (chain[i + 1] == chain[i].inverted()) return false;
  }
  return true;
}

namespace {

// Types reachable from `from` over edges other than the target.
bool reachable(const SchemaGraph& graph, const Vocabulary& vocab, TypeId from,
               TypeId to, PredId target) {
  std::vector<bool> seen(vocab.num_types(), false);
  std::deque<TypeId> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    TypeId t = queue.front();
    queue.pop_front();
    for (const auto& e : graph.outgoing(t)) {
      if (e.id == target) continue;
      TypeId next = vocab.range(e);
      if (next == to) return true;
      if (!seen[next]) {
        seen[next] = true;
        queue.push_back(next);
      }
    }
  }
  return false;
}

}  // namespace

WalkGeneration generate_walks(const SchemaGraph& graph, const Vocabulary& vocab,
                              Predicate target, const WalkOptions& options) {
  if (!vocab.is_declared(target)) throw ConfigError("target predicate is not declared");
  if (options.num_walks == 0) throw ConfigError("number of walks must be at least 1");
  if (options.max_len == 0) throw ConfigError("maximum walk length must be at least 1");

  WalkGeneration result;
  const TypeId start = vocab.domain(target);
  const TypeId goal = vocab.range(target);
  if (!graph.has_node(start) || !graph.has_node(goal) ||
      !reachable(graph, vocab, start, goal, target.id)) {
    result.diagnostic = "type " + vocab.type_name(goal) + " is unreachable from " +
                        vocab.type_name(start) + " without the target predicate";
    return result;
  }

  const std::size_t max_attempts =
      options.max_attempts ? options.max_attempts : 1000 * options.num_walks;
  Rng rng(options.seed);
  std::set<std::vector<Predicate>> seen;
  std::vector<Predicate> candidates;
  std::vector<Predicate> chain;

  while (result.walks.size() < options.num_walks && result.attempts < max_attempts) {
    ++result.attempts;
    chain.clear();
    TypeId here = start;
    bool emitted = false;
    while (chain.size() < options.max_len) {
      candidates.clear();
      for (const auto& e : graph.outgoing(here)) {
        if (e.id == target.id) continue;
        if (!chain.empty() && e == chain.back().inverted()) continue;
        candidates.push_back(e);
      }
      if (candidates.empty()) break;
      const Predicate step = candidates[rng.uniform_index(candidates.size())];
      chain.push_back(step);
      here = vocab.range(step);
      if (here == goal && (chain.size() == options.max_len || rng.bernoulli(0.5))) {
        emitted = true;
        break;
      }
    }
    if (!emitted) continue;
    if (!seen.insert(chain).second) continue;
    result.walks.push_back({static_cast<int>(result.walks.size()) + 1, chain});
  }

  if (result.walks.size() < options.num_walks) {
    result.diagnostic = "generated " + std::to_string(result.walks.size()) + " of " +
                        std::to_string(options.num_walks) + " walks in " +
                        std::to_string(result.attempts) + " attempts";
  }
  return result;
}

std::string format_walk(const Vocabulary& vocab, const LiftedWalk& walk) {
  std::string line = std::to_string(walk.rule_id) + ":";
  for (std::size_t i = 0; i < walk.chain.size(); ++i) {
    line += i ? " ; " : " ";
    line += vocab.predicate_name(walk.chain[i]);
  }
  return line;
}

void write_walks(std::ostream& out, const Vocabulary& vocab,
                 std::span<const LiftedWalk> walks) {
  for (const auto& w : walks) out << format_walk(vocab, w) << '\n';
}

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<LiftedWalk> read_walks(std::istream& in, const Vocabulary& vocab,
                                   const std::string& source) {
  std::vector<LiftedWalk> walks;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '%') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(source, line_no, 1, "expected 'id:' before the predicate chain");
    }
    LiftedWalk walk;
    const auto id_text = trim(line.substr(0, colon));
    try {
      std::size_t used = 0;
      walk.rule_id = std::stoi(std::string(id_text), &used);
      if (used != id_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(source, line_no, 1, "invalid walk id '" + std::string(id_text) + "'");
    }
    std::string_view rest = line.substr(colon + 1);
    std::size_t offset = colon + 1;
    while (true) {
      const auto semi = rest.find(';');
      const auto token = trim(rest.substr(0, semi));
      auto pred = vocab.parse_predicate(token);
      if (!pred) {
        throw ParseError(source, line_no, static_cast<int>(offset) + 1,
                         "unknown predicate '" + std::string(token) + "'");
      }
      walk.chain.push_back(*pred);
      if (semi == std::string_view::npos) break;
      rest = rest.substr(semi + 1);
      offset += semi + 1;
    }
    walks.push_back(std::move(walk));
  }
  return walks;
}

}  // namespace relnet
