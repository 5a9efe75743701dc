#include "relnet/network.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "relnet/error.h"
#include "relnet/random.h"

namespace relnet {

std::string_view to_string(CombinerMode mode) {
  switch (mode) {
    case CombinerMode::kAverage: return "average";
    case CombinerMode::kMax: return "max";
    case CombinerMode::kNoisyOr: return "noisyor";
  }
  return "average";
}

CombinerMode parse_combiner(std::string_view text) {
  if (text == "average") return CombinerMode::kAverage;
  if (text == "max") return CombinerMode::kMax;
  if (text == "noisyor") return CombinerMode::kNoisyOr;
  throw ConfigError("unknown combiner '" + std::string(text) +
                    "' (expected average, max or noisyor)");
}

ModelParams ModelParams::zeros(std::size_t rules, std::size_t classes) {
  ModelParams p;
  p.num_rules = rules;
  p.num_classes = classes;
  p.w.assign(rules, 0.0);
  p.u.assign(rules * classes, 0.0);
  p.b.assign(classes, 0.0);
  return p;
}

ModelParams ModelParams::random(std::size_t rules, std::uint64_t seed, double scale,
                                std::size_t classes) {
  ModelParams p = zeros(rules, classes);
  Rng rng(seed);
  for (auto& x : p.w) x = rng.uniform(-scale, scale);
  for (auto& x : p.u) x = rng.uniform(-scale, scale);
  return p;
}

bool ModelParams::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(w) && finite(u) && finite(b);
}

std::vector<Atom> GroundNetwork::fact_nodes() const {
  std::set<Atom> facts;
  for (std::size_t j = 0; j < per_rule.size(); ++j) {
    for (const auto& g : per_rule[j].groundings) {
      for (std::size_t k = 0; k < bodies[j].size(); ++k) {
        facts.insert(Atom{bodies[j][k], g.bindings[k], g.bindings[k + 1]}.canonical());
      }
    }
  }
  return {facts.begin(), facts.end()};
}

std::uint64_t grounding_seed(std::uint64_t base, int walk_id, const TargetExample& ex) {
  return derive_seed(base, {static_cast<std::uint64_t>(walk_id), ex.target.id,
                            ex.arg1, ex.arg2});
}

GroundNetwork instantiate(std::span<const LiftedWalk> walks, const TargetExample& ex,
                          const FactStore& store, const GroundingMode& mode) {
  GroundNetwork net;
  net.example = ex;
  net.bodies.reserve(walks.size());
  net.per_rule.reserve(walks.size());
  for (const auto& walk : walks) {
    net.bodies.push_back(walk.chain);
    if (mode.samples_per_walk == 0) {
      net.per_rule.push_back(ground_exhaustive(walk, ex, store));
    } else {
      net.per_rule.push_back(ground_sampled(walk, ex, store, mode.samples_per_walk,
                                            grounding_seed(mode.seed, walk.rule_id, ex)));
    }
  }
  return net;
}

std::vector<GroundNetwork> instantiate_all(std::span<const LiftedWalk> walks,
                                           std::span<const TargetExample> examples,
                                           const FactStore& store,
                                           const GroundingMode& mode,
                                           std::size_t threads) {
  std::vector<GroundNetwork> nets(examples.size());
  threads = std::max<std::size_t>(1, std::min(threads, examples.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      nets[i] = instantiate(walks, examples[i], store, mode);
    }
    return nets;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < examples.size(); i += threads) {
            nets[i] = instantiate(walks, examples[i], store, mode);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return nets;
}

double ground_activation(double weight, std::size_t body_length, CombinerMode mode) {
  const double z = weight * static_cast<double>(body_length);
  if (mode == CombinerMode::kNoisyOr) return 1.0 / (1.0 + std::exp(-z));
  return std::tanh(z);
}

double ground_activation_slope(double activation, CombinerMode mode) {
  if (mode == CombinerMode::kNoisyOr) return activation * (1.0 - activation);
  return 1.0 - activation * activation;
}

double combine(std::span<const double> acts, CombinerMode mode) {
  if (acts.empty()) return 0.0;
  switch (mode) {
    case CombinerMode::kAverage: {
      double sum = 0.0;
      for (double a : acts) sum += a;
      return sum / static_cast<double>(acts.size());
    }
    case CombinerMode::kMax:
      return *std::max_element(acts.begin(), acts.end());
    case CombinerMode::kNoisyOr: {
      double none = 1.0;
      for (double a : acts) {
        if (!(a >= 0.0 && a <= 1.0)) {
          throw NumericError("noisy-or input outside [0, 1]: " + format_double(a));
        }
        none *= 1.0 - a;
      }
      return 1.0 - none;
    }
  }
  return 0.0;
}

ForwardTrace forward(const GroundNetwork& net, const ModelParams& params,
                     CombinerMode mode) {
  const std::size_t rules = net.num_rules();
  if (params.num_rules != rules) {
    throw ConfigError("model has " + std::to_string(params.num_rules) +
                      " rules but the network has " + std::to_string(rules));
  }
  const std::size_t classes = params.num_classes;
  ForwardTrace trace;
  trace.ground_acts.resize(rules);
  trace.rule_acts.resize(rules);
  for (std::size_t j = 0; j < rules; ++j) {
    auto& acts = trace.ground_acts[j];
    acts.reserve(net.num_groundings(j));
    for (std::size_t i = 0; i < net.num_groundings(j); ++i) {
      acts.push_back(ground_activation(params.w[j], net.body_length(j), mode));
      // Tied weight: every ground node of rule j sees the same input.
      if (acts[i] != acts.front()) throw std::logic_error("tied activations differ");
    }
    trace.rule_acts[j] = combine(acts, mode);
  }
  trace.logits.assign(params.b.begin(), params.b.end());
  for (std::size_t j = 0; j < rules; ++j) {
    const double c = trace.rule_acts[j];
    if (c == 0.0) continue;
    for (std::size_t k = 0; k < classes; ++k) trace.logits[k] += params.u_at(j, k) * c;
  }
  for (double z : trace.logits) {
    if (!std::isfinite(z)) throw NumericError("non-finite logit in forward pass");
  }
  const double top = *std::max_element(trace.logits.begin(), trace.logits.end());
  trace.probs.resize(classes);
  double norm = 0.0;
  for (std::size_t k = 0; k < classes; ++k) {
    trace.probs[k] = std::exp(trace.logits[k] - top);
    norm += trace.probs[k];
  }
  for (auto& p : trace.probs) p /= norm;
  return trace;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

namespace {

void write_values(std::ostream& out, const char* key, const std::vector<double>& v) {
  out << key;
  for (double x : v) out << ' ' << format_double(x);
  out << '\n';
}

double parse_double(std::string_view text, const std::string& source, int line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(source, line, 1, "invalid number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void write_model(std::ostream& out, const Vocabulary& vocab, const Model& model) {
  const auto& p = model.params;
  out << "relnet-model 1\n";
  out << "target " << model.target << '\n';
  out << "combiner " << to_string(model.combiner) << '\n';
  out << "rules " << p.num_rules << '\n';
  out << "classes " << p.num_classes << '\n';
  for (const auto& w : model.walks) out << "walk " << format_walk(vocab, w) << '\n';
  write_values(out, "w", p.w);
  write_values(out, "u", p.u);
  write_values(out, "b", p.b);
}

Model read_model(std::istream& in, const Vocabulary& vocab, const std::string& source) {
  Model model;
  std::string line;
  int line_no = 0;
  auto next = [&](std::string_view key) -> std::string {
    if (!std::getline(in, line)) {
      throw ParseError(source, line_no + 1, 1, "expected '" + std::string(key) + "'");
    }
    ++line_no;
    if (!line.starts_with(key) ||
        (line.size() > key.size() && line[key.size()] != ' ')) {
      throw ParseError(source, line_no, 1, "expected '" + std::string(key) + "'");
    }
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
  };
  auto parse_count = [&](const std::string& text) -> std::size_t {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParseError(source, line_no, 1, "invalid count '" + text + "'");
    }
    return value;
  };
  auto parse_values = [&](const std::string& text, std::size_t expected) {
    std::vector<double> values;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) values.push_back(parse_double(tok, source, line_no));
    if (values.size() != expected) {
      throw ParseError(source, line_no, 1,
                       "expected " + std::to_string(expected) + " values, found " +
                           std::to_string(values.size()));
    }
    return values;
  };

  if (next("relnet-model") != "1") {
    throw ParseError(source, line_no, 1, "unsupported model format version");
  }
  model.target = next("target");
  try {
    model.combiner = parse_combiner(next("combiner"));
  } catch (const ConfigError& e) {
    throw ParseError(source, line_no, 1, e.what());
  }
  const std::size_t rules = parse_count(next("rules"));
  const std::size_t classes = parse_count(next("classes"));
  if (classes < 2) throw ParseError(source, line_no, 1, "at least two classes required");
  for (std::size_t j = 0; j < rules; ++j) {
    std::istringstream walk_line(next("walk"));
    auto walks = read_walks(walk_line, vocab, source);
    if (walks.size() != 1) throw ParseError(source, line_no, 1, "malformed walk");
    model.walks.push_back(std::move(walks.front()));
  }
  model.params = ModelParams::zeros(rules, classes);
  model.params.w = parse_values(next("w"), rules);
  model.params.u = parse_values(next("u"), rules * classes);
  model.params.b = parse_values(next("b"), classes);
  return model;
}

}  // namespace relnet
