#include "relnet/dataset.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "relnet/error.h"

namespace relnet {

namespace {

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-';
}

class LineScanner {
 public:
  LineScanner(std::string_view line, int line_no, const std::string& source)
      : line_(line), line_no_(line_no), source_(source) {}

  void skip_space() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t' ||
                                   line_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool at_end_or_comment() {
    skip_space();
    return pos_ >= line_.size() || line_[pos_] == '%';
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < line_.size() && line_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const std::string& what) {
    if (!accept(c)) fail("expected " + what);
  }

  std::string identifier(const std::string& what) {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < line_.size() && is_ident_char(line_[pos_])) ++pos_;
    if (pos_ == start) fail("expected " + what);
    return std::string(line_.substr(start, pos_ - start));
  }

  // Identifier or double-quoted string.
  std::string term(const std::string& what) {
    skip_space();
    if (pos_ < line_.size() && line_[pos_] == '"') {
      const std::size_t open = pos_++;
      std::string value;
      while (pos_ < line_.size() && line_[pos_] != '"') {
        if (line_[pos_] == '\\' && pos_ + 1 < line_.size()) ++pos_;
        value += line_[pos_++];
      }
      if (pos_ >= line_.size()) {
        pos_ = open;
        fail("unterminated quoted constant");
      }
      ++pos_;
      if (value.empty()) fail("empty quoted constant");
      return value;
    }
    return identifier(what);
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::string found = pos_ < line_.size() ? "'" + std::string(1, line_[pos_]) + "'"
                                            : std::string("end of line");
    throw ParseError(source_, line_no_, static_cast<int>(pos_) + 1,
                     message + ", found " + found);
  }

 private:
  std::string_view line_;
  std::size_t pos_ = 0;
  int line_no_;
  const std::string& source_;
};

std::optional<RawAtom> scan_line(std::string_view line, int line_no,
                                 const std::string& source, bool types) {
  LineScanner s(line, line_no, source);
  if (s.at_end_or_comment()) return std::nullopt;
  RawAtom atom;
  atom.line = line_no;
  atom.name = s.identifier("predicate name");
  s.expect('(', "'('");
  do {
    atom.args.push_back(types ? s.identifier("type name") : s.term("constant"));
  } while (s.accept(','));
  s.expect(')', "',' or ')'");
  s.accept('.');
  if (!s.at_end_or_comment()) s.fail("expected end of line");
  return atom;
}

}  // namespace

std::optional<RawAtom> parse_atom_line(std::string_view line, int line_no,
                                       const std::string& source) {
  return scan_line(line, line_no, source, false);
}

std::vector<RawDecl> parse_type_decls(std::istream& in, const std::string& source) {
  std::vector<RawDecl> decls;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto atom = scan_line(line, line_no, source, true);
    if (!atom) continue;
    if (atom->args.size() > 3) {
      throw ParseError(source, line_no, 1,
                       "predicate '" + atom->name + "' has arity " +
                           std::to_string(atom->args.size()) + ", at most 3 is supported");
    }
    decls.push_back({atom->name, atom->args});
  }
  return decls;
}

std::vector<RawAtom> parse_atoms(std::istream& in, const std::string& source) {
  std::vector<RawAtom> atoms;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto atom = scan_line(line, line_no, source, false);
    if (!atom) continue;
    if (atom->args.size() > 3) {
      throw ParseError(source, line_no, 1,
                       "atom '" + atom->name + "' has arity " +
                           std::to_string(atom->args.size()) + ", at most 3 is supported");
    }
    atoms.push_back(std::move(*atom));
  }
  return atoms;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<TargetExample> resolve_examples(const FactStore& store, Predicate target,
                                            const std::vector<RawAtom>& atoms, Label label,
                                            const std::string& source) {
  const auto& vocab = store.vocab();
  const std::string& name = vocab.decl(target.id).name;
  std::vector<TargetExample> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) {
    const std::string where = source + ":" + std::to_string(a.line);
    if (a.name != name) {
      throw TypeError(where + ": example uses predicate '" + a.name +
                      "', expected target '" + name + "'");
    }
    if (a.args.size() != 2) throw TypeError(where + ": example atoms must be binary");
    auto x = vocab.find_constant(vocab.domain(target), a.args[0]);
    auto y = vocab.find_constant(vocab.range(target), a.args[1]);
    if (!x || !y) throw TypeError(where + ": unknown constant in example");
    out.push_back({target, *x, *y, label});
  }
  return out;
}

namespace {

Dataset build_dataset(std::vector<RawDecl> decls, std::vector<RawAtom> facts,
                      std::vector<RawAtom> positives, std::vector<RawAtom> negatives,
                      bool has_negatives, const std::string& target_name,
                      const std::string& pos_source, const std::string& neg_source) {
  auto decl = std::find_if(decls.begin(), decls.end(),
                           [&](const RawDecl& d) { return d.name == target_name; });
  if (decl == decls.end()) {
    throw ConfigError("target predicate '" + target_name + "' is not declared");
  }
  if (decl->arg_types.size() != 2) {
    throw ConfigError("target predicate '" + target_name + "' must be binary");
  }
  for (const auto& f : facts) {
    if (f.name == target_name) {
      throw TypeError("facts must not contain the target predicate (line " +
                      std::to_string(f.line) + ")");
    }
  }
  RawDatabase db{std::move(decls), std::move(facts), {}};
  db.queries = positives;
  db.queries.insert(db.queries.end(), negatives.begin(), negatives.end());

  Dataset data{binarize(db), {}, {}, 0, has_negatives};
  data.target = Predicate{*data.store.vocab().find_predicate(target_name), false};
  data.examples = resolve_examples(data.store, data.target, positives, Label::kPositive,
                                   pos_source);
  data.num_positives = data.examples.size();
  auto neg = resolve_examples(data.store, data.target, negatives, Label::kNegative,
                              neg_source);
  data.examples.insert(data.examples.end(), neg.begin(), neg.end());
  return data;
}

std::vector<RawDecl> decls_from(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse_type_decls(in, source);
}

std::vector<RawAtom> atoms_from(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse_atoms(in, source);
}

}  // namespace

Dataset parse_dataset(const DatasetPaths& paths) {
  // Read everything first so a missing file is reported before any parsing.
  const std::string types = read_file(paths.types);
  const std::string facts = read_file(paths.facts);
  const std::string pos = read_file(paths.positives);
  const std::string neg = paths.negatives ? read_file(*paths.negatives) : std::string();
  const std::string neg_source = paths.negatives ? paths.negatives->string() : "<none>";
  return build_dataset(decls_from(types, paths.types.string()),
                       atoms_from(facts, paths.facts.string()),
                       atoms_from(pos, paths.positives.string()),
                       atoms_from(neg, neg_source), paths.negatives.has_value(),
                       paths.target, paths.positives.string(), neg_source);
}

Dataset parse_dataset_text(const std::string& types, const std::string& facts,
                           const std::string& positives, const std::string& negatives,
                           const std::string& target) {
  return build_dataset(decls_from(types, "<types>"), atoms_from(facts, "<facts>"),
                       atoms_from(positives, "<pos>"), atoms_from(negatives, "<neg>"),
                       !negatives.empty(), target, "<pos>", "<neg>");
}

std::string quote_symbol(const std::string& symbol) {
  if (!symbol.empty() && std::all_of(symbol.begin(), symbol.end(), is_ident_char)) {
    return symbol;
  }
  std::string q = "\"";
  for (char c : symbol) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  q += '"';
  return q;
}

std::string format_atom(const Vocabulary& vocab, const Atom& atom) {
  const Atom a = atom.canonical();
  return vocab.predicate_name(a.pred) + "(" + quote_symbol(vocab.symbol(a.arg1)) + "," +
         quote_symbol(vocab.symbol(a.arg2)) + ").";
}

std::string format_example(const Vocabulary& vocab, const TargetExample& ex) {
  return format_atom(vocab, ex.atom());
}

void write_type_decls(std::ostream& out, const Vocabulary& vocab) {
  for (PredId p = 0; p < vocab.num_predicates(); ++p) {
    const auto& d = vocab.decl(p);
    out << d.name << '(' << vocab.type_name(d.arg1_type) << ','
        << vocab.type_name(d.arg2_type) << ")\n";
  }
}

void write_facts(std::ostream& out, const FactStore& store) {
  std::vector<std::string> lines;
  lines.reserve(store.size());
  for (const auto& f : store.facts()) lines.push_back(format_atom(store.vocab(), f));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) out << l << '\n';
}

void write_examples(std::ostream& out, const Vocabulary& vocab,
                    const std::vector<TargetExample>& examples) {
  for (const auto& e : examples) out << format_example(vocab, e) << '\n';
}

std::vector<std::size_t> read_folds(const std::filesystem::path& path, const Dataset& data,
                                    std::size_t k) {
  const std::string text = read_file(path);
  const std::string source = path.string();
  const auto& vocab = data.store.vocab();
  std::map<std::pair<ConstId, ConstId>, std::size_t> fold_of;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    const auto start = view.find_first_not_of(" \t\r");
    if (start == std::string_view::npos || view[start] == '%') continue;
    std::size_t used = 0;
    std::size_t fold = 0;
    try {
      fold = std::stoul(line.substr(start), &used);
    } catch (const std::exception&) {
      throw ParseError(source, line_no, static_cast<int>(start) + 1, "expected fold index");
    }
    if (fold >= k) {
      throw ParseError(source, line_no, static_cast<int>(start) + 1,
                       "fold index " + std::to_string(fold) + " out of range");
    }
    auto atom = parse_atom_line(view.substr(start + used), line_no, source);
    if (!atom) throw ParseError(source, line_no, 1, "expected example atom after fold index");
    auto ex = resolve_examples(data.store, data.target, {*atom}, Label::kPositive, source);
    fold_of[{ex[0].arg1, ex[0].arg2}] = fold;
  }
  std::vector<std::size_t> folds;
  folds.reserve(data.examples.size());
  for (const auto& e : data.examples) {
    auto it = fold_of.find({e.arg1, e.arg2});
    if (it == fold_of.end()) {
      throw ConfigError("folds file does not assign " + format_example(vocab, e));
    }
    folds.push_back(it->second);
  }
  return folds;
}

}  // namespace relnet
