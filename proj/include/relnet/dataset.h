#ifndef RELNET_DATASET_H_
#define RELNET_DATASET_H_

// Text formats for relational datasets.
//
//   types file:  pred(Type1,Type2)     one declaration per line; arity 1..3
//   facts file:  pred(arg1,arg2).      one atom per line; arity 1..3
//   example file: target(a,b).         binary atoms of the target
//
// '%' starts a comment. The trailing period is optional. Constants are
// identifiers ([A-Za-z0-9_-]+) or double-quoted strings. Unary and ternary
// atoms are binarized on ingestion.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relnet/grounder.h"
#include "relnet/logic.h"

namespace relnet {

// Parses one line. Returns nullopt for blank and comment-only lines.
std::optional<RawAtom> parse_atom_line(std::string_view line, int line_no,
                                       const std::string& source);

std::vector<RawDecl> parse_type_decls(std::istream& in, const std::string& source);
std::vector<RawAtom> parse_atoms(std::istream& in, const std::string& source);

struct DatasetPaths {
  std::filesystem::path types;
  std::filesystem::path facts;
  std::filesystem::path positives;
  std::optional<std::filesystem::path> negatives;
  std::string target;
};

struct Dataset {
  FactStore store;
  Predicate target;
  std::vector<TargetExample> examples;  // positives first, then negatives
  std::size_t num_positives = 0;
  bool has_negatives = false;
};

// Throws ConfigError for unreadable files, ParseError for syntax errors,
// TypeError for undeclared predicates or type mismatches.
Dataset parse_dataset(const DatasetPaths& paths);

// Same, from in-memory text.
Dataset parse_dataset_text(const std::string& types, const std::string& facts,
                           const std::string& positives, const std::string& negatives,
                           const std::string& target);

// Converts target atoms to examples against an existing store. Every constant
// must already be interned.
std::vector<TargetExample> resolve_examples(const FactStore& store, Predicate target,
                                            const std::vector<RawAtom>& atoms, Label label,
                                            const std::string& source);

std::string quote_symbol(const std::string& symbol);
std::string format_atom(const Vocabulary& vocab, const Atom& atom);
std::string format_example(const Vocabulary& vocab, const TargetExample& ex);

// Writers produce text that parse_dataset_text reads back to an equal store
// and example list. Facts are written sorted.
void write_type_decls(std::ostream& out, const Vocabulary& vocab);
void write_facts(std::ostream& out, const FactStore& store);
void write_examples(std::ostream& out, const Vocabulary& vocab,
                    const std::vector<TargetExample>& examples);

// Folds file: one line per example, "<fold> target(a,b)." Returns the fold
// index of each example, aligned with `examples`.
std::vector<std::size_t> read_folds(const std::filesystem::path& path, const Dataset& data,
                                    std::size_t k);

std::string read_file(const std::filesystem::path& path);

}  // namespace relnet

#endif  // RELNET_DATASET_H_
