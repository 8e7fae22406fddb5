#ifndef CHRONUS_LEXICON_H_
#define CHRONUS_LEXICON_H_

#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace chronus {

// Built-in normalizers for grammar matches.
enum class Normalizer {
  kDigits,    // cardinal numeral words to a decimal integer: THIRTY SEVEN -> 37
  kJoin,      // concatenation, numerals spelled as digits: D C TEN -> DC10
  kIdentity,  // words joined with '_': SAN FRANCISCO -> SAN_FRANCISCO
};

Normalizer NormalizerFromName(const std::string &name);
std::string NormalizerName(Normalizer normalizer);

// Value of a single numeral word (ZERO..NINETY, HUNDRED, THOUSAND), or -1.
int NumeralValue(const std::string &word);

// A finite-state acceptor over surface words, determinized at construction.
class FsaGrammar {
 public:
  struct Transition {
    std::string from;
    std::string word;
    std::string to;
  };

  // Builds the acceptor by subset construction over the (possibly
  // nondeterministic) transition list.
  FsaGrammar(std::string id, const std::string &start,
             const std::vector<Transition> &transitions,
             const std::set<std::string> &accepting, Normalizer normalizer);

  const std::string &id() const { return id_; }
  Normalizer normalizer() const { return normalizer_; }

  // The superword every match of this grammar collapses to: "((id))".
  std::string superword() const { return "((" + id_ + "))"; }

  // Lengths of every accepted word sequence starting at tokens[begin],
  // ascending. Runs in time linear in the longest explored prefix.
  std::vector<size_t> Matches(std::span<const std::string> tokens,
                              size_t begin) const;

  bool Accepts(std::span<const std::string> words) const;

  std::string Normalize(std::span<const std::string> words) const;

  // Every surface word appearing on some transition.
  const std::set<std::string> &alphabet() const { return alphabet_; }

  size_t num_states() const { return delta_.size(); }

  // Original (pre-determinization) definition, kept for serialization.
  const std::vector<Transition> &source_transitions() const { return source_; }
  const std::string &source_start() const { return source_start_; }
  const std::set<std::string> &source_accepting() const { return source_accepting_; }

 private:
  std::string id_;
  Normalizer normalizer_;
  std::vector<std::map<std::string, int>> delta_;
  std::vector<bool> accepting_;
  std::set<std::string> alphabet_;
  std::vector<Transition> source_;
  std::string source_start_;
  std::set<std::string> source_accepting_;
};

struct Arc {
  int start = 0;
  int end = 0;
  std::string superword;
  std::string value;  // normalized value for grammar arcs, empty otherwise

  // "((city)BOSTON)" for grammar arcs, the superword otherwise.
  std::string Render() const;

  auto Key() const { return std::tie(start, end, superword); }
  bool operator==(const Arc &other) const = default;
};

// A DAG of superword arcs over token positions 0..num_positions().
class Lattice {
 public:
  Lattice() = default;
  // Arcs are sorted by (start, end, superword) and validated.
  Lattice(std::vector<std::string> tokens, std::vector<Arc> arcs);

  // A single-path lattice over an already lexicalized superword sequence.
  static Lattice Chain(const std::vector<std::string> &superwords,
                       const std::vector<std::string> &values = {});

  int num_positions() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string> &tokens() const { return tokens_; }
  const std::vector<Arc> &arcs() const { return arcs_; }

  // Indices into arcs() of arcs leaving / entering a position, in arc order.
  const std::vector<int> &outgoing(int position) const { return outgoing_[position]; }
  const std::vector<int> &incoming(int position) const { return incoming_[position]; }

  // Surface tokens covered by an arc.
  std::vector<std::string> Surface(const Arc &arc) const;

  // One line per arc: "start<TAB>end<TAB>superword<TAB>value".
  std::string Serialize() const;

  bool Contains(const Arc &arc) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> outgoing_;
  std::vector<std::vector<int>> incoming_;
};

using LatticePath = std::vector<Arc>;

class SuperwordLexicon {
 public:
  static constexpr const char *kUnknown = "<unk>";

  SuperwordLexicon() = default;

  static SuperwordLexicon Parse(const std::vector<std::string> &lines,
                                const std::string &source);
  static SuperwordLexicon Load(const std::string &path);

  void AddWord(const std::string &word);
  void AddInflection(const std::string &surface, const std::string &superword);
  void AddStopWord(const std::string &word);
  void AddGrammar(FsaGrammar grammar);

  bool IsStopWord(const std::string &word) const { return stop_.count(word) > 0; }

  // Superword for a single token: inflection group, plain word, or kUnknown.
  std::string Lookup(const std::string &token) const;

  const std::set<std::string> &words() const { return words_; }
  const std::map<std::string, std::string> &inflections() const { return inflect_; }
  const std::set<std::string> &stop_words() const { return stop_; }
  const std::vector<FsaGrammar> &grammars() const { return grammars_; }

  // Every superword lex_parse can emit, including kUnknown; sorted.
  std::vector<std::string> Vocabulary() const;

  std::string Serialize() const;

 private:
  std::set<std::string> words_;
  std::map<std::string, std::string> inflect_;
  std::set<std::string> stop_;
  std::vector<FsaGrammar> grammars_;
};

// Whitespace split, uppercase, punctuation other than apostrophes removed.
std::vector<std::string> Tokenize(const std::string &sentence);

// Builds the superword lattice of a raw sentence. Throws kEmptyInput if
// nothing is left after stop-word deletion.
Lattice LexParse(const std::string &sentence, const SuperwordLexicon &lexicon);

// Up to `limit` complete paths from position 0 to the last position, in
// lexicographic order of (arc start, superword, end).
std::vector<LatticePath> EnumeratePaths(const Lattice &lattice, size_t limit);

std::vector<std::string> PathSuperwords(const LatticePath &path);
std::vector<std::string> PathValues(const LatticePath &path);

}  // namespace chronus

#endif  // CHRONUS_LEXICON_H_
