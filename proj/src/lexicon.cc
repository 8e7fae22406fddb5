#include "chronus/lexicon.h"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

#include "chronus/error.h"
#include "chronus/text.h"

namespace chronus {
namespace {

const std::map<std::string, int> &NumeralTable() {
  static const std::map<std::string, int> table = {
      {"ZERO", 0},      {"ONE", 1},        {"TWO", 2},       {"THREE", 3},
      {"FOUR", 4},      {"FIVE", 5},       {"SIX", 6},       {"SEVEN", 7},
      {"EIGHT", 8},     {"NINE", 9},       {"TEN", 10},      {"ELEVEN", 11},
      {"TWELVE", 12},   {"THIRTEEN", 13},  {"FOURTEEN", 14}, {"FIFTEEN", 15},
      {"SIXTEEN", 16},  {"SEVENTEEN", 17}, {"EIGHTEEN", 18}, {"NINETEEN", 19},
      {"TWENTY", 20},   {"THIRTY", 30},    {"FORTY", 40},    {"FIFTY", 50},
      {"SIXTY", 60},    {"SEVENTY", 70},   {"EIGHTY", 80},   {"NINETY", 90},
      {"HUNDRED", 100}, {"THOUSAND", 1000},
  };
  return table;
}

bool IsTens(int value) { return value >= 20 && value <= 90 && value % 10 == 0; }

std::string NormalizeDigits(std::span<const std::string> words) {
  long total = 0;
  long current = 0;
  for (const std::string &word : words) {
    int value = NumeralValue(word);
    if (value < 0) return Join(std::vector<std::string>(words.begin(), words.end()), "_");
    if (value == 100) {
      current = (current == 0 ? 1 : current) * 100;
    } else if (value == 1000) {
      total += (current == 0 ? 1 : current) * 1000;
      current = 0;
    } else {
      current += value;
    }
  }
  return std::to_string(total + current);
}

std::string NormalizeJoin(std::span<const std::string> words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    int value = NumeralValue(words[i]);
    if (value < 0) {
      out += words[i];
    } else if (value == 100) {
      out += "00";
    } else if (value == 1000) {
      out += "000";
    } else if (IsTens(value) && i + 1 < words.size() &&
               NumeralValue(words[i + 1]) >= 1 && NumeralValue(words[i + 1]) <= 9) {
      out += std::to_string(value + NumeralValue(words[i + 1]));
      ++i;
    } else {
      out += std::to_string(value);
    }
  }
  return out;
}

}  // namespace

int NumeralValue(const std::string &word) {
  auto it = NumeralTable().find(word);
  return it == NumeralTable().end() ? -1 : it->second;
}

Normalizer NormalizerFromName(const std::string &name) {
  if (name == "digits") return Normalizer::kDigits;
  if (name == "join") return Normalizer::kJoin;
  if (name == "identity") return Normalizer::kIdentity;
  throw Error(ErrorKind::kInvalid, "unknown normalizer '" + name + "'");
}

std::string NormalizerName(Normalizer normalizer) {
  switch (normalizer) {
    case Normalizer::kDigits: return "digits";
    case Normalizer::kJoin: return "join";
    case Normalizer::kIdentity: return "identity";
  }
  return "identity";
}

// ---------------------------------------------------------------------------
// FsaGrammar

FsaGrammar::FsaGrammar(std::string id, const std::string &start,
                       const std::vector<Transition> &transitions,
                       const std::set<std::string> &accepting,
                       Normalizer normalizer)
    : id_(std::move(id)),
      normalizer_(normalizer),
      source_(transitions),
      source_start_(start),
      source_accepting_(accepting) {
  if (id_.empty()) throw Error(ErrorKind::kInvalid, "grammar without identifier");
  std::map<std::string, std::map<std::string, std::set<std::string>>> nfa;
  for (const Transition &t : transitions) {
    nfa[t.from][t.word].insert(t.to);
    alphabet_.insert(t.word);
  }

  // Subset construction; DFA states are numbered in discovery order.
  std::map<std::set<std::string>, int> index;
  std::deque<std::set<std::string>> queue;
  auto intern = [&](const std::set<std::string> &subset) {
    auto [it, inserted] = index.emplace(subset, static_cast<int>(delta_.size()));
    if (inserted) {
      delta_.emplace_back();
      bool accept = false;
      for (const std::string &s : subset) accept = accept || accepting.count(s) > 0;
      accepting_.push_back(accept);
      queue.push_back(subset);
    }
    return it->second;
  };
  intern({start});
  while (!queue.empty()) {
    std::set<std::string> subset = queue.front();
    queue.pop_front();
    int from = index.at(subset);
    std::map<std::string, std::set<std::string>> moves;
    for (const std::string &s : subset) {
      auto it = nfa.find(s);
      if (it == nfa.end()) continue;
      for (const auto &[word, targets] : it->second) {
        moves[word].insert(targets.begin(), targets.end());
      }
    }
    for (const auto &[word, target] : moves) {
      int to = intern(target);
      delta_[from][word] = to;
    }
  }
}

std::vector<size_t> FsaGrammar::Matches(std::span<const std::string> tokens,
                                        size_t begin) const {
  std::vector<size_t> lengths;
  int state = 0;
  for (size_t i = begin; i < tokens.size(); ++i) {
    auto it = delta_[state].find(tokens[i]);
    if (it == delta_[state].end()) break;
    state = it->second;
    if (accepting_[state]) lengths.push_back(i - begin + 1);
  }
  return lengths;
}

bool FsaGrammar::Accepts(std::span<const std::string> words) const {
  if (words.empty()) return false;
  std::vector<size_t> lengths = Matches(words, 0);
  return !lengths.empty() && lengths.back() == words.size();
}

std::string FsaGrammar::Normalize(std::span<const std::string> words) const {
  switch (normalizer_) {
    case Normalizer::kDigits: return NormalizeDigits(words);
    case Normalizer::kJoin: return NormalizeJoin(words);
    case Normalizer::kIdentity: break;
  }
  return Join(std::vector<std::string>(words.begin(), words.end()), "_");
}

// ---------------------------------------------------------------------------
// Lattice

std::string Arc::Render() const {
  if (value.empty()) return superword;
  // "((city))" + "BOSTON" -> "((city)BOSTON)"
  if (superword.size() >= 4 && StartsWith(superword, "((") &&
      superword.compare(superword.size() - 2, 2, "))") == 0) {
    return superword.substr(0, superword.size() - 1) + value + ")";
  }
  return superword;
}

Lattice::Lattice(std::vector<std::string> tokens, std::vector<Arc> arcs)
    : tokens_(std::move(tokens)), arcs_(std::move(arcs)) {
  const int n = num_positions();
  std::sort(arcs_.begin(), arcs_.end(),
            [](const Arc &a, const Arc &b) { return a.Key() < b.Key(); });
  for (size_t i = 0; i < arcs_.size(); ++i) {
    const Arc &arc = arcs_[i];
    if (arc.start < 0 || arc.start >= arc.end || arc.end > n) {
      throw Error(ErrorKind::kInvalid, "lattice arc out of range: " + arc.Render());
    }
    if (i > 0 && arcs_[i - 1].Key() == arc.Key()) {
      throw Error(ErrorKind::kInvalid, "duplicate lattice arc: " + arc.Render());
    }
  }
  outgoing_.assign(n + 1, {});
  incoming_.assign(n + 1, {});
  for (size_t i = 0; i < arcs_.size(); ++i) {
    outgoing_[arcs_[i].start].push_back(static_cast<int>(i));
    incoming_[arcs_[i].end].push_back(static_cast<int>(i));
  }
  std::vector<bool> reached(n + 1, false);
  reached[0] = true;
  for (const Arc &arc : arcs_) {
    if (reached[arc.start]) reached[arc.end] = true;
  }
  if (n == 0 || !reached[n]) {
    throw Error(ErrorKind::kInvalid, "lattice has no complete path");
  }
}

Lattice Lattice::Chain(const std::vector<std::string> &superwords,
                       const std::vector<std::string> &values) {
  std::vector<Arc> arcs;
  std::vector<std::string> tokens;
  for (size_t i = 0; i < superwords.size(); ++i) {
    Arc arc{static_cast<int>(i), static_cast<int>(i + 1), superwords[i],
            i < values.size() ? values[i] : std::string()};
    tokens.push_back(arc.Render());
    arcs.push_back(std::move(arc));
  }
  return Lattice(std::move(tokens), std::move(arcs));
}

std::vector<std::string> Lattice::Surface(const Arc &arc) const {
  return std::vector<std::string>(tokens_.begin() + arc.start, tokens_.begin() + arc.end);
}

std::string Lattice::Serialize() const {
  std::ostringstream out;
  out << "positions\t" << num_positions() << "\n";
  for (const Arc &arc : arcs_) {
    out << arc.start << '\t' << arc.end << '\t' << arc.superword << '\t'
        << arc.value << '\n';
  }
  return out.str();
}

bool Lattice::Contains(const Arc &arc) const {
  return std::binary_search(arcs_.begin(), arcs_.end(), arc,
                            [](const Arc &a, const Arc &b) { return a.Key() < b.Key(); }) &&
         std::find(arcs_.begin(), arcs_.end(), arc) != arcs_.end();
}

// ---------------------------------------------------------------------------
// SuperwordLexicon

void SuperwordLexicon::AddWord(const std::string &word) {
  if (word == kUnknown) throw Error(ErrorKind::kInvalid, "reserved word " + word);
  words_.insert(word);
}

void SuperwordLexicon::AddInflection(const std::string &surface,
                                     const std::string &superword) {
  if (surface == kUnknown || superword == kUnknown) {
    throw Error(ErrorKind::kInvalid, "reserved word in inflection group");
  }
  auto [it, inserted] = inflect_.emplace(surface, superword);
  if (!inserted && it->second != superword) {
    throw Error(ErrorKind::kInvalid,
                "surface word " + surface + " in two inflection groups");
  }
}

void SuperwordLexicon::AddStopWord(const std::string &word) {
  for (const FsaGrammar &g : grammars_) {
    if (g.alphabet().count(word)) {
      throw Error(ErrorKind::kInvalid,
                  "stop word " + word + " appears in grammar " + g.id());
    }
  }
  stop_.insert(word);
}

void SuperwordLexicon::AddGrammar(FsaGrammar grammar) {
  for (const FsaGrammar &g : grammars_) {
    if (g.id() == grammar.id()) {
      throw Error(ErrorKind::kInvalid, "duplicate grammar " + grammar.id());
    }
  }
  for (const std::string &word : grammar.alphabet()) {
    if (stop_.count(word)) {
      throw Error(ErrorKind::kInvalid,
                  "stop word " + word + " appears in grammar " + grammar.id());
    }
  }
  grammars_.push_back(std::move(grammar));
}

std::string SuperwordLexicon::Lookup(const std::string &token) const {
  auto it = inflect_.find(token);
  if (it != inflect_.end()) return it->second;
  if (words_.count(token)) return token;
  return kUnknown;
}

std::vector<std::string> SuperwordLexicon::Vocabulary() const {
  std::set<std::string> vocab(words_.begin(), words_.end());
  for (const auto &[surface, superword] : inflect_) vocab.insert(superword);
  for (const FsaGrammar &g : grammars_) vocab.insert(g.superword());
  vocab.insert(kUnknown);
  return std::vector<std::string>(vocab.begin(), vocab.end());
}

SuperwordLexicon SuperwordLexicon::Parse(const std::vector<std::string> &lines,
                                         const std::string &source) {
  SuperwordLexicon lexicon;
  enum class Section { kNone, kWords, kInflect, kStop, kGrammar } section = Section::kNone;

  // Pending grammar definition, flushed at the next section header.
  struct Pending {
    std::string id;
    std::string start;
    std::vector<FsaGrammar::Transition> transitions;
    std::set<std::string> accepting;
    Normalizer normalizer = Normalizer::kIdentity;
    int line = 0;
  };
  std::vector<Pending> grammars;

  for (size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i + 1);
    std::string_view line = StripComment(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source, lineno, "unterminated section header");
      std::vector<std::string> head = SplitWhitespace(line.substr(1, line.size() - 2));
      if (head.empty()) throw ParseError(source, lineno, "empty section header");
      if (head[0] == "words" && head.size() == 1) {
        section = Section::kWords;
      } else if (head[0] == "inflect" && head.size() == 1) {
        section = Section::kInflect;
      } else if (head[0] == "stop" && head.size() == 1) {
        section = Section::kStop;
      } else if (head[0] == "grammar" && head.size() == 2) {
        section = Section::kGrammar;
        grammars.push_back(Pending{head[1], "", {}, {}, Normalizer::kIdentity, lineno});
      } else {
        throw ParseError(source, lineno, "unknown section '" + std::string(line) + "'");
      }
      continue;
    }
    std::vector<std::string> fields = Split(line, '\t');
    for (std::string &f : fields) f = std::string(Trim(f));
    try {
      switch (section) {
        case Section::kNone:
          throw ParseError(source, lineno, "content outside any section");
        case Section::kWords:
          for (const std::string &word : SplitWhitespace(line)) lexicon.AddWord(word);
          break;
        case Section::kStop:
          for (const std::string &word : SplitWhitespace(line)) lexicon.AddStopWord(word);
          break;
        case Section::kInflect:
          if (fields.size() != 2) throw ParseError(source, lineno, "expected SURFACE<TAB>SUPERWORD");
          lexicon.AddInflection(fields[0], fields[1]);
          break;
        case Section::kGrammar: {
          Pending &g = grammars.back();
          if (fields.size() == 2 && fields[0] == "accept") {
            g.accepting.insert(fields[1]);
          } else if (fields.size() == 2 && fields[0] == "start") {
            g.start = fields[1];
          } else if (fields.size() == 2 && fields[0] == "normalize") {
            g.normalizer = NormalizerFromName(fields[1]);
          } else if (fields.size() == 3) {
            if (g.start.empty() && g.transitions.empty()) g.start = fields[0];
            g.transitions.push_back({fields[0], fields[1], fields[2]});
          } else {
            throw ParseError(source, lineno, "expected state<TAB>word<TAB>state");
          }
          break;
        }
      }
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::kParse) throw;
      throw ParseError(source, lineno, e.what());
    }
  }
  for (Pending &g : grammars) {
    if (g.transitions.empty() || g.accepting.empty()) {
      throw ParseError(source, g.line, "grammar " + g.id + " has no transitions or accept states");
    }
    try {
      lexicon.AddGrammar(FsaGrammar(g.id, g.start, g.transitions, g.accepting, g.normalizer));
    } catch (const Error &e) {
      throw ParseError(source, g.line, e.what());
    }
  }
  return lexicon;
}

SuperwordLexicon SuperwordLexicon::Load(const std::string &path) {
  return Parse(ReadLines(path), path);
}

std::string SuperwordLexicon::Serialize() const {
  std::ostringstream out;
  out << "[words]\n";
  for (const std::string &w : words_) out << w << "\n";
  out << "[inflect]\n";
  for (const auto &[surface, superword] : inflect_) out << surface << "\t" << superword << "\n";
  out << "[stop]\n";
  for (const std::string &w : stop_) out << w << "\n";
  for (const FsaGrammar &g : grammars_) {
    out << "[grammar " << g.id() << "]\n";
    out << "start\t" << g.source_start() << "\n";
    for (const auto &t : g.source_transitions()) {
      out << t.from << "\t" << t.word << "\t" << t.to << "\n";
    }
    for (const std::string &s : g.source_accepting()) out << "accept\t" << s << "\n";
    out << "normalize\t" << NormalizerName(g.normalizer()) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Parsing

std::vector<std::string> Tokenize(const std::string &sentence) {
  std::vector<std::string> tokens;
  for (const std::string &raw : SplitWhitespace(sentence)) {
    std::string token;
    for (char c : raw) {
      unsigned char u = static_cast<unsigned char>(c);
      if (std::isalnum(u) || c == '\'') token += static_cast<char>(std::toupper(u));
    }
    if (!token.empty()) tokens.push_back(std::move(token));
  }
  return tokens;
}

Lattice LexParse(const std::string &sentence, const SuperwordLexicon &lexicon) {
  std::vector<std::string> tokens;
  for (std::string &token : Tokenize(sentence)) {
    if (!lexicon.IsStopWord(token)) tokens.push_back(std::move(token));
  }
  if (tokens.empty()) {
    throw Error(ErrorKind::kEmptyInput, "sentence is empty after stop-word deletion");
  }

  std::vector<Arc> arcs;
  const int n = static_cast<int>(tokens.size());
  for (int i = 0; i < n; ++i) {
    arcs.push_back(Arc{i, i + 1, lexicon.Lookup(tokens[i]), ""});
  }
  for (const FsaGrammar &grammar : lexicon.grammars()) {
    // Longest match per start; keep only matches not inside another one.
    std::vector<std::pair<int, int>> spans;
    for (int i = 0; i < n; ++i) {
      std::vector<size_t> lengths = grammar.Matches(tokens, i);
      if (!lengths.empty()) spans.emplace_back(i, i + static_cast<int>(lengths.back()));
    }
    int covered_to = -1;
    for (const auto &[begin, end] : spans) {
      if (end <= covered_to) continue;
      covered_to = end;
      std::span<const std::string> words(tokens.data() + begin, end - begin);
      arcs.push_back(Arc{begin, end, grammar.superword(), grammar.Normalize(words)});
    }
  }
  return Lattice(std::move(tokens), std::move(arcs));
}

std::vector<LatticePath> EnumeratePaths(const Lattice &lattice, size_t limit) {
  std::vector<LatticePath> paths;
  if (limit == 0) return paths;
  const int n = lattice.num_positions();
  // Outgoing arcs per position, sorted by (superword, end).
  std::vector<std::vector<int>> order(n + 1);
  for (int p = 0; p <= n; ++p) {
    order[p] = lattice.outgoing(p);
    std::sort(order[p].begin(), order[p].end(), [&](int a, int b) {
      const Arc &x = lattice.arcs()[a];
      const Arc &y = lattice.arcs()[b];
      return std::tie(x.superword, x.end) < std::tie(y.superword, y.end);
    });
  }
  // Positions from which the end is reachable, so the DFS never dead-ends.
  std::vector<bool> live(n + 1, false);
  live[n] = true;
  for (int p = n - 1; p >= 0; --p) {
    for (int a : lattice.outgoing(p)) live[p] = live[p] || live[lattice.arcs()[a].end];
  }
  LatticePath current;
  auto dfs = [&](auto &&self, int position) -> void {
    if (paths.size() >= limit) return;
    if (position == n) {
      paths.push_back(current);
      return;
    }
    for (int a : order[position]) {
      const Arc &arc = lattice.arcs()[a];
      if (!live[arc.end]) continue;
      current.push_back(arc);
      self(self, arc.end);
      current.pop_back();
      if (paths.size() >= limit) return;
    }
  };
  dfs(dfs, 0);
  return paths;
}

std::vector<std::string> PathSuperwords(const LatticePath &path) {
  std::vector<std::string> out;
  for (const Arc &arc : path) out.push_back(arc.superword);
  return out;
}

std::vector<std::string> PathValues(const LatticePath &path) {
  std::vector<std::string> out;
  for (const Arc &arc : path) out.push_back(arc.value);
  return out;
}

}  // namespace chronus
