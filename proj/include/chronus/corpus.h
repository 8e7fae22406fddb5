#ifndef CHRONUS_CORPUS_H_
#define CHRONUS_CORPUS_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chronus/lexicon.h"
#include "chronus/model.h"
#include "chronus/query.h"
#include "chronus/template.h"

namespace chronus {

// A hand label for one surface token (after stop-word deletion).
struct GoldToken {
  std::string token;
  std::string label;
  bool operator==(const GoldToken &) const = default;
};

struct CorpusEntry {
  std::string id;
  std::string text;
  std::string win;                     // pseudo-English or literal "(k,v) ..." template
  std::vector<GoldToken> gold;         // empty when unlabeled
  std::optional<Template> gold_template;
  std::string session;                 // turns sharing a session id share dialog context
  std::optional<Answer> ref_min;
  std::optional<Answer> ref_max;

  bool has_gold() const { return !gold.empty(); }
  bool has_refs() const { return ref_min.has_value() && ref_max.has_value(); }
};

// Block format, records separated by blank lines:
//   id: s01
//   text: SHOW ME THE FLIGHTS TO BOSTON
//   gold: SHOW:question<TAB>ME:question<TAB>...
//   tmpl: (question,display) (subject,flight)
//   win: List flights to Boston
//   session: d1
//   refmin: rows            (or "number 3", "boolean yes")
//   | cell<TAB>cell
//   refmax: rows
//   | cell<TAB>cell
// "min:" and "max:" are accepted for refmin/refmax. Every record needs
// references or a gold labeling.
std::vector<CorpusEntry> ParseCorpus(const std::vector<std::string> &lines, const std::string &source);
std::vector<CorpusEntry> LoadCorpus(const std::string &path);
std::string SerializeCorpus(const std::vector<CorpusEntry> &corpus);

// Copies references from `refs` (matched by id) into entries lacking them.
void AttachReferences(std::vector<CorpusEntry> &corpus, const std::vector<CorpusEntry> &refs);

// Segments by token span: [begin, end) over lattice positions.
struct SpanSegment {
  int begin = 0;
  int end = 0;
  std::string label;
  bool operator==(const SpanSegment &) const = default;
  auto operator<=>(const SpanSegment &) const = default;
};

std::vector<SpanSegment> GoldSpans(const std::vector<GoldToken> &gold);
std::vector<SpanSegment> PathSpans(const LatticePath &path, const std::vector<std::string> &labels);

struct LabeledPath {
  SegmentedSentence segmentation;
  LatticePath path;
};

// Lifts token labels onto the lattice: at each position the longest arc
// whose tokens share one label, grammar arcs first on equal span. Throws
// kInvalid when the gold tokens do not match the lattice tokens.
LabeledPath LiftGold(const Lattice &lattice, const std::vector<GoldToken> &gold);

}  // namespace chronus

#endif  // CHRONUS_CORPUS_H_
