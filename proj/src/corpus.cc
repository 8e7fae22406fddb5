#include "chronus/corpus.h"

#include <set>

#include "chronus/error.h"
#include "chronus/text.h"

namespace chronus {
namespace {

Answer ParseAnswerHead(std::string_view head, const std::string &source, int lineno) {
  std::vector<std::string> f = SplitWhitespace(head);
  if (f.size() == 1 && f[0] == "rows") return Answer{};
  long n = 0;
  if (f.size() == 2 && f[0] == "number" && ParseInt(f[1], &n)) return Answer::Number(n);
  if (f.size() == 2 && f[0] == "boolean" && (f[1] == "yes" || f[1] == "no")) {
    return Answer::Boolean(f[1] == "yes");
  }
  throw ParseError(source, lineno, "answer must be 'rows', 'number N' or 'boolean yes|no'");
}

std::string SerializeAnswer(const std::string &key, const Answer &answer) {
  std::string out = key + ": ";
  switch (answer.kind) {
    case AnswerKind::kNumber: return out + "number " + answer.rows[0][0] + "\n";
    case AnswerKind::kBoolean: return out + "boolean " + answer.rows[0][0] + "\n";
    case AnswerKind::kRows: break;
  }
  out += "rows\n";
  for (const auto &row : answer.rows) out += "| " + Join(row, "\t") + "\n";
  return out;
}

void CheckEntry(const CorpusEntry &e, const std::string &source, int lineno) {
  if (e.id.empty()) throw ParseError(source, lineno, "record without id");
  if (e.text.empty()) throw ParseError(source, lineno, "record " + e.id + " has no text");
  if (e.ref_min.has_value() != e.ref_max.has_value()) {
    throw ParseError(source, lineno, "record " + e.id + " needs both refmin and refmax");
  }
}

}  // namespace

std::vector<CorpusEntry> ParseCorpus(const std::vector<std::string> &lines, const std::string &source) {
  std::vector<CorpusEntry> corpus;
  std::set<std::string> ids;
  std::optional<CorpusEntry> current;
  int record_line = 0;
  Answer *rows_target = nullptr;

  auto flush = [&]() {
    if (!current) return;
    CheckEntry(*current, source, record_line);
    if (!ids.insert(current->id).second) {
      throw ParseError(source, record_line, "duplicate id " + current->id);
    }
    corpus.push_back(std::move(*current));
    current.reset();
    rows_target = nullptr;
  };

  for (size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i + 1);
    const std::string &raw = lines[i];
    if (Trim(raw).empty()) {
      flush();
      continue;
    }
    if (Trim(raw).front() == '#') continue;
    if (raw.front() == '|') {
      if (rows_target == nullptr) throw ParseError(source, lineno, "row line outside a rows answer");
      std::string_view body = std::string_view(raw).substr(1);
      if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      std::vector<std::string> cells = Split(body, '\t');
      for (std::string &c : cells) c = std::string(Trim(c));
      rows_target->rows.push_back(std::move(cells));
      continue;
    }
    const size_t colon = raw.find(':');
    if (colon == std::string::npos) throw ParseError(source, lineno, "expected 'key: value'");
    const std::string key(Trim(std::string_view(raw).substr(0, colon)));
    const std::string value(Trim(std::string_view(raw).substr(colon + 1)));
    rows_target = nullptr;
    if (key == "id") {
      flush();
      current.emplace();
      current->id = value;
      record_line = lineno;
      continue;
    }
    if (!current) throw ParseError(source, lineno, "field before 'id:'");
    if (key == "text") {
      current->text = value;
    } else if (key == "win") {
      current->win = value;
    } else if (key == "session") {
      current->session = value;
    } else if (key == "tmpl") {
      current->gold_template = Template::ParseFormatted(value);
    } else if (key == "gold") {
      for (const std::string &pair : Split(value, '\t')) {
        std::string_view p = Trim(pair);
        if (p.empty()) continue;
        const size_t sep = p.rfind(':');
        if (sep == std::string_view::npos || sep == 0 || sep + 1 == p.size()) {
          throw ParseError(source, lineno, "gold pairs look like TOKEN:concept");
        }
        current->gold.push_back({ToUpper(p.substr(0, sep)), std::string(p.substr(sep + 1))});
      }
    } else if (key == "refmin" || key == "min") {
      current->ref_min = ParseAnswerHead(value, source, lineno);
      if (current->ref_min->kind == AnswerKind::kRows) rows_target = &*current->ref_min;
    } else if (key == "refmax" || key == "max") {
      current->ref_max = ParseAnswerHead(value, source, lineno);
      if (current->ref_max->kind == AnswerKind::kRows) rows_target = &*current->ref_max;
    } else {
      throw ParseError(source, lineno, "unknown field '" + key + "'");
    }
  }
  flush();
  return corpus;
}

std::vector<CorpusEntry> LoadCorpus(const std::string &path) { return ParseCorpus(ReadLines(path), path); }

std::string SerializeCorpus(const std::vector<CorpusEntry> &corpus) {
  std::string out;
  for (const CorpusEntry &e : corpus) {
    if (!out.empty()) out += "\n";
    out += "id: " + e.id + "\n";
    out += "text: " + e.text + "\n";
    if (!e.session.empty()) out += "session: " + e.session + "\n";
    if (!e.win.empty()) out += "win: " + e.win + "\n";
    if (e.has_gold()) {
      std::vector<std::string> pairs;
      for (const GoldToken &g : e.gold) pairs.push_back(g.token + ":" + g.label);
      out += "gold: " + Join(pairs, "\t") + "\n";
    }
    if (e.gold_template) out += "tmpl: " + e.gold_template->Format() + "\n";
    if (e.ref_min) out += SerializeAnswer("refmin", *e.ref_min);
    if (e.ref_max) out += SerializeAnswer("refmax", *e.ref_max);
  }
  return out;
}

void AttachReferences(std::vector<CorpusEntry> &corpus, const std::vector<CorpusEntry> &refs) {
  std::map<std::string, const CorpusEntry *> by_id;
  for (const CorpusEntry &r : refs) by_id[r.id] = &r;
  for (CorpusEntry &e : corpus) {
    auto it = by_id.find(e.id);
    if (it == by_id.end() || e.has_refs() || !it->second->has_refs()) continue;
    e.ref_min = it->second->ref_min;
    e.ref_max = it->second->ref_max;
  }
}

std::vector<SpanSegment> GoldSpans(const std::vector<GoldToken> &gold) {
  std::vector<SpanSegment> spans;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (i > 0 && gold[i].label == gold[i - 1].label) {
      spans.back().end = static_cast<int>(i + 1);
    } else {
      spans.push_back({static_cast<int>(i), static_cast<int>(i + 1), gold[i].label});
    }
  }
  return spans;
}

std::vector<SpanSegment> PathSpans(const LatticePath &path, const std::vector<std::string> &labels) {
  std::vector<SpanSegment> spans;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i > 0 && labels[i] == labels[i - 1]) {
      spans.back().end = path[i].end;
    } else {
      spans.push_back({path[i].start, path[i].end, labels[i]});
    }
  }
  return spans;
}

LabeledPath LiftGold(const Lattice &lattice, const std::vector<GoldToken> &gold) {
  const std::vector<std::string> &tokens = lattice.tokens();
  bool match = tokens.size() == gold.size();
  for (size_t i = 0; match && i < gold.size(); ++i) match = tokens[i] == gold[i].token;
  if (!match) {
    std::vector<std::string> g;
    for (const GoldToken &t : gold) g.push_back(t.token);
    throw Error(ErrorKind::kInvalid,
                "gold tokens [" + Join(g, " ") + "] do not match sentence tokens [" + Join(tokens, " ") + "]");
  }
  LabeledPath out;
  int pos = 0;
  while (pos < lattice.num_positions()) {
    int best = -1;
    for (int a : lattice.outgoing(pos)) {
      const Arc &arc = lattice.arcs()[a];
      bool uniform = true;
      for (int t = arc.start + 1; t < arc.end && uniform; ++t) uniform = gold[t].label == gold[arc.start].label;
      if (!uniform) continue;
      if (best < 0) {
        best = a;
        continue;
      }
      const Arc &cur = lattice.arcs()[best];
      const bool grammar = StartsWith(arc.superword, "((");
      const bool cur_grammar = StartsWith(cur.superword, "((");
      if (arc.end > cur.end || (arc.end == cur.end && grammar && !cur_grammar)) best = a;
    }
    // Single-token arcs always exist, so best is set.
    const Arc &arc = lattice.arcs()[best];
    out.path.push_back(arc);
    out.segmentation.words.push_back(arc.superword);
    out.segmentation.values.push_back(arc.value);
    out.segmentation.labels.push_back(gold[arc.start].label);
    pos = arc.end;
  }
  return out;
}

}  // namespace chronus
