#include "chronus/eval.h"

#include <algorithm>

#include "chronus/text.h"

namespace chronus {
namespace {

double Percent(size_t num, size_t den) { return den == 0 ? 0.0 : 100.0 * num / den; }

std::string OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kCorrect: return "correct";
    case Outcome::kWrong: return "wrong";
    case Outcome::kRejected: return "rejected";
    case Outcome::kUnscored: return "unscored";
  }
  return "";
}

}  // namespace

std::string CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kDecoding: return "decoding";
    case ErrorCategory::kTemplate: return "template";
    case ErrorCategory::kDialog: return "dialog";
    case ErrorCategory::kTranslator: return "translator";
  }
  return "";
}

double EvalReport::ConceptAccuracy() const { return Percent(matched_segments, gold_segments); }
double EvalReport::SentenceAccuracy() const { return Percent(correct_sentences, gold_sentences); }
double EvalReport::CorrectPercent() const { return Percent(answers_correct, scored); }
double EvalReport::WrongPercent() const { return Percent(answers_wrong, scored); }
double EvalReport::RejectedPercent() const { return Percent(answers_rejected, scored); }

std::string EvalReport::Format(bool per_entry) const {
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::string out;
  out += "sentences\t" + std::to_string(sentences) + "\n";
  out += "gold-segments\t" + std::to_string(gold_segments) + "\n";
  out += "concept-accuracy\t" + pct(ConceptAccuracy()) + "\n";
  out += "sentence-accuracy\t" + pct(SentenceAccuracy()) + "\n";
  out += "scored\t" + std::to_string(scored) + "\n";
  out += "answers-correct\t" + pct(CorrectPercent()) + "\n";
  out += "answers-wrong\t" + pct(WrongPercent()) + "\n";
  out += "answers-rejected\t" + pct(RejectedPercent()) + "\n";
  for (ErrorCategory c : {ErrorCategory::kDecoding, ErrorCategory::kTemplate, ErrorCategory::kDialog,
                          ErrorCategory::kTranslator}) {
    auto it = errors.find(c);
    out += "errors-" + CategoryName(c) + "\t" + std::to_string(it == errors.end() ? 0 : it->second) + "\n";
  }
  if (per_entry) {
    for (const EntryEvaluation &e : entries) {
      out += "entry\t" + e.id + "\t" + OutcomeName(e.outcome) + "\t" +
             (e.category ? CategoryName(*e.category) : "-") + "\t" + e.tmpl + "\n";
    }
  }
  return out;
}

void ScoreSegments(const std::vector<SpanSegment> &gold, const std::vector<SpanSegment> &hypothesis,
                   EvalReport &report, EntryEvaluation *entry) {
  size_t matched = 0;
  for (const SpanSegment &g : gold) {
    if (std::find(hypothesis.begin(), hypothesis.end(), g) != hypothesis.end()) ++matched;
  }
  report.gold_sentences += 1;
  report.gold_segments += gold.size();
  report.matched_segments += matched;
  if (matched == gold.size()) report.correct_sentences += 1;
  if (entry != nullptr) {
    entry->gold_segments = gold.size();
    entry->matched_segments = matched;
  }
}

EvalReport Evaluate(const std::vector<CorpusEntry> &corpus, const Pipeline &pipeline,
                    const ConceptHmm &model) {
  EvalReport report;
  std::string session;
  DialogState state;
  DialogState gold_state;
  for (const CorpusEntry &e : corpus) {
    if (e.session != session) {
      session = e.session;
      state = DialogState{};
      gold_state = DialogState{};
    }
    const bool in_session = !e.session.empty();
    TurnResult r = RunTurn(pipeline, model, e.text, in_session ? &state : nullptr);

    EntryEvaluation ev;
    ev.id = e.id;
    ev.segments = r.decode.segmentation.FormatSegments();
    ev.tmpl = r.rejected ? "REJECT" : r.merged.Format();
    report.sentences += 1;

    bool decoding_ok = true;
    std::optional<Template> gold_turn = e.gold_template;
    if (e.has_gold()) {
      const std::vector<SpanSegment> gold = GoldSpans(e.gold);
      const std::vector<SpanSegment> hyp = PathSpans(r.decode.path, r.decode.segmentation.labels);
      ScoreSegments(gold, hyp, report, &ev);
      decoding_ok = gold == hyp;
      if (!gold_turn) {
        const LabeledPath lifted = LiftGold(r.lattice, e.gold);
        gold_turn = GenerateTemplate(lifted.segmentation, pipeline.tables, pipeline.dictionary);
      }
    }
    // The gold context advances with gold templates (or the hypothesis when
    // there is nothing better).
    Template gold_merged = gold_turn ? *gold_turn : r.turn;
    if (in_session) {
      MergeResult m = MergeContext(gold_state, gold_merged, pipeline.dictionary);
      gold_state = m.state;
      gold_merged = m.merged;
    }

    if (e.has_refs()) {
      report.scored += 1;
      if (r.rejected) {
        ev.outcome = Outcome::kRejected;
        report.answers_rejected += 1;
      } else if (r.answer && ScoreAnswer(*r.answer, *e.ref_min, *e.ref_max) == Verdict::kCorrect) {
        ev.outcome = Outcome::kCorrect;
        report.answers_correct += 1;
      } else {
        ev.outcome = Outcome::kWrong;
        report.answers_wrong += 1;
      }
      if (ev.outcome != Outcome::kCorrect) {
        if (!decoding_ok) {
          ev.category = ErrorCategory::kDecoding;
        } else if (gold_turn && !(r.turn == *gold_turn)) {
          ev.category = ErrorCategory::kTemplate;
        } else if (in_session && !(r.merged == gold_merged)) {
          ev.category = ErrorCategory::kDialog;
        } else {
          ev.category = ErrorCategory::kTranslator;
        }
        report.errors[*ev.category] += 1;
      }
    }
    report.entries.push_back(std::move(ev));
  }
  return report;
}

EvalReport EvaluateSegmentation(const std::vector<CorpusEntry> &corpus, const SuperwordLexicon &lexicon,
                                const ConceptHmm &model) {
  EvalReport report;
  for (const CorpusEntry &e : corpus) {
    if (!e.has_gold()) continue;
    report.sentences += 1;
    const DecodeResult d = ViterbiDecodeLattice(model, LexParse(e.text, lexicon));
    EntryEvaluation ev;
    ev.id = e.id;
    ev.segments = d.segmentation.FormatSegments();
    ScoreSegments(GoldSpans(e.gold), PathSpans(d.path, d.segmentation.labels), report, &ev);
    report.entries.push_back(std::move(ev));
  }
  return report;
}

UnigramConceptBaseline::UnigramConceptBaseline(const std::vector<SegmentedSentence> &corpus,
                                               const ConceptDictionary &dictionary) {
  std::map<std::string, std::vector<size_t>> counts;
  std::vector<size_t> totals(dictionary.size(), 0);
  for (const SegmentedSentence &s : corpus) {
    for (size_t i = 0; i < s.words.size(); ++i) {
      auto &row = counts[s.words[i]];
      row.resize(dictionary.size(), 0);
      const int c = dictionary.IndexOf(s.labels[i]);
      ++row[c];
      ++totals[c];
    }
  }
  auto argmax = [&](const std::vector<size_t> &row) {
    return dictionary.at(std::max_element(row.begin(), row.end()) - row.begin()).name;
  };
  for (const auto &[word, row] : counts) best_[word] = argmax(row);
  fallback_ = argmax(totals);
}

std::vector<std::string> UnigramConceptBaseline::Label(const std::vector<std::string> &words) const {
  std::vector<std::string> out;
  for (const std::string &w : words) {
    auto it = best_.find(w);
    out.push_back(it == best_.end() ? fallback_ : it->second);
  }
  return out;
}

}  // namespace chronus
