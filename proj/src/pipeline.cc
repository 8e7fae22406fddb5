#include "chronus/pipeline.h"

#include "chronus/error.h"
#include "chronus/text.h"

namespace chronus {

Pipeline Pipeline::LoadDirectory(const std::string &dir) {
  Pipeline p;
  p.lexicon = SuperwordLexicon::Load(dir + "/lexicon.txt");
  p.dictionary = ConceptDictionary::Load(dir + "/concepts.txt");
  p.dictionary.RequireSpecials();
  p.tables = ValueTable::Load(dir + "/values.txt");
  p.db = MiniDb::Load(dir + "/flights.db");
  p.conventions = Conventions::Load(dir + "/conventions.txt");
  return p;
}

TurnResult Interpret(const Pipeline &pipeline, const ConceptHmm &model, const std::string &text) {
  TurnResult r;
  r.lattice = LexParse(text, pipeline.lexicon);
  r.decode = ViterbiDecodeLattice(model, r.lattice);
  r.turn = GenerateTemplate(r.decode.segmentation, pipeline.tables, pipeline.dictionary);
  r.merged = r.turn;
  if (r.decode.degenerate) {
    r.rejected = true;
    r.reject_reason = "no labeling has nonzero probability";
  } else if (ShouldReject(r.turn, pipeline.reject_threshold)) {
    r.rejected = true;
    r.reject_reason = "matched fraction " + FormatDouble(MatchedFraction(r.turn), 3);
  }
  return r;
}

void AnswerTurn(const Pipeline &pipeline, TurnResult &result) {
  try {
    result.plan = PlanQuery(result.merged, pipeline.db, pipeline.conventions);
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::kUnknownKeyword) throw;
    result.translator_error = e.what();
    return;
  }
  result.answer = Execute(*result.plan, pipeline.db);
}

TurnResult RunTurn(const Pipeline &pipeline, const ConceptHmm &model, const std::string &text,
                   DialogState *state) {
  TurnResult r = Interpret(pipeline, model, text);
  if (r.rejected) return r;
  if (state != nullptr) {
    if (state->context.tokens.empty() && IsElliptical(r.turn, pipeline.dictionary)) {
      r.rejected = true;
      r.reject_reason = "elliptical turn without context";
      return r;
    }
    MergeResult m = MergeContext(*state, r.turn, pipeline.dictionary);
    *state = m.state;
    r.merged = m.merged;
  }
  AnswerTurn(pipeline, r);
  return r;
}

Template WinTemplate(const Pipeline &pipeline, const ConceptHmm &model, const std::string &win) {
  std::string_view w = Trim(win);
  if (!w.empty() && w.front() == '(') return Template::ParseFormatted(std::string(w));
  return Interpret(pipeline, model, std::string(w)).turn;
}

}  // namespace chronus
