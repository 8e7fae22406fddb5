#ifndef CHRONUS_PIPELINE_H_
#define CHRONUS_PIPELINE_H_

#include <optional>
#include <string>

#include "chronus/concepts.h"
#include "chronus/decoder.h"
#include "chronus/dialog.h"
#include "chronus/lexicon.h"
#include "chronus/model.h"
#include "chronus/query.h"
#include "chronus/template.h"

namespace chronus {

// Everything besides the model that the understanding chain needs.
struct Pipeline {
  SuperwordLexicon lexicon;
  ConceptDictionary dictionary;
  ValueTable tables;
  MiniDb db;
  Conventions conventions;
  double reject_threshold = kDefaultRejectThreshold;

  // Loads lexicon.txt, concepts.txt, values.txt, flights.db and
  // conventions.txt from a directory.
  static Pipeline LoadDirectory(const std::string &dir);
};

struct TurnResult {
  Lattice lattice;
  DecodeResult decode;
  Template turn;    // this sentence alone
  Template merged;  // after dialog merging; equal to turn without a session
  bool rejected = false;
  std::string reject_reason;
  std::optional<QueryPlan> plan;
  std::optional<Answer> answer;
  std::string translator_error;  // set when planning failed
};

// Lexical parse, lattice decoding and template generation only.
TurnResult Interpret(const Pipeline &pipeline, const ConceptHmm &model, const std::string &text);

// Full chain. With a dialog state the turn is merged into the context (and
// the state updated) unless it is rejected; an elliptical turn with an empty
// context is rejected. Throws kEmptyInput for empty sentences.
TurnResult RunTurn(const Pipeline &pipeline, const ConceptHmm &model, const std::string &text,
                   DialogState *state = nullptr);

// Plans and executes a template, filling plan/answer or translator_error.
void AnswerTurn(const Pipeline &pipeline, TurnResult &result);

// Decodes a win string: a literal "(k,v) ..." template, or pseudo-English
// interpreted by the pipeline itself.
Template WinTemplate(const Pipeline &pipeline, const ConceptHmm &model, const std::string &win);

}  // namespace chronus

#endif  // CHRONUS_PIPELINE_H_
