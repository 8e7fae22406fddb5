#ifndef CHRONUS_EVAL_H_
#define CHRONUS_EVAL_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chronus/corpus.h"
#include "chronus/pipeline.h"

namespace chronus {

enum class ErrorCategory { kDecoding, kTemplate, kDialog, kTranslator };
std::string CategoryName(ErrorCategory category);

enum class Outcome { kCorrect, kWrong, kRejected, kUnscored };

struct EntryEvaluation {
  std::string id;
  std::string segments;   // decoded segments, "concept:[w ...]" form
  std::string tmpl;       // merged template
  Outcome outcome = Outcome::kUnscored;
  std::optional<ErrorCategory> category;  // wrong or rejected entries only
  size_t gold_segments = 0;
  size_t matched_segments = 0;
};

struct EvalReport {
  size_t sentences = 0;
  size_t gold_sentences = 0;        // entries with gold labels
  size_t correct_sentences = 0;     // all gold segments matched
  size_t gold_segments = 0;
  size_t matched_segments = 0;
  size_t scored = 0;                // entries with references
  size_t answers_correct = 0;
  size_t answers_wrong = 0;
  size_t answers_rejected = 0;
  std::map<ErrorCategory, size_t> errors;
  std::vector<EntryEvaluation> entries;

  // Percentages; 0 when the denominator is empty.
  double ConceptAccuracy() const;
  double SentenceAccuracy() const;
  double CorrectPercent() const;
  double WrongPercent() const;
  double RejectedPercent() const;

  // Tab-separated "metric<TAB>value" lines; with `per_entry`, one line per
  // entry follows.
  std::string Format(bool per_entry = false) const;
};

// Adds one sentence's segment comparison to the report: a gold segment counts
// as matched when the hypothesis has a segment with the same span and label.
void ScoreSegments(const std::vector<SpanSegment> &gold, const std::vector<SpanSegment> &hypothesis,
                   EvalReport &report, EntryEvaluation *entry = nullptr);

// Runs every entry through the pipeline (sessions share dialog context) and
// scores segments against gold labels and answers against references.
// Wrong and rejected answers are attributed to the first stage whose output
// diverges from its gold counterpart: decoding (gold labels), template (gold
// template), dialog (context built from gold templates), else translator.
EvalReport Evaluate(const std::vector<CorpusEntry> &corpus, const Pipeline &pipeline,
                    const ConceptHmm &model);

// Segment scoring only: every gold-labeled entry is decoded over its lattice.
EvalReport EvaluateSegmentation(const std::vector<CorpusEntry> &corpus, const SuperwordLexicon &lexicon,
                                const ConceptHmm &model);

// Context-free tagger: each superword gets the concept it carried most often
// in training (smallest concept index on ties, the most frequent concept
// overall for unseen words).
class UnigramConceptBaseline {
 public:
  UnigramConceptBaseline(const std::vector<SegmentedSentence> &corpus, const ConceptDictionary &dictionary);
  std::vector<std::string> Label(const std::vector<std::string> &words) const;

 private:
  std::map<std::string, std::string> best_;
  std::string fallback_;
};

}  // namespace chronus

#endif  // CHRONUS_EVAL_H_
