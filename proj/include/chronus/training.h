#ifndef CHRONUS_TRAINING_H_
#define CHRONUS_TRAINING_H_

#include <optional>
#include <string>
#include <vector>

#include "chronus/corpus.h"
#include "chronus/decoder.h"
#include "chronus/model.h"
#include "chronus/pipeline.h"

namespace chronus {

struct LoopConfig {
  int max_iters = 20;
  double k = 0.001;
  SynonymGroups synonyms;  // applied after every retraining when non-empty
};

struct LoopIteration {
  int iteration = 0;
  size_t correct = 0;
  size_t problem = 0;
  std::string model_id;  // model used for this classification pass
  std::vector<std::string> correct_ids;
};

struct LoopReport {
  std::vector<LoopIteration> iterations;
  std::string termination;  // "converged" or "max-iters"

  // "iteration<TAB>correct<TAB>problem<TAB>model" rows plus a final
  // "termination<TAB>reason" line.
  std::string Format() const;
};

struct LoopResult {
  ConceptHmm model;
  LoopReport report;
};

// 16 hex digits of the FNV-1a hash of the serialized model.
std::string ModelId(const ConceptHmm &model);

// Gold segmentations of the labeled entries, lifted onto their lattices.
std::vector<SegmentedSentence> GoldSegmentations(const std::vector<CorpusEntry> &corpus,
                                                 const SuperwordLexicon &lexicon);

// Whether an entry counts as correct: its answer is inside the references
// when it has them, otherwise its decoded spans equal the gold spans.
bool IsCorrect(const CorpusEntry &entry, const TurnResult &result);

// Self-training from answer feedback. Each pass runs every entry through the
// pipeline; the decoded segmentations of correct entries, together with the
// seed set and any gold labelings, train the next model. Stops when the set
// of correct entries repeats or after max_iters passes.
LoopResult RunTrainingLoop(const std::vector<CorpusEntry> &corpus,
                           const std::vector<SegmentedSentence> &seed, const ConceptHmm &seed_model,
                           const Pipeline &pipeline, const LoopConfig &config);

// MAP decoding constrained so that the non-special segments carry exactly the
// multiset of keywords of `win` (attributes fold onto their restriction).
// nullopt when no labeling with nonzero probability meets the constraint.
std::optional<DecodeResult> AlignWin(const ConceptHmm &model, const Lattice &lattice,
                                     const Template &win);

// Exhaustive version of AlignWin with identical tie-breaking. Throws
// kSizeLimit beyond the brute-force decoding limits.
std::optional<DecodeResult> BruteForceAlignWin(const ConceptHmm &model, const Lattice &lattice,
                                               const Template &win);

}  // namespace chronus

#endif  // CHRONUS_TRAINING_H_
