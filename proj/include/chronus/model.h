#ifndef CHRONUS_MODEL_H_
#define CHRONUS_MODEL_H_

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "chronus/concepts.h"

namespace chronus {

// Log-space sentinel for impossible events.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// A sentence with one concept label per superword; runs of equal labels form
// the conceptual segments.
struct SegmentedSentence {
  std::vector<std::string> words;   // superwords
  std::vector<std::string> values;  // normalized grammar values, "" if none
  std::vector<std::string> labels;  // concept names, parallel to words

  struct Segment {
    size_t begin;
    size_t end;
    std::string label;
    bool operator==(const Segment &) const = default;
  };
  std::vector<Segment> Segments() const;

  // Rendered superword i: "((city)BOSTON)" or the plain superword.
  std::string Render(size_t i) const;

  // "concept:[w1 w2] concept:[w3]"
  std::string FormatSegments() const;

  bool operator==(const SegmentedSentence &) const = default;
};

// Per concept, word groups whose bigram statistics are tied.
using SynonymGroups = std::map<std::string, std::vector<std::vector<std::string>>>;

// Reads "concept<TAB>W1 W2 ..." lines.
SynonymGroups ParseSynonymGroups(const std::vector<std::string> &lines,
                                 const std::string &source);

// First-order concept HMM with concept-conditional bigram word models.
//
// Probabilities are kept both in linear space (rounded to 12 significant
// digits, the model-file precision) and in natural-log space. Bigram rows are
// indexed by the previous superword or by kBeginRow for segment-initial words.
class ConceptHmm {
 public:
  static constexpr const char *kInitialRow = "<s>";
  static constexpr const char *kFinalColumn = "</s>";
  static constexpr const char *kBeginRow = "<b>";
  static constexpr int kSignificantDigits = 12;

  ConceptHmm() = default;
  // All tables start uniform. `vocabulary` is sorted and deduplicated.
  ConceptHmm(ConceptDictionary dictionary, std::vector<std::string> vocabulary,
             double k);

  const ConceptDictionary &dictionary() const { return dictionary_; }
  const std::vector<std::string> &vocabulary() const { return vocabulary_; }
  size_t num_concepts() const { return dictionary_.size(); }
  size_t vocab_size() const { return vocabulary_.size(); }
  double k() const { return k_; }

  // Index of a superword; falls back to <unk> when present, else -1.
  int WordIndex(const std::string &word) const;
  bool InVocabulary(const std::string &word) const;
  int begin_row() const { return static_cast<int>(vocabulary_.size()); }
  int final_column() const { return static_cast<int>(dictionary_.size()); }

  double LogInitial(int c) const { return log_initial_[c]; }
  double LogTransition(int from, int to) const { return log_transition_[from][to]; }
  double LogFinal(int c) const { return log_transition_[c][final_column()]; }
  // `prev` is a word index or begin_row().
  double LogBigram(int c, int prev, int word) const {
    return log_bigram_[c][prev][word];
  }

  double Initial(int c) const { return initial_[c]; }
  double Transition(int from, int to) const { return transition_[from][to]; }
  double Bigram(int c, int prev, int word) const { return bigram_[c][prev][word]; }
  double BigramFloor(int c, int prev) const { return bigram_floor_[c][prev]; }
  double BigramWeight(int c, int prev) const { return bigram_weight_[c][prev]; }

  // True when the entry carries mass beyond its row's smoothing floor.
  bool BigramObserved(int c, int prev, int word) const {
    return bigram_[c][prev][word] > bigram_floor_[c][prev];
  }

  // Largest |row sum - 1| over every distribution row.
  double MaxNormalizationError() const;

  struct ParameterCounts {
    size_t transition_entries = 0;  // rows x columns, including initial row
    size_t transition_observed = 0; // entries above their row floor
    size_t bigram_rows = 0;         // rows with any observation
    size_t bigram_observed = 0;     // entries above their row floor
  };
  ParameterCounts CountParameters() const;

  std::string Serialize() const;
  static ConceptHmm Parse(const std::vector<std::string> &lines, const std::string &source);
  static ConceptHmm Load(const std::string &path);
  void Save(const std::string &path) const;

  // Bitwise equality of every table.
  bool operator==(const ConceptHmm &other) const;

  // Mutable access used by estimation; call Finalize() afterwards.
  std::vector<double> &mutable_initial() { return initial_; }
  std::vector<std::vector<double>> &mutable_transition() { return transition_; }
  std::vector<double> &mutable_transition_floor() { return transition_floor_; }
  std::vector<std::vector<double>> &mutable_bigram(int c) { return bigram_[c]; }
  std::vector<double> &mutable_bigram_floor(int c) { return bigram_floor_[c]; }
  std::vector<double> &mutable_bigram_weight(int c) { return bigram_weight_[c]; }
  double &mutable_initial_floor() { return initial_floor_; }

  // Rounds to file precision, rebuilds log tables and checks normalization
  // (throws kInvalid if any row is off by more than 1e-9).
  void Finalize();

 private:
  ConceptDictionary dictionary_;
  std::vector<std::string> vocabulary_;
  std::map<std::string, int> word_index_;
  int unknown_index_ = -1;
  double k_ = 0.0;

  std::vector<double> initial_;
  double initial_floor_ = 0.0;
  std::vector<std::vector<double>> transition_;  // C x (C + 1)
  std::vector<double> transition_floor_;
  std::vector<std::vector<std::vector<double>>> bigram_;  // C x (V + 1) x V
  std::vector<std::vector<double>> bigram_floor_;
  std::vector<std::vector<double>> bigram_weight_;

  std::vector<double> log_initial_;
  std::vector<std::vector<double>> log_transition_;
  std::vector<std::vector<std::vector<double>>> log_bigram_;
};

// Rounds to ConceptHmm::kSignificantDigits significant digits.
double RoundToFilePrecision(double value);

// Relative-frequency estimation with add-k smoothing. Throws kEmptyCorpus,
// kUnknownLabel, or kUnknownWord (a word outside the vocabulary when the
// vocabulary has no <unk>).
ConceptHmm TrainMle(const std::vector<SegmentedSentence> &corpus,
                    const ConceptDictionary &dictionary,
                    const std::vector<std::string> &vocabulary, double k);

// Ties the bigram statistics of synonymous words: group rows are replaced by
// their count-weighted average, then group columns share their summed mass
// uniformly in every row of the concept. Throws kUnknownWord / kUnknownLabel.
ConceptHmm ApplySynonymSmoothing(const ConceptHmm &model, const SynonymGroups &groups);

// log P(W, C) under the first-order model; kLogZero for impossible events.
double SequenceLogProb(const ConceptHmm &model, const SegmentedSentence &sentence);

// log P(W) summed over all labelings (forward recursion).
double MarginalLogProb(const ConceptHmm &model, const std::vector<std::string> &words);

// log(exp(a) + exp(b)) without overflow; handles kLogZero.
double LogAdd(double a, double b);

}  // namespace chronus

#endif  // CHRONUS_MODEL_H_
