#ifndef CHRONUS_GEN_H_
#define CHRONUS_GEN_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chronus/corpus.h"
#include "chronus/model.h"

namespace chronus {

// Seeded generator with platform-independent sampling helpers.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  double Uniform();                                  // [0, 1)
  size_t Below(size_t n);                            // [0, n)
  size_t Categorical(const std::vector<double> &p);  // index drawn from p

 private:
  std::mt19937_64 engine_;
};

// The fixed 5-concept, 30-word generating model: concept cJ owns words
// JA0..JA3 and favours four of the ten shared words S0..S9.
ConceptHmm SyntheticTruthModel();

// Samples labeled sentences (text and gold) from a model. Sentences longer
// than max_length are redrawn.
std::vector<CorpusEntry> SampleCorpus(const ConceptHmm &model, size_t count, Rng &rng,
                                      const std::string &id_prefix, size_t max_length = 25);

// Lexicon text listing every vocabulary word of a model as a plain word.
std::string PlainLexiconText(const std::vector<std::string> &words);

// Grammar section for cardinal numbers 0..9999 with the digits normalizer.
std::string NumberGrammarText(const std::string &id = "number");

// A generated task: file name -> contents.
struct GeneratedFiles {
  std::vector<std::pair<std::string, std::string>> files;
};

// Synthetic HMM recovery task: truth.model, lexicon.txt, concepts.txt,
// train.txt, test.txt.
GeneratedFiles GenerateSynthetic(uint64_t seed, size_t train, size_t test);

// Numeral and city spans: lexicon-super.txt (number and city grammars),
// lexicon-plain.txt (the same words, no grammars), concepts.txt, train.txt,
// test.txt.
GeneratedFiles GenerateSuperword(uint64_t seed, size_t train, size_t test);

// Alignment task: concepts.txt, lexicon.txt, train.txt (labeled), test.txt
// (gold labels plus a literal win template in shuffled order).
GeneratedFiles GenerateAlign(uint64_t seed, size_t train, size_t test);

void WriteGenerated(const GeneratedFiles &generated, const std::string &dir);

}  // namespace chronus

#endif  // CHRONUS_GEN_H_
