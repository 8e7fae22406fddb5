#ifndef CHRONUS_TESTS_SUPPORT_H_
#define CHRONUS_TESTS_SUPPORT_H_

#include <cmath>
#include <string>
#include <vector>

#include "chronus/concepts.h"
#include "chronus/corpus.h"
#include "chronus/gen.h"
#include "chronus/lexicon.h"
#include "chronus/model.h"
#include "chronus/pipeline.h"
#include "chronus/text.h"
#include "chronus/training.h"

namespace chronus::testing {

inline std::string DataDir() { return CHRONUS_SOURCE_DIR "/data"; }
inline std::string GoldenDir() { return CHRONUS_SOURCE_DIR "/tests/golden"; }
inline std::string CliPath() { return CHRONUS_CLI_PATH; }

inline std::vector<std::string> Lines(const std::string &text) {
  std::vector<std::string> out = Split(text, '\n');
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

inline std::vector<std::string> Words(const std::string &text) { return SplitWhitespace(text); }

inline std::vector<std::string> Names(size_t n, const std::string &prefix) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Fills a row with random weights. With `coarse`, weights come from {1,2}
// so that exact ties are common; `zero` is the chance of a hard zero.
inline void RandomRow(Rng &rng, std::vector<double> &row, size_t n, bool coarse, double zero) {
  row.assign(n, 0.0);
  double sum = 0;
  for (double &x : row) {
    if (rng.Uniform() < zero) continue;
    x = coarse ? 1.0 + static_cast<double>(rng.Below(2)) : 0.05 + rng.Uniform();
    sum += x;
  }
  if (sum == 0) {
    row[rng.Below(n)] = 1.0;
    sum = 1.0;
  }
  for (double &x : row) x /= sum;
}

inline ConceptHmm RandomModel(Rng &rng, size_t concepts, size_t vocab, bool coarse = false,
                              double zero = 0.0) {
  ConceptHmm m(ConceptDictionary::Plain(Names(concepts, "c")), Names(vocab, "w"), 0.0);
  RandomRow(rng, m.mutable_initial(), concepts, coarse, zero);
  for (auto &row : m.mutable_transition()) RandomRow(rng, row, concepts + 1, coarse, zero);
  for (size_t c = 0; c < concepts; ++c) {
    for (auto &row : m.mutable_bigram(static_cast<int>(c))) RandomRow(rng, row, vocab, coarse, zero);
  }
  m.Finalize();
  return m;
}

// A lattice over `positions` tokens with one single-token arc per position
// and a few random longer arcs.
inline Lattice RandomLattice(Rng &rng, size_t positions, size_t vocab, size_t extra) {
  std::vector<std::string> tokens;
  std::vector<Arc> arcs;
  for (size_t i = 0; i < positions; ++i) {
    const std::string w = "w" + std::to_string(rng.Below(vocab));
    tokens.push_back(w);
    arcs.push_back(Arc{static_cast<int>(i), static_cast<int>(i + 1), w, ""});
  }
  for (size_t e = 0; e < extra; ++e) {
    const int start = static_cast<int>(rng.Below(positions));
    const int span = 1 + static_cast<int>(rng.Below(3));
    const int end = std::min<int>(static_cast<int>(positions), start + span);
    Arc arc{start, end, "w" + std::to_string(rng.Below(vocab)), ""};
    bool dup = false;
    for (const Arc &a : arcs) dup = dup || a.Key() == arc.Key();
    if (!dup) arcs.push_back(arc);
  }
  return Lattice(tokens, arcs);
}

inline SegmentedSentence Labeled(const std::string &layout) {
  // "w:c w:c ..."
  SegmentedSentence s;
  for (const std::string &pair : SplitWhitespace(layout)) {
    const size_t colon = pair.rfind(':');
    s.words.push_back(pair.substr(0, colon));
    s.values.push_back("");
    s.labels.push_back(pair.substr(colon + 1));
  }
  return s;
}

// The bundled demo pipeline and a model trained from the bundled corpus.
struct Demo {
  Pipeline pipeline;
  ConceptHmm model;
  std::vector<SegmentedSentence> seed;

  static const Demo &Get() {
    static const Demo demo = [] {
      Demo d;
      d.pipeline = Pipeline::LoadDirectory(DataDir());
      d.seed = GoldSegmentations(LoadCorpus(DataDir() + "/train.txt"), d.pipeline.lexicon);
      d.model = TrainMle(d.seed, d.pipeline.dictionary, d.pipeline.lexicon.Vocabulary(), 0.001);
      return d;
    }();
    return demo;
  }
};

}  // namespace chronus::testing

#endif  // CHRONUS_TESTS_SUPPORT_H_
