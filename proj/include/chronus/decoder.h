#ifndef CHRONUS_DECODER_H_
#define CHRONUS_DECODER_H_

#include <cstddef>
#include <string>
#include <vector>

#include "chronus/lexicon.h"
#include "chronus/model.h"

namespace chronus {

struct DecodeResult {
  SegmentedSentence segmentation;
  double log_prob = kLogZero;
  // Lattice arcs along the chosen path, parallel to segmentation.words.
  LatticePath path;
  // Every labeling had probability zero; segmentation is the tie-break
  // choice (smallest concept everywhere, first arcs).
  bool degenerate = false;
};

struct DecodeStats {
  size_t relaxations = 0;  // candidate predecessor evaluations
};

// MAP labeling of a superword sequence.
DecodeResult ViterbiDecode(const ConceptHmm &model, const std::vector<std::string> &words,
                           DecodeStats *stats = nullptr);

// Joint MAP over lattice paths and labelings. Ties go to the smallest concept
// index, then the smallest arc key (start, end, superword).
DecodeResult ViterbiDecodeLattice(const ConceptHmm &model, const Lattice &lattice,
                                  DecodeStats *stats = nullptr);

// Log scores closer than this are ties. Sums of the same terms in a
// different grouping can differ in the last bits; that must not decide an
// argmax.
inline constexpr double kTieTolerance = 1e-10;

inline bool ScoreBetter(double a, double b) {
  if (a == kLogZero) return false;
  if (b == kLogZero) return true;
  return a > b + kTieTolerance;
}

inline bool ScoreTied(double a, double b) { return !ScoreBetter(a, b) && !ScoreBetter(b, a); }

inline constexpr size_t kBruteForceMaxConcepts = 6;
inline constexpr size_t kBruteForceMaxLength = 8;

// Exhaustive search over every path and labeling with the same tie-breaking
// as ViterbiDecodeLattice. Throws kSizeLimit beyond the limits above.
DecodeResult BruteForceDecode(const ConceptHmm &model, const Lattice &lattice);

}  // namespace chronus

#endif  // CHRONUS_DECODER_H_
