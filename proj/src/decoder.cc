#include "chronus/decoder.h"

#include <algorithm>

#include "chronus/error.h"

namespace chronus {
namespace {

struct Cell {
  double score = kLogZero;
  bool reachable = false;
  int prev_arc = -1;
  int prev_concept = -1;
};

DecodeResult Assemble(const ConceptHmm &model, const LatticePath &path,
                      const std::vector<int> &labels, double log_prob) {
  DecodeResult result;
  result.path = path;
  result.log_prob = log_prob;
  result.degenerate = log_prob == kLogZero;
  for (size_t i = 0; i < path.size(); ++i) {
    result.segmentation.words.push_back(path[i].superword);
    result.segmentation.values.push_back(path[i].value);
    result.segmentation.labels.push_back(model.dictionary().at(labels[i]).name);
  }
  return result;
}

}  // namespace

DecodeResult ViterbiDecode(const ConceptHmm &model, const std::vector<std::string> &words,
                           DecodeStats *stats) {
  if (words.empty()) throw Error(ErrorKind::kInvalid, "cannot decode an empty sequence");
  return ViterbiDecodeLattice(model, Lattice::Chain(words), stats);
}

DecodeResult ViterbiDecodeLattice(const ConceptHmm &model, const Lattice &lattice,
                                  DecodeStats *stats) {
  const int num_concepts = static_cast<int>(model.num_concepts());
  const std::vector<Arc> &arcs = lattice.arcs();
  const int n = lattice.num_positions();

  std::vector<int> word(arcs.size());
  for (size_t a = 0; a < arcs.size(); ++a) {
    word[a] = model.WordIndex(arcs[a].superword);
    if (word[a] < 0) {
      throw Error(ErrorKind::kUnknownWord, "word '" + arcs[a].superword + "' not in vocabulary");
    }
  }

  // cells[a][c]: best path ending with arc a labeled c. Arcs are sorted by
  // start, so every predecessor is final before its successors are visited.
  std::vector<std::vector<Cell>> cells(arcs.size(), std::vector<Cell>(num_concepts));
  size_t relaxations = 0;
  for (size_t a = 0; a < arcs.size(); ++a) {
    const Arc &arc = arcs[a];
    for (int c = 0; c < num_concepts; ++c) {
      Cell &cell = cells[a][c];
      if (arc.start == 0) {
        cell.score = model.LogInitial(c) + model.LogBigram(c, model.begin_row(), word[a]);
        cell.reachable = true;
        continue;
      }
      for (int pc = 0; pc < num_concepts; ++pc) {
        for (int b : lattice.incoming(arc.start)) {
          const Cell &prev = cells[b][pc];
          if (!prev.reachable) continue;
          ++relaxations;
          const int context = pc == c ? word[b] : model.begin_row();
          double candidate = prev.score + model.LogTransition(pc, c);
          candidate = candidate + model.LogBigram(c, context, word[a]);
          if (!cell.reachable || ScoreBetter(candidate, cell.score)) {
            cell.score = candidate;
            cell.reachable = true;
            cell.prev_arc = b;
            cell.prev_concept = pc;
          }
        }
      }
    }
  }
  if (stats != nullptr) stats->relaxations += relaxations;

  int best_arc = -1;
  int best_concept = -1;
  double best = kLogZero;
  for (int c = 0; c < num_concepts; ++c) {
    for (int a : lattice.incoming(n)) {
      if (!cells[a][c].reachable) continue;
      const double score = cells[a][c].score + model.LogFinal(c);
      if (best_arc < 0 || ScoreBetter(score, best)) {
        best = score;
        best_arc = a;
        best_concept = c;
      }
    }
  }

  LatticePath path;
  std::vector<int> labels;
  if (best == kLogZero) {
    // Every complete path is impossible, so all tie: take concept 0 and the
    // smallest reachable arc at each step from the end.
    for (int pos = n; pos > 0;) {
      int pick = -1;
      for (int a : lattice.incoming(pos)) {
        if (cells[a][0].reachable) {
          pick = a;
          break;
        }
      }
      path.push_back(arcs[pick]);
      labels.push_back(0);
      pos = arcs[pick].start;
    }
    best_arc = -1;
  }
  for (int a = best_arc, c = best_concept; a >= 0;) {
    path.push_back(arcs[a]);
    labels.push_back(c);
    const Cell &cell = cells[a][c];
    a = cell.prev_arc;
    c = cell.prev_concept;
  }
  std::reverse(path.begin(), path.end());
  std::reverse(labels.begin(), labels.end());
  return Assemble(model, path, labels, best);
}

DecodeResult BruteForceDecode(const ConceptHmm &model, const Lattice &lattice) {
  const size_t num_concepts = model.num_concepts();
  if (num_concepts > kBruteForceMaxConcepts) {
    throw Error(ErrorKind::kSizeLimit, "brute-force decoding limited to 6 concepts");
  }
  std::vector<LatticePath> paths = EnumeratePaths(lattice, static_cast<size_t>(-1));
  for (const LatticePath &path : paths) {
    if (path.size() > kBruteForceMaxLength) {
      throw Error(ErrorKind::kSizeLimit, "brute-force decoding limited to paths of 8 arcs");
    }
  }

  // Ties: compare (concept, arc key) pairs from the last position backwards,
  // smaller wins; this is the order Viterbi's backpointers realize.
  auto tie_less = [](const LatticePath &pa, const std::vector<int> &la,
                     const LatticePath &pb, const std::vector<int> &lb) {
    size_t i = pa.size();
    size_t j = pb.size();
    while (i > 0 && j > 0) {
      --i;
      --j;
      if (la[i] != lb[j]) return la[i] < lb[j];
      if (pa[i].Key() != pb[j].Key()) return pa[i].Key() < pb[j].Key();
    }
    return i < j;
  };

  bool have = false;
  double best = kLogZero;
  LatticePath best_path;
  std::vector<int> best_labels;
  for (const LatticePath &path : paths) {
    SegmentedSentence s;
    s.words = PathSuperwords(path);
    s.values = PathValues(path);
    s.labels.resize(path.size());
    std::vector<int> labels(path.size(), 0);
    while (true) {
      for (size_t i = 0; i < labels.size(); ++i) s.labels[i] = model.dictionary().at(labels[i]).name;
      const double score = SequenceLogProb(model, s);
      if (!have || ScoreBetter(score, best) ||
          (ScoreTied(score, best) && tie_less(path, labels, best_path, best_labels))) {
        have = true;
        best = score;
        best_path = path;
        best_labels = labels;
      }
      // Odometer increment over labelings.
      size_t pos = 0;
      while (pos < labels.size() && ++labels[pos] == static_cast<int>(num_concepts)) {
        labels[pos] = 0;
        ++pos;
      }
      if (pos == labels.size()) break;
    }
  }
  return Assemble(model, best_path, best_labels, best);
}

}  // namespace chronus
