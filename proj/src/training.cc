#include "chronus/training.h"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>

#include "chronus/error.h"
#include "chronus/text.h"

namespace chronus {
namespace {

// Required keyword counts with a mixed-radix encoding of partial counts.
struct KeywordCounter {
  std::vector<std::string> keywords;
  std::vector<int> need;
  std::vector<int> stride;
  int states = 1;
  std::vector<int> concept_slot;  // per concept: slot, -1 free (special), -2 forbidden

  KeywordCounter(const ConceptDictionary &dict, const Template &win) {
    std::map<std::string, int> counts;
    for (const TemplateToken &t : win.tokens) ++counts[t.keyword];
    for (const auto &[k, n] : counts) {
      keywords.push_back(k);
      need.push_back(n);
      stride.push_back(states);
      states *= n + 1;
    }
    for (size_t c = 0; c < dict.size(); ++c) {
      if (dict.at(c).role == Role::kSpecial) {
        concept_slot.push_back(-1);
        continue;
      }
      auto it = std::find(keywords.begin(), keywords.end(), dict.Keyword(c));
      concept_slot.push_back(it == keywords.end() ? -2 : static_cast<int>(it - keywords.begin()));
    }
  }

  int Count(int state, int slot) const { return state / stride[slot] % (need[slot] + 1); }

  // State after opening a segment of concept c, or -1 if that overshoots.
  int Open(int state, int c) const {
    const int slot = concept_slot[c];
    if (slot == -1) return state;
    if (slot == -2 || Count(state, slot) == need[slot]) return -1;
    return state + stride[slot];
  }

  int full() const { return states - 1; }
};

bool SatisfiesWin(const KeywordCounter &counter, const std::vector<int> &labels) {
  int state = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i > 0 && labels[i] == labels[i - 1]) continue;
    state = counter.Open(state, labels[i]);
    if (state < 0) return false;
  }
  return state == counter.full();
}

DecodeResult Assemble(const ConceptHmm &model, const LatticePath &path,
                      const std::vector<int> &labels, double log_prob) {
  DecodeResult result;
  result.path = path;
  result.log_prob = log_prob;
  for (size_t i = 0; i < path.size(); ++i) {
    result.segmentation.words.push_back(path[i].superword);
    result.segmentation.values.push_back(path[i].value);
    result.segmentation.labels.push_back(model.dictionary().at(labels[i]).name);
  }
  return result;
}

}  // namespace

std::string LoopReport::Format() const {
  std::string out = "iteration\tcorrect\tproblem\tmodel\n";
  for (const LoopIteration &it : iterations) {
    out += std::to_string(it.iteration) + "\t" + std::to_string(it.correct) + "\t" +
           std::to_string(it.problem) + "\t" + it.model_id + "\n";
  }
  out += "termination\t" + termination + "\n";
  return out;
}

std::string ModelId(const ConceptHmm &model) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : model.Serialize()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<SegmentedSentence> GoldSegmentations(const std::vector<CorpusEntry> &corpus,
                                                 const SuperwordLexicon &lexicon) {
  std::vector<SegmentedSentence> out;
  for (const CorpusEntry &e : corpus) {
    if (!e.has_gold()) continue;
    try {
      out.push_back(LiftGold(LexParse(e.text, lexicon), e.gold).segmentation);
    } catch (const Error &err) {
      throw Error(err.kind(), "entry " + e.id + ": " + err.what());
    }
  }
  return out;
}

bool IsCorrect(const CorpusEntry &entry, const TurnResult &result) {
  if (result.rejected) return false;
  if (entry.has_refs()) {
    return result.answer && ScoreAnswer(*result.answer, *entry.ref_min, *entry.ref_max) == Verdict::kCorrect;
  }
  if (!entry.has_gold()) return false;
  return PathSpans(result.decode.path, result.decode.segmentation.labels) == GoldSpans(entry.gold);
}

LoopResult RunTrainingLoop(const std::vector<CorpusEntry> &corpus,
                           const std::vector<SegmentedSentence> &seed, const ConceptHmm &seed_model,
                           const Pipeline &pipeline, const LoopConfig &config) {
  if (config.max_iters < 1) throw Error(ErrorKind::kInvalid, "max_iters must be at least 1");
  if (seed.empty()) throw Error(ErrorKind::kEmptyCorpus, "training loop needs a non-empty seed set");
  for (const CorpusEntry &e : corpus) {
    if (!e.has_refs() && !e.has_gold()) {
      throw Error(ErrorKind::kInvalid, "entry " + e.id + " has neither references nor gold labels");
    }
  }

  // Gold labelings join every retraining, like the seed set.
  std::map<std::string, SegmentedSentence> gold;
  for (const CorpusEntry &e : corpus) {
    if (e.has_gold()) gold[e.id] = LiftGold(LexParse(e.text, pipeline.lexicon), e.gold).segmentation;
  }

  auto retrain = [&](const std::vector<SegmentedSentence> &kept) {
    std::vector<SegmentedSentence> data = seed;
    for (const auto &[id, s] : gold) data.push_back(s);
    data.insert(data.end(), kept.begin(), kept.end());
    ConceptHmm m = TrainMle(data, seed_model.dictionary(), seed_model.vocabulary(), config.k);
    if (!config.synonyms.empty()) m = ApplySynonymSmoothing(m, config.synonyms);
    return m;
  };

  LoopResult result{seed_model, {}};
  ConceptHmm model = seed_model;
  std::vector<std::string> previous;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    LoopIteration row;
    row.iteration = iter;
    row.model_id = ModelId(model);
    std::vector<SegmentedSentence> kept;
    std::string session;
    DialogState state;
    for (const CorpusEntry &e : corpus) {
      if (e.session != session) {
        session = e.session;
        state = DialogState{};
      }
      TurnResult r = RunTurn(pipeline, model, e.text, e.session.empty() ? nullptr : &state);
      if (IsCorrect(e, r)) {
        ++row.correct;
        row.correct_ids.push_back(e.id);
        if (!e.has_gold()) kept.push_back(r.decode.segmentation);
      } else {
        ++row.problem;
      }
    }
    const bool converged = iter > 1 && row.correct_ids == previous;
    previous = row.correct_ids;
    result.report.iterations.push_back(std::move(row));
    model = retrain(kept);
    if (converged) {
      result.report.termination = "converged";
      break;
    }
  }
  if (result.report.termination.empty()) result.report.termination = "max-iters";
  result.model = std::move(model);
  return result;
}

std::optional<DecodeResult> AlignWin(const ConceptHmm &model, const Lattice &lattice,
                                     const Template &win) {
  const KeywordCounter counter(model.dictionary(), win);
  const int num_concepts = static_cast<int>(model.num_concepts());
  const int states = counter.states;
  const std::vector<Arc> &arcs = lattice.arcs();

  std::vector<int> word(arcs.size());
  for (size_t a = 0; a < arcs.size(); ++a) {
    word[a] = model.WordIndex(arcs[a].superword);
    if (word[a] < 0) throw Error(ErrorKind::kUnknownWord, "word '" + arcs[a].superword + "' not in vocabulary");
  }

  struct Cell {
    double score = kLogZero;
    bool reachable = false;
    int prev_arc = -1;
    int prev_concept = -1;
    int prev_state = -1;
  };
  auto index = [&](int c, int s) { return c * states + s; };
  std::vector<std::vector<Cell>> cells(arcs.size(), std::vector<Cell>(num_concepts * states));

  for (size_t a = 0; a < arcs.size(); ++a) {
    const Arc &arc = arcs[a];
    if (arc.start == 0) {
      for (int c = 0; c < num_concepts; ++c) {
        const int s = counter.Open(0, c);
        if (s < 0) continue;
        Cell &cell = cells[a][index(c, s)];
        cell.score = model.LogInitial(c) + model.LogBigram(c, model.begin_row(), word[a]);
        cell.reachable = true;
      }
      continue;
    }
    for (int c = 0; c < num_concepts; ++c) {
      for (int s = 0; s < states; ++s) {
        Cell &cell = cells[a][index(c, s)];
        for (int pc = 0; pc < num_concepts; ++pc) {
          for (int b : lattice.incoming(arc.start)) {
            // The predecessor state is fixed by (pc, c, s); find it by search
            // over the (small) state space.
            for (int ps = 0; ps < states; ++ps) {
              const Cell &prev = cells[b][index(pc, ps)];
              if (!prev.reachable) continue;
              const int next = pc == c ? ps : counter.Open(ps, c);
              if (next != s) continue;
              const int context = pc == c ? word[b] : model.begin_row();
              double candidate = prev.score + model.LogTransition(pc, c);
              candidate = candidate + model.LogBigram(c, context, word[a]);
              if (!cell.reachable || ScoreBetter(candidate, cell.score)) {
                cell.score = candidate;
                cell.reachable = true;
                cell.prev_arc = b;
                cell.prev_concept = pc;
                cell.prev_state = ps;
              }
            }
          }
        }
      }
    }
  }

  int best_arc = -1, best_concept = -1;
  double best = kLogZero;
  const int n = lattice.num_positions();
  for (int c = 0; c < num_concepts; ++c) {
    for (int a : lattice.incoming(n)) {
      const Cell &cell = cells[a][index(c, counter.full())];
      if (!cell.reachable) continue;
      const double score = cell.score + model.LogFinal(c);
      if (best_arc < 0 || ScoreBetter(score, best)) {
        best = score;
        best_arc = a;
        best_concept = c;
      }
    }
  }
  if (best_arc < 0 || best == kLogZero) return std::nullopt;

  LatticePath path;
  std::vector<int> labels;
  for (int a = best_arc, c = best_concept, s = counter.full(); a >= 0;) {
    path.push_back(arcs[a]);
    labels.push_back(c);
    const Cell &cell = cells[a][index(c, s)];
    a = cell.prev_arc;
    c = cell.prev_concept;
    s = cell.prev_state;
  }
  std::reverse(path.begin(), path.end());
  std::reverse(labels.begin(), labels.end());
  return Assemble(model, path, labels, best);
}

std::optional<DecodeResult> BruteForceAlignWin(const ConceptHmm &model, const Lattice &lattice,
                                               const Template &win) {
  const size_t num_concepts = model.num_concepts();
  if (num_concepts > kBruteForceMaxConcepts) {
    throw Error(ErrorKind::kSizeLimit, "brute-force alignment limited to 6 concepts");
  }
  const KeywordCounter counter(model.dictionary(), win);
  std::vector<LatticePath> paths = EnumeratePaths(lattice, static_cast<size_t>(-1));
  for (const LatticePath &path : paths) {
    if (path.size() > kBruteForceMaxLength) {
      throw Error(ErrorKind::kSizeLimit, "brute-force alignment limited to paths of 8 arcs");
    }
  }
  auto tie_less = [](const LatticePath &pa, const std::vector<int> &la,
                     const LatticePath &pb, const std::vector<int> &lb) {
    size_t i = pa.size(), j = pb.size();
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
      if (SatisfiesWin(counter, labels)) {
        for (size_t i = 0; i < labels.size(); ++i) s.labels[i] = model.dictionary().at(labels[i]).name;
        const double score = SequenceLogProb(model, s);
        if (!have || ScoreBetter(score, best) || (ScoreTied(score, best) && tie_less(path, labels, best_path, best_labels))) {
          have = true;
          best = score;
          best_path = path;
          best_labels = labels;
        }
      }
      size_t pos = 0;
      while (pos < labels.size() && ++labels[pos] == static_cast<int>(num_concepts)) {
        labels[pos] = 0;
        ++pos;
      }
      if (pos == labels.size()) break;
    }
  }
  if (!have || best == kLogZero) return std::nullopt;
  return Assemble(model, best_path, best_labels, best);
}

}  // namespace chronus
