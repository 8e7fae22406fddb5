#include "chronus/model.h"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "chronus/error.h"
#include "chronus/text.h"

namespace chronus {
namespace {

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

// Fills `row` with add-k estimates from `counts`; zero-evidence rows become
// uniform. Returns the row floor (the value of an unobserved column).
double Estimate(const std::vector<double> &counts, double k, std::vector<double> *row) {
  double total = 0.0;
  for (double c : counts) total += c;
  const double denom = total + k * static_cast<double>(counts.size());
  row->resize(counts.size());
  if (denom <= 0.0) {
    const double uniform = 1.0 / static_cast<double>(counts.size());
    std::fill(row->begin(), row->end(), uniform);
    return uniform;
  }
  for (size_t i = 0; i < counts.size(); ++i) (*row)[i] = (counts[i] + k) / denom;
  return k / denom;
}

double RowError(const std::vector<double> &row) {
  double sum = 0.0;
  for (double p : row) sum += p;
  return std::fabs(sum - 1.0);
}

}  // namespace

double RoundToFilePrecision(double value) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  return std::strtod(FormatDouble(value, ConceptHmm::kSignificantDigits).c_str(), nullptr);
}

double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// ---------------------------------------------------------------------------
// SegmentedSentence

std::vector<SegmentedSentence::Segment> SegmentedSentence::Segments() const {
  std::vector<Segment> segments;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i == 0 || labels[i] != labels[i - 1]) {
      segments.push_back(Segment{i, i + 1, labels[i]});
    } else {
      segments.back().end = i + 1;
    }
  }
  return segments;
}

std::string SegmentedSentence::Render(size_t i) const {
  const std::string &word = words[i];
  if (i < values.size() && !values[i].empty() && word.size() >= 4 &&
      StartsWith(word, "((")) {
    return word.substr(0, word.size() - 1) + values[i] + ")";
  }
  return word;
}

std::string SegmentedSentence::FormatSegments() const {
  std::string out;
  for (const Segment &s : Segments()) {
    if (!out.empty()) out += ' ';
    out += s.label + ":[";
    for (size_t i = s.begin; i < s.end; ++i) {
      if (i > s.begin) out += ' ';
      out += Render(i);
    }
    out += ']';
  }
  return out;
}

SynonymGroups ParseSynonymGroups(const std::vector<std::string> &lines,
                                 const std::string &source) {
  SynonymGroups groups;
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = StripComment(lines[i]);
    if (line.empty()) continue;
    std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() != 2) {
      throw ParseError(source, static_cast<int>(i + 1), "expected concept<TAB>WORD WORD ...");
    }
    std::vector<std::string> words = SplitWhitespace(fields[1]);
    if (words.empty()) throw ParseError(source, static_cast<int>(i + 1), "empty synonym group");
    groups[std::string(Trim(fields[0]))].push_back(std::move(words));
  }
  return groups;
}

// ---------------------------------------------------------------------------
// ConceptHmm

ConceptHmm::ConceptHmm(ConceptDictionary dictionary, std::vector<std::string> vocabulary,
                       double k)
    : dictionary_(std::move(dictionary)), k_(k) {
  std::set<std::string> unique(vocabulary.begin(), vocabulary.end());
  vocabulary_.assign(unique.begin(), unique.end());
  if (vocabulary_.empty()) throw Error(ErrorKind::kInvalid, "empty vocabulary");
  if (dictionary_.size() == 0) throw Error(ErrorKind::kInvalid, "empty concept dictionary");
  if (k < 0.0) throw Error(ErrorKind::kInvalid, "negative smoothing constant");
  for (const char *reserved : {kInitialRow, kFinalColumn, kBeginRow}) {
    if (unique.count(reserved)) throw Error(ErrorKind::kInvalid, "reserved vocabulary word");
  }
  for (size_t i = 0; i < vocabulary_.size(); ++i) {
    word_index_[vocabulary_[i]] = static_cast<int>(i);
  }
  auto unk = word_index_.find("<unk>");
  unknown_index_ = unk == word_index_.end() ? -1 : unk->second;

  const size_t c = dictionary_.size();
  const size_t v = vocabulary_.size();
  initial_.assign(c, 1.0 / static_cast<double>(c));
  initial_floor_ = initial_[0];
  transition_.assign(c, std::vector<double>(c + 1, 1.0 / static_cast<double>(c + 1)));
  transition_floor_.assign(c, 1.0 / static_cast<double>(c + 1));
  bigram_.assign(c, std::vector<std::vector<double>>(v + 1, std::vector<double>(v, 1.0 / static_cast<double>(v))));
  bigram_floor_.assign(c, std::vector<double>(v + 1, 1.0 / static_cast<double>(v)));
  bigram_weight_.assign(c, std::vector<double>(v + 1, 0.0));
  Finalize();
}

int ConceptHmm::WordIndex(const std::string &word) const {
  auto it = word_index_.find(word);
  return it == word_index_.end() ? unknown_index_ : it->second;
}

bool ConceptHmm::InVocabulary(const std::string &word) const {
  return word_index_.count(word) > 0;
}

void ConceptHmm::Finalize() {
  for (double &p : initial_) p = RoundToFilePrecision(p);
  initial_floor_ = RoundToFilePrecision(initial_floor_);
  for (auto &row : transition_) for (double &p : row) p = RoundToFilePrecision(p);
  for (double &p : transition_floor_) p = RoundToFilePrecision(p);
  for (auto &table : bigram_) for (auto &row : table) for (double &p : row) p = RoundToFilePrecision(p);
  for (auto &floors : bigram_floor_) for (double &p : floors) p = RoundToFilePrecision(p);

  log_initial_.resize(initial_.size());
  std::transform(initial_.begin(), initial_.end(), log_initial_.begin(), SafeLog);
  log_transition_.resize(transition_.size());
  for (size_t i = 0; i < transition_.size(); ++i) {
    log_transition_[i].resize(transition_[i].size());
    std::transform(transition_[i].begin(), transition_[i].end(), log_transition_[i].begin(), SafeLog);
  }
  log_bigram_.resize(bigram_.size());
  for (size_t c = 0; c < bigram_.size(); ++c) {
    log_bigram_[c].resize(bigram_[c].size());
    for (size_t r = 0; r < bigram_[c].size(); ++r) {
      log_bigram_[c][r].resize(bigram_[c][r].size());
      std::transform(bigram_[c][r].begin(), bigram_[c][r].end(), log_bigram_[c][r].begin(), SafeLog);
    }
  }
  const double error = MaxNormalizationError();
  if (error > 1e-9) {
    throw Error(ErrorKind::kInvalid, "model rows not normalized (error " + FormatDouble(error, 3) + ")");
  }
}

double ConceptHmm::MaxNormalizationError() const {
  double error = RowError(initial_);
  for (const auto &row : transition_) error = std::max(error, RowError(row));
  for (const auto &table : bigram_) {
    for (const auto &row : table) error = std::max(error, RowError(row));
  }
  return error;
}

ConceptHmm::ParameterCounts ConceptHmm::CountParameters() const {
  ParameterCounts counts;
  counts.transition_entries = initial_.size();
  for (double p : initial_) counts.transition_observed += p > initial_floor_;
  for (size_t i = 0; i < transition_.size(); ++i) {
    counts.transition_entries += transition_[i].size();
    for (double p : transition_[i]) counts.transition_observed += p > transition_floor_[i];
  }
  for (size_t c = 0; c < bigram_.size(); ++c) {
    for (size_t r = 0; r < bigram_[c].size(); ++r) {
      size_t observed = 0;
      for (double p : bigram_[c][r]) observed += p > bigram_floor_[c][r];
      counts.bigram_observed += observed;
      counts.bigram_rows += observed > 0;
    }
  }
  return counts;
}

bool ConceptHmm::operator==(const ConceptHmm &other) const {
  return dictionary_ == other.dictionary_ && vocabulary_ == other.vocabulary_ &&
         k_ == other.k_ && initial_ == other.initial_ && transition_ == other.transition_ &&
         bigram_ == other.bigram_ && log_initial_ == other.log_initial_ &&
         log_transition_ == other.log_transition_ && log_bigram_ == other.log_bigram_;
}

// Model file:
//   chronus-model v1
//   k<TAB>0.001
//   [concepts]       dictionary lines
//   [vocabulary]     one superword per line
//   [initial]        <s><TAB>CONCEPT<TAB>p
//   [transition]     FROM<TAB>TO<TAB>p, TO may be </s>
//   [bigram NAME]    PREV<TAB>WORD<TAB>p, PREV may be <b>
// A "ROW<TAB>*<TAB>p" line sets the floor of that row: every column not listed
// for the row has probability p. Rows without a floor line are uniform.
std::string ConceptHmm::Serialize() const {
  std::ostringstream out;
  auto fmt = [](double p) { return FormatDouble(p, kSignificantDigits); };
  const size_t c = num_concepts();
  const size_t v = vocab_size();
  out << "chronus-model v1\n";
  out << "k\t" << fmt(k_) << "\n";
  out << "[concepts]\n" << dictionary_.Serialize();
  out << "[vocabulary]\n";
  for (const std::string &w : vocabulary_) out << w << "\n";

  auto write_row = [&](const std::string &row_name, const std::vector<double> &row,
                       double floor, const std::vector<std::string> &columns) {
    const double uniform = RoundToFilePrecision(1.0 / static_cast<double>(row.size()));
    bool all_uniform = floor == uniform;
    for (double p : row) all_uniform = all_uniform && p == uniform;
    if (all_uniform) return;
    out << row_name << "\t*\t" << fmt(floor) << "\n";
    for (size_t j = 0; j < row.size(); ++j) {
      if (row[j] != floor) out << row_name << "\t" << columns[j] << "\t" << fmt(row[j]) << "\n";
    }
  };
  std::vector<std::string> concept_columns;
  for (size_t i = 0; i < c; ++i) concept_columns.push_back(dictionary_.at(i).name);
  out << "[initial]\n";
  write_row(kInitialRow, initial_, initial_floor_, concept_columns);
  concept_columns.push_back(kFinalColumn);
  out << "[transition]\n";
  for (size_t i = 0; i < c; ++i) {
    write_row(dictionary_.at(i).name, transition_[i], transition_floor_[i], concept_columns);
  }
  for (size_t i = 0; i < c; ++i) {
    out << "[bigram " << dictionary_.at(i).name << "]\n";
    for (size_t r = 0; r <= v; ++r) {
      write_row(r == v ? std::string(kBeginRow) : vocabulary_[r], bigram_[i][r],
                bigram_floor_[i][r], vocabulary_);
    }
  }
  return out.str();
}

ConceptHmm ConceptHmm::Parse(const std::vector<std::string> &lines, const std::string &source) {
  if (lines.empty() || Trim(lines[0]) != "chronus-model v1") {
    throw ParseError(source, 1, "missing 'chronus-model v1' header");
  }
  double k = 0.0;
  std::vector<std::string> concept_lines;
  std::vector<std::string> vocabulary;
  struct Entry {
    std::string section;
    std::vector<std::string> fields;
    int line;
  };
  std::vector<Entry> entries;
  std::string section;
  for (size_t i = 1; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i + 1);
    std::string_view line = Trim(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = std::string(line.substr(1, line.size() - 2));
      continue;
    }
    if (section.empty()) {
      std::vector<std::string> f = Split(line, '\t');
      if (f.size() == 2 && f[0] == "k" && ParseDouble(f[1], &k)) continue;
      throw ParseError(source, lineno, "unexpected header line");
    }
    if (section == "concepts") {
      concept_lines.emplace_back(line);
    } else if (section == "vocabulary") {
      vocabulary.emplace_back(line);
    } else {
      std::vector<std::string> f = Split(line, '\t');
      if (f.size() != 3) throw ParseError(source, lineno, "expected ROW<TAB>COL<TAB>probability");
      entries.push_back(Entry{section, std::move(f), lineno});
    }
  }
  ConceptDictionary dictionary;
  {
    std::vector<Concept> concepts;
    for (const std::string &l : concept_lines) {
      std::vector<std::string> f = Split(l, '\t');
      if (f.size() < 3) throw ParseError(source, 0, "bad concept line '" + l + "'");
      long rank = 0;
      ParseInt(f[2], &rank);
      concepts.push_back(Concept{f[0], RoleFromName(f[1]), static_cast<int>(rank),
                                 f.size() > 3 ? f[3] : ""});
    }
    dictionary = ConceptDictionary(std::move(concepts));
  }
  ConceptHmm model(dictionary, vocabulary, k);
  if (model.vocabulary_ != vocabulary) throw ParseError(source, 0, "vocabulary must be sorted and unique");

  auto concept_of = [&](const std::string &name, int line) {
    auto idx = model.dictionary_.Find(name);
    if (!idx) throw ParseError(source, line, "unknown concept '" + name + "'");
    return *idx;
  };
  auto word_of = [&](const std::string &word, int line) {
    auto it = model.word_index_.find(word);
    if (it == model.word_index_.end()) throw ParseError(source, line, "unknown word '" + word + "'");
    return it->second;
  };
  // Floors first (a floor line resets its row), then explicit entries.
  for (int pass = 0; pass < 2; ++pass) {
    for (const Entry &e : entries) {
      const bool is_floor = e.fields[1] == "*";
      if ((pass == 0) != is_floor) continue;
      double p = 0.0;
      if (!ParseDouble(e.fields[2], &p)) throw ParseError(source, e.line, "bad probability");
      std::vector<double> *row = nullptr;
      double *floor = nullptr;
      int column = -1;
      if (e.section == "initial") {
        if (e.fields[0] != kInitialRow) throw ParseError(source, e.line, "initial rows must be <s>");
        row = &model.initial_;
        floor = &model.initial_floor_;
        if (!is_floor) column = concept_of(e.fields[1], e.line);
      } else if (e.section == "transition") {
        int from = concept_of(e.fields[0], e.line);
        row = &model.transition_[from];
        floor = &model.transition_floor_[from];
        if (!is_floor) {
          column = e.fields[1] == kFinalColumn ? model.final_column() : concept_of(e.fields[1], e.line);
        }
      } else if (StartsWith(e.section, "bigram ")) {
        int c = concept_of(e.section.substr(7), e.line);
        int r = e.fields[0] == kBeginRow ? model.begin_row() : word_of(e.fields[0], e.line);
        row = &model.bigram_[c][r];
        floor = &model.bigram_floor_[c][r];
        if (!is_floor) column = word_of(e.fields[1], e.line);
      } else {
        throw ParseError(source, e.line, "unknown section '" + e.section + "'");
      }
      if (is_floor) {
        *floor = p;
        std::fill(row->begin(), row->end(), p);
      } else {
        (*row)[column] = p;
      }
    }
  }
  try {
    model.Finalize();
  } catch (const Error &err) {
    throw ParseError(source, 0, err.what());
  }
  return model;
}

ConceptHmm ConceptHmm::Load(const std::string &path) { return Parse(ReadLines(path), path); }

void ConceptHmm::Save(const std::string &path) const { WriteFile(path, Serialize()); }

// ---------------------------------------------------------------------------
// Estimation

ConceptHmm TrainMle(const std::vector<SegmentedSentence> &corpus,
                    const ConceptDictionary &dictionary,
                    const std::vector<std::string> &vocabulary, double k) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyCorpus, "training corpus is empty");
  ConceptHmm model(dictionary, vocabulary, k);
  const size_t c = model.num_concepts();
  const size_t v = model.vocab_size();

  std::vector<double> initial(c, 0.0);
  std::vector<std::vector<double>> transition(c, std::vector<double>(c + 1, 0.0));
  std::vector<std::vector<std::vector<double>>> bigram(
      c, std::vector<std::vector<double>>(v + 1, std::vector<double>(v, 0.0)));

  for (const SegmentedSentence &s : corpus) {
    if (s.words.empty() || s.words.size() != s.labels.size()) {
      throw Error(ErrorKind::kInvalid, "segmented sentence with mismatched words and labels");
    }
    std::vector<int> labels;
    std::vector<int> words;
    for (size_t i = 0; i < s.words.size(); ++i) {
      labels.push_back(dictionary.IndexOf(s.labels[i]));
      int w = model.WordIndex(s.words[i]);
      if (w < 0) throw Error(ErrorKind::kUnknownWord, "word '" + s.words[i] + "' not in vocabulary");
      words.push_back(w);
    }
    initial[labels[0]] += 1;
    for (size_t i = 0; i < words.size(); ++i) {
      const bool continues = i > 0 && labels[i] == labels[i - 1];
      if (i > 0) transition[labels[i - 1]][labels[i]] += 1;
      const int prev = continues ? words[i - 1] : model.begin_row();
      bigram[labels[i]][prev][words[i]] += 1;
    }
    transition[labels.back()][c] += 1;
  }

  model.mutable_initial_floor() = Estimate(initial, k, &model.mutable_initial());
  for (size_t i = 0; i < c; ++i) {
    model.mutable_transition_floor()[i] = Estimate(transition[i], k, &model.mutable_transition()[i]);
    for (size_t r = 0; r <= v; ++r) {
      double total = 0.0;
      for (double n : bigram[i][r]) total += n;
      model.mutable_bigram_weight(i)[r] = total;
      model.mutable_bigram_floor(i)[r] = Estimate(bigram[i][r], k, &model.mutable_bigram(i)[r]);
    }
  }
  model.Finalize();
  return model;
}

ConceptHmm ApplySynonymSmoothing(const ConceptHmm &model, const SynonymGroups &groups) {
  ConceptHmm out = model;
  for (const auto &[concept_name, concept_groups] : groups) {
    const int c = model.dictionary().IndexOf(concept_name);
    auto &table = out.mutable_bigram(c);
    auto &floors = out.mutable_bigram_floor(c);
    const auto &weights = out.mutable_bigram_weight(c);
    for (const std::vector<std::string> &group : concept_groups) {
      std::vector<int> members;
      for (const std::string &word : group) {
        if (!model.InVocabulary(word)) {
          throw Error(ErrorKind::kUnknownWord, "synonym '" + word + "' not in vocabulary");
        }
        members.push_back(model.WordIndex(word));
      }
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      if (members.size() < 2) continue;

      // Rows: count-weighted average (plain average without evidence).
      double total_weight = 0.0;
      for (int m : members) total_weight += weights[m];
      std::vector<double> row(model.vocab_size(), 0.0);
      double floor = 0.0;
      for (int m : members) {
        const double w = total_weight > 0.0 ? weights[m] / total_weight
                                            : 1.0 / static_cast<double>(members.size());
        for (size_t j = 0; j < row.size(); ++j) row[j] += w * table[m][j];
        floor += w * floors[m];
      }
      for (double &p : row) p = RoundToFilePrecision(p);
      floor = RoundToFilePrecision(floor);
      for (int m : members) {
        table[m] = row;
        floors[m] = floor;
      }
      // Columns: group members share their summed mass in every row.
      for (auto &r : table) {
        double mass = 0.0;
        for (int m : members) mass += r[m];
        const double share = RoundToFilePrecision(mass / static_cast<double>(members.size()));
        for (int m : members) r[m] = share;
      }
    }
  }
  out.Finalize();
  return out;
}

double SequenceLogProb(const ConceptHmm &model, const SegmentedSentence &sentence) {
  if (sentence.words.empty() || sentence.words.size() != sentence.labels.size()) {
    throw Error(ErrorKind::kInvalid, "segmented sentence with mismatched words and labels");
  }
  const ConceptDictionary &dict = model.dictionary();
  int prev_label = dict.IndexOf(sentence.labels[0]);
  int prev_word = model.WordIndex(sentence.words[0]);
  if (prev_word < 0) throw Error(ErrorKind::kUnknownWord, "word '" + sentence.words[0] + "' not in vocabulary");
  double lp = model.LogInitial(prev_label) + model.LogBigram(prev_label, model.begin_row(), prev_word);
  for (size_t i = 1; i < sentence.words.size(); ++i) {
    const int label = dict.IndexOf(sentence.labels[i]);
    const int word = model.WordIndex(sentence.words[i]);
    if (word < 0) throw Error(ErrorKind::kUnknownWord, "word '" + sentence.words[i] + "' not in vocabulary");
    const int context = label == prev_label ? prev_word : model.begin_row();
    lp = lp + model.LogTransition(prev_label, label);
    lp = lp + model.LogBigram(label, context, word);
    prev_label = label;
    prev_word = word;
  }
  lp = lp + model.LogFinal(prev_label);
  return lp;
}

double MarginalLogProb(const ConceptHmm &model, const std::vector<std::string> &words) {
  if (words.empty()) throw Error(ErrorKind::kInvalid, "empty word sequence");
  const int c = static_cast<int>(model.num_concepts());
  std::vector<int> ids;
  for (const std::string &w : words) {
    int id = model.WordIndex(w);
    if (id < 0) throw Error(ErrorKind::kUnknownWord, "word '" + w + "' not in vocabulary");
    ids.push_back(id);
  }
  std::vector<double> alpha(c);
  for (int j = 0; j < c; ++j) {
    alpha[j] = model.LogInitial(j) + model.LogBigram(j, model.begin_row(), ids[0]);
  }
  for (size_t i = 1; i < ids.size(); ++i) {
    std::vector<double> next(c, kLogZero);
    for (int j = 0; j < c; ++j) {
      for (int p = 0; p < c; ++p) {
        const int context = p == j ? ids[i - 1] : model.begin_row();
        next[j] = LogAdd(next[j], alpha[p] + model.LogTransition(p, j) + model.LogBigram(j, context, ids[i]));
      }
    }
    alpha = std::move(next);
  }
  double total = kLogZero;
  for (int j = 0; j < c; ++j) total = LogAdd(total, alpha[j] + model.LogFinal(j));
  return total;
}

}  // namespace chronus
