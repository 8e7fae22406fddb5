#include <cmath>

#include "doctest.h"
#include "chronus/error.h"
#include "chronus/model.h"
#include "support.h"

using namespace chronus;
using chronus::testing::Labeled;
using chronus::testing::Names;
using chronus::testing::RandomModel;

namespace {

const std::vector<std::string> kVocab = {"((city))", "FLIGHTS", "ME", "SHOW", "TO"};

ConceptDictionary Qsd() { return ConceptDictionary::Plain({"question", "subject", "destin"}); }

std::vector<SegmentedSentence> TwoSentences() {
  return {Labeled("SHOW:question ME:question FLIGHTS:subject"),
          Labeled("FLIGHTS:subject TO:destin ((city)):destin")};
}

// Sum of exp(log P(W,C)) over every labeling of W.
double BruteMarginal(const ConceptHmm &m, const std::vector<std::string> &words) {
  SegmentedSentence s;
  s.words = words;
  s.values.assign(words.size(), "");
  std::vector<size_t> labels(words.size(), 0);
  double total = 0;
  while (true) {
    s.labels.clear();
    for (size_t l : labels) s.labels.push_back(m.dictionary().at(l).name);
    total += std::exp(SequenceLogProb(m, s));
    size_t pos = 0;
    while (pos < labels.size() && ++labels[pos] == m.num_concepts()) labels[pos++] = 0;
    if (pos == labels.size()) break;
  }
  return total;
}

std::vector<SegmentedSentence> RandomCorpus(Rng &rng, size_t sentences, size_t concepts, size_t vocab) {
  std::vector<SegmentedSentence> out;
  for (size_t i = 0; i < sentences; ++i) {
    SegmentedSentence s;
    for (size_t j = 0, n = 1 + rng.Below(6); j < n; ++j) {
      s.words.push_back("w" + std::to_string(rng.Below(vocab)));
      s.values.push_back("");
      s.labels.push_back("c" + std::to_string(rng.Below(concepts)));
    }
    out.push_back(s);
  }
  return out;
}

void CheckNormalized(const ConceptHmm &m) { REQUIRE(m.MaxNormalizationError() <= 1e-9); }

}  // namespace

TEST_CASE("single segment with k=0 gives count ratios") {
  const ConceptHmm m = TrainMle({Labeled("SHOW:question ME:question")}, Qsd(), kVocab, 0.0);
  const int q = 0, show = m.WordIndex("SHOW"), me = m.WordIndex("ME");
  CHECK(m.Initial(q) == 1.0);
  CHECK(m.Bigram(q, m.begin_row(), show) == 1.0);
  CHECK(m.Bigram(q, show, me) == 1.0);
  CHECK(m.Transition(q, q) == 0.5);
  CHECK(m.Transition(q, m.final_column()) == 0.5);
  CheckNormalized(m);
}

TEST_CASE("two sentences starting with question and subject split the initial mass") {
  const ConceptHmm m = TrainMle(TwoSentences(), Qsd(), kVocab, 0.0);
  CHECK(m.Initial(0) == 0.5);
  CHECK(m.Initial(1) == 0.5);
  CHECK(m.Initial(2) == 0.0);
  CHECK(m.LogInitial(2) == kLogZero);
}

TEST_CASE("add-k estimates match hand counts") {
  // Counts of the two-sentence corpus, k = 0.5, |G| = 3, |V| = 5.
  const ConceptHmm m = TrainMle(TwoSentences(), Qsd(), kVocab, 0.5);
  const int q = 0, s = 1, d = 2, fin = m.final_column();
  const int show = m.WordIndex("SHOW"), me = m.WordIndex("ME"), to = m.WordIndex("TO");
  const int city = m.WordIndex("((city))"), flights = m.WordIndex("FLIGHTS");
  CHECK(m.Initial(q) == doctest::Approx(1.5 / 3.5).epsilon(1e-12));
  CHECK(m.Initial(d) == doctest::Approx(0.5 / 3.5).epsilon(1e-12));
  CHECK(m.Transition(q, q) == doctest::Approx(1.5 / 4.0).epsilon(1e-12));
  CHECK(m.Transition(q, s) == doctest::Approx(1.5 / 4.0).epsilon(1e-12));
  CHECK(m.Transition(q, fin) == doctest::Approx(0.5 / 4.0).epsilon(1e-12));
  CHECK(m.Transition(s, d) == doctest::Approx(1.5 / 4.0).epsilon(1e-12));
  CHECK(m.Transition(s, fin) == doctest::Approx(1.5 / 4.0).epsilon(1e-12));
  CHECK(m.Transition(d, d) == doctest::Approx(1.5 / 4.0).epsilon(1e-12));
  CHECK(m.Bigram(q, m.begin_row(), show) == doctest::Approx(1.5 / 3.5).epsilon(1e-12));
  CHECK(m.Bigram(q, m.begin_row(), me) == doctest::Approx(0.5 / 3.5).epsilon(1e-12));
  CHECK(m.Bigram(q, show, me) == doctest::Approx(1.5 / 3.5).epsilon(1e-12));
  CHECK(m.Bigram(q, me, show) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(m.Bigram(s, m.begin_row(), flights) == doctest::Approx(2.5 / 4.5).epsilon(1e-12));
  CHECK(m.Bigram(d, to, city) == doctest::Approx(1.5 / 3.5).epsilon(1e-12));
  CHECK(m.BigramObserved(d, to, city));
  CHECK_FALSE(m.BigramObserved(d, to, to));
  CheckNormalized(m);
}

TEST_CASE("k > 0 leaves no zero entries") {
  const ConceptHmm m = TrainMle(TwoSentences(), Qsd(), kVocab, 0.001);
  for (size_t c = 0; c < 3; ++c) {
    CHECK(m.Initial(static_cast<int>(c)) > 0);
    for (int to = 0; to <= m.final_column(); ++to) CHECK(m.Transition(static_cast<int>(c), to) > 0);
    for (int r = 0; r <= m.begin_row(); ++r) {
      for (size_t w = 0; w < kVocab.size(); ++w) CHECK(m.Bigram(static_cast<int>(c), r, static_cast<int>(w)) > 0);
    }
  }
}

TEST_CASE("training errors") {
  CHECK_THROWS_AS(TrainMle({}, Qsd(), kVocab, 0.001), Error);
  try {
    TrainMle({Labeled("SHOW:origin")}, Qsd(), kVocab, 0.001);
    FAIL("expected unknown label");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kUnknownLabel);
    CHECK(std::string(e.what()).find("origin") != std::string::npos);
  }
  try {
    TrainMle({Labeled("ZEPPELIN:question")}, Qsd(), kVocab, 0.001);
    FAIL("expected unknown word");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kUnknownWord);
  }
}

TEST_CASE("sequence log-prob of a one-concept one-word model is zero") {
  const ConceptHmm m = TrainMle({Labeled("SHOW:question")}, ConceptDictionary::Plain({"question"}),
                                {"SHOW"}, 0.0);
  CHECK(SequenceLogProb(m, Labeled("SHOW:question")) == 0.0);
}

TEST_CASE("sequence log-prob is the product of the table entries along the labeling") {
  ConceptHmm m(ConceptDictionary::Plain({"a", "b"}), {"x", "y"}, 0.0);
  m.mutable_initial() = {0.25, 0.75};
  m.mutable_transition() = {{0.5, 0.25, 0.25}, {0.1, 0.3, 0.6}};
  m.mutable_bigram(0) = {{0.5, 0.5}, {0.5, 0.5}, {0.8, 0.2}};
  m.mutable_bigram(1) = {{0.5, 0.5}, {0.5, 0.5}, {0.4, 0.6}};
  m.Finalize();
  // x:a y:b = P(a) P(x|<b>,a) P(b|a) P(y|<b>,b) P(</s>|b)
  const double expected = 0.25 * 0.8 * 0.25 * 0.6 * 0.6;
  CHECK(std::exp(SequenceLogProb(m, Labeled("x:a y:b"))) == doctest::Approx(expected).epsilon(1e-12));
  // x:b y:b stays inside b: P(b) P(x|<b>,b) P(b|b) P(y|x,b) P(</s>|b)
  CHECK(std::exp(SequenceLogProb(m, Labeled("x:b y:b"))) ==
        doctest::Approx(0.75 * 0.4 * 0.3 * 0.5 * 0.6).epsilon(1e-12));
}

TEST_CASE("an unseen bigram under k=0 is impossible") {
  const ConceptHmm m = TrainMle(TwoSentences(), Qsd(), kVocab, 0.0);
  CHECK(SequenceLogProb(m, Labeled("ME:question SHOW:question")) == kLogZero);
}

TEST_CASE("synonym smoothing ties the group") {
  const ConceptDictionary dict = ConceptDictionary::Plain({"origin", "destin"});
  const std::vector<std::string> vocab = {"ARRIVE(S)", "DEPART(S)", "FROM", "LEAVE(S)", "TO",
                                          "((city))"};
  const std::vector<SegmentedSentence> corpus = {
      Labeled("DEPART(S):origin FROM:origin ((city)):origin"),
      Labeled("LEAVE(S):origin ((city)):origin TO:destin ((city)):destin"),
      Labeled("LEAVE(S):origin FROM:origin ((city)):origin"),
      Labeled("ARRIVE(S):destin TO:destin ((city)):destin")};
  const ConceptHmm m = TrainMle(corpus, dict, vocab, 0.001);
  SynonymGroups groups;
  groups["origin"] = {{"DEPART(S)", "LEAVE(S)", "ARRIVE(S)"}};
  const ConceptHmm s = ApplySynonymSmoothing(m, groups);
  const int o = 0, from = s.WordIndex("FROM");
  const int depart = s.WordIndex("DEPART(S)"), leave = s.WordIndex("LEAVE(S)"), arrive = s.WordIndex("ARRIVE(S)");
  CHECK(s.Bigram(o, depart, from) == s.Bigram(o, leave, from));
  CHECK(s.Bigram(o, arrive, from) == s.Bigram(o, leave, from));
  CHECK(s.Bigram(o, s.begin_row(), depart) == s.Bigram(o, s.begin_row(), arrive));
  // ARRIVE(S) never occurs under origin, yet now shares the group's mass.
  CHECK(s.BigramObserved(o, s.begin_row(), arrive));
  CHECK_FALSE(m.BigramObserved(o, m.begin_row(), arrive));
  // The other concept is untouched.
  for (int r = 0; r <= s.begin_row(); ++r) {
    for (size_t w = 0; w < vocab.size(); ++w) CHECK(s.Bigram(1, r, static_cast<int>(w)) == m.Bigram(1, r, static_cast<int>(w)));
  }
  CheckNormalized(s);
  CHECK(ApplySynonymSmoothing(s, groups) == s);

  CHECK(ApplySynonymSmoothing(m, SynonymGroups{}) == m);
  SynonymGroups single;
  single["origin"] = {{"FROM"}};
  CHECK(ApplySynonymSmoothing(m, single) == m);

  SynonymGroups bad;
  bad["origin"] = {{"FROM", "ZEPPELIN"}};
  CHECK_THROWS_AS(ApplySynonymSmoothing(m, bad), Error);
}

TEST_CASE("property: normalization after every estimate, idempotent tying") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t concepts = 1 + rng.Below(5), vocab = 2 + rng.Below(7);
    const auto corpus = RandomCorpus(rng, 1 + rng.Below(12), concepts, vocab);
    const double k = trial % 3 == 0 ? 0.0 : 0.001 * (1 + rng.Below(100));
    const ConceptHmm m = TrainMle(corpus, ConceptDictionary::Plain(Names(concepts, "c")),
                                  Names(vocab, "w"), k);
    CheckNormalized(m);
    SynonymGroups groups;
    for (size_t c = 0; c < concepts; ++c) {
      if (rng.Below(2) == 0) continue;
      std::vector<std::string> g;
      for (size_t w = 0; w < vocab; ++w) {
        if (rng.Below(2) == 0) g.push_back("w" + std::to_string(w));
      }
      if (!g.empty()) groups["c" + std::to_string(c)].push_back(g);
    }
    const ConceptHmm s = ApplySynonymSmoothing(m, groups);
    CheckNormalized(s);
    REQUIRE(ApplySynonymSmoothing(s, groups) == s);
  }
}

TEST_CASE("property: labelings sum to the forward marginal") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t concepts = 1 + rng.Below(4), vocab = 2 + rng.Below(5);
    const ConceptHmm m = RandomModel(rng, concepts, vocab, false, trial % 2 ? 0.3 : 0.0);
    std::vector<std::string> words;
    for (size_t i = 0, n = 1 + rng.Below(5); i < n; ++i) words.push_back("w" + std::to_string(rng.Below(vocab)));
    const double brute = BruteMarginal(m, words);
    const double forward = std::exp(MarginalLogProb(m, words));
    REQUIRE(forward == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("property: model files round-trip bit for bit") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t concepts = 1 + rng.Below(4), vocab = 2 + rng.Below(6);
    const auto corpus = RandomCorpus(rng, 1 + rng.Below(10), concepts, vocab);
    const ConceptHmm m = TrainMle(corpus, ConceptDictionary::Plain(Names(concepts, "c")),
                                  Names(vocab, "w"), trial % 2 ? 0.0 : 0.001);
    const std::string text = m.Serialize();
    const ConceptHmm back = ConceptHmm::Parse(chronus::testing::Lines(text), "roundtrip");
    REQUIRE(back == m);
    REQUIRE(back.Serialize() == text);
  }
  const ConceptHmm random = RandomModel(rng, 3, 4, false, 0.2);
  CHECK(ConceptHmm::Parse(chronus::testing::Lines(random.Serialize()), "random") == random);
}

TEST_CASE("model parse errors carry line numbers") {
  const ConceptHmm m = TrainMle(TwoSentences(), Qsd(), kVocab, 0.001);
  std::vector<std::string> lines = chronus::testing::Lines(m.Serialize());
  REQUIRE(lines.size() > 8);
  lines[7] = "garbage line";
  try {
    ConceptHmm::Parse(lines, "bad.model");
    FAIL("expected a parse error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("bad.model:") == 0);
  }
}

TEST_CASE("log-add") {
  CHECK(LogAdd(kLogZero, kLogZero) == kLogZero);
  CHECK(LogAdd(kLogZero, -2.0) == -2.0);
  CHECK(LogAdd(std::log(0.25), std::log(0.5)) == doctest::Approx(std::log(0.75)).epsilon(1e-15));
  CHECK(LogAdd(-1000.0, -1000.0) == doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-15));
}
