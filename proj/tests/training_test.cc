#include <map>
#include <set>

#include "doctest.h"
#include "chronus/error.h"
#include "chronus/gen.h"
#include "chronus/training.h"
#include "support.h"

using namespace chronus;
using chronus::testing::DataDir;
using chronus::testing::Demo;
using chronus::testing::Names;
using chronus::testing::RandomLattice;
using chronus::testing::RandomRow;

namespace {

// Three counted concepts, one special.
ConceptDictionary AlignDictionary(size_t restrictions) {
  std::vector<Concept> concepts;
  for (size_t i = 0; i < restrictions; ++i) concepts.push_back({"r" + std::to_string(i), Role::kRestriction, 0, ""});
  concepts.push_back({"dummy", Role::kSpecial, 9, ""});
  return ConceptDictionary(concepts);
}

ConceptHmm RandomAlignModel(Rng &rng, const ConceptDictionary &dict, size_t vocab, double zero) {
  const size_t n = dict.size();
  ConceptHmm m(dict, Names(vocab, "w"), 0.0);
  RandomRow(rng, m.mutable_initial(), n, false, zero);
  for (auto &row : m.mutable_transition()) RandomRow(rng, row, n + 1, false, zero);
  for (size_t c = 0; c < n; ++c) {
    for (auto &row : m.mutable_bigram(static_cast<int>(c))) RandomRow(rng, row, vocab, false, zero);
  }
  m.Finalize();
  return m;
}

// Keyword multiset of the non-special segments of a labeling.
std::map<std::string, int> SegmentKeywords(const ConceptDictionary &dict, const std::vector<std::string> &labels) {
  std::map<std::string, int> out;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i > 0 && labels[i] == labels[i - 1]) continue;
    const int c = dict.IndexOf(labels[i]);
    if (dict.at(c).role == Role::kSpecial) continue;
    ++out[dict.Keyword(c)];
  }
  return out;
}

std::map<std::string, int> TemplateKeywords(const Template &t) {
  std::map<std::string, int> out;
  for (const auto &tok : t.tokens) ++out[tok.keyword];
  return out;
}

std::vector<CorpusEntry> CorrectEvalEntries() {
  const Demo &demo = Demo::Get();
  std::vector<CorpusEntry> out;
  for (const CorpusEntry &e : LoadCorpus(DataDir() + "/eval.txt")) {
    if (IsCorrect(e, RunTurn(demo.pipeline, demo.model, e.text)) && out.size() < 8) out.push_back(e);
  }
  return out;
}

}  // namespace

TEST_CASE("generator draws are platform independent") {
  Rng rng(5489);
  CHECK(rng.Uniform() == static_cast<double>(14514284786278117030ULL >> 11) * 0x1.0p-53);
  Rng a(77), b(77);
  for (int i = 0; i < 100; ++i) REQUIRE(a.Below(13) == b.Below(13));
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    const size_t k = c.Categorical({0.0, 0.5, 0.0, 0.5});
    REQUIRE((k == 1 || k == 3));
  }
}

TEST_CASE("model ids identify serialized models") {
  const ConceptHmm &m = Demo::Get().model;
  CHECK(ModelId(m).size() == 16);
  CHECK(ModelId(m) == ModelId(ConceptHmm::Parse(chronus::testing::Lines(m.Serialize()), "copy")));
  Rng rng(2);
  CHECK(ModelId(chronus::testing::RandomModel(rng, 2, 2)) != ModelId(m));
}

TEST_CASE("a loop that is already at its fixed point stops at the second pass") {
  const Demo &demo = Demo::Get();
  const auto corpus = CorrectEvalEntries();
  REQUIRE(corpus.size() == 8);
  LoopConfig config;
  const LoopResult r = RunTrainingLoop(corpus, demo.seed, demo.model, demo.pipeline, config);
  REQUIRE(r.report.iterations.size() == 2);
  CHECK(r.report.termination == "converged");
  CHECK(r.report.iterations[0].correct == 8);
  CHECK(r.report.iterations[1].correct_ids == r.report.iterations[0].correct_ids);
  CHECK(r.report.iterations[0].model_id == ModelId(demo.model));
  CHECK(r.report.Format().rfind("iteration\tcorrect\tproblem\tmodel\n1\t8\t0\t", 0) == 0);

  config.max_iters = 1;
  const LoopResult once = RunTrainingLoop(corpus, demo.seed, demo.model, demo.pipeline, config);
  CHECK(once.report.iterations.size() == 1);
  CHECK(once.report.termination == "max-iters");
}

TEST_CASE("loop input errors") {
  const Demo &demo = Demo::Get();
  const auto corpus = CorrectEvalEntries();
  LoopConfig bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(RunTrainingLoop(corpus, demo.seed, demo.model, demo.pipeline, bad), Error);
  CHECK_THROWS_AS(RunTrainingLoop(corpus, {}, demo.model, demo.pipeline, LoopConfig{}), Error);
  CorpusEntry bare;
  bare.id = "bare";
  bare.text = "SHOW ME FLIGHTS";
  CHECK_THROWS_AS(RunTrainingLoop({bare}, demo.seed, demo.model, demo.pipeline, LoopConfig{}), Error);
}

TEST_CASE("synonym groups hold after every loop retraining") {
  const Demo &demo = Demo::Get();
  LoopConfig config;
  config.max_iters = 2;
  config.synonyms = ParseSynonymGroups(ReadLines(DataDir() + "/synonyms.txt"), "synonyms.txt");
  const LoopResult r = RunTrainingLoop(CorrectEvalEntries(), demo.seed, demo.model, demo.pipeline, config);
  const ConceptHmm &m = r.model;
  const int op = m.dictionary().IndexOf("operator");
  const int cheapest = m.WordIndex("CHEAPEST"), lowest = m.WordIndex("LOWEST");
  CHECK(m.Bigram(op, m.begin_row(), cheapest) == m.Bigram(op, m.begin_row(), lowest));
}

TEST_CASE("alignment respects the keyword multiset") {
  const Demo &demo = Demo::Get();
  const Lattice l = LexParse("SHOW ME FLIGHTS FROM BOSTON TO DENVER", demo.pipeline.lexicon);
  const Template win = Template::ParseFormatted("(destin,DDEN) (origin,BBOS) (subject,flight) (question,display)");
  const auto r = AlignWin(demo.model, l, win);
  REQUIRE(r.has_value());
  CHECK(r->segmentation.FormatSegments() ==
        "question:[SHOW ME] subject:[FLIGHTS] origin:[FROM ((city)BOSTON)] destin:[TO ((city)DENVER)]");

  // Forcing two destinations moves FROM BOSTON into a destin segment.
  const auto twice = AlignWin(demo.model, l, Template::ParseFormatted("(question,display) (subject,flight) "
                                                                       "(destin,BBOS) (destin,DDEN)"));
  REQUIRE(twice.has_value());
  CHECK(SegmentKeywords(demo.model.dictionary(), twice->segmentation.labels) ==
        std::map<std::string, int>{{"question", 1}, {"subject", 1}, {"destin", 2}});

  // More segments than words cannot be met.
  const Lattice two = LexParse("SHOW FLIGHTS", demo.pipeline.lexicon);
  CHECK_FALSE(AlignWin(demo.model, two, win).has_value());
}

TEST_CASE("alignment of a long spontaneous request") {
  const Demo &demo = Demo::Get();
  const Lattice l = LexParse(
      "COULD YOU PLEASE GIVE ME INFORMATION CONCERNING AMERICAN AIRLINES A FLIGHT FROM WASHINGTON D C "
      "TO PHILADELPHIA THE EARLIEST ONE IN THE MORNING AS POSSIBLE",
      demo.pipeline.lexicon);
  // List earliest morning flights from Washington and to Philadelphia and American
  const Template win = Template::ParseFormatted(
      "(question,display) (operator,earliest) (depart-time,morning) (subject,flight) (origin,WWAS) "
      "(destin,PPHL) (airline,AA)");
  const auto r = AlignWin(demo.model, l, win);
  REQUIRE(r.has_value());
  CHECK(SegmentKeywords(demo.model.dictionary(), r->segmentation.labels) == TemplateKeywords(win));
  const std::string segments = r->segmentation.FormatSegments();
  const size_t airline = segments.find("airline:[AMERICAN AIRLINES]");
  const size_t origin = segments.find("origin:[");
  CHECK(airline != std::string::npos);
  CHECK(airline < origin);
  // The constraint never beats free decoding.
  CHECK(r->log_prob <= ViterbiDecodeLattice(demo.model, l).log_prob);
}

TEST_CASE("property: constrained alignment equals brute force") {
  Rng rng(404);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const ConceptDictionary dict = AlignDictionary(1 + rng.Below(3));
    const size_t vocab = 1 + rng.Below(5);
    const ConceptHmm m = RandomAlignModel(rng, dict, vocab, trial % 3 == 0 ? 0.3 : 0.0);
    const Lattice l = RandomLattice(rng, 1 + rng.Below(6), vocab, rng.Below(4));
    Template win;
    for (size_t i = 0, n = 1 + rng.Below(3); i < n; ++i) {
      win.tokens.push_back({"r" + std::to_string(rng.Below(dict.size() - 1)), "v", 0});
    }
    const auto fast = AlignWin(m, l, win);
    const auto slow = BruteForceAlignWin(m, l, win);
    REQUIRE(fast.has_value() == slow.has_value());
    if (!fast) continue;
    ++feasible;
    REQUIRE(fast->segmentation == slow->segmentation);
    REQUIRE(fast->path == slow->path);
    REQUIRE(std::abs(fast->log_prob - slow->log_prob) <= 1e-9);
    REQUIRE(SegmentKeywords(dict, fast->segmentation.labels) == TemplateKeywords(win));
  }
  CHECK(feasible > 50);
}

TEST_CASE("synthetic corpora are reproducible and well formed") {
  const ConceptHmm truth = SyntheticTruthModel();
  CHECK(truth.num_concepts() == 5);
  CHECK(truth.vocabulary().size() == 30);
  Rng a(8), b(8);
  const auto first = SampleCorpus(truth, 50, a, "s", 12);
  const auto second = SampleCorpus(truth, 50, b, "s", 12);
  REQUIRE(first.size() == 50);
  CHECK(SerializeCorpus(first) == SerializeCorpus(second));
  for (const CorpusEntry &e : first) {
    REQUIRE(e.gold.size() <= 12);
    REQUIRE(e.gold.size() == chronus::testing::Words(e.text).size());
    for (const GoldToken &t : e.gold) REQUIRE(truth.dictionary().Find(t.label).has_value());
  }
  const GeneratedFiles s1 = GenerateSynthetic(3, 20, 10), s2 = GenerateSynthetic(3, 20, 10);
  CHECK(s1.files == s2.files);
  CHECK(GenerateSynthetic(4, 20, 10).files != s1.files);
}

TEST_CASE("alignment corpora carry a shuffled win matching the gold segments") {
  const GeneratedFiles g = GenerateAlign(12, 10, 40);
  std::map<std::string, std::string> files(g.files.begin(), g.files.end());
  const ConceptDictionary dict = ConceptDictionary::Parse(chronus::testing::Lines(files.at("concepts.txt")), "c");
  int shuffled = 0;
  for (const CorpusEntry &e : ParseCorpus(chronus::testing::Lines(files.at("test.txt")), "test")) {
    std::vector<std::string> labels;
    for (const GoldToken &t : e.gold) labels.push_back(t.label);
    const Template win = Template::ParseFormatted(e.win);
    REQUIRE(SegmentKeywords(dict, labels) == TemplateKeywords(win));
    if (win.tokens[0].keyword != "question") ++shuffled;
  }
  CHECK(shuffled > 20);
}
