// chronus: train, decode, evaluate and converse with a concept HMM.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chronus/corpus.h"
#include "chronus/error.h"
#include "chronus/eval.h"
#include "chronus/gen.h"
#include "chronus/pipeline.h"
#include "chronus/text.h"
#include "chronus/training.h"

namespace {

using namespace chronus;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string Pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::vector<SegmentedSentence> LabeledSentences(const std::vector<CorpusEntry> &corpus,
                                                const SuperwordLexicon &lexicon, size_t *skipped) {
  std::vector<CorpusEntry> labeled;
  for (const CorpusEntry &e : corpus) {
    if (e.has_gold()) {
      labeled.push_back(e);
    } else if (skipped != nullptr) {
      ++*skipped;
    }
  }
  return GoldSegmentations(labeled, lexicon);
}

void PrintCounts(const ConceptHmm &model, std::ostream &out) {
  const ConceptHmm::ParameterCounts c = model.CountParameters();
  out << "transition-entries\t" << c.transition_entries << "\n";
  out << "transition-observed\t" << c.transition_observed << "\n";
  out << "bigram-rows\t" << c.bigram_rows << "\n";
  out << "bigram-observed\t" << c.bigram_observed << "\n";
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string corpus, lexicon, concepts, synonyms, out;
  double k = 0.001;
};

int RunTrain(const TrainArgs &a) {
  const SuperwordLexicon lexicon = SuperwordLexicon::Load(a.lexicon);
  const ConceptDictionary dict = ConceptDictionary::Load(a.concepts);
  size_t skipped = 0;
  const std::vector<SegmentedSentence> data = LabeledSentences(LoadCorpus(a.corpus), lexicon, &skipped);
  ConceptHmm model = TrainMle(data, dict, lexicon.Vocabulary(), a.k);
  std::cout << "sentences\t" << data.size() << "\n";
  if (skipped > 0) std::cout << "unlabeled-skipped\t" << skipped << "\n";
  if (!a.synonyms.empty()) {
    const SynonymGroups groups = ParseSynonymGroups(ReadLines(a.synonyms), a.synonyms);
    size_t n = 0;
    for (const auto &[c, list] : groups) n += list.size();
    model = ApplySynonymSmoothing(model, groups);
    std::cout << "synonym-groups\t" << n << "\t(tying applied)\n";
  }
  PrintCounts(model, std::cout);
  std::cout << "normalization-error\t" << Pct(model.MaxNormalizationError()) << "\tok\n";
  model.Save(a.out);
  return 0;
}

// --- decode ----------------------------------------------------------------

struct DecodeArgs {
  std::string model, data;
  std::vector<std::string> sentence;
  bool segments = false, tmpl = false, answer = false, sql = false;
  std::optional<double> threshold;
};

void DecodeOne(const Pipeline &pipeline, const ConceptHmm &model, const DecodeArgs &a,
               const std::string &text, std::ostream &out) {
  TurnResult r;
  try {
    r = RunTurn(pipeline, model, text);
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::kEmptyInput) throw;
    out << "error: " << e.what() << "\n";
    return;
  }
  const bool default_view = !a.segments && !a.tmpl && !a.answer && !a.sql;
  if (a.segments) out << r.decode.segmentation.FormatSegments() << "\n";
  if (r.rejected) {
    out << "REJECT\t" << FormatDouble(MatchedFraction(r.turn), 3) << "\n";
    return;
  }
  if (a.tmpl || default_view) out << r.turn.Format() << "\n";
  if (a.sql && r.plan) out << r.plan->ToSql() << "\n";
  if (a.answer || (a.sql && !r.plan)) {
    if (!r.translator_error.empty()) {
      out << "TRANSLATOR-ERROR\t" << r.translator_error << "\n";
    } else if (a.answer) {
      out << r.answer->Render();
    }
  }
}

int RunDecode(const DecodeArgs &a) {
  Pipeline pipeline = Pipeline::LoadDirectory(a.data);
  if (a.threshold) pipeline.reject_threshold = *a.threshold;
  const ConceptHmm model = ConceptHmm::Load(a.model);
  if (!a.sentence.empty()) {
    DecodeOne(pipeline, model, a, Join(a.sentence, " "), std::cout);
    return 0;
  }
  for (const std::string &line : ReadLines(std::cin)) {
    if (Trim(line).empty()) continue;
    DecodeOne(pipeline, model, a, line, std::cout);
  }
  return 0;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string model, data, corpus, refs, lexicon;
  bool per_entry = false;
  bool segments_only = false;
  std::optional<double> threshold;
};

int RunEval(const EvalArgs &a) {
  const ConceptHmm model = ConceptHmm::Load(a.model);
  std::vector<CorpusEntry> corpus = LoadCorpus(a.corpus);
  if (!a.refs.empty()) AttachReferences(corpus, LoadCorpus(a.refs));
  EvalReport report;
  if (a.segments_only) {
    const std::string lexicon = a.lexicon.empty() ? a.data + "/lexicon.txt" : a.lexicon;
    report = EvaluateSegmentation(corpus, SuperwordLexicon::Load(lexicon), model);
  } else {
    Pipeline pipeline = Pipeline::LoadDirectory(a.data);
    if (a.threshold) pipeline.reject_threshold = *a.threshold;
    report = Evaluate(corpus, pipeline, model);
  }
  std::cout << report.Format(a.per_entry);
  return 0;
}

// --- repl ------------------------------------------------------------------

struct ReplArgs {
  std::string model, data, script;
};

void ReplSession(const Pipeline &pipeline, const ConceptHmm &model, std::istream &in, std::ostream &out,
                 bool echo) {
  DialogState state;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text(Trim(line));
    if (text.empty() || text.front() == '#') continue;
    if (echo) out << "> " << text << "\n";
    if (text == ":quit") break;
    if (text == ":reset") {
      state = DialogState{};
      out << "context cleared\n";
      continue;
    }
    try {
      TurnResult r = RunTurn(pipeline, model, text, &state);
      out << "segments: " << r.decode.segmentation.FormatSegments() << "\n";
      if (r.rejected) {
        out << "REJECT\t" << r.reject_reason << "\n";
        continue;
      }
      out << "template: " << r.turn.Format() << "\n";
      out << "context: " << r.merged.Format() << "\n";
      if (!r.translator_error.empty()) {
        out << "TRANSLATOR-ERROR\t" << r.translator_error << "\n";
      } else {
        out << r.answer->Render();
      }
    } catch (const Error &e) {
      out << "error: " << e.what() << "\n";
    }
  }
}

int RunRepl(const ReplArgs &a) {
  const Pipeline pipeline = Pipeline::LoadDirectory(a.data);
  const ConceptHmm model = ConceptHmm::Load(a.model);
  if (!a.script.empty()) {
    std::ifstream in(a.script);
    if (!in) throw Error(ErrorKind::kParse, "cannot open " + a.script);
    ReplSession(pipeline, model, in, std::cout, true);
  } else {
    ReplSession(pipeline, model, std::cin, std::cout, false);
  }
  return 0;
}

// --- loop ------------------------------------------------------------------

struct LoopArgs {
  std::string corpus, seed_corpus, model, data, out, synonyms, report;
  int max_iters = 20;
  double k = 0.001;
};

int RunLoop(const LoopArgs &a) {
  const Pipeline pipeline = Pipeline::LoadDirectory(a.data);
  const std::vector<SegmentedSentence> seed = LabeledSentences(LoadCorpus(a.seed_corpus), pipeline.lexicon, nullptr);
  LoopConfig config;
  config.max_iters = a.max_iters;
  config.k = a.k;
  if (!a.synonyms.empty()) config.synonyms = ParseSynonymGroups(ReadLines(a.synonyms), a.synonyms);
  ConceptHmm seed_model = a.model.empty()
                              ? TrainMle(seed, pipeline.dictionary, pipeline.lexicon.Vocabulary(), a.k)
                              : ConceptHmm::Load(a.model);
  if (a.model.empty() && !config.synonyms.empty()) seed_model = ApplySynonymSmoothing(seed_model, config.synonyms);
  const LoopResult result = RunTrainingLoop(LoadCorpus(a.corpus), seed, seed_model, pipeline, config);
  const std::string report = result.report.Format();
  std::cout << report;
  if (!a.report.empty()) WriteFile(a.report, report);
  if (!a.out.empty()) result.model.Save(a.out);
  return 0;
}

// --- gen -------------------------------------------------------------------

struct GenArgs {
  std::string kind, out;
  uint64_t seed = 1;
  std::optional<size_t> train, test;
};

int RunGen(const GenArgs &a) {
  GeneratedFiles files;
  if (a.kind == "synthetic") {
    files = GenerateSynthetic(a.seed, a.train.value_or(2000), a.test.value_or(500));
  } else if (a.kind == "superword") {
    files = GenerateSuperword(a.seed, a.train.value_or(1000), a.test.value_or(300));
  } else {
    files = GenerateAlign(a.seed, a.train.value_or(500), a.test.value_or(200));
  }
  WriteGenerated(files, a.out);
  for (const auto &[name, contents] : files.files) std::cout << a.out << "/" << name << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"chronus: concept HMM understanding toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  TrainArgs train;
  CLI::App *train_cmd = app.add_subcommand("train", "estimate a model from labeled sentences");
  train_cmd->add_option("--corpus", train.corpus, "corpus file with gold labels")->required();
  train_cmd->add_option("--lexicon", train.lexicon, "lexicon file")->required();
  train_cmd->add_option("--concepts", train.concepts, "concept dictionary")->required();
  train_cmd->add_option("--k", train.k, "add-k smoothing constant")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--synonyms", train.synonyms, "synonym groups file");
  train_cmd->add_option("-o,--out", train.out, "model file to write")->required();

  DecodeArgs decode;
  CLI::App *decode_cmd = app.add_subcommand("decode", "decode sentences (arguments or stdin lines)");
  decode_cmd->add_option("--model", decode.model, "model file")->required();
  decode_cmd->add_option("--data", decode.data, "directory with lexicon, concepts, values, db, conventions")->required();
  decode_cmd->add_flag("--segments", decode.segments, "print the conceptual segmentation");
  decode_cmd->add_flag("--template", decode.tmpl, "print the template");
  decode_cmd->add_flag("--answer", decode.answer, "print the database answer");
  decode_cmd->add_flag("--emit-sql", decode.sql, "print an SQL-like rendering of the plan");
  decode_cmd->add_option("--threshold", decode.threshold, "rejection threshold")->check(CLI::Range(0.0, 1.0));
  decode_cmd->add_option("sentence", decode.sentence, "sentence words");

  EvalArgs eval;
  CLI::App *eval_cmd = app.add_subcommand("eval", "score a corpus");
  eval_cmd->add_option("--model", eval.model, "model file")->required();
  eval_cmd->add_option("--data", eval.data, "pipeline data directory");
  eval_cmd->add_option("--corpus", eval.corpus, "corpus file")->required();
  eval_cmd->add_option("--refs", eval.refs, "reference answers (min:/max: blocks)");
  eval_cmd->add_option("--lexicon", eval.lexicon, "lexicon for --segments-only");
  eval_cmd->add_flag("--segments-only", eval.segments_only, "score segmentation only");
  eval_cmd->add_flag("--per-entry", eval.per_entry, "one line per entry");
  eval_cmd->add_option("--threshold", eval.threshold, "rejection threshold")->check(CLI::Range(0.0, 1.0));

  ReplArgs repl;
  CLI::App *repl_cmd = app.add_subcommand("repl", "multi-turn dialog");
  repl_cmd->add_option("--model", repl.model, "model file")->required();
  repl_cmd->add_option("--data", repl.data, "pipeline data directory")->required();
  repl_cmd->add_option("--script", repl.script, "replay a transcript");

  LoopArgs loop;
  CLI::App *loop_cmd = app.add_subcommand("loop", "self-training from answer feedback");
  loop_cmd->add_option("--corpus", loop.corpus, "feedback corpus")->required();
  loop_cmd->add_option("--seed-corpus", loop.seed_corpus, "hand-labeled seed corpus")->required();
  loop_cmd->add_option("--model", loop.model, "seed model (default: trained from the seed corpus)");
  loop_cmd->add_option("--data", loop.data, "pipeline data directory")->required();
  loop_cmd->add_option("--max-iters", loop.max_iters, "iteration cap")->check(CLI::PositiveNumber);
  loop_cmd->add_option("--k", loop.k, "add-k smoothing constant")->check(CLI::NonNegativeNumber);
  loop_cmd->add_option("--synonyms", loop.synonyms, "synonym groups file");
  loop_cmd->add_option("-o,--out", loop.out, "final model file");
  loop_cmd->add_option("--report", loop.report, "write the report here too");

  GenArgs gen;
  CLI::App *gen_cmd = app.add_subcommand("gen", "generate synthetic corpora");
  gen_cmd->add_option("kind", gen.kind, "synthetic | superword | align")
      ->required()
      ->check(CLI::IsMember({"synthetic", "superword", "align"}));
  gen_cmd->add_option("-o,--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->add_option("--train", gen.train, "training sentences");
  gen_cmd->add_option("--test", gen.test, "test sentences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train_cmd) return RunTrain(train);
    if (*decode_cmd) return RunDecode(decode);
    if (*eval_cmd) {
      if (!eval.segments_only && eval.data.empty()) {
        std::cerr << "eval: --data is required unless --segments-only\n";
        return kExitUsage;
      }
      return RunEval(eval);
    }
    if (*repl_cmd) return RunRepl(repl);
    if (*loop_cmd) return RunLoop(loop);
    if (*gen_cmd) return RunGen(gen);
  } catch (const Error &e) {
    std::cerr << "chronus: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception &e) {
    std::cerr << "chronus: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
