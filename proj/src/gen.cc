#include "chronus/gen.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "chronus/error.h"
#include "chronus/text.h"

namespace chronus {
namespace {

const char *kOnes[] = {"ZERO", "ONE", "TWO", "THREE", "FOUR", "FIVE", "SIX", "SEVEN", "EIGHT", "NINE"};
const char *kTeens[] = {"TEN", "ELEVEN", "TWELVE", "THIRTEEN", "FOURTEEN", "FIFTEEN",
                        "SIXTEEN", "SEVENTEEN", "EIGHTEEN", "NINETEEN"};
const char *kTens[] = {"", "", "TWENTY", "THIRTY", "FORTY", "FIFTY", "SIXTY", "SEVENTY", "EIGHTY", "NINETY"};

std::vector<std::string> SpellBelowHundred(int n) {
  if (n < 10) return {kOnes[n]};
  if (n < 20) return {kTeens[n - 10]};
  std::vector<std::string> out = {kTens[n / 10]};
  if (n % 10) out.push_back(kOnes[n % 10]);
  return out;
}

std::vector<std::string> SpellNumber(int n) {
  if (n == 0) return {"ZERO"};
  std::vector<std::string> out;
  if (n >= 1000) {
    out.push_back(kOnes[n / 1000]);
    out.push_back("THOUSAND");
    n %= 1000;
  }
  if (n >= 100) {
    out.push_back(kOnes[n / 100]);
    out.push_back("HUNDRED");
    n %= 100;
  }
  if (n > 0) {
    std::vector<std::string> rest = SpellBelowHundred(n);
    out.insert(out.end(), rest.begin(), rest.end());
  }
  return out;
}

std::vector<std::string> NumeralWords() {
  std::vector<std::string> out(std::begin(kOnes), std::end(kOnes));
  out.insert(out.end(), std::begin(kTeens), std::end(kTeens));
  for (int i = 2; i < 10; ++i) out.push_back(kTens[i]);
  out.push_back("HUNDRED");
  out.push_back("THOUSAND");
  return out;
}

// A phrase with an optional slot filled from a value list.
struct Phrase {
  std::vector<std::string> words;  // "%" marks the slot
};

std::vector<std::string> Words(const std::string &text) { return SplitWhitespace(text); }

CorpusEntry MakeEntry(const std::string &id,
                      const std::vector<std::pair<std::vector<std::string>, std::string>> &segments) {
  CorpusEntry e;
  e.id = id;
  std::vector<std::string> text;
  for (const auto &[words, label] : segments) {
    for (const std::string &w : words) {
      text.push_back(w);
      e.gold.push_back({w, label});
    }
  }
  e.text = Join(text, " ");
  return e;
}

std::vector<std::string> Fill(const std::string &pattern, const std::vector<std::string> &value) {
  std::vector<std::string> out;
  for (const std::string &w : Words(pattern)) {
    if (w == "%") {
      out.insert(out.end(), value.begin(), value.end());
    } else {
      out.push_back(w);
    }
  }
  return out;
}

std::string WordsSection(const std::set<std::string> &words) {
  std::string out = "[words]\n";
  for (const std::string &w : words) out += w + "\n";
  return out;
}

void Collect(std::set<std::string> &vocab, const std::vector<std::string> &patterns) {
  for (const std::string &p : patterns) {
    for (const std::string &w : Words(p)) {
      if (w != "%") vocab.insert(w);
    }
  }
}

}  // namespace

double Rng::Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

size_t Rng::Below(size_t n) { return static_cast<size_t>(Uniform() * static_cast<double>(n)); }

size_t Rng::Categorical(const std::vector<double> &p) {
  const double u = Uniform();
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // Rounding slack: last index with positive mass.
  for (size_t i = p.size(); i-- > 0;) {
    if (p[i] > 0.0) return i;
  }
  return 0;
}

ConceptHmm SyntheticTruthModel() {
  const int num_concepts = 5;
  std::vector<std::string> names;
  std::vector<std::string> vocab;
  for (int c = 0; c < num_concepts; ++c) {
    names.push_back("c" + std::to_string(c));
    for (int j = 0; j < 4; ++j) vocab.push_back(std::string(1, static_cast<char>('A' + c)) + "A" + std::to_string(j));
  }
  for (int j = 0; j < 10; ++j) vocab.push_back("S" + std::to_string(j));
  ConceptHmm model(ConceptDictionary::Plain(names), vocab, 0.0);
  const size_t v = model.vocab_size();

  auto private_of = [&](int c) {
    std::vector<int> ids;
    for (int j = 0; j < 4; ++j) ids.push_back(model.WordIndex(std::string(1, static_cast<char>('A' + c)) + "A" + std::to_string(j)));
    return ids;
  };
  auto shared_of = [&](int c) {
    std::vector<int> ids;
    for (int j = 0; j < 4; ++j) ids.push_back(model.WordIndex("S" + std::to_string((2 * c + j) % 10)));
    return ids;
  };
  // Row = mass on own private words, mass on favoured shared words, the rest
  // spread over every other word.
  auto make_row = [&](int c, double own, double favoured) {
    std::vector<double> row(v, 0.0);
    const std::vector<int> p = private_of(c);
    const std::vector<int> s = shared_of(c);
    const double rest = (1.0 - own - favoured) / static_cast<double>(v - 8);
    for (size_t w = 0; w < v; ++w) row[w] = rest;
    for (int w : p) row[w] = own / 4.0;
    for (int w : s) row[w] = favoured / 4.0;
    return row;
  };

  model.mutable_initial().assign(num_concepts, 1.0 / num_concepts);
  model.mutable_initial_floor() = 1.0 / num_concepts;
  for (int c = 0; c < num_concepts; ++c) {
    std::vector<double> &row = model.mutable_transition()[c];
    for (int d = 0; d < num_concepts; ++d) row[d] = d == c ? 0.5 : 0.095;
    row[num_concepts] = 0.12;
    model.mutable_transition_floor()[c] = 0.095;

    auto &table = model.mutable_bigram(c);
    const std::vector<int> p = private_of(c);
    const std::vector<int> s = shared_of(c);
    for (size_t r = 0; r <= v; ++r) {
      const int prev = static_cast<int>(r);
      if (prev == model.begin_row()) {
        table[r] = make_row(c, 0.9, 0.09);
      } else if (std::count(p.begin(), p.end(), prev)) {
        table[r] = make_row(c, 0.3, 0.69);
      } else if (std::count(s.begin(), s.end(), prev)) {
        table[r] = make_row(c, 0.5, 0.49);
      } else {
        table[r] = make_row(c, 0.49, 0.5);
      }
      model.mutable_bigram_floor(c)[r] = *std::min_element(table[r].begin(), table[r].end());
    }
  }
  model.Finalize();
  return model;
}

std::vector<CorpusEntry> SampleCorpus(const ConceptHmm &model, size_t count, Rng &rng,
                                      const std::string &id_prefix, size_t max_length) {
  const size_t num_concepts = model.num_concepts();
  const size_t v = model.vocab_size();
  std::vector<double> initial(num_concepts);
  for (size_t c = 0; c < num_concepts; ++c) initial[c] = model.Initial(static_cast<int>(c));

  std::vector<CorpusEntry> out;
  while (out.size() < count) {
    std::vector<int> words;
    std::vector<int> labels;
    int c = static_cast<int>(rng.Categorical(initial));
    int prev = model.begin_row();
    while (words.size() <= max_length) {
      std::vector<double> row(v);
      for (size_t w = 0; w < v; ++w) row[w] = model.Bigram(c, prev, static_cast<int>(w));
      const int w = static_cast<int>(rng.Categorical(row));
      words.push_back(w);
      labels.push_back(c);
      std::vector<double> next(num_concepts + 1);
      for (size_t d = 0; d <= num_concepts; ++d) next[d] = model.Transition(c, static_cast<int>(d));
      const int d = static_cast<int>(rng.Categorical(next));
      if (d == static_cast<int>(num_concepts)) break;
      prev = d == c ? w : model.begin_row();
      c = d;
    }
    if (words.size() > max_length) continue;
    CorpusEntry e;
    char id[32];
    std::snprintf(id, sizeof id, "%s%05zu", id_prefix.c_str(), out.size() + 1);
    e.id = id;
    std::vector<std::string> text;
    for (size_t i = 0; i < words.size(); ++i) {
      text.push_back(model.vocabulary()[words[i]]);
      e.gold.push_back({text.back(), model.dictionary().at(labels[i]).name});
    }
    e.text = Join(text, " ");
    out.push_back(std::move(e));
  }
  return out;
}

std::string PlainLexiconText(const std::vector<std::string> &words) {
  return WordsSection(std::set<std::string>(words.begin(), words.end()));
}

std::string NumberGrammarText(const std::string &id) {
  std::ostringstream out;
  out << "[grammar " << id << "]\n";
  out << "start\tS\n";
  // Below-hundred block from `from` to `to`; `mid` holds a pending tens word.
  auto block = [&](const std::string &from, const std::string &to, const std::string &mid) {
    for (int i = 1; i < 10; ++i) out << from << "\t" << kOnes[i] << "\t" << to << "\n";
    for (const char *t : kTeens) out << from << "\t" << t << "\t" << to << "\n";
    for (int i = 2; i < 10; ++i) {
      out << from << "\t" << kTens[i] << "\t" << to << "\n";
      out << from << "\t" << kTens[i] << "\t" << mid << "\n";
    }
    for (int i = 1; i < 10; ++i) out << mid << "\t" << kOnes[i] << "\t" << to << "\n";
  };
  out << "S\tZERO\tEND\n";
  block("S", "END", "S_T");
  for (int i = 1; i < 10; ++i) {
    out << "S\t" << kOnes[i] << "\tS_H\n";
    out << "S\t" << kOnes[i] << "\tS_K\n";
  }
  out << "S_H\tHUNDRED\tH\n";
  out << "S_K\tTHOUSAND\tK\n";
  for (int i = 1; i < 10; ++i) out << "K\t" << kOnes[i] << "\tS_H\n";
  block("H", "END", "H_T");
  block("K", "END", "K_T");
  out << "accept\tEND\naccept\tH\naccept\tK\n";
  out << "normalize\tdigits\n";
  return out.str();
}

GeneratedFiles GenerateSynthetic(uint64_t seed, size_t train, size_t test) {
  Rng rng(seed);
  const ConceptHmm truth = SyntheticTruthModel();
  GeneratedFiles g;
  g.files.push_back({"truth.model", truth.Serialize()});
  g.files.push_back({"lexicon.txt", PlainLexiconText(truth.vocabulary())});
  g.files.push_back({"concepts.txt", truth.dictionary().Serialize()});
  g.files.push_back({"train.txt", SerializeCorpus(SampleCorpus(truth, train, rng, "train"))});
  g.files.push_back({"test.txt", SerializeCorpus(SampleCorpus(truth, test, rng, "test"))});
  return g;
}

GeneratedFiles GenerateSuperword(uint64_t seed, size_t train, size_t test) {
  Rng rng(seed);
  const std::vector<std::string> cities = {"BOSTON", "DENVER", "DALLAS", "ATLANTA", "SAN FRANCISCO",
                                           "NEW YORK", "LOS ANGELES", "SALT LAKE CITY", "FORT WORTH",
                                           "WASHINGTON"};
  const std::map<std::string, std::vector<std::string>> patterns = {
      {"request", {"SHOW ME FLIGHTS", "LIST FLIGHTS", "I NEED A FLIGHT", "GIVE ME FLIGHTS"}},
      {"flightnum", {"FLIGHT %", "FLIGHT NUMBER %"}},
      {"origin", {"FROM %", "LEAVING %"}},
      {"destin", {"TO %", "ARRIVING IN %", "GOING TO %"}},
      {"time", {"AT %", "AROUND %", "AT % O'CLOCK"}},
  };
  std::set<std::string> vocab;
  for (const auto &[c, list] : patterns) Collect(vocab, list);
  for (const std::string &city : cities) Collect(vocab, {city});
  for (const std::string &w : NumeralWords()) vocab.insert(w);

  auto sample = [&](size_t count, const std::string &prefix) {
    std::vector<CorpusEntry> out;
    for (size_t n = 0; n < count; ++n) {
      std::vector<std::pair<std::vector<std::string>, std::string>> segments;
      auto add = [&](const std::string &label, const std::vector<std::string> &value) {
        const auto &list = patterns.at(label);
        segments.push_back({Fill(list[rng.Below(list.size())], value), label});
      };
      if (rng.Uniform() < 0.8) add("request", {});
      std::vector<std::string> rest = {"flightnum", "origin", "destin", "time"};
      for (size_t i = rest.size(); i > 1; --i) std::swap(rest[i - 1], rest[rng.Below(i)]);
      size_t used = 0;
      for (const std::string &label : rest) {
        if (rng.Uniform() >= 0.7) continue;
        ++used;
        if (label == "flightnum") {
          add(label, SpellNumber(1 + static_cast<int>(rng.Below(9999))));
        } else if (label == "time") {
          add(label, SpellNumber(1 + static_cast<int>(rng.Below(12))));
        } else {
          add(label, Words(cities[rng.Below(cities.size())]));
        }
      }
      if (used == 0) add("origin", Words(cities[rng.Below(cities.size())]));
      char id[32];
      std::snprintf(id, sizeof id, "%s%05zu", prefix.c_str(), n + 1);
      out.push_back(MakeEntry(id, segments));
    }
    return out;
  };

  std::string city_grammar = "[grammar city]\nstart\tS\n";
  for (size_t i = 0; i < cities.size(); ++i) {
    const std::vector<std::string> w = Words(cities[i]);
    std::string from = "S";
    for (size_t j = 0; j < w.size(); ++j) {
      const std::string to = j + 1 == w.size() ? "END" : "C" + std::to_string(i) + "_" + std::to_string(j);
      city_grammar += from + "\t" + w[j] + "\t" + to + "\n";
      from = to;
    }
  }
  city_grammar += "accept\tEND\nnormalize\tidentity\n";

  std::string concepts;
  int rank = 0;
  for (const char *c : {"request", "flightnum", "origin", "destin", "time"}) {
    concepts += std::string(c) + "\trestriction\t" + std::to_string(rank++) + "\n";
  }
  GeneratedFiles g;
  g.files.push_back({"concepts.txt", concepts});
  g.files.push_back({"lexicon-plain.txt", WordsSection(vocab)});
  g.files.push_back({"lexicon-super.txt", WordsSection(vocab) + NumberGrammarText() + city_grammar});
  g.files.push_back({"train.txt", SerializeCorpus(sample(train, "train"))});
  g.files.push_back({"test.txt", SerializeCorpus(sample(test, "test"))});
  return g;
}

GeneratedFiles GenerateAlign(uint64_t seed, size_t train, size_t test) {
  Rng rng(seed);
  const std::vector<std::string> cities = {"BOSTON", "DENVER", "DALLAS", "ATLANTA", "PITTSBURGH", "OAKLAND"};
  const std::vector<std::string> airlines = {"AMERICAN", "DELTA", "UNITED", "CONTINENTAL"};
  const std::map<std::string, std::vector<std::string>> patterns = {
      {"question", {"SHOW ME", "LIST", "GIVE ME", "I WOULD LIKE", "WHAT ARE"}},
      {"subject", {"FLIGHTS", "ALL FLIGHTS", "A FLIGHT", "INFORMATION ON FLIGHTS"}},
      {"origin", {"FROM %", "LEAVING %", "DEPARTING %"}},
      {"destin", {"TO %", "ARRIVING IN %", "GOING TO %"}},
      {"airline", {"ON %", "% AIRLINES", "WITH %", "FLYING %"}},
      {"dummy", {"PLEASE", "COULD YOU PLEASE", "THANKS"}},
  };
  std::set<std::string> vocab;
  for (const auto &[c, list] : patterns) Collect(vocab, list);
  vocab.insert(cities.begin(), cities.end());
  vocab.insert(airlines.begin(), airlines.end());

  auto sample = [&](size_t count, const std::string &prefix, bool with_win) {
    std::vector<CorpusEntry> out;
    for (size_t n = 0; n < count; ++n) {
      std::vector<std::pair<std::vector<std::string>, std::string>> segments;
      Template win;
      auto add = [&](const std::string &label, const std::string &value, const std::string &keyword_value) {
        const auto &list = patterns.at(label);
        segments.push_back({Fill(list[rng.Below(list.size())], value.empty() ? std::vector<std::string>{}
                                                                              : std::vector<std::string>{value}),
                            label});
        if (label != "dummy") win.tokens.push_back({label, keyword_value, 0});
      };
      if (rng.Uniform() < 0.2) add("dummy", "", "");
      add("question", "", "display");
      add("subject", "", "flight");
      std::vector<std::string> rest;
      if (rng.Uniform() < 0.9) rest.push_back("origin");
      if (rng.Uniform() < 0.9) rest.push_back("destin");
      if (rng.Uniform() < 0.5) rest.push_back("airline");
      for (size_t i = rest.size(); i > 1; --i) std::swap(rest[i - 1], rest[rng.Below(i)]);
      for (const std::string &label : rest) {
        const std::string value = label == "airline" ? airlines[rng.Below(airlines.size())]
                                                     : cities[rng.Below(cities.size())];
        add(label, value, value);
      }
      if (rng.Uniform() < 0.2) add("dummy", "", "");
      char id[32];
      std::snprintf(id, sizeof id, "%s%05zu", prefix.c_str(), n + 1);
      CorpusEntry e = MakeEntry(id, segments);
      if (with_win) {
        // Shuffle until the order differs whenever it can.
        Template shuffled = win;
        for (int attempt = 0; attempt < 8 && shuffled.Format() == win.Format(); ++attempt) {
          for (size_t i = shuffled.tokens.size(); i > 1; --i) {
            std::swap(shuffled.tokens[i - 1], shuffled.tokens[rng.Below(i)]);
          }
        }
        e.win = shuffled.Format();
      }
      out.push_back(std::move(e));
    }
    return out;
  };

  std::string concepts =
      "question\tquestion\t4\nsubject\tsubject\t4\norigin\trestriction\t0\n"
      "destin\trestriction\t0\nairline\trestriction\t1\ndummy\tspecial\t9\n";
  GeneratedFiles g;
  g.files.push_back({"concepts.txt", concepts});
  g.files.push_back({"lexicon.txt", WordsSection(vocab)});
  g.files.push_back({"train.txt", SerializeCorpus(sample(train, "train", false))});
  g.files.push_back({"test.txt", SerializeCorpus(sample(test, "test", true))});
  return g;
}

void WriteGenerated(const GeneratedFiles &generated, const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kInvalid, "cannot create directory " + dir + ": " + ec.message());
  for (const auto &[name, contents] : generated.files) WriteFile(dir + "/" + name, contents);
}

}  // namespace chronus
