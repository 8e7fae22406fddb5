#include <algorithm>
#include <set>

#include "doctest.h"
#include "chronus/dialog.h"
#include "chronus/error.h"
#include "chronus/template.h"
#include "support.h"

using namespace chronus;
using chronus::testing::Demo;
using chronus::testing::Words;

namespace {

SegmentedSentence Segments(std::vector<std::pair<std::string, std::string>> layout) {
  // (label, "W1 W2 ((city)BOSTON)") pairs
  SegmentedSentence s;
  for (const auto &[label, phrase] : layout) {
    for (const std::string &w : Words(phrase)) {
      if (w.rfind("((", 0) == 0) {
        const size_t close = w.find(')');
        s.words.push_back(w.substr(0, close + 1) + ")");
        s.values.push_back(w.substr(close + 1, w.size() - close - 2));
      } else {
        s.words.push_back(w);
        s.values.push_back("");
      }
      s.labels.push_back(label);
    }
  }
  return s;
}

Template T(const std::string &text) { return Template::ParseFormatted(text); }

const ConceptDictionary &Dict() { return Demo::Get().pipeline.dictionary; }
const ValueTable &Tables() { return Demo::Get().pipeline.tables; }

std::set<std::string> Keys(const Template &t) {
  std::set<std::string> out;
  for (const auto &tok : t.tokens) out.insert(tok.keyword);
  return out;
}

Template RandomTemplate(Rng &rng) {
  static const std::vector<std::string> keys = {"question", "subject", "origin", "destin", "depart-time",
                                                "airline", "fare", "meal", "aircraft", "operator"};
  Template t;
  std::set<std::string> used;
  for (size_t i = 0, n = rng.Below(4); i < n; ++i) {
    const std::string &k = keys[rng.Below(keys.size())];
    if (!used.insert(k).second) continue;
    t.tokens.push_back({k, "v" + std::to_string(rng.Below(2)), i});
  }
  return t;
}

}  // namespace

TEST_CASE("table sentences map to their templates") {
  const Template t = GenerateTemplate(
      Segments({{"question", "SHOW ME"}, {"subject", "FLIGHTS"}, {"destin", "TO ((city)BOSTON)"}}), Tables(), Dict());
  CHECK(t.Format() == "(question,display) (subject,flight) (destin,BBOS)");
  CHECK(t.unmatched == 0);
  CHECK(t.tokens[2].segment == 2);

  const Template y = GenerateTemplate(
      Segments({{"question", "IS"}, {"subject", "BREAKFAST"}, {"dummy", "SERVE(S) ON FLIGHT"}}), Tables(), Dict());
  CHECK(y.Format() == "(question,yes-no) (subject,breakfast)");
}

TEST_CASE("attributes fold onto their restriction") {
  const Template a = GenerateTemplate(Segments({{"a_fare", "ECONOMY"}}), Tables(), Dict());
  CHECK(a.Format() == "(fare,economy)");
  const Template r = GenerateTemplate(Segments({{"fare", "ECONOMY"}}), Tables(), Dict());
  CHECK(a == r);
}

TEST_CASE("special segments produce nothing") {
  const Template t = GenerateTemplate(Segments({{"dummy", "PLEASE"}}), Tables(), Dict());
  CHECK(t.tokens.empty());
  CHECK(t.unmatched == 0);
  CHECK(ShouldReject(t, 0.0));
}

TEST_CASE("unmatched segments are counted") {
  const Template t = GenerateTemplate(Segments({{"origin", "FROM"}, {"destin", "TO ((city)BOSTON)"}}), Tables(), Dict());
  CHECK(t.Format() == "(destin,BBOS)");
  CHECK(t.unmatched == 1);
  CHECK(MatchedFraction(t) == 0.5);
}

TEST_CASE("rejection threshold") {
  Template three = T("(question,display) (subject,flight) (destin,BBOS)");
  CHECK_FALSE(ShouldReject(three, 0.5));
  Template half = T("(destin,BBOS)");
  half.unmatched = 1;
  CHECK(ShouldReject(half, 0.75));
  CHECK_FALSE(ShouldReject(half, 0.5));
  CHECK(ShouldReject(Template{}, 0.75));
}

TEST_CASE("grammar slots and value substitution") {
  ValueTable table;
  table.Add("aircraft", {Words("((aircraft))"), "$", ValueCategory::kAttribute});
  table.Add("origin", {Words("((city)BOSTON)"), "BBOS", ValueCategory::kAttribute});
  const ConceptDictionary dict = ConceptDictionary::Plain({"aircraft", "origin"});
  CHECK(GenerateTemplate(Segments({{"aircraft", "ON ((aircraft)DC10)"}}), table, dict).Format() == "(aircraft,DC10)");
  CHECK(GenerateTemplate(Segments({{"origin", "FROM ((city)BOSTON)"}}), table, dict).Format() == "(origin,BBOS)");
  const Template miss = GenerateTemplate(Segments({{"origin", "FROM ((city)DENVER)"}}), table, dict);
  CHECK(miss.tokens.empty());
  CHECK(miss.unmatched == 1);
}

TEST_CASE("value tables reject a pattern listed after its prefix") {
  ValueTable table;
  table.Add("question", {Words("SHOW"), "display", ValueCategory::kLogic});
  CHECK_THROWS_AS(table.Add("question", {Words("SHOW ME"), "display", ValueCategory::kLogic}), Error);
  CHECK_NOTHROW(table.Add("question", {Words("ME SHOW"), "display", ValueCategory::kLogic}));
  CHECK_THROWS_AS(ValueTable::Parse({"[concept question]", "SHOW\tdisplay"}, "v.txt"), Error);
}

TEST_CASE("templates format and parse") {
  const std::string text = "(question,display) (subject,fare) (origin,MATL)";
  CHECK(T(text).Format() == text);
  CHECK(T("").tokens.empty());
}

TEST_CASE("property: token order follows segment order") {
  Rng rng(9);
  const std::vector<std::pair<std::string, std::string>> pool = {
      {"question", "SHOW ME"}, {"subject", "FLIGHTS"}, {"origin", "FROM ((city)DENVER)"},
      {"destin", "TO ((city)BOSTON)"}, {"airline", "ON DELTA"}, {"dummy", "PLEASE"},
      {"meal", "WITH LUNCH"}, {"operator", "CHEAPEST"}, {"origin", "FROM"}};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<std::string, std::string>> layout;
    for (size_t i = 0, n = 1 + rng.Below(6); i < n; ++i) {
      const auto &next = pool[rng.Below(pool.size())];
      if (!layout.empty() && layout.back().first == next.first) continue;
      layout.push_back(next);
    }
    const Template t = GenerateTemplate(Segments(layout), Tables(), Dict());
    for (size_t i = 1; i < t.tokens.size(); ++i) REQUIRE(t.tokens[i - 1].segment < t.tokens[i].segment);
  }
}

TEST_CASE("property: permuting disjoint single-word patterns changes nothing") {
  Rng rng(10);
  const std::vector<std::string> names = {"AMERICAN", "DELTA", "UNITED", "USAIR", "CONTINENTAL"};
  const ConceptDictionary dict = ConceptDictionary::Plain({"airline"});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> order = names;
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
    ValueTable a, b;
    for (const std::string &n : names) a.Add("airline", {{n}, n.substr(0, 2), ValueCategory::kAttribute});
    for (const std::string &n : order) b.Add("airline", {{n}, n.substr(0, 2), ValueCategory::kAttribute});
    const SegmentedSentence s = Segments({{"airline", "ON " + names[rng.Below(names.size())] + " AIRLINES"}});
    REQUIRE(GenerateTemplate(s, a, dict) == GenerateTemplate(s, b, dict));
  }
}

TEST_CASE("property: attribute and restriction agree on every fare phrase") {
  for (const char *phrase : {"ECONOMY", "COACH", "FIRST CLASS", "IN FIRST CLASS", "ECONOMY CLASS", "CLASS"}) {
    const Template a = GenerateTemplate(Segments({{"a_fare", phrase}}), Tables(), Dict());
    const Template r = GenerateTemplate(Segments({{"fare", phrase}}), Tables(), Dict());
    CHECK(a == r);
    CHECK(a.unmatched == r.unmatched);
  }
}

// --- dialog ---------------------------------------------------------------

TEST_CASE("an empty context takes the template as is") {
  const Template t = T("(question,display) (subject,flight) (destin,BBOS)");
  const MergeResult r = MergeContext(DialogState{}, t, Dict());
  CHECK(r.merged == t);
  CHECK(r.state.context == t);
  CHECK(r.state.turn == 1);
}

TEST_CASE("a new endpoint starts a new context") {
  DialogState s;
  s.context = T("(origin,BBOS) (destin,DDFW) (fare,economy)");
  const MergeResult r = MergeContext(s, T("(destin,MATL)"), Dict());
  CHECK(r.merged.Format() == "(destin,MATL)");
}

TEST_CASE("adding a keyword keeps the lower-ranked context") {
  DialogState s;
  s.context = T("(destin,BBOS) (meal,breakfast)");
  const MergeResult r = MergeContext(s, T("(depart-time,morning)"), Dict());
  CHECK(r.merged.Format() == "(destin,BBOS) (meal,breakfast) (depart-time,morning)");
}

TEST_CASE("a changed value deletes strictly lower ranks only") {
  DialogState s;
  s.context = T("(question,display) (subject,flight) (origin,BBOS) (meal,breakfast) (depart-time,morning)");
  const MergeResult r = MergeContext(s, T("(depart-time,evening)"), Dict());
  CHECK(r.merged.Format() == "(question,display) (subject,flight) (origin,BBOS) (depart-time,evening)");
}

TEST_CASE("repeating a value is not a change") {
  DialogState s;
  s.context = T("(origin,BBOS) (destin,DDFW) (meal,lunch)");
  CHECK(MergeContext(s, T("(destin,DDFW)"), Dict()).merged == s.context);
}

TEST_CASE("ellipsis") {
  CHECK(IsElliptical(T("(depart-time,morning)"), Dict()));
  CHECK(IsElliptical(T(""), Dict()));
  CHECK_FALSE(IsElliptical(T("(subject,fare)"), Dict()));
  CHECK_FALSE(IsElliptical(T("(question,display) (destin,BBOS)"), Dict()));
}

TEST_CASE("property: merging is idempotent, endpoint changes clear, nothing resurrects") {
  Rng rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    DialogState state;
    std::set<std::string> mentioned;
    for (int turn = 0; turn < 5; ++turn) {
      const Template incoming = RandomTemplate(rng);
      const MergeResult once = MergeContext(state, incoming, Dict());
      const MergeResult twice = MergeContext(once.state, incoming, Dict());
      REQUIRE(twice.merged == once.merged);

      bool endpoint_changed = false;
      for (const char *k : {"origin", "destin"}) {
        const TemplateToken *old = state.context.Find(k);
        const TemplateToken *now = incoming.Find(k);
        endpoint_changed = endpoint_changed || (old && now && old->value != now->value);
      }
      if (endpoint_changed) {
        const std::set<std::string> in = Keys(incoming);
        for (const std::string &k : Keys(once.merged)) REQUIRE(in.count(k));
        mentioned.clear();
      }
      for (const std::string &k : Keys(incoming)) mentioned.insert(k);
      for (const std::string &k : Keys(once.merged)) REQUIRE(mentioned.count(k));
      // Once dropped, a keyword stays dropped until mentioned again.
      for (const std::string &k : Keys(state.context)) {
        if (!Keys(once.merged).count(k)) mentioned.erase(k);
      }
      std::set<std::string> unique;
      for (const auto &tok : once.merged.tokens) REQUIRE(unique.insert(tok.keyword).second);
      state = once.state;
    }
  }
}
