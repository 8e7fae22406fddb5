#ifndef CHRONUS_TEMPLATE_H_
#define CHRONUS_TEMPLATE_H_

#include <map>
#include <string>
#include <vector>

#include "chronus/concepts.h"
#include "chronus/model.h"

namespace chronus {

enum class ValueCategory { kItem, kAttribute, kLogic, kOperator };

ValueCategory CategoryFromName(const std::string &name);
std::string CategoryName(ValueCategory category);

// One lookup-table entry. Pattern words are superwords; "((g))" matches any
// match of grammar g and "((g)V)" only the match normalized to V. A value of
// "$" takes the normalized value of the first grammar slot.
struct ValuePattern {
  std::vector<std::string> words;
  std::string value;
  ValueCategory category = ValueCategory::kItem;
};

// Per-concept ordered pattern lists; the first matching pattern wins.
//
// File format:
//   [concept NAME]
//   PATTERN WORDS...<TAB>value<TAB>category
class ValueTable {
 public:
  static ValueTable Parse(const std::vector<std::string> &lines, const std::string &source);
  static ValueTable Load(const std::string &path);

  // Appends a pattern; throws kInvalid if an earlier pattern of the same
  // concept is a proper prefix of it (longer patterns must come first).
  void Add(const std::string &concept_name, ValuePattern pattern);

  const std::vector<ValuePattern> *Find(const std::string &concept_name) const;
  const std::map<std::string, std::vector<ValuePattern>> &entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<ValuePattern>> entries_;
};

struct TemplateToken {
  std::string keyword;
  std::string value;
  size_t segment = 0;  // index of the producing segment
  bool operator==(const TemplateToken &other) const {
    return keyword == other.keyword && value == other.value;
  }
};

// Ordered keyword/value meaning representation.
struct Template {
  std::vector<TemplateToken> tokens;
  size_t unmatched = 0;  // decoded concepts with no table match

  const TemplateToken *Find(const std::string &keyword) const;
  // "(k,v) (k,v)"
  std::string Format() const;
  static Template ParseFormatted(const std::string &text);
  bool operator==(const Template &other) const { return tokens == other.tokens; }
};

// Maps each segment to at most one (keyword, value) token. Special-role
// segments are skipped; attributes use their restriction's keyword and table.
Template GenerateTemplate(const SegmentedSentence &segmentation, const ValueTable &tables,
                          const ConceptDictionary &dictionary);

inline constexpr double kDefaultRejectThreshold = 0.75;

// True iff matched / (matched + unmatched) < threshold; an empty template is
// always rejected.
bool ShouldReject(const Template &tmpl, double threshold);
double MatchedFraction(const Template &tmpl);

}  // namespace chronus

#endif  // CHRONUS_TEMPLATE_H_
