#include "chronus/template.h"

#include <algorithm>

#include "chronus/error.h"
#include "chronus/text.h"

namespace chronus {
namespace {

bool IsSlot(const std::string &word) {
  return word.size() > 4 && StartsWith(word, "((") && word.compare(word.size() - 2, 2, "))") == 0 &&
         word.find(')') == word.size() - 2;
}

// Does pattern word `p` match segment position i?
bool WordMatches(const std::string &p, const SegmentedSentence &s, size_t i) {
  if (IsSlot(p)) return s.words[i] == p;
  if (StartsWith(p, "((")) return s.Render(i) == p;
  return s.words[i] == p && (i >= s.values.size() || s.values[i].empty());
}

}  // namespace

ValueCategory CategoryFromName(const std::string &name) {
  if (name == "item") return ValueCategory::kItem;
  if (name == "attribute") return ValueCategory::kAttribute;
  if (name == "logic") return ValueCategory::kLogic;
  if (name == "operator") return ValueCategory::kOperator;
  throw Error(ErrorKind::kInvalid, "unknown value category '" + name + "'");
}

std::string CategoryName(ValueCategory category) {
  switch (category) {
    case ValueCategory::kItem: return "item";
    case ValueCategory::kAttribute: return "attribute";
    case ValueCategory::kLogic: return "logic";
    case ValueCategory::kOperator: return "operator";
  }
  return "item";
}

void ValueTable::Add(const std::string &concept_name, ValuePattern pattern) {
  if (pattern.words.empty()) throw Error(ErrorKind::kInvalid, "empty pattern under " + concept_name);
  std::vector<ValuePattern> &list = entries_[concept_name];
  for (const ValuePattern &earlier : list) {
    if (earlier.words.size() < pattern.words.size() &&
        std::equal(earlier.words.begin(), earlier.words.end(), pattern.words.begin())) {
      throw Error(ErrorKind::kInvalid, "pattern '" + Join(pattern.words, " ") +
                                           "' listed after its prefix '" +
                                           Join(earlier.words, " ") + "'");
    }
  }
  list.push_back(std::move(pattern));
}

const std::vector<ValuePattern> *ValueTable::Find(const std::string &concept_name) const {
  auto it = entries_.find(concept_name);
  return it == entries_.end() ? nullptr : &it->second;
}

ValueTable ValueTable::Parse(const std::vector<std::string> &lines, const std::string &source) {
  ValueTable table;
  std::string current;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i + 1);
    std::string_view line = StripComment(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '[') {
      std::vector<std::string> head = SplitWhitespace(line.substr(1, line.size() - 2));
      if (line.back() != ']' || head.size() != 2 || head[0] != "concept") {
        throw ParseError(source, lineno, "expected [concept NAME]");
      }
      current = head[1];
      continue;
    }
    if (current.empty()) throw ParseError(source, lineno, "pattern outside a [concept] section");
    std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, lineno, "expected PATTERN<TAB>value<TAB>category");
    try {
      ValuePattern pattern{SplitWhitespace(fields[0]), std::string(Trim(fields[1])),
                           CategoryFromName(std::string(Trim(fields[2])))};
      table.Add(current, std::move(pattern));
    } catch (const Error &e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return table;
}

ValueTable ValueTable::Load(const std::string &path) { return Parse(ReadLines(path), path); }

const TemplateToken *Template::Find(const std::string &keyword) const {
  for (const TemplateToken &t : tokens) {
    if (t.keyword == keyword) return &t;
  }
  return nullptr;
}

std::string Template::Format() const {
  std::string out;
  for (const TemplateToken &t : tokens) {
    if (!out.empty()) out += ' ';
    out += "(" + t.keyword + "," + t.value + ")";
  }
  return out;
}

Template Template::ParseFormatted(const std::string &text) {
  Template tmpl;
  size_t pos = 0;
  while (true) {
    size_t open = text.find('(', pos);
    if (open == std::string::npos) break;
    size_t close = text.find(')', open);
    size_t comma = text.find(',', open);
    if (close == std::string::npos || comma == std::string::npos || comma > close) {
      throw Error(ErrorKind::kInvalid, "malformed template '" + text + "'");
    }
    tmpl.tokens.push_back(TemplateToken{text.substr(open + 1, comma - open - 1),
                                        text.substr(comma + 1, close - comma - 1),
                                        tmpl.tokens.size()});
    pos = close + 1;
  }
  return tmpl;
}

Template GenerateTemplate(const SegmentedSentence &segmentation, const ValueTable &tables,
                          const ConceptDictionary &dictionary) {
  Template tmpl;
  const std::vector<SegmentedSentence::Segment> segments = segmentation.Segments();
  for (size_t si = 0; si < segments.size(); ++si) {
    const auto &seg = segments[si];
    const int index = dictionary.IndexOf(seg.label);
    if (dictionary.at(index).role == Role::kSpecial) continue;
    const std::string &keyword = dictionary.Keyword(index);
    const std::vector<ValuePattern> *patterns = tables.Find(keyword);
    bool matched = false;
    for (size_t p = 0; patterns != nullptr && p < patterns->size() && !matched; ++p) {
      const ValuePattern &pattern = (*patterns)[p];
      const size_t len = pattern.words.size();
      for (size_t start = seg.begin; start + len <= seg.end && !matched; ++start) {
        bool ok = true;
        for (size_t j = 0; j < len && ok; ++j) ok = WordMatches(pattern.words[j], segmentation, start + j);
        if (!ok) continue;
        std::string value = pattern.value;
        if (value == "$") {
          value.clear();
          for (size_t j = 0; j < len; ++j) {
            if (StartsWith(pattern.words[j], "((") && start + j < segmentation.values.size()) {
              value = segmentation.values[start + j];
              break;
            }
          }
          if (value.empty()) continue;
        }
        tmpl.tokens.push_back(TemplateToken{keyword, value, si});
        matched = true;
      }
    }
    if (!matched) ++tmpl.unmatched;
  }
  return tmpl;
}

double MatchedFraction(const Template &tmpl) {
  const size_t total = tmpl.tokens.size() + tmpl.unmatched;
  return total == 0 ? 0.0 : static_cast<double>(tmpl.tokens.size()) / static_cast<double>(total);
}

bool ShouldReject(const Template &tmpl, double threshold) {
  if (tmpl.tokens.size() + tmpl.unmatched == 0) return true;
  return MatchedFraction(tmpl) < threshold;
}

}  // namespace chronus
