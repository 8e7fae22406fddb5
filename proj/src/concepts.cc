#include "chronus/concepts.h"

#include <climits>
#include <sstream>

#include "chronus/error.h"
#include "chronus/text.h"

namespace chronus {

Role RoleFromName(const std::string &name) {
  if (name == "question") return Role::kQuestion;
  if (name == "subject") return Role::kSubject;
  if (name == "restriction") return Role::kRestriction;
  if (name == "attribute") return Role::kAttribute;
  if (name == "special") return Role::kSpecial;
  throw Error(ErrorKind::kInvalid, "unknown role '" + name + "'");
}

std::string RoleName(Role role) {
  switch (role) {
    case Role::kQuestion: return "question";
    case Role::kSubject: return "subject";
    case Role::kRestriction: return "restriction";
    case Role::kAttribute: return "attribute";
    case Role::kSpecial: return "special";
  }
  return "special";
}

ConceptDictionary::ConceptDictionary(std::vector<Concept> concepts)
    : concepts_(std::move(concepts)) {
  for (size_t i = 0; i < concepts_.size(); ++i) {
    if (!index_.emplace(concepts_[i].name, static_cast<int>(i)).second) {
      throw Error(ErrorKind::kInvalid, "duplicate concept " + concepts_[i].name);
    }
  }
  Validate();
}

void ConceptDictionary::Validate() const {
  for (const Concept &c : concepts_) {
    if (c.name.empty()) throw Error(ErrorKind::kInvalid, "concept without a name");
    if (c.rank < 0) throw Error(ErrorKind::kInvalid, "negative rank for " + c.name);
    if (c.role == Role::kAttribute) {
      auto target = Find(c.mirrors);
      if (!target || concepts_[*target].role != Role::kRestriction) {
        throw Error(ErrorKind::kInvalid, "attribute " + c.name +
                                             " must mirror an existing restriction");
      }
    } else if (!c.mirrors.empty()) {
      throw Error(ErrorKind::kInvalid, "only attributes may mirror: " + c.name);
    }
  }
}

void ConceptDictionary::RequireSpecials() const {
  for (const char *name : {kDummy, kAnd}) {
    auto index = Find(name);
    if (!index || concepts_[*index].role != Role::kSpecial) {
      throw Error(ErrorKind::kInvalid,
                  std::string("dictionary needs special concept '") + name + "'");
    }
  }
}

ConceptDictionary ConceptDictionary::Parse(const std::vector<std::string> &lines,
                                           const std::string &source) {
  std::vector<Concept> concepts;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i + 1);
    std::string_view line = StripComment(lines[i]);
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(source, lineno, "expected name<TAB>role<TAB>rank[<TAB>mirrors]");
    }
    Concept c;
    c.name = fields[0];
    try {
      c.role = RoleFromName(fields[1]);
    } catch (const Error &e) {
      throw ParseError(source, lineno, e.what());
    }
    long rank = 0;
    if (!ParseInt(fields[2], &rank)) throw ParseError(source, lineno, "bad rank");
    c.rank = static_cast<int>(rank);
    if (fields.size() == 4) c.mirrors = fields[3];
    concepts.push_back(std::move(c));
  }
  try {
    ConceptDictionary dict(std::move(concepts));
    return dict;
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::kParse) throw;
    throw ParseError(source, 0, e.what());
  }
}

ConceptDictionary ConceptDictionary::Load(const std::string &path) {
  return Parse(ReadLines(path), path);
}

ConceptDictionary ConceptDictionary::Plain(const std::vector<std::string> &names) {
  std::vector<Concept> concepts;
  for (size_t i = 0; i < names.size(); ++i) {
    concepts.push_back(Concept{names[i], Role::kRestriction, static_cast<int>(i), ""});
  }
  return ConceptDictionary(std::move(concepts));
}

std::optional<int> ConceptDictionary::Find(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ConceptDictionary::IndexOf(const std::string &name) const {
  auto index = Find(name);
  if (!index) throw Error(ErrorKind::kUnknownLabel, "unknown concept label '" + name + "'");
  return *index;
}

const std::string &ConceptDictionary::Keyword(size_t index) const {
  const Concept &c = concepts_.at(index);
  return c.role == Role::kAttribute ? c.mirrors : c.name;
}

int ConceptDictionary::KeywordRank(const std::string &keyword) const {
  auto index = Find(keyword);
  return index ? concepts_[*index].rank : INT_MAX;
}

bool ConceptDictionary::operator==(const ConceptDictionary &other) const {
  if (concepts_.size() != other.concepts_.size()) return false;
  for (size_t i = 0; i < concepts_.size(); ++i) {
    const Concept &a = concepts_[i];
    const Concept &b = other.concepts_[i];
    if (a.name != b.name || a.role != b.role || a.rank != b.rank || a.mirrors != b.mirrors) {
      return false;
    }
  }
  return true;
}

std::string ConceptDictionary::Serialize() const {
  std::ostringstream out;
  for (const Concept &c : concepts_) {
    out << c.name << '\t' << RoleName(c.role) << '\t' << c.rank;
    if (!c.mirrors.empty()) out << '\t' << c.mirrors;
    out << '\n';
  }
  return out.str();
}

}  // namespace chronus
