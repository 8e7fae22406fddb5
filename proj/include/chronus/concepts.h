#ifndef CHRONUS_CONCEPTS_H_
#define CHRONUS_CONCEPTS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chronus {

enum class Role { kQuestion, kSubject, kRestriction, kAttribute, kSpecial };

Role RoleFromName(const std::string &name);
std::string RoleName(Role role);

struct Concept {
  std::string name;
  Role role = Role::kRestriction;
  // Dialog hierarchy; smaller is higher. origin/destin sit at the top.
  int rank = 0;
  // Attribute concepts name the restriction they mirror (a_fare -> fare).
  std::string mirrors;
};

// The concept inventory: labels, syntactic roles and the merge hierarchy.
//
// File format, one concept per line:
//   name<TAB>role<TAB>rank[<TAB>mirrored-restriction]
class ConceptDictionary {
 public:
  static constexpr const char *kDummy = "dummy";
  static constexpr const char *kAnd = "and";

  ConceptDictionary() = default;
  explicit ConceptDictionary(std::vector<Concept> concepts);

  static ConceptDictionary Parse(const std::vector<std::string> &lines,
                                 const std::string &source);
  static ConceptDictionary Load(const std::string &path);

  // Restriction-role concepts named by `names`, ranks 0..n-1. Used for
  // synthetic models that have no application semantics.
  static ConceptDictionary Plain(const std::vector<std::string> &names);

  // Throws unless dummy and `and` exist with role special. The application
  // pipeline requires them; synthetic dictionaries may omit them.
  void RequireSpecials() const;

  size_t size() const { return concepts_.size(); }
  const Concept &at(size_t index) const { return concepts_.at(index); }
  const std::vector<Concept> &concepts() const { return concepts_; }

  std::optional<int> Find(const std::string &name) const;
  // Throws Error(kUnknownLabel) naming the label.
  int IndexOf(const std::string &name) const;

  // Template keyword: attributes fold onto their restriction.
  const std::string &Keyword(size_t index) const;
  // Rank of the concept whose keyword is `keyword`; large if unknown.
  int KeywordRank(const std::string &keyword) const;

  bool operator==(const ConceptDictionary &other) const;

  std::string Serialize() const;

 private:
  void Validate() const;

  std::vector<Concept> concepts_;
  std::map<std::string, int> index_;
};

}  // namespace chronus

#endif  // CHRONUS_CONCEPTS_H_
