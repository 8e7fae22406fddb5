#ifndef CHRONUS_QUERY_H_
#define CHRONUS_QUERY_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chronus/template.h"

namespace chronus {

enum class ColumnType { kInt, kText };

struct Column {
  std::string name;
  ColumnType type = ColumnType::kText;
};

// A table whose first column is the primary key. Cells are stored as text;
// kInt columns hold decimal integers.
struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;  // sorted by primary key

  int ColumnIndex(const std::string &column) const;  // -1 if absent
};

// The bundled relational miniature: flight, fare, city, airport.
//
// File format: header "chronus-db v1", then per table
//   [table NAME]
//   columns<TAB>col:int<TAB>col:text ...
//   value<TAB>value ...
class MiniDb {
 public:
  static MiniDb Parse(const std::vector<std::string> &lines, const std::string &source);
  static MiniDb Load(const std::string &path);

  const Table &table(const std::string &name) const;
  bool HasTable(const std::string &name) const { return tables_.count(name) > 0; }

  // City code for a city code, city name ("SAN_FRANCISCO" or "SAN FRANCISCO")
  // or airport code; nullopt if none resolves.
  std::optional<std::string> ResolveCity(const std::string &value) const;

 private:
  void Validate(const std::string &source) const;

  std::map<std::string, Table> tables_;
};

// Interpretation conventions that the database cannot express: time-word
// intervals and per-subject projections.
//
// File format:
//   [time]        word<TAB>begin-minute<TAB>end-minute     (half-open)
//   [projection]  subject<TAB>table.column table.column ...
//   [default]     subject<TAB>name
struct Conventions {
  std::map<std::string, std::pair<int, int>> time_words;
  std::map<std::string, std::vector<std::string>> projections;
  std::string default_subject = "flight";

  static Conventions Parse(const std::vector<std::string> &lines, const std::string &source);
  static Conventions Load(const std::string &path);
};

enum class Comparator { kEq, kGe, kLt };
enum class Aggregate { kNone, kMinimum, kMaximum };
enum class PlanKind { kRows, kExists, kCount };

struct Predicate {
  std::string column;  // qualified: "flight.to_city"
  Comparator op = Comparator::kEq;
  std::string value;
  bool operator==(const Predicate &) const = default;
};

struct QueryPlan {
  PlanKind kind = PlanKind::kRows;
  std::string subject_table = "flight";
  std::vector<std::string> joins;  // tables joined to the subject table
  std::vector<Predicate> predicates;
  std::vector<std::string> projection;
  Aggregate aggregate = Aggregate::kNone;
  std::string aggregate_column;

  bool operator==(const QueryPlan &) const = default;

  // SQL-like rendering for inspection only.
  std::string ToSql() const;
};

enum class AnswerKind { kRows, kNumber, kBoolean };

// Number and boolean answers carry exactly one row with one cell.
struct Answer {
  AnswerKind kind = AnswerKind::kRows;
  std::vector<std::vector<std::string>> rows;

  static Answer Number(long value);
  static Answer Boolean(bool value);

  // Tab-separated rows; "yes"/"no" for booleans; "(no rows)" when empty.
  std::string Render() const;
  bool operator==(const Answer &) const = default;
};

// Compiles a template into a plan. Throws kUnknownKeyword for tokens the
// translator has no rule for.
QueryPlan PlanQuery(const Template &tmpl, const MiniDb &db, const Conventions &conventions);

// Deterministic evaluation; rows come out in primary-key order and
// aggregates keep every extremal row.
Answer Execute(const QueryPlan &plan, const MiniDb &db);

enum class Verdict { kCorrect, kIncorrect };

// Correct iff minimal <= answer <= maximal. Rows compare as sets of cell
// values (column order and duplicates ignored); a row is covered by another
// row whose cell set contains it.
Verdict ScoreAnswer(const Answer &answer, const Answer &minimal, const Answer &maximal);

}  // namespace chronus

#endif  // CHRONUS_QUERY_H_
