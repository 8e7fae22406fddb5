#include "chronus/query.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "chronus/error.h"
#include "chronus/text.h"

namespace chronus {
namespace {

long AsInt(const std::string &text) {
  long v = 0;
  ParseInt(text, &v);
  return v;
}

std::pair<std::string, std::string> SplitQualified(const std::string &column) {
  size_t dot = column.find('.');
  if (dot == std::string::npos) throw Error(ErrorKind::kInvalid, "unqualified column " + column);
  return {column.substr(0, dot), column.substr(dot + 1)};
}

// Schema the planner relies on; extra columns are allowed.
const std::map<std::string, std::vector<std::pair<std::string, ColumnType>>> &RequiredSchema() {
  static const std::map<std::string, std::vector<std::pair<std::string, ColumnType>>> schema = {
      {"flight",
       {{"flight_id", ColumnType::kInt}, {"airline", ColumnType::kText},
        {"number", ColumnType::kInt}, {"from_city", ColumnType::kText},
        {"to_city", ColumnType::kText}, {"depart_min", ColumnType::kInt},
        {"arrive_min", ColumnType::kInt}, {"aircraft", ColumnType::kText},
        {"meal", ColumnType::kText}}},
      {"fare",
       {{"fare_id", ColumnType::kInt}, {"flight_id", ColumnType::kInt},
        {"one_way_cost", ColumnType::kInt}, {"fare_class", ColumnType::kText}}},
      {"city", {{"city_code", ColumnType::kText}, {"city_name", ColumnType::kText}}},
      {"airport", {{"airport_code", ColumnType::kText}, {"city_code", ColumnType::kText}}},
  };
  return schema;
}

std::string Canonical(std::string text) {
  std::replace(text.begin(), text.end(), ' ', '_');
  return ToUpper(text);
}

}  // namespace

int Table::ColumnIndex(const std::string &column) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return static_cast<int>(i);
  }
  return -1;
}

// ---------------------------------------------------------------------------
// MiniDb

MiniDb MiniDb::Parse(const std::vector<std::string> &lines, const std::string &source) {
  if (lines.empty() || Trim(lines[0]) != "chronus-db v1") {
    throw ParseError(source, 1, "missing 'chronus-db v1' header");
  }
  MiniDb db;
  Table *current = nullptr;
  for (size_t i = 1; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i + 1);
    std::string_view line = StripComment(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '[') {
      std::vector<std::string> head = SplitWhitespace(line.substr(1, line.size() - 2));
      if (line.back() != ']' || head.size() != 2 || head[0] != "table") {
        throw ParseError(source, lineno, "expected [table NAME]");
      }
      if (db.tables_.count(head[1])) throw ParseError(source, lineno, "duplicate table " + head[1]);
      current = &db.tables_[head[1]];
      current->name = head[1];
      continue;
    }
    if (current == nullptr) throw ParseError(source, lineno, "row outside a table");
    std::vector<std::string> fields = Split(line, '\t');
    for (std::string &f : fields) f = std::string(Trim(f));
    if (fields[0] == "columns") {
      for (size_t j = 1; j < fields.size(); ++j) {
        std::vector<std::string> parts = Split(fields[j], ':');
        if (parts.size() != 2 || (parts[1] != "int" && parts[1] != "text")) {
          throw ParseError(source, lineno, "column declarations look like name:int or name:text");
        }
        current->columns.push_back(
            Column{parts[0], parts[1] == "int" ? ColumnType::kInt : ColumnType::kText});
      }
      continue;
    }
    if (current->columns.empty()) throw ParseError(source, lineno, "row before 'columns' line");
    if (fields.size() != current->columns.size()) {
      throw ParseError(source, lineno, "expected " + std::to_string(current->columns.size()) + " fields");
    }
    for (size_t j = 0; j < fields.size(); ++j) {
      long v = 0;
      if (current->columns[j].type == ColumnType::kInt && !ParseInt(fields[j], &v)) {
        throw ParseError(source, lineno, "column " + current->columns[j].name + " expects an integer");
      }
    }
    current->rows.push_back(std::move(fields));
  }
  for (auto &[name, table] : db.tables_) {
    const bool numeric = !table.columns.empty() && table.columns[0].type == ColumnType::kInt;
    std::stable_sort(table.rows.begin(), table.rows.end(), [&](const auto &a, const auto &b) {
      return numeric ? AsInt(a[0]) < AsInt(b[0]) : a[0] < b[0];
    });
    for (size_t r = 1; r < table.rows.size(); ++r) {
      if (table.rows[r][0] == table.rows[r - 1][0]) {
        throw ParseError(source, 0, "duplicate primary key " + table.rows[r][0] + " in " + name);
      }
    }
  }
  db.Validate(source);
  return db;
}

void MiniDb::Validate(const std::string &source) const {
  for (const auto &[name, columns] : RequiredSchema()) {
    auto it = tables_.find(name);
    if (it == tables_.end()) throw ParseError(source, 0, "missing table " + name);
    for (const auto &[column, type] : columns) {
      int idx = it->second.ColumnIndex(column);
      if (idx < 0 || it->second.columns[idx].type != type) {
        throw ParseError(source, 0, "table " + name + " needs column " + column);
      }
    }
  }
  auto keys = [&](const std::string &table, const std::string &column) {
    std::set<std::string> out;
    const Table &t = tables_.at(table);
    int idx = t.ColumnIndex(column);
    for (const auto &row : t.rows) out.insert(row[idx]);
    return out;
  };
  const std::set<std::string> flights = keys("flight", "flight_id");
  const std::set<std::string> cities = keys("city", "city_code");
  const Table &fare = tables_.at("fare");
  for (const auto &row : fare.rows) {
    if (!flights.count(row[fare.ColumnIndex("flight_id")])) {
      throw ParseError(source, 0, "fare " + row[0] + " references a missing flight");
    }
  }
  const Table &airport = tables_.at("airport");
  for (const auto &row : airport.rows) {
    if (!cities.count(row[airport.ColumnIndex("city_code")])) {
      throw ParseError(source, 0, "airport " + row[0] + " references a missing city");
    }
  }
  const Table &flight = tables_.at("flight");
  for (const auto &row : flight.rows) {
    for (const char *column : {"depart_min", "arrive_min"}) {
      long minute = AsInt(row[flight.ColumnIndex(column)]);
      if (minute < 0 || minute >= 1440) {
        throw ParseError(source, 0, "flight " + row[0] + " has " + column + " outside [0,1440)");
      }
    }
  }
}

MiniDb MiniDb::Load(const std::string &path) { return Parse(ReadLines(path), path); }

const Table &MiniDb::table(const std::string &name) const {
  auto it = tables_.find(name);
  if (it == tables_.end()) throw Error(ErrorKind::kInvalid, "no table " + name);
  return it->second;
}

std::optional<std::string> MiniDb::ResolveCity(const std::string &value) const {
  const std::string key = Canonical(value);
  const Table &city = table("city");
  for (const auto &row : city.rows) {
    if (row[0] == key) return row[0];
  }
  const int name = city.ColumnIndex("city_name");
  for (const auto &row : city.rows) {
    if (Canonical(row[name]) == key) return row[0];
  }
  const Table &airport = table("airport");
  const int code = airport.ColumnIndex("city_code");
  for (const auto &row : airport.rows) {
    if (row[0] == key) return row[code];
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Conventions

Conventions Conventions::Parse(const std::vector<std::string> &lines, const std::string &source) {
  Conventions conv;
  std::string section;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i + 1);
    std::string_view line = StripComment(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      continue;
    }
    std::vector<std::string> fields = Split(line, '\t');
    if (section == "time") {
      long begin = 0, end = 0;
      if (fields.size() != 3 || !ParseInt(fields[1], &begin) || !ParseInt(fields[2], &end) ||
          begin < 0 || end > 1440 || begin >= end) {
        throw ParseError(source, lineno, "expected word<TAB>begin<TAB>end with 0 <= begin < end <= 1440");
      }
      conv.time_words[std::string(Trim(fields[0]))] = {static_cast<int>(begin), static_cast<int>(end)};
    } else if (section == "projection") {
      if (fields.size() != 2) throw ParseError(source, lineno, "expected subject<TAB>columns");
      conv.projections[std::string(Trim(fields[0]))] = SplitWhitespace(fields[1]);
    } else if (section == "default") {
      if (fields.size() != 2 || Trim(fields[0]) != "subject") {
        throw ParseError(source, lineno, "expected subject<TAB>name");
      }
      conv.default_subject = std::string(Trim(fields[1]));
    } else {
      throw ParseError(source, lineno, "unknown section '" + section + "'");
    }
  }
  if (!conv.projections.count("flight")) {
    throw ParseError(source, 0, "conventions need a projection for subject flight");
  }
  return conv;
}

Conventions Conventions::Load(const std::string &path) { return Parse(ReadLines(path), path); }

// ---------------------------------------------------------------------------
// Planning

std::string QueryPlan::ToSql() const {
  std::ostringstream out;
  out << "SELECT ";
  if (kind == PlanKind::kExists) {
    out << "EXISTS(*)";
  } else if (kind == PlanKind::kCount) {
    out << "COUNT(*)";
  } else {
    out << Join(projection, ", ");
  }
  out << " FROM " << subject_table;
  for (const std::string &j : joins) {
    out << " JOIN " << j << " ON " << j << ".flight_id = " << subject_table << ".flight_id";
  }
  std::vector<std::string> where;
  for (const Predicate &p : predicates) {
    const char *op = p.op == Comparator::kEq ? " = " : p.op == Comparator::kGe ? " >= " : " < ";
    where.push_back(p.column + op + "'" + p.value + "'");
  }
  if (aggregate != Aggregate::kNone) {
    where.push_back(aggregate_column + " = (SELECT " +
                    (aggregate == Aggregate::kMinimum ? "MIN(" : "MAX(") + aggregate_column + ") ...)");
  }
  if (!where.empty()) out << " WHERE " << Join(where, " AND ");
  out << ";";
  return out.str();
}

QueryPlan PlanQuery(const Template &tmpl, const MiniDb &db, const Conventions &conventions) {
  QueryPlan plan;
  plan.subject_table = "flight";
  bool fare_join = false;
  std::string subject = conventions.default_subject;
  std::set<std::string> meal_values;
  {
    const Table &flight = db.table("flight");
    const int meal = flight.ColumnIndex("meal");
    for (const auto &row : flight.rows) meal_values.insert(row[meal]);
  }
  auto unknown = [](const TemplateToken &t) {
    return Error(ErrorKind::kUnknownKeyword, "no translation rule for (" + t.keyword + "," + t.value + ")");
  };
  auto city = [&](const TemplateToken &t) {
    std::optional<std::string> code = db.ResolveCity(t.value);
    if (!code) throw unknown(t);
    return *code;
  };

  for (const TemplateToken &t : tmpl.tokens) {
    if (t.keyword == "question") {
      if (t.value == "display") plan.kind = PlanKind::kRows;
      else if (t.value == "yes-no") plan.kind = PlanKind::kExists;
      else if (t.value == "count") plan.kind = PlanKind::kCount;
      else throw unknown(t);
    } else if (t.keyword == "subject") {
      if (t.value == "flight") {
        // flight is also the default
      } else if (t.value == "fare") {
        subject = "fare";
        fare_join = true;
      } else if (meal_values.count(t.value)) {
        plan.predicates.push_back({"flight.meal", Comparator::kEq, t.value});
      } else {
        throw unknown(t);
      }
    } else if (t.keyword == "origin") {
      plan.predicates.push_back({"flight.from_city", Comparator::kEq, city(t)});
    } else if (t.keyword == "destin") {
      plan.predicates.push_back({"flight.to_city", Comparator::kEq, city(t)});
    } else if (t.keyword == "depart-time") {
      auto it = conventions.time_words.find(t.value);
      if (it == conventions.time_words.end()) throw unknown(t);
      plan.predicates.push_back({"flight.depart_min", Comparator::kGe, std::to_string(it->second.first)});
      plan.predicates.push_back({"flight.depart_min", Comparator::kLt, std::to_string(it->second.second)});
    } else if (t.keyword == "airline") {
      plan.predicates.push_back({"flight.airline", Comparator::kEq, t.value});
    } else if (t.keyword == "aircraft") {
      plan.predicates.push_back({"flight.aircraft", Comparator::kEq, t.value});
    } else if (t.keyword == "meal") {
      plan.predicates.push_back({"flight.meal", Comparator::kEq, t.value});
    } else if (t.keyword == "fare") {
      fare_join = true;
      plan.predicates.push_back({"fare.fare_class", Comparator::kEq, t.value});
    } else if (t.keyword == "operator") {
      if (t.value == "minimum" || t.value == "maximum") {
        fare_join = true;
        plan.aggregate = t.value == "minimum" ? Aggregate::kMinimum : Aggregate::kMaximum;
        plan.aggregate_column = "fare.one_way_cost";
      } else if (t.value == "earliest" || t.value == "latest") {
        plan.aggregate = t.value == "earliest" ? Aggregate::kMinimum : Aggregate::kMaximum;
        plan.aggregate_column = "flight.depart_min";
      } else {
        throw unknown(t);
      }
    } else {
      throw unknown(t);
    }
  }
  if (fare_join) plan.joins.push_back("fare");
  auto proj = conventions.projections.find(subject);
  if (proj == conventions.projections.end()) proj = conventions.projections.find("flight");
  plan.projection = proj->second;
  if (plan.aggregate != Aggregate::kNone &&
      std::find(plan.projection.begin(), plan.projection.end(), plan.aggregate_column) ==
          plan.projection.end()) {
    plan.projection.push_back(plan.aggregate_column);
  }
  for (const std::string &column : plan.projection) {
    auto [table, name] = SplitQualified(column);
    if (table != plan.subject_table &&
        std::find(plan.joins.begin(), plan.joins.end(), table) == plan.joins.end()) {
      // Projection reaches into an unjoined table: join it through the link.
      if (table != "fare") throw Error(ErrorKind::kInvalid, "cannot link table " + table);
      plan.joins.push_back("fare");
    }
    if (db.table(table).ColumnIndex(name) < 0) throw Error(ErrorKind::kInvalid, "no column " + column);
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Execution

Answer Answer::Number(long value) { return Answer{AnswerKind::kNumber, {{std::to_string(value)}}}; }

Answer Answer::Boolean(bool value) { return Answer{AnswerKind::kBoolean, {{value ? "yes" : "no"}}}; }

std::string Answer::Render() const {
  if (kind != AnswerKind::kRows) return rows.at(0).at(0) + "\n";
  if (rows.empty()) return "(no rows)\n";
  std::string out;
  for (const auto &row : rows) out += Join(row, "\t") + "\n";
  return out;
}

Answer Execute(const QueryPlan &plan, const MiniDb &db) {
  const Table &base = db.table(plan.subject_table);
  const bool with_fare = std::find(plan.joins.begin(), plan.joins.end(), "fare") != plan.joins.end();
  const Table &fare = db.table("fare");
  const int base_key = base.ColumnIndex("flight_id");
  const int fare_flight = fare.ColumnIndex("flight_id");

  // A joined row: base row index and fare row index (-1 without the join).
  struct JoinedRow {
    int base;
    int fare;
  };
  std::vector<JoinedRow> rows;
  for (size_t b = 0; b < base.rows.size(); ++b) {
    if (!with_fare) {
      rows.push_back({static_cast<int>(b), -1});
      continue;
    }
    for (size_t f = 0; f < fare.rows.size(); ++f) {
      if (fare.rows[f][fare_flight] == base.rows[b][base_key]) {
        rows.push_back({static_cast<int>(b), static_cast<int>(f)});
      }
    }
  }

  auto cell = [&](const JoinedRow &row, const std::string &qualified, ColumnType *type) {
    auto [table, name] = SplitQualified(qualified);
    const Table &t = table == "fare" ? fare : base;
    const int idx = t.ColumnIndex(name);
    if (idx < 0 || (table == "fare" && row.fare < 0)) {
      throw Error(ErrorKind::kInvalid, "column " + qualified + " not available");
    }
    if (type) *type = t.columns[idx].type;
    return t.rows[table == "fare" ? row.fare : row.base][idx];
  };

  std::vector<JoinedRow> kept;
  for (const JoinedRow &row : rows) {
    bool ok = true;
    for (const Predicate &p : plan.predicates) {
      ColumnType type;
      const std::string &v = cell(row, p.column, &type);
      if (type == ColumnType::kInt) {
        const long a = AsInt(v);
        const long b = AsInt(p.value);
        ok = p.op == Comparator::kEq ? a == b : p.op == Comparator::kGe ? a >= b : a < b;
      } else {
        ok = p.op == Comparator::kEq ? v == p.value : p.op == Comparator::kGe ? v >= p.value : v < p.value;
      }
      if (!ok) break;
    }
    if (ok) kept.push_back(row);
  }

  if (plan.aggregate != Aggregate::kNone && !kept.empty()) {
    long best = 0;
    for (size_t i = 0; i < kept.size(); ++i) {
      const long v = AsInt(cell(kept[i], plan.aggregate_column, nullptr));
      if (i == 0 || (plan.aggregate == Aggregate::kMinimum ? v < best : v > best)) best = v;
    }
    std::erase_if(kept, [&](const JoinedRow &row) {
      return AsInt(cell(row, plan.aggregate_column, nullptr)) != best;
    });
  }

  switch (plan.kind) {
    case PlanKind::kExists: return Answer::Boolean(!kept.empty());
    case PlanKind::kCount: return Answer::Number(static_cast<long>(kept.size()));
    case PlanKind::kRows: break;
  }
  Answer answer;
  for (const JoinedRow &row : kept) {
    std::vector<std::string> out;
    for (const std::string &column : plan.projection) out.push_back(cell(row, column, nullptr));
    answer.rows.push_back(std::move(out));
  }
  return answer;
}

// ---------------------------------------------------------------------------
// Scoring

Verdict ScoreAnswer(const Answer &answer, const Answer &minimal, const Answer &maximal) {
  if (answer.kind != minimal.kind || answer.kind != maximal.kind) return Verdict::kIncorrect;
  auto as_sets = [](const Answer &a) {
    std::vector<std::set<std::string>> out;
    for (const auto &row : a.rows) out.emplace_back(row.begin(), row.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  // Every row of `inner` is contained in some row of `outer`.
  auto covered = [](const std::vector<std::set<std::string>> &inner,
                    const std::vector<std::set<std::string>> &outer) {
    for (const auto &row : inner) {
      bool found = false;
      for (const auto &candidate : outer) {
        if (std::includes(candidate.begin(), candidate.end(), row.begin(), row.end())) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };
  const auto a = as_sets(answer);
  return covered(as_sets(minimal), a) && covered(a, as_sets(maximal)) ? Verdict::kCorrect
                                                                        : Verdict::kIncorrect;
}

}  // namespace chronus
