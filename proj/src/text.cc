#include "chronus/text.h"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "chronus/error.h"

namespace chronus {

std::vector<std::string> Split(std::string_view text, char delimiter) {
  std::vector<std::string> fields;
  size_t begin = 0;
  while (true) {
    size_t pos = text.find(delimiter, begin);
    if (pos == std::string_view::npos) {
      fields.emplace_back(text.substr(begin));
      return fields;
    }
    fields.emplace_back(text.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> fields;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t begin = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > begin) fields.emplace_back(text.substr(begin, i - begin));
  }
  return fields;
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string_view Trim(std::string_view text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

std::string ToUpper(std::string_view text) {
  std::string out(text);
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool StartsWith(std::string_view text, std::string_view prefix) {
  return text.substr(0, prefix.size()) == prefix;
}

std::string FormatDouble(double value, int significant_digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", significant_digits, value);
  return buffer;
}

bool ParseDouble(std::string_view text, double *value) {
  std::string copy(Trim(text));
  if (copy.empty()) return false;
  char *end = nullptr;
  errno = 0;
  double v = std::strtod(copy.c_str(), &end);
  if (end != copy.c_str() + copy.size()) return false;
  *value = v;
  return true;
}

bool ParseInt(std::string_view text, long *value) {
  std::string copy(Trim(text));
  if (copy.empty()) return false;
  char *end = nullptr;
  errno = 0;
  long v = std::strtol(copy.c_str(), &end, 10);
  if (end != copy.c_str() + copy.size() || errno != 0) return false;
  *value = v;
  return true;
}

std::vector<std::string> ReadLines(std::istream &in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> ReadLines(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path);
  return ReadLines(in);
}

void WriteFile(const std::string &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalid, "cannot write " + path);
  out << contents;
}

std::string_view StripComment(std::string_view line) {
  size_t pos = line.find('#');
  if (pos != std::string_view::npos) line = line.substr(0, pos);
  return Trim(line);
}

}  // namespace chronus
