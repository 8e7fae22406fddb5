#ifndef CHRONUS_TEXT_H_
#define CHRONUS_TEXT_H_

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace chronus {

// Splits on a single delimiter character, keeping empty fields.
std::vector<std::string> Split(std::string_view text, char delimiter);

// Splits on runs of ASCII whitespace, dropping empty fields.
std::vector<std::string> SplitWhitespace(std::string_view text);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

std::string_view Trim(std::string_view text);

std::string ToUpper(std::string_view text);

bool StartsWith(std::string_view text, std::string_view prefix);

// Formats a double with the given number of significant digits ("%.*g").
std::string FormatDouble(double value, int significant_digits);

// Parses a double, returning false on trailing garbage.
bool ParseDouble(std::string_view text, double *value);
bool ParseInt(std::string_view text, long *value);

// Reads a file into lines; throws Error(kParse) if unreadable.
std::vector<std::string> ReadLines(const std::string &path);
std::vector<std::string> ReadLines(std::istream &in);

void WriteFile(const std::string &path, const std::string &contents);

// Strips a trailing '#' comment and surrounding whitespace.
std::string_view StripComment(std::string_view line);

}  // namespace chronus

#endif  // CHRONUS_TEXT_H_
