#ifndef CHRONUS_ERROR_H_
#define CHRONUS_ERROR_H_

#include <stdexcept>
#include <string>

namespace chronus {

enum class ErrorKind {
  kParse,            // malformed input file, carries a line number
  kEmptyInput,       // sentence empty after stop-word deletion
  kEmptyCorpus,
  kUnknownLabel,
  kUnknownWord,
  kSizeLimit,        // brute-force oracle guard
  kUnknownKeyword,   // template token the query translator cannot compile
  kInvalid,          // contract violation on otherwise well-formed data
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Builds a parse error of the form "<source>:<line>: <message>".
inline Error ParseError(const std::string &source, int line,
                        const std::string &message) {
  return Error(ErrorKind::kParse,
               source + ":" + std::to_string(line) + ": " + message);
}

}  // namespace chronus

#endif  // CHRONUS_ERROR_H_
