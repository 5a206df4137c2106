#ifndef METCHANGE_ERROR_HPP
#define METCHANGE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metchange {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known (0 otherwise)
// and the file name once a file reader rethrows it.
class FormatError : public Error {
  public:
    FormatError(const std::string& message, std::size_t line = 0, const std::string& file = "")
        : Error((file.empty() ? "" : file + ": ") + (line ? "line " + std::to_string(line) + ": " : "") + message),
          message_(message), line_(line) {}
    const std::string& message() const noexcept { return message_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string message_;
    std::size_t line_;
};

// A measure has no value for the given input (e.g. a target with an empty
// co-occurrence row). Distinct from a measure whose value happens to be 0.
class UndefinedMeasure : public Error {
  public:
    using Error::Error;
};

class InsufficientData : public Error {
  public:
    InsufficientData(const std::string& what, std::size_t required, std::size_t available)
        : Error(what + " (required " + std::to_string(required) + ", available " +
                std::to_string(available) + ")"),
          required_(required), available_(available) {}
    std::size_t required() const noexcept { return required_; }
    std::size_t available() const noexcept { return available_; }

  private:
    std::size_t required_;
    std::size_t available_;
};

class DegenerateFit : public Error {
  public:
    using Error::Error;
};

class KeyMismatch : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace metchange

#endif
