#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hrs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula text; `position` is the byte offset of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error("syntax error at offset " + std::to_string(position) + ": " + message),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class AlphabetError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ParamError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed explicit-format file. `line` is 1-based; 0 means the whole file.
class FormatError : public Error {
 public:
  FormatError(std::string file, std::size_t line, const std::string& message)
      : Error(file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace hrs
