#pragma once

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace coiso::cli {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Parses the TOML subset used by run configs into JSON: `key = value`
/// pairs, `[table]` headers (dotted names nest), `#` comments, and values
/// that are basic strings, integers, floats, booleans or arrays thereof.
/// Arrays may span several lines.
nlohmann::ordered_json parse_toml_lite(const std::string& text);

}  // namespace coiso::cli
