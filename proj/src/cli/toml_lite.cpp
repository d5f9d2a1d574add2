#include "coiso/cli/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <vector>

namespace coiso::cli {

namespace {

using json = nlohmann::ordered_json;

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  json document() {
    json root = json::object();
    json* table = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        table = &open_table(root);
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, msg); }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  char get() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }
  void skip_blank_lines() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        get();
        continue;
      }
      return;
    }
  }
  // Whitespace, comments and newlines inside arrays and inline tables.
  void skip_all() { skip_blank_lines(); }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
    get();
  }

  std::string bare_or_quoted_key() {
    skip_spaces();
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    std::string key;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
      key.push_back(get());
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_or_quoted_key()};
    for (;;) {
      skip_spaces();
      if (peek() != '.') return parts;
      get();
      parts.push_back(bare_or_quoted_key());
    }
  }

  json& descend(json& base, const std::vector<std::string>& path, std::size_t upto) {
    json* node = &base;
    for (std::size_t i = 0; i < upto; ++i) {
      json& child = (*node)[path[i]];
      if (child.is_null()) child = json::object();
      if (!child.is_object()) fail("key '" + path[i] + "' is not a table");
      node = &child;
    }
    return *node;
  }

  json& open_table(json& root) {
    get();  // '['
    if (peek() == '[') fail("arrays of tables are not supported");
    const auto path = dotted_key();
    skip_spaces();
    if (peek() != ']') fail("expected ']' to close the table header");
    get();
    std::string joined;
    for (const auto& p : path) joined += (joined.empty() ? "" : ".") + p;
    if (!tables_.insert(joined).second) fail("table [" + joined + "] defined twice");
    return descend(root, path, path.size());
  }

  void key_value(json& table) {
    const auto path = dotted_key();
    skip_spaces();
    if (peek() != '=') fail("expected '=' after key '" + path.back() + "'");
    get();
    skip_spaces();
    json& parent = descend(table, path, path.size() - 1);
    if (parent.contains(path.back())) fail("duplicate key '" + path.back() + "'");
    parent[path.back()] = value();
  }

  json value() {
    skip_spaces();
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c)) || c == 'i' ||
        c == 'n') {
      return number();
    }
    if (eof() || c == '\n') fail("missing value");
    fail(std::string("invalid value starting with '") + c + "'");
  }

  std::string basic_string() {
    get();  // '"'
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated escape");
      c = get();
      switch (c) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: fail(std::string("unsupported escape '\\") + c + "'");
      }
    }
  }

  std::string literal_string() {
    get();  // '\''
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '\'') return out;
      out.push_back(c);
    }
  }

  json number() {
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string tok;
    for (std::size_t i = start; i < pos_; ++i) {
      if (s_[i] != '_') tok.push_back(s_[i]);
    }
    std::string body = tok;
    if (!body.empty() && body[0] == '+') body.erase(0, 1);
    if (body == "inf" || body == "-inf" || body == "nan" || body == "-nan") {
      fail("non-finite number '" + tok + "'");
    }
    const bool isFloat = body.find_first_of(".eE") != std::string::npos;
    const char* b = body.data();
    const char* e = body.data() + body.size();
    if (!isFloat) {
      long long v = 0;
      const auto [p, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && p == e) return v;
    }
    double v = 0.0;
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || body.empty()) fail("invalid number '" + tok + "'");
    return v;
  }

  json array() {
    const int opened = line_;
    get();  // '['
    json arr = json::array();
    for (;;) {
      skip_all();
      if (eof()) throw ParseError(opened, "unterminated array");
      if (peek() == ']') {
        get();
        return arr;
      }
      arr.push_back(value());
      skip_all();
      if (eof()) throw ParseError(opened, "unterminated array");
      if (peek() == ',') {
        get();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json inline_table() {
    get();  // '{'
    json tbl = json::object();
    skip_spaces();
    if (peek() == '}') {
      get();
      return tbl;
    }
    for (;;) {
      key_value(tbl);
      skip_spaces();
      if (peek() == ',') {
        get();
        continue;
      }
      if (peek() == '}') {
        get();
        return tbl;
      }
      fail("expected ',' or '}' in inline table");
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::set<std::string> tables_;
};

}  // namespace

nlohmann::ordered_json parse_toml_lite(const std::string& text) { return Parser(text).document(); }

}  // namespace coiso::cli
