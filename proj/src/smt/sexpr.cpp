#include "smt/sexpr.hpp"

#include <cctype>
#include <stdexcept>

namespace flg::sexpr {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

void utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  bool at_end() {
    skip();
    return i_ >= s_.size();
  }

  Node read() {
    skip();
    if (i_ >= s_.size()) throw std::runtime_error("unexpected end of input");
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      Node n;
      n.kind = Node::Kind::List;
      for (;;) {
        skip();
        if (i_ >= s_.size()) throw std::runtime_error("unbalanced parenthesis");
        if (s_[i_] == ')') {
          ++i_;
          return n;
        }
        n.items.push_back(read());
      }
    }
    if (c == ')') throw std::runtime_error("unexpected ')'");
    Node n;
    if (c == '"') {
      n.kind = Node::Kind::String;
      std::size_t start = ++i_;
      std::string raw;
      for (;;) {
        if (i_ >= s_.size()) throw std::runtime_error("unterminated string");
        if (s_[i_] == '"') {
          if (i_ + 1 < s_.size() && s_[i_ + 1] == '"') {
            i_ += 2;
            continue;
          }
          break;
        }
        ++i_;
      }
      raw = s_.substr(start, i_ - start);
      ++i_;
      n.text = decode_string(raw);
      return n;
    }
    if (c == '|') {
      std::size_t end = s_.find('|', i_ + 1);
      if (end == std::string::npos) throw std::runtime_error("unterminated |symbol|");
      n.text = s_.substr(i_ + 1, end - i_ - 1);
      i_ = end + 1;
      return n;
    }
    std::size_t start = i_;
    while (i_ < s_.size() && !is_space(s_[i_]) && s_[i_] != '(' && s_[i_] != ')' && s_[i_] != '"')
      ++i_;
    n.text = s_.substr(start, i_ - start);
    return n;
  }

 private:
  void skip() {
    for (;;) {
      while (i_ < s_.size() && is_space(s_[i_])) ++i_;
      if (i_ < s_.size() && s_[i_] == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
        continue;
      }
      return;
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

}  // namespace

std::size_t complete_prefix(const std::string& s, std::size_t pos) {
  std::size_t i = pos;
  while (i < s.size() && is_space(s[i])) ++i;
  if (i >= s.size()) return std::string::npos;
  if (s[i] != '(') {
    if (s[i] == '"' || s[i] == '|') {
      // Atoms that are quoted are only complete at their closing quote.
      char q = s[i];
      for (std::size_t j = i + 1; j < s.size(); ++j)
        if (s[j] == q) {
          if (q == '"' && j + 1 < s.size() && s[j + 1] == '"') {
            ++j;
            continue;
          }
          return j + 1 - pos;
        }
      return std::string::npos;
    }
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j]) && s[j] != '(' && s[j] != ')') ++j;
    return j < s.size() ? j - pos : std::string::npos;
  }
  int depth = 0;
  for (std::size_t j = i; j < s.size(); ++j) {
    char c = s[j];
    if (c == '"' || c == '|') {
      std::size_t k = j + 1;
      for (; k < s.size(); ++k) {
        if (s[k] == c) {
          if (c == '"' && k + 1 < s.size() && s[k + 1] == '"') {
            ++k;
            continue;
          }
          break;
        }
      }
      if (k >= s.size()) return std::string::npos;
      j = k;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth == 0) return j + 1 - pos;
    }
  }
  return std::string::npos;
}

std::vector<Node> parse_all(const std::string& s) {
  Reader r(s);
  std::vector<Node> out;
  while (!r.at_end()) out.push_back(r.read());
  return out;
}

std::string decode_string(const std::string& raw) {
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '"' && i + 1 < raw.size() && raw[i + 1] == '"') {
      out += '"';
      ++i;
    } else if (c == '\\' && i + 1 < raw.size() && raw[i + 1] == 'u') {
      std::size_t j = i + 2;
      bool braced = j < raw.size() && raw[j] == '{';
      if (braced) ++j;
      std::size_t start = j;
      while (j < raw.size() && std::isxdigit(static_cast<unsigned char>(raw[j])) &&
             (braced ? j - start < 5 : j - start < 4))
        ++j;
      bool ok = j > start && (braced ? (j < raw.size() && raw[j] == '}') : j - start == 4);
      if (!ok) {
        out += c;
        continue;
      }
      utf8(out, static_cast<unsigned>(std::stoul(raw.substr(start, j - start), nullptr, 16)));
      i = braced ? j : j - 1;
    } else {
      out += c;
    }
  }
  return out;
}

std::string to_text(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Atom: return n.text;
    case Node::Kind::String: {
      std::string s = "\"";
      for (char c : n.text) s += c == '"' ? std::string("\"\"") : std::string(1, c);
      return s + "\"";
    }
    case Node::Kind::List: {
      std::string s = "(";
      for (std::size_t i = 0; i < n.items.size(); ++i) s += (i ? " " : "") + to_text(n.items[i]);
      return s + ")";
    }
  }
  return {};
}

}  // namespace flg::sexpr
