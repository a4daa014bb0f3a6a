#pragma once

// Recursive-descent parser for the Graphviz DOT language grammar
// (graph / stmt_list / node_stmt / edge_stmt / attr_stmt / subgraph), enough
// to validate exported files and pull out nodes, edges, and attributes.

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicesim::testing {

struct DotGraph {
  bool directed = false;
  std::map<std::string, std::map<std::string, std::string>> nodes;
  struct Edge {
    std::string from, to;
    std::map<std::string, std::string> attrs;
  };
  std::vector<Edge> edges;
  std::vector<std::string> subgraphs;
};

class DotParser {
 public:
  explicit DotParser(std::string text) : s_(std::move(text)) {}

  DotGraph parse() {
    DotGraph g;
    skip();
    std::string kw = lower(id());
    if (kw == "strict") kw = lower(id());
    if (kw != "graph" && kw != "digraph") fail("expected graph or digraph");
    g.directed = kw == "digraph";
    g_directed_ = g.directed;
    skip();
    if (peek() != '{') id();
    expect('{');
    stmt_list(g);
    expect('}');
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return g;
  }

 private:
  using Attrs = std::map<std::string, std::string>;

  void stmt_list(DotGraph& g) {
    for (;;) {
      skip();
      if (peek() == '}' || pos_ >= s_.size()) return;
      stmt(g);
      skip();
      if (peek() == ';') ++pos_;
    }
  }

  void stmt(DotGraph& g) {
    skip();
    if (peek() == '{' || lookahead_keyword("subgraph")) {
      const std::string first = subgraph(g);
      edge_tail(g, first);
      return;
    }
    const std::string first = id();
    const std::string kw = lower(first);
    skip();
    if ((kw == "graph" || kw == "node" || kw == "edge") && peek() == '[') {
      Attrs ignored;
      attr_list(ignored);
      return;
    }
    if (peek() == '=') {
      ++pos_;
      id();
      return;
    }
    port();
    skip();
    if (peek() == '-') {
      edge_tail(g, first);
      return;
    }
    Attrs attrs;
    if (peek() == '[') attr_list(attrs);
    auto& node = g.nodes[first];
    for (auto& [k, v] : attrs) node[k] = v;
  }

  void edge_tail(DotGraph& g, std::string from) {
    skip();
    std::vector<std::string> chain{from};
    while (peek() == '-') {
      ++pos_;
      const char op = get();
      if (op != '>' && op != '-') fail("bad edge operator");
      if (g_directed_ && op != '>') fail("'--' in a digraph");
      if (!g_directed_ && op != '-') fail("'->' in an undirected graph");
      skip();
      std::string to = peek() == '{' || lookahead_keyword("subgraph") ? subgraph(g) : id();
      port();
      chain.push_back(to);
      skip();
    }
    Attrs attrs;
    if (peek() == '[') attr_list(attrs);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      g.edges.push_back({chain[i], chain[i + 1], attrs});
      g.nodes[chain[i]];
      g.nodes[chain[i + 1]];
    }
  }

  std::string subgraph(DotGraph& g) {
    std::string name;
    if (lookahead_keyword("subgraph")) {
      id();
      skip();
      if (peek() != '{') name = id();
    }
    expect('{');
    g.subgraphs.push_back(name);
    stmt_list(g);
    expect('}');
    return name;
  }

  void attr_list(Attrs& attrs) {
    skip();
    while (peek() == '[') {
      ++pos_;
      for (;;) {
        skip();
        if (peek() == ']') {
          ++pos_;
          break;
        }
        const std::string k = id();
        skip();
        expect('=');
        const std::string v = id();
        attrs[k] = v;
        skip();
        if (peek() == ',' || peek() == ';') ++pos_;
      }
      skip();
    }
  }

  void port() {
    skip();
    if (peek() == ':') {
      ++pos_;
      id();
      skip();
      if (peek() == ':') {
        ++pos_;
        id();
      }
    }
  }

  std::string id() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '"') {
      ++pos_;
      std::string out;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '"') ++pos_;
        out += s_[pos_++];
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      return out;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string out;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        out += s_[pos_++];
      }
      return out;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      std::string out;
      if (c == '-') out += s_[pos_++];
      bool digits = false;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
        digits = digits || std::isdigit(static_cast<unsigned char>(s_[pos_]));
        out += s_[pos_++];
      }
      if (!digits) fail("bad numeral");
      return out;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  bool lookahead_keyword(const char* kw) {
    skip();
    const std::string k(kw);
    if (s_.compare(pos_, k.size(), k) != 0) return false;
    const std::size_t end = pos_ + k.size();
    return end >= s_.size() ||
           !(std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_');
  }

  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_.compare(pos_, 2, "//") == 0 || s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (s_.compare(pos_, 2, "/*") == 0) {
        const auto end = s_.find("*/", pos_ + 2);
        if (end == std::string::npos) fail("unterminated comment");
        pos_ = end + 2;
      } else {
        break;
      }
    }
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }
  void expect(char c) {
    skip();
    if (get() != c) fail(std::string("expected '") + c + "'");
  }
  static std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw std::runtime_error("DOT syntax error at offset " + std::to_string(pos_) + ": " + why);
  }

  std::string s_;
  std::size_t pos_ = 0;
  bool g_directed_ = true;
};

}  // namespace slicesim::testing
