// Copyright 2026 The oovdial Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oovdial/feature_structure.h"

#include <algorithm>
#include <cctype>

#include "oovdial/corpus.h"

namespace oovdial {

// Scratch graph with union-find forwarding, used to build, unify and
// compact structures.
class FsBuilder {
 public:
  using Node = FeatureStructure::Node;
  using Kind = FeatureStructure::Kind;

  int Add(Node n) {
    nodes_.push_back(std::move(n));
    fwd_.push_back(-1);
    return static_cast<int>(nodes_.size()) - 1;
  }
  int AddComplex() { return Add(Node{Kind::kComplex, {}, {}}); }
  int AddVariable() { return Add(Node{Kind::kVariable, {}, {}}); }
  int AddAtom(std::string v) { return Add(Node{Kind::kAtom, std::move(v), {}}); }

  int Find(int x) {
    while (fwd_[x] >= 0) x = fwd_[x];
    return x;
  }

  Node& At(int x) { return nodes_[x]; }

  int Import(const FeatureStructure& fs) {
    const int offset = static_cast<int>(nodes_.size());
    for (const auto& n : fs.nodes_) {
      Node copy = n;
      for (auto& [attr, child] : copy.arcs) child += offset;
      Add(std::move(copy));
    }
    return fs.root_ + offset;
  }

  bool Unify(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return true;
    Node& na = nodes_[a];
    Node& nb = nodes_[b];
    if (na.kind == Kind::kVariable) {
      fwd_[a] = b;
      return true;
    }
    if (nb.kind == Kind::kVariable) {
      fwd_[b] = a;
      return true;
    }
    if (na.kind != nb.kind) return false;
    if (na.kind == Kind::kAtom) {
      if (na.atom != nb.atom) return false;
      fwd_[a] = b;
      return true;
    }
    fwd_[a] = b;
    const auto arcs = na.arcs;
    for (const auto& [attr, child] : arcs) {
      auto it = nodes_[b].arcs.find(attr);
      if (it == nodes_[b].arcs.end()) {
        nodes_[b].arcs.emplace(attr, child);
      } else if (!Unify(child, it->second)) {
        return false;
      }
    }
    return true;
  }

  // Compacts the graph reachable from `root`; nullopt if it is cyclic.
  std::optional<FeatureStructure> Extract(int root) {
    FeatureStructure out;
    out.nodes_.clear();
    std::vector<int> state(nodes_.size(), 0);  // 0 new, 1 open, 2 done
    std::vector<int> new_id(nodes_.size(), -1);
    bool cyclic = false;
    auto visit = [&](auto&& self, int x) -> int {
      x = Find(x);
      if (state[x] == 2) return new_id[x];
      if (state[x] == 1) {
        cyclic = true;
        return -1;
      }
      state[x] = 1;
      const int id = static_cast<int>(out.nodes_.size());
      new_id[x] = id;
      out.nodes_.push_back(Node{nodes_[x].kind, nodes_[x].atom, {}});
      const auto arcs = nodes_[x].arcs;
      for (const auto& [attr, child] : arcs) {
        int c = self(self, child);
        if (cyclic) return -1;
        out.nodes_[id].arcs.emplace(attr, c);
      }
      state[x] = 2;
      return id;
    };
    out.root_ = visit(visit, root);
    if (cyclic) return std::nullopt;
    return out;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<int> fwd_;
};

class FsParser {
 public:
  explicit FsParser(std::string_view text) : text_(text) {}

  FeatureStructure ParseTop() {
    SkipSpace();
    int root;
    if (Peek() == '(') {
      root = ParseParen();
    } else {
      root = b_.AddComplex();
      if (!AtEnd() && Peek() != '.') ParsePairs(root);
    }
    SkipSpace();
    if (Peek() == '.') ++pos_;
    SkipSpace();
    if (!AtEnd()) Fail("trailing input");
    auto fs = b_.Extract(root);
    if (!fs) Fail("cyclic structure");
    return *fs;
  }

 private:
  [[noreturn]] void Fail(const std::string& msg) {
    throw FormatError("feature structure: " + msg + " at offset " +
                      std::to_string(pos_));
  }
  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return AtEnd() ? '\0' : text_[pos_]; }
  void SkipSpace() {
    while (!AtEnd() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  void Expect(char c) {
    SkipSpace();
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  static bool IdentChar(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '\'' || c == '-' || u >= 0x80;
  }
  std::string Ident() {
    SkipSpace();
    size_t start = pos_;
    while (!AtEnd() && IdentChar(text_[pos_])) ++pos_;
    if (start == pos_) Fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  void Attach(int node, const std::string& attr, int value) {
    auto& arcs = b_.At(b_.Find(node)).arcs;
    auto it = arcs.find(attr);
    if (it == arcs.end()) {
      arcs.emplace(attr, value);
    } else if (!b_.Unify(it->second, value)) {
      Fail("conflicting values for '" + attr + "'");
    }
  }

  void ParsePairs(int node) {
    while (true) {
      std::string attr = Ident();
      Expect(':');
      Attach(node, attr, ParseValue());
      SkipSpace();
      if (Peek() != ',') break;
      ++pos_;
    }
  }

  int ParseParen() {
    Expect('(');
    int node = b_.AddComplex();
    SkipSpace();
    if (Peek() != ')') ParsePairs(node);
    Expect(')');
    return node;
  }

  int ParseValue() {
    SkipSpace();
    if (Peek() == '(') return ParseParen();
    std::string id = Ident();
    SkipSpace();
    if (std::isupper(static_cast<unsigned char>(id[0]))) {
      auto [it, fresh] = vars_.emplace(id, -1);
      if (fresh) it->second = b_.AddVariable();
      int var = it->second;
      if (Peek() == '(') {
        int content = ParseParen();
        if (!b_.Unify(var, content)) Fail("conflicting content for " + id);
      }
      return var;
    }
    if (Peek() == ':') {
      ++pos_;
      int node = b_.AddComplex();
      Attach(node, id, ParseValue());
      return node;
    }
    return b_.AddAtom(id);
  }

  std::string_view text_;
  size_t pos_ = 0;
  FsBuilder b_;
  std::map<std::string, int> vars_;
};

namespace {

std::vector<std::string> PrintOrder(const std::map<std::string, int>& arcs) {
  std::vector<std::string> keys;
  if (arcs.count("type")) keys.push_back("type");
  for (const auto& [k, v] : arcs) {
    if (k != "type") keys.push_back(k);
  }
  return keys;
}

}  // namespace

FeatureStructure::FeatureStructure() : nodes_(1), root_(0) {}

FeatureStructure FeatureStructure::Parse(std::string_view text) {
  return FsParser(text).ParseTop();
}

FeatureStructure FeatureStructure::Atom(std::string value) {
  FeatureStructure fs;
  fs.nodes_[0] = Node{Kind::kAtom, std::move(value), {}};
  return fs;
}

FeatureStructure FeatureStructure::Variable() {
  FeatureStructure fs;
  fs.nodes_[0] = Node{Kind::kVariable, {}, {}};
  return fs;
}

bool FeatureStructure::IsAtom() const {
  return nodes_[root_].kind == Kind::kAtom;
}
bool FeatureStructure::IsVariable() const {
  return nodes_[root_].kind == Kind::kVariable;
}
bool FeatureStructure::IsComplex() const {
  return nodes_[root_].kind == Kind::kComplex;
}

std::optional<FeatureStructure> FeatureStructure::Get(
    std::string_view path) const {
  int node = root_;
  size_t start = 0;
  while (!path.empty()) {
    size_t dot = path.find('.', start);
    std::string attr(path.substr(start, dot - start));
    const auto& arcs = nodes_[node].arcs;
    auto it = arcs.find(attr);
    if (it == arcs.end()) return std::nullopt;
    node = it->second;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  FsBuilder b;
  int root = b.Import(*this) - root_ + node;
  return b.Extract(root);
}

std::optional<std::string> FeatureStructure::AtomAt(
    std::string_view path) const {
  auto sub = Get(path);
  if (!sub || !sub->IsAtom()) return std::nullopt;
  return sub->nodes_[sub->root_].atom;
}

std::vector<std::string> FeatureStructure::Attributes() const {
  return PrintOrder(nodes_[root_].arcs);
}

std::vector<std::string> FeatureStructure::AtomsUnder(
    std::string_view attribute) const {
  std::vector<std::string> out;
  auto visit = [&](auto&& self, int x) -> void {
    const Node& n = nodes_[x];
    for (const auto& key : PrintOrder(n.arcs)) {
      int child = n.arcs.at(key);
      if (key == attribute && nodes_[child].kind == Kind::kAtom) {
        out.push_back(nodes_[child].atom);
      }
      self(self, child);
    }
  };
  visit(visit, root_);
  return out;
}

FeatureStructure FeatureStructure::Embed(const std::string& attribute) const {
  FsBuilder b;
  int inner = b.Import(*this);
  int root = b.AddComplex();
  b.At(root).arcs.emplace(attribute, inner);
  return *b.Extract(root);
}

FeatureStructure FeatureStructure::Without(
    const std::string& attribute) const {
  FsBuilder b;
  int root = b.Import(*this);
  b.At(root).arcs.erase(attribute);
  return *b.Extract(root);
}

FeatureStructure FeatureStructure::Restrict(
    const std::vector<std::string>& attributes) const {
  FsBuilder b;
  int root = b.Import(*this);
  auto& arcs = b.At(root).arcs;
  for (auto it = arcs.begin(); it != arcs.end();) {
    if (std::find(attributes.begin(), attributes.end(), it->first) ==
        attributes.end()) {
      it = arcs.erase(it);
    } else {
      ++it;
    }
  }
  return *b.Extract(root);
}

std::string FeatureStructure::ToString() const {
  std::map<int, int> var_ids;
  auto print = [&](auto&& self, int x) -> std::string {
    const Node& n = nodes_[x];
    if (n.kind == Kind::kAtom) return n.atom;
    if (n.kind == Kind::kVariable) {
      auto [it, fresh] = var_ids.emplace(x, var_ids.size() + 1);
      return "_" + std::to_string(it->second);
    }
    std::string s = "(";
    bool first = true;
    for (const auto& key : PrintOrder(n.arcs)) {
      if (!first) s += ", ";
      first = false;
      s += key + ": " + self(self, n.arcs.at(key));
    }
    return s + ")";
  };
  return print(print, root_);
}

std::string FeatureStructure::Canonical() const {
  std::vector<int> indegree(nodes_.size(), 0);
  for (const auto& n : nodes_) {
    for (const auto& [k, c] : n.arcs) ++indegree[c];
  }
  std::map<int, int> var_ids, tag_ids;
  auto print = [&](auto&& self, int x) -> std::string {
    const Node& n = nodes_[x];
    if (n.kind == Kind::kAtom) return n.atom;
    if (n.kind == Kind::kVariable) {
      auto [it, fresh] = var_ids.emplace(x, var_ids.size() + 1);
      return "_" + std::to_string(it->second);
    }
    std::string prefix;
    if (indegree[x] > 1) {
      auto it = tag_ids.find(x);
      if (it != tag_ids.end()) return "#" + std::to_string(it->second);
      int tag = static_cast<int>(tag_ids.size()) + 1;
      tag_ids.emplace(x, tag);
      prefix = "#" + std::to_string(tag) + "=";
    }
    std::string s = prefix + "(";
    bool first = true;
    for (const auto& key : PrintOrder(n.arcs)) {
      if (!first) s += ", ";
      first = false;
      s += key + ": " + self(self, n.arcs.at(key));
    }
    return s + ")";
  };
  return print(print, root_);
}

std::optional<FeatureStructure> Unify(const FeatureStructure& a,
                                      const FeatureStructure& b) {
  FsBuilder builder;
  int ra = builder.Import(a);
  int rb = builder.Import(b);
  if (!builder.Unify(ra, rb)) return std::nullopt;
  return builder.Extract(ra);
}

}  // namespace oovdial
