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

#ifndef OOVDIAL_FEATURE_STRUCTURE_H_
#define OOVDIAL_FEATURE_STRUCTURE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oovdial {

// Acyclic attribute-value graph.  A value is an atom, a nested structure or
// an unbound variable; reentrancy (structure sharing) is represented by two
// attributes pointing at the same node.
//
// Text notation:
//   (type: go, thegoal: (type: city, value: oov_city))
//   morphology: form: oov_city, syntax: head: (number: singular)
// `a: b: v` abbreviates `a: (b: v)`.  Identifiers starting with an upper
// case letter are variables; every occurrence of a variable within one text
// denotes the same node, and `X(...)` gives that node content.
class FeatureStructure {
 public:
  // The empty structure `()`.
  FeatureStructure();

  // Throws FormatError on syntax errors or cyclic reentrancy.
  static FeatureStructure Parse(std::string_view text);
  static FeatureStructure Atom(std::string value);
  static FeatureStructure Variable();

  bool IsAtom() const;
  bool IsVariable() const;
  bool IsComplex() const;

  // Sub-structure at a path of attributes, nullopt if absent.
  std::optional<FeatureStructure> Get(std::string_view path) const;
  // Atom value at a dotted path (`thegoal.value`), nullopt if the path is
  // missing or not an atom.
  std::optional<std::string> AtomAt(std::string_view path) const;
  // Top-level attribute names of a complex structure.
  std::vector<std::string> Attributes() const;
  // Every atom found under an attribute named `attribute`, in print order.
  std::vector<std::string> AtomsUnder(std::string_view attribute) const;

  // (attribute: *this)
  FeatureStructure Embed(const std::string& attribute) const;
  // Copy without one top-level attribute; nodes only reachable through it
  // are dropped, nodes shared with the remainder are kept.
  FeatureStructure Without(const std::string& attribute) const;
  // Copy keeping only the listed top-level attributes.
  FeatureStructure Restrict(const std::vector<std::string>& attributes) const;

  // Canonical rendering: `type` first, remaining attributes sorted,
  // variables as _1, _2, ... and shared structures expanded.
  std::string ToString() const;
  // Like ToString, but marks shared complex nodes `#n=(...)` at first
  // occurrence and `#n` afterwards.  Two structures are equal up to
  // variable renaming iff their canonical strings are equal.
  std::string Canonical() const;

  bool operator==(const FeatureStructure& other) const {
    return Canonical() == other.Canonical();
  }

  size_t NumNodes() const { return nodes_.size(); }

  friend std::optional<FeatureStructure> Unify(const FeatureStructure& a,
                                               const FeatureStructure& b);

 private:
  enum class Kind { kVariable, kAtom, kComplex };
  struct Node {
    Kind kind = Kind::kComplex;
    std::string atom;
    std::map<std::string, int> arcs;
  };

  friend class FsParser;
  friend class FsBuilder;

  std::vector<Node> nodes_;
  int root_ = 0;
};

// Most general unifier, or nullopt when atoms clash, an atom meets a
// complex structure, or the result would be cyclic.  Variables of the two
// operands are distinct even if they were written with the same name.
std::optional<FeatureStructure> Unify(const FeatureStructure& a,
                                      const FeatureStructure& b);

}  // namespace oovdial

#endif  // OOVDIAL_FEATURE_STRUCTURE_H_
