#pragma once

// ID3 decision trees over categorical attributes: entropy, information gain,
// training, prediction and Graphviz export.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "edm/error.hpp"

namespace edm::id3 {

using Attributes = std::map<std::string, std::string>;

struct Example {
  Attributes attributes;
  std::string label;
};

struct Branch;

/// A leaf when `attribute` is empty. For a split, `label` holds the majority
/// class of the training examples that reached the node and is returned for
/// attribute values no branch covers.
struct DecisionNode {
  std::string attribute;
  std::string label;
  std::vector<Branch> branches;  // sorted by value

  bool is_leaf() const noexcept { return attribute.empty(); }

  static DecisionNode leaf(std::string label) { return DecisionNode{{}, std::move(label), {}}; }
};

struct Branch {
  std::string value;
  DecisionNode child;
};

inline bool operator==(const DecisionNode& a, const DecisionNode& b);
inline bool operator==(const Branch& a, const Branch& b) { return a.value == b.value && a.child == b.child; }
inline bool operator==(const DecisionNode& a, const DecisionNode& b) {
  return a.attribute == b.attribute && a.label == b.label && a.branches == b.branches;
}

inline constexpr double kGainClamp = 1e-12;

/// Shannon entropy in bits of a class histogram; empty classes contribute 0.
inline double entropy(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw Error(ErrorCode::EmptySet, "entropy of an empty set");
  double e = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    e -= p * std::log2(p);
  }
  return e;
}

inline double entropy(const std::map<std::string, std::size_t>& counts) {
  std::vector<std::size_t> v;
  v.reserve(counts.size());
  for (const auto& [_, c] : counts) v.push_back(c);
  return entropy(std::span<const std::size_t>(v));
}

namespace detail {

inline std::map<std::string, std::size_t> label_counts(std::span<const Example> s) {
  std::map<std::string, std::size_t> counts;
  for (const auto& e : s) ++counts[e.label];
  return counts;
}

inline std::map<std::string, std::size_t> label_counts(std::span<const Example> s, std::span<const std::size_t> idx) {
  std::map<std::string, std::size_t> counts;
  for (auto i : idx) ++counts[s[i].label];
  return counts;
}

/// Most frequent label; ties go to the lexicographically smallest.
inline std::string majority(const std::map<std::string, std::size_t>& counts) {
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [label, c] : counts) {
    if (c > best_count) {
      best = label;
      best_count = c;
    }
  }
  return best;
}

inline const std::string& value_of(const Example& e, const std::string& attribute) {
  const auto it = e.attributes.find(attribute);
  if (it == e.attributes.end()) throw Error(ErrorCode::UnknownAttribute, "example lacks attribute '" + attribute + "'");
  return it->second;
}

/// Sum over values v of |S_v|/|S| * E(S_v).
inline double split_entropy(std::span<const Example> s, std::span<const std::size_t> idx, const std::string& attribute) {
  std::map<std::string, std::map<std::string, std::size_t>> by_value;
  for (auto i : idx) ++by_value[value_of(s[i], attribute)][s[i].label];
  double weighted = 0.0;
  for (const auto& [_, counts] : by_value) {
    std::size_t size = 0;
    for (const auto& [__, c] : counts) size += c;
    weighted += static_cast<double>(size) / static_cast<double>(idx.size()) * entropy(counts);
  }
  return weighted;
}

inline double gain(std::span<const Example> s, std::span<const std::size_t> idx, const std::string& attribute) {
  const double g = entropy(label_counts(s, idx)) - split_entropy(s, idx, attribute);
  return g < 0.0 ? 0.0 : g;
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace detail

/// Gain(S, A) = E(S) - sum_v |S_v|/|S| E(S_v), with negative rounding residue
/// clamped to 0.
inline double information_gain(std::span<const Example> s, const std::string& attribute) {
  if (s.empty()) throw Error(ErrorCode::EmptySet, "information gain of an empty set");
  const auto idx = detail::all_indices(s.size());
  return detail::gain(s, idx, attribute);
}

inline double information_gain(const std::vector<Example>& s, const std::string& attribute) {
  return information_gain(std::span<const Example>(s), attribute);
}

struct GainEntry {
  std::string attribute;
  double split_entropy = 0.0;
  double gain = 0.0;
};

inline std::vector<GainEntry> gain_table(std::span<const Example> s, const std::set<std::string>& attributes) {
  if (s.empty()) throw Error(ErrorCode::EmptySet, "gain table of an empty set");
  const auto idx = detail::all_indices(s.size());
  const double parent = entropy(detail::label_counts(s));
  std::vector<GainEntry> out;
  for (const auto& a : attributes) {
    const double split = detail::split_entropy(s, idx, a);
    const double g = parent - split;
    out.push_back({a, split, g < 0.0 ? 0.0 : g});
  }
  return out;
}

namespace detail {

class Trainer {
 public:
  Trainer(std::span<const Example> examples, const std::set<std::string>& attributes) : examples_(examples) {
    for (const auto& a : attributes) {
      auto& values = domains_[a];
      for (const auto& e : examples_) values.insert(value_of(e, a));
    }
  }

  DecisionNode build(const std::vector<std::size_t>& idx, std::set<std::string> remaining) const {
    const auto counts = label_counts(examples_, idx);
    if (counts.size() == 1) return DecisionNode::leaf(counts.begin()->first);
    const auto majority_label = majority(counts);
    if (remaining.empty()) return DecisionNode::leaf(majority_label);

    const std::string best = best_attribute(idx, remaining);
    DecisionNode node{best, majority_label, {}};
    remaining.erase(best);
    for (const auto& value : domains_.at(best)) {
      std::vector<std::size_t> subset;
      for (auto i : idx) {
        if (value_of(examples_[i], best) == value) subset.push_back(i);
      }
      if (subset.empty()) {
        node.branches.push_back({value, DecisionNode::leaf(majority_label)});
      } else {
        node.branches.push_back({value, build(subset, remaining)});
      }
    }
    return node;
  }

 private:
  // Highest gain; gains within kGainClamp of the maximum tie and the
  // lexicographically first attribute wins.
  std::string best_attribute(const std::vector<std::size_t>& idx, const std::set<std::string>& remaining) const {
    std::vector<std::pair<std::string, double>> gains;
    double max_gain = -1.0;
    for (const auto& a : remaining) {
      const double g = gain(examples_, idx, a);
      gains.emplace_back(a, g);
      max_gain = std::max(max_gain, g);
    }
    for (const auto& [a, g] : gains) {
      if (g >= max_gain - kGainClamp) return a;
    }
    return gains.front().first;
  }

  std::span<const Example> examples_;
  std::map<std::string, std::set<std::string>> domains_;
};

}  // namespace detail

/// Trains an ID3 tree. Branches cover every value an attribute takes anywhere
/// in the training set; a value absent from a node's subset gets a leaf with
/// that node's majority label.
inline DecisionNode id3_train(std::span<const Example> examples, const std::set<std::string>& attributes) {
  if (examples.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training examples");
  const auto& schema = examples.front().attributes;
  for (const auto& e : examples) {
    if (e.attributes.size() != schema.size() ||
        !std::equal(e.attributes.begin(), e.attributes.end(), schema.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw Error(ErrorCode::InconsistentSchema, "training examples do not share one attribute set");
    }
  }
  for (const auto& a : attributes) {
    if (a.empty()) throw Error(ErrorCode::UnknownAttribute, "attribute names must be non-empty");
    if (!schema.count(a)) throw Error(ErrorCode::UnknownAttribute, "unknown attribute '" + a + "'");
  }
  detail::Trainer trainer(examples, attributes);
  return trainer.build(detail::all_indices(examples.size()), attributes);
}

inline DecisionNode id3_train(const std::vector<Example>& examples, const std::set<std::string>& attributes) {
  return id3_train(std::span<const Example>(examples), attributes);
}

/// Walks the tree. Unseen values fall back to the split's majority label; an
/// input lacking a split attribute is an error.
inline std::string predict(const DecisionNode& tree, const Attributes& input) {
  const DecisionNode* node = &tree;
  while (!node->is_leaf()) {
    const auto it = input.find(node->attribute);
    if (it == input.end()) throw Error(ErrorCode::MissingAttribute, "input lacks attribute '" + node->attribute + "'");
    const auto br = std::find_if(node->branches.begin(), node->branches.end(),
                                 [&](const Branch& b) { return b.value == it->second; });
    if (br == node->branches.end()) return node->label;
    node = &br->child;
  }
  return node->label;
}

inline std::size_t depth(const DecisionNode& tree) {
  std::size_t d = 0;
  for (const auto& b : tree.branches) d = std::max(d, 1 + depth(b.child));
  return d;
}

inline std::size_t node_count(const DecisionNode& tree) {
  std::size_t n = 1;
  for (const auto& b : tree.branches) n += node_count(b.child);
  return n;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline void emit_dot(const DecisionNode& node, std::size_t& next_id, std::ostringstream& os) {
  const std::size_t id = next_id++;
  if (node.is_leaf()) {
    os << "  n" << id << " [label=\"" << dot_escape(node.label) << "\", shape=ellipse];\n";
    return;
  }
  os << "  n" << id << " [label=\"" << dot_escape(node.attribute) << "\", shape=box];\n";
  for (const auto& b : node.branches) {
    const std::size_t child = next_id;
    os << "  n" << id << " -> n" << child << " [label=\"" << dot_escape(b.value) << "\"];\n";
    emit_dot(b.child, next_id, os);
  }
}

}  // namespace detail

/// Graphviz digraph; node ids are assigned in preorder.
inline std::string export_dot(const DecisionNode& tree) {
  std::ostringstream os;
  os << "digraph id3 {\n";
  std::size_t next_id = 0;
  detail::emit_dot(tree, next_id, os);
  os << "}\n";
  return os.str();
}

}  // namespace edm::id3
