#pragma once

// Student-task adapters for ID3 and the versioned JSON tree format.

#include <set>
#include <string>
#include <vector>

#include "edm/error.hpp"
#include "edm/id3.hpp"
#include "edm/model.hpp"
#include "json.hpp"

namespace edm::id3 {

inline constexpr std::string_view kTreeFormat = "edm-id3-tree";
inline constexpr int kTreeFormatVersion = 1;

inline const std::set<std::string>& student_attribute_names() {
  static const std::set<std::string> names{"attendance", "dept", "marks"};
  return names;
}

/// Attribute view of a classification row. "marks" is the row's discretized
/// band, so including it makes the target trivially predictable.
inline Attributes student_attributes(const ClassificationRow& row) {
  return {{"attendance", row.attendance}, {"dept", row.dept}, {"marks", std::string(to_string(row.performance))}};
}

inline std::vector<Example> student_examples(const std::vector<ClassificationRow>& rows) {
  std::vector<Example> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({student_attributes(r), std::string(to_string(r.performance))});
  return out;
}

struct TreeModel {
  std::set<std::string> attributes;
  DecisionNode root;
};

inline nlohmann::ordered_json node_to_json(const DecisionNode& node) {
  nlohmann::ordered_json j;
  if (node.is_leaf()) {
    j["kind"] = "leaf";
    j["label"] = node.label;
    return j;
  }
  j["kind"] = "split";
  j["attribute"] = node.attribute;
  j["default_label"] = node.label;
  auto branches = nlohmann::ordered_json::array();
  for (const auto& b : node.branches) {
    nlohmann::ordered_json bj;
    bj["value"] = b.value;
    bj["node"] = node_to_json(b.child);
    branches.push_back(std::move(bj));
  }
  j["branches"] = std::move(branches);
  return j;
}

inline DecisionNode node_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "leaf") return DecisionNode::leaf(j.at("label").get<std::string>());
  if (kind != "split") throw Error(ErrorCode::InconsistentSchema, "unknown node kind '" + kind + "'");
  DecisionNode node{j.at("attribute").get<std::string>(), j.at("default_label").get<std::string>(), {}};
  if (node.attribute.empty()) throw Error(ErrorCode::InconsistentSchema, "split without attribute");
  for (const auto& bj : j.at("branches")) node.branches.push_back({bj.at("value").get<std::string>(), node_from_json(bj.at("node"))});
  if (node.branches.empty()) throw Error(ErrorCode::InconsistentSchema, "split without branches");
  return node;
}

inline std::string tree_to_json(const TreeModel& model) {
  nlohmann::ordered_json j;
  j["format"] = kTreeFormat;
  j["version"] = kTreeFormatVersion;
  j["target"] = "performance";
  j["attributes"] = std::vector<std::string>(model.attributes.begin(), model.attributes.end());
  j["root"] = node_to_json(model.root);
  return j.dump(2) + "\n";
}

inline TreeModel tree_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kTreeFormat) throw Error(ErrorCode::InconsistentSchema, "not a tree document");
    if (j.at("version").get<int>() != kTreeFormatVersion) throw Error(ErrorCode::InconsistentSchema, "unsupported tree version");
    TreeModel model;
    for (const auto& a : j.at("attributes")) model.attributes.insert(a.get<std::string>());
    model.root = node_from_json(j.at("root"));
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InconsistentSchema, std::string("malformed tree JSON: ") + e.what());
  }
}

}  // namespace edm::id3
