#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "edm/id3.hpp"
#include "edm/id3_io.hpp"
#include "oracles.hpp"

namespace {

using edm::id3::DecisionNode;
using edm::id3::Example;

std::vector<Example> table_four() {
  return {{{{"dept", "ETC"}, {"attendance", "Y"}}, "AVERAGE"},
          {{{"dept", "IT"}, {"attendance", "N"}}, "GOOD"},
          {{{"dept", "COMP"}, {"attendance", "Y"}}, "GOOD"},
          {{{"dept", "IT"}, {"attendance", "Y"}}, "POOR"}};
}

double oracle_gain(const std::vector<Example>& s, const std::string& attr) {
  std::map<std::string, std::size_t> all;
  std::map<std::string, std::map<std::string, std::size_t>> split;
  for (const auto& e : s) {
    ++all[e.label];
    ++split[e.attributes.at(attr)][e.label];
  }
  auto values = [](const std::map<std::string, std::size_t>& m) {
    std::vector<std::size_t> v;
    for (const auto& [_, c] : m) v.push_back(c);
    return v;
  };
  double g = oracle::entropy(values(all));
  for (const auto& [_, m] : split) {
    std::size_t n = 0;
    for (const auto& [__, c] : m) n += c;
    g -= static_cast<double>(n) / static_cast<double>(s.size()) * oracle::entropy(values(m));
  }
  return g;
}

// Recursively checks that every split picks a max-gain attribute (ties to the
// smallest name), that leaves carry the pure or majority label, and that no
// attribute repeats on a path.
void check_gain_rule(const DecisionNode& node, const std::vector<Example>& s, std::set<std::string> remaining,
                     const std::string& parent_majority) {
  if (s.empty()) {
    ASSERT_TRUE(node.is_leaf());
    EXPECT_EQ(node.label, parent_majority);
    return;
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& e : s) ++counts[e.label];
  std::string majority;
  std::size_t best = 0;
  for (const auto& [l, c] : counts) {
    if (c > best) {
      best = c;
      majority = l;
    }
  }
  if (counts.size() == 1 || remaining.empty()) {
    ASSERT_TRUE(node.is_leaf());
    EXPECT_EQ(node.label, majority);
    return;
  }
  ASSERT_FALSE(node.is_leaf());
  ASSERT_TRUE(remaining.count(node.attribute)) << "attribute repeated on path: " << node.attribute;
  double max_gain = -1;
  for (const auto& a : remaining) max_gain = std::max(max_gain, oracle_gain(s, a));
  std::string expected;
  for (const auto& a : remaining) {
    if (oracle_gain(s, a) >= max_gain - 1e-9) {
      expected = a;
      break;
    }
  }
  EXPECT_EQ(node.attribute, expected);
  EXPECT_EQ(node.label, majority);
  remaining.erase(node.attribute);
  for (const auto& b : node.branches) {
    std::vector<Example> sub;
    for (const auto& e : s) {
      if (e.attributes.at(node.attribute) == b.value) sub.push_back(e);
    }
    check_gain_rule(b.child, sub, remaining, majority);
  }
}

bool no_repeats(const DecisionNode& node, std::set<std::string> seen = {}) {
  if (node.is_leaf()) return true;
  if (!seen.insert(node.attribute).second) return false;
  return std::all_of(node.branches.begin(), node.branches.end(), [&](const auto& b) { return no_repeats(b.child, seen); });
}

std::vector<Example> random_consistent(std::mt19937_64& rng, std::size_t attrs, std::size_t n) {
  std::vector<std::size_t> arity(attrs);
  for (auto& a : arity) a = 2 + rng() % 3;
  std::map<std::vector<std::size_t>, std::string> label_of;  // keeps the set consistent
  std::vector<Example> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> key(attrs);
    Example e;
    for (std::size_t a = 0; a < attrs; ++a) {
      key[a] = rng() % arity[a];
      e.attributes["a" + std::to_string(a)] = "v" + std::to_string(key[a]);
    }
    auto [it, inserted] = label_of.emplace(key, "");
    if (inserted) it->second = "c" + std::to_string(rng() % 3);
    e.label = it->second;
    out.push_back(std::move(e));
  }
  return out;
}

std::set<std::string> names(std::size_t attrs) {
  std::set<std::string> out;
  for (std::size_t a = 0; a < attrs; ++a) out.insert("a" + std::to_string(a));
  return out;
}

TEST(Entropy, KnownValues) {
  const std::vector<std::size_t> pure{10}, even{7, 7}, nine_five{9, 5};
  EXPECT_DOUBLE_EQ(edm::id3::entropy(std::span<const std::size_t>(pure)), 0.0);
  EXPECT_DOUBLE_EQ(edm::id3::entropy(std::span<const std::size_t>(even)), 1.0);
  // Frozen from a 30-digit evaluation.
  EXPECT_NEAR(edm::id3::entropy(std::span<const std::size_t>(nine_five)), 0.94028595867063104, 1e-12);
  const std::vector<std::size_t> empty{0, 0};
  EXPECT_THROW(edm::id3::entropy(std::span<const std::size_t>(empty)), edm::Error);
}

TEST(Entropy, UniformIsMaximalAndZeroOnlyWhenPure) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + rng() % 6;
    std::vector<std::size_t> counts(k);
    for (auto& c : counts) c = rng() % 20;
    if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == 0) counts[0] = 1;
    const double e = edm::id3::entropy(std::span<const std::size_t>(counts));
    EXPECT_NEAR(e, oracle::entropy(counts), 1e-12);
    EXPECT_LE(e, std::log2(static_cast<double>(k)) + 1e-12);
    const auto nonzero = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
    EXPECT_EQ(e == 0.0, nonzero == 1);
  }
  const std::vector<std::size_t> uniform{4, 4, 4, 4};
  EXPECT_DOUBLE_EQ(edm::id3::entropy(std::span<const std::size_t>(uniform)), 2.0);
}

TEST(Gain, ConstantSeparatingAndSample) {
  auto s = table_four();
  for (auto& e : s) e.attributes["const"] = "x";
  EXPECT_EQ(edm::id3::information_gain(s, "const"), 0.0);

  std::vector<Example> sep{{{{"a", "p"}}, "X"}, {{{"a", "p"}}, "X"}, {{{"a", "q"}}, "Y"}, {{{"a", "r"}}, "Z"}};
  std::map<std::string, std::size_t> counts{{"X", 2}, {"Y", 1}, {"Z", 1}};
  EXPECT_NEAR(edm::id3::information_gain(sep, "a"), edm::id3::entropy(counts), 1e-12);

  // 1.5 - (3/4) log2 3, frozen from a 30-digit evaluation.
  EXPECT_NEAR(edm::id3::information_gain(table_four(), "attendance"), 0.31127812445913286, 1e-12);
  EXPECT_NEAR(edm::id3::information_gain(table_four(), "dept"), 1.0, 1e-12);
  EXPECT_THROW(edm::id3::information_gain(table_four(), "missing"), edm::Error);
}

TEST(Gain, NonNegativeAndDuplicateAttributeMatches) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_consistent(rng, 3, 1 + rng() % 60);
    for (auto& e : s) e.attributes["dup"] = e.attributes["a1"];
    for (const auto& a : {"a0", "a1", "a2"}) {
      EXPECT_GE(edm::id3::information_gain(s, a), 0.0);
      EXPECT_NEAR(edm::id3::information_gain(s, a), oracle_gain(s, a), 1e-12);
    }
    EXPECT_EQ(edm::id3::information_gain(s, "dup"), edm::id3::information_gain(s, "a1"));
  }
}

TEST(Train, PureAndExhaustedLeaves) {
  std::vector<Example> good{{{{"a", "1"}}, "GOOD"}, {{{"a", "2"}}, "GOOD"}};
  EXPECT_EQ(edm::id3::id3_train(good, {"a"}), DecisionNode::leaf("GOOD"));
  std::vector<Example> mixed{{{{"a", "1"}}, "GOOD"}, {{{"a", "1"}}, "POOR"}, {{{"a", "1"}}, "GOOD"}};
  EXPECT_EQ(edm::id3::id3_train(mixed, {}), DecisionNode::leaf("GOOD"));
  std::vector<Example> tie{{{{"a", "1"}}, "POOR"}, {{{"a", "1"}}, "GOOD"}};
  EXPECT_EQ(edm::id3::id3_train(tie, {}), DecisionNode::leaf("GOOD"));
}

TEST(Train, Errors) {
  const std::vector<Example> none;
  EXPECT_THROW(edm::id3::id3_train(none, {"a"}), edm::Error);
  std::vector<Example> ragged{{{{"a", "1"}}, "X"}, {{{"b", "1"}}, "Y"}};
  try {
    edm::id3::id3_train(ragged, {"a"});
    FAIL();
  } catch (const edm::Error& e) {
    EXPECT_EQ(e.code(), edm::ErrorCode::InconsistentSchema);
  }
  EXPECT_THROW(edm::id3::id3_train(table_four(), {"nope"}), edm::Error);
}

TEST(Train, SampleCohort) {
  const auto s = table_four();
  const auto tree = edm::id3::id3_train(s, {"dept", "attendance"});
  check_gain_rule(tree, s, {"dept", "attendance"}, "");
  EXPECT_EQ(tree.attribute, "dept");
  for (const auto& e : s) EXPECT_EQ(edm::id3::predict(tree, e.attributes), e.label);
  EXPECT_EQ(edm::id3::predict(tree, {{"dept", "IT"}, {"attendance", "N"}}), "GOOD");
}

TEST(Train, RandomConsistentSetsFollowGainRule) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t attrs = 1 + rng() % 5;
    const auto s = random_consistent(rng, attrs, 1 + rng() % 120);
    const auto tree = edm::id3::id3_train(s, names(attrs));
    check_gain_rule(tree, s, names(attrs), "");
    EXPECT_TRUE(no_repeats(tree));
    for (const auto& e : s) EXPECT_EQ(edm::id3::predict(tree, e.attributes), e.label);
    auto shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(edm::id3::id3_train(shuffled, names(attrs)), tree);
  }
}

TEST(Predict, LeafFallbackAndMissing) {
  EXPECT_EQ(edm::id3::predict(DecisionNode::leaf("POOR"), {}), "POOR");
  DecisionNode split{"dept", "AVERAGE", {}};
  split.branches.push_back({"ETC", DecisionNode::leaf("POOR")});
  split.branches.push_back({"IT", DecisionNode::leaf("GOOD")});
  EXPECT_EQ(edm::id3::predict(split, {{"dept", "COMP"}}), "AVERAGE");
  EXPECT_EQ(edm::id3::predict(split, {{"dept", "IT"}}), "GOOD");
  try {
    edm::id3::predict(split, {{"attendance", "Y"}});
    FAIL();
  } catch (const edm::Error& e) {
    EXPECT_EQ(e.code(), edm::ErrorCode::MissingAttribute);
  }
}

TEST(Dot, LeafAndSplit) {
  EXPECT_EQ(edm::id3::export_dot(DecisionNode::leaf("GOOD")), "digraph id3 {\n  n0 [label=\"GOOD\", shape=ellipse];\n}\n");
  DecisionNode split{"attendance", "GOOD", {}};
  split.branches.push_back({"N", DecisionNode::leaf("POOR")});
  split.branches.push_back({"Y", DecisionNode::leaf("GOOD")});
  const auto dot = edm::id3::export_dot(split);
  EXPECT_EQ(dot,
            "digraph id3 {\n"
            "  n0 [label=\"attendance\", shape=box];\n"
            "  n0 -> n1 [label=\"N\"];\n"
            "  n1 [label=\"POOR\", shape=ellipse];\n"
            "  n0 -> n2 [label=\"Y\"];\n"
            "  n2 [label=\"GOOD\", shape=ellipse];\n"
            "}\n");
  EXPECT_EQ(dot, edm::id3::export_dot(split));
}

TEST(Dot, EscapesQuotes) {
  EXPECT_NE(edm::id3::export_dot(DecisionNode::leaf("a\"b")).find("a\\\"b"), std::string::npos);
}

TEST(TreeJson, RoundTrip) {
  const auto tree = edm::id3::id3_train(table_four(), {"dept", "attendance"});
  const edm::id3::TreeModel model{{"attendance", "dept"}, tree};
  const auto text = edm::id3::tree_to_json(model);
  const auto back = edm::id3::tree_from_json(text);
  EXPECT_EQ(back.root, tree);
  EXPECT_EQ(back.attributes, model.attributes);
  EXPECT_EQ(edm::id3::tree_to_json(back), text);
  EXPECT_THROW(edm::id3::tree_from_json("{}"), edm::Error);
  EXPECT_THROW(edm::id3::tree_from_json(R"({"format":"edm-id3-tree","version":9,"attributes":[],"root":{}})"), edm::Error);
}

TEST(StudentExamples, MarksAttributeIsTheBand) {
  const std::vector<edm::ClassificationRow> rows{{"1", "IT", "Y", 450, edm::Performance::Good}};
  const auto ex = edm::id3::student_examples(rows);
  EXPECT_EQ(ex[0].label, "GOOD");
  EXPECT_EQ(ex[0].attributes.at("marks"), "GOOD");
  EXPECT_EQ(ex[0].attributes.at("dept"), "IT");
}

}  // namespace
