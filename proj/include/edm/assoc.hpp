#pragma once

// Apriori frequent-itemset mining and support/confidence association rules.
//
// Itemsets are sorted, duplicate-free vectors. Support is count / |D| where
// |D| counts every transaction, including empty ones.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "edm/csv.hpp"
#include "edm/error.hpp"
#include "edm/ids.hpp"
#include "edm/model.hpp"

namespace edm::assoc {

template <class Item>
using Itemset = std::vector<Item>;

template <class Item>
struct Transaction {
  std::string owner_id;
  Itemset<Item> items;
};

template <class Item>
Transaction<Item> make_transaction(std::string owner_id, std::vector<Item> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return {std::move(owner_id), std::move(items)};
}

template <class Item>
struct ItemsetSupport {
  Itemset<Item> items;
  std::size_t count = 0;
  double support = 0.0;

  friend bool operator==(const ItemsetSupport&, const ItemsetSupport&) = default;
};

struct MiningParams {
  /// Absent means support is ignored: every itemset occurring at least once
  /// (up to max_itemset_size) is enumerated.
  std::optional<double> minsup;
  double minconf = 0.0;
  std::size_t max_itemset_size = 2;

  void validate() const {
    if (minsup && !(*minsup >= 0.0 && *minsup <= 1.0)) throw Error(ErrorCode::InvalidArgument, "minsup must lie in [0,1]");
    if (!(minconf >= 0.0 && minconf <= 1.0)) throw Error(ErrorCode::InvalidArgument, "minconf must lie in [0,1]");
    if (max_itemset_size < 2) throw Error(ErrorCode::InvalidArgument, "max_itemset_size must be at least 2");
  }
};

template <class Item>
struct Rule {
  Itemset<Item> antecedent;
  Itemset<Item> consequent;
  std::size_t count = 0;             // transactions containing X u Y
  std::size_t antecedent_count = 0;  // transactions containing X
  double support = 0.0;
  double confidence = 0.0;
};

/// One transaction per student holding the subjects they passed, in student-id
/// order. Students who passed nothing get an empty transaction.
inline std::vector<Transaction<SubjectId>> build_transactions(const PassTable& pt) {
  std::vector<Transaction<SubjectId>> out;
  out.reserve(pt.student_count());
  for (const auto& [student, row] : pt.entries()) {
    Transaction<SubjectId> t{student, {}};
    for (const auto& [subject, passed] : row) {
      if (passed) t.items.push_back(subject);
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace detail {

inline bool meets_minsup(std::size_t count, std::size_t db_size, const std::optional<double>& minsup) {
  if (count == 0) return false;
  if (!minsup) return true;
  return static_cast<double>(count) / static_cast<double>(db_size) >= *minsup;
}

/// Joins frequent (k-1)-itemsets sharing their first k-2 items and prunes any
/// candidate with an infrequent (k-1)-subset.
template <class Item>
std::vector<Itemset<Item>> next_candidates(const std::vector<Itemset<Item>>& frequent) {
  std::vector<Itemset<Item>> candidates;
  const auto is_frequent = [&](const Itemset<Item>& s) {
    return std::binary_search(frequent.begin(), frequent.end(), s);
  };
  for (std::size_t a = 0; a < frequent.size(); ++a) {
    for (std::size_t b = a + 1; b < frequent.size(); ++b) {
      const auto& x = frequent[a];
      const auto& y = frequent[b];
      if (!std::equal(x.begin(), x.end() - 1, y.begin(), y.end() - 1)) break;  // sorted: prefix groups are contiguous
      Itemset<Item> cand = x;
      cand.push_back(y.back());
      bool all_frequent = true;
      Itemset<Item> subset;
      for (std::size_t drop = 0; drop + 2 < cand.size() && all_frequent; ++drop) {
        subset.clear();
        for (std::size_t i = 0; i < cand.size(); ++i) {
          if (i != drop) subset.push_back(cand[i]);
        }
        all_frequent = is_frequent(subset);
      }
      if (all_frequent) candidates.push_back(std::move(cand));
    }
  }
  return candidates;
}

}  // namespace detail

/// Level-wise Apriori. Returns every itemset of size <= max_itemset_size that
/// occurs at least once and meets minsup, ordered by size then items.
template <class Item>
std::vector<ItemsetSupport<Item>> apriori(std::span<const Transaction<Item>> db, const MiningParams& params) {
  params.validate();
  if (db.empty()) throw Error(ErrorCode::EmptyDatabase, "no transactions");
  const std::size_t n = db.size();
  const auto support_of = [n](std::size_t count) { return static_cast<double>(count) / static_cast<double>(n); };

  std::vector<ItemsetSupport<Item>> result;

  std::map<Item, std::size_t> singles;
  for (const auto& t : db) {
    for (const auto& item : t.items) ++singles[item];
  }
  std::vector<Itemset<Item>> frequent;
  for (const auto& [item, count] : singles) {
    if (detail::meets_minsup(count, n, params.minsup)) {
      frequent.push_back({item});
      result.push_back({{item}, count, support_of(count)});
    }
  }

  for (std::size_t k = 2; k <= params.max_itemset_size && !frequent.empty(); ++k) {
    auto candidates = detail::next_candidates(frequent);
    std::vector<std::size_t> counts(candidates.size(), 0);
    for (const auto& t : db) {
      if (t.items.size() < k) continue;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (std::includes(t.items.begin(), t.items.end(), candidates[c].begin(), candidates[c].end())) ++counts[c];
      }
    }
    frequent.clear();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (detail::meets_minsup(counts[c], n, params.minsup)) {
        result.push_back({candidates[c], counts[c], support_of(counts[c])});
        frequent.push_back(std::move(candidates[c]));
      }
    }
  }
  return result;
}

template <class Item>
std::vector<ItemsetSupport<Item>> apriori(const std::vector<Transaction<Item>>& db, const MiningParams& params) {
  return apriori(std::span<const Transaction<Item>>(db), params);
}

/// Emits every rule X -> Y with X u Y an enumerated itemset and
/// confidence >= minconf, sorted by confidence desc, support desc, then
/// antecedent and consequent lexicographically.
template <class Item>
std::vector<Rule<Item>> generate_rules(std::span<const ItemsetSupport<Item>> itemsets, std::size_t db_size, double minconf) {
  if (db_size == 0) throw Error(ErrorCode::EmptyDatabase, "database size is zero");
  if (!(minconf >= 0.0 && minconf <= 1.0)) throw Error(ErrorCode::InvalidArgument, "minconf must lie in [0,1]");
  std::map<Itemset<Item>, std::size_t> counts;
  for (const auto& s : itemsets) counts.emplace(s.items, s.count);

  std::vector<Rule<Item>> rules;
  for (const auto& s : itemsets) {
    const std::size_t k = s.items.size();
    if (k < 2) continue;
    if (k >= 63) throw Error(ErrorCode::InvalidArgument, "itemset too large for rule enumeration");
    const std::uint64_t full = (std::uint64_t{1} << k) - 1;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      Rule<Item> rule;
      for (std::size_t i = 0; i < k; ++i) {
        ((mask >> i) & 1U ? rule.antecedent : rule.consequent).push_back(s.items[i]);
      }
      const auto it = counts.find(rule.antecedent);
      if (it == counts.end() || it->second == 0) {
        throw Error(ErrorCode::MissingSubsetSupport, "no support recorded for an antecedent subset");
      }
      rule.count = s.count;
      rule.antecedent_count = it->second;
      rule.support = static_cast<double>(s.count) / static_cast<double>(db_size);
      rule.confidence = static_cast<double>(s.count) / static_cast<double>(it->second);
      if (rule.confidence >= minconf) rules.push_back(std::move(rule));
    }
  }
  std::sort(rules.begin(), rules.end(), [](const Rule<Item>& a, const Rule<Item>& b) {
    // Exact comparison of count ratios.
    const auto lhs = static_cast<unsigned __int128>(a.count) * b.antecedent_count;
    const auto rhs = static_cast<unsigned __int128>(b.count) * a.antecedent_count;
    if (lhs != rhs) return lhs > rhs;
    if (a.count != b.count) return a.count > b.count;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });
  return rules;
}

template <class Item>
std::vector<Rule<Item>> generate_rules(const std::vector<ItemsetSupport<Item>>& itemsets, std::size_t db_size, double minconf) {
  return generate_rules(std::span<const ItemsetSupport<Item>>(itemsets), db_size, minconf);
}

/// Who counts as the denominator of a subject's pass rate.
enum class PassRateScope {
  AllStudents,  // every student in the pass table
  Enrolled,     // students with a pass/fail entry for that subject
};

/// Unweighted mean over catalog subjects of (students passing) / (students in
/// scope). Under Enrolled scope, subjects nobody took are left out of the mean.
inline double average_pass_rate_minconf(const PassTable& pt, const Catalog& catalog,
                                        PassRateScope scope = PassRateScope::AllStudents) {
  if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "catalog has no subjects");
  if (pt.student_count() == 0) throw Error(ErrorCode::EmptyDatabase, "no students");
  std::map<SubjectId, std::pair<std::size_t, std::size_t>> tally;  // passed, enrolled
  for (const auto& [_, row] : pt.entries()) {
    for (const auto& [subject, passed] : row) {
      auto& t = tally[subject];
      t.first += passed ? 1 : 0;
      t.second += 1;
    }
  }
  double sum = 0.0;
  std::size_t subjects = 0;
  for (const auto& id : catalog.ids()) {
    const auto it = tally.find(id);
    const std::size_t passed = it == tally.end() ? 0 : it->second.first;
    const std::size_t denom = scope == PassRateScope::AllStudents ? pt.student_count()
                                                                  : (it == tally.end() ? 0 : it->second.second);
    if (denom == 0) continue;
    sum += static_cast<double>(passed) / static_cast<double>(denom);
    ++subjects;
  }
  if (subjects == 0) throw Error(ErrorCode::EmptyCatalog, "no catalog subject has enrolled students");
  return sum / static_cast<double>(subjects);
}

using SubjectPair = std::pair<SubjectId, SubjectId>;

struct CandidateSearch {
  double minconf = 0.0;
  bool minconf_overridden = false;
  std::vector<Rule<SubjectId>> rules;  // every 1->1 rule meeting minconf
  std::vector<SubjectPair> pairs;      // unordered, first < second, sorted
};

/// Confidence-only selection of possibly related subject pairs: a pair is kept
/// when i -> j or j -> i reaches minconf (the average pass rate unless
/// overridden). Support is not used.
inline CandidateSearch find_candidates(std::span<const Transaction<SubjectId>> db, const PassTable& pt, const Catalog& catalog,
                                       std::optional<double> minconf_override = std::nullopt,
                                       PassRateScope scope = PassRateScope::AllStudents) {
  CandidateSearch out;
  if (minconf_override) {
    out.minconf = *minconf_override;
    out.minconf_overridden = true;
  } else {
    out.minconf = average_pass_rate_minconf(pt, catalog, scope);
  }
  MiningParams params{std::nullopt, out.minconf, 2};
  const auto itemsets = apriori(db, params);
  out.rules = generate_rules(std::span<const ItemsetSupport<SubjectId>>(itemsets), db.size(), out.minconf);
  std::set<SubjectPair> pairs;
  for (const auto& r : out.rules) {
    const auto& a = r.antecedent.front();
    const auto& b = r.consequent.front();
    pairs.insert(a < b ? SubjectPair{a, b} : SubjectPair{b, a});
  }
  out.pairs.assign(pairs.begin(), pairs.end());
  return out;
}

inline std::vector<SubjectPair> candidate_pairs(std::span<const Transaction<SubjectId>> db, const PassTable& pt, const Catalog& catalog) {
  return find_candidates(db, pt, catalog).pairs;
}

template <class Item>
std::string join_items(const Itemset<Item>& items, char sep = ' ') {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << sep;
    os << items[i];
  }
  return os.str();
}

inline constexpr std::string_view kRulesHeader = "antecedent,consequent,support,confidence";

/// Rules report: multi-item sides are space separated.
template <class Item>
std::string write_rules(std::span<const Rule<Item>> rules) {
  std::ostringstream os;
  os << kRulesHeader << '\n';
  for (const auto& r : rules) {
    os << join_items(r.antecedent) << ',' << join_items(r.consequent) << ',' << csv::fixed6(r.support) << ','
       << csv::fixed6(r.confidence) << '\n';
  }
  return os.str();
}

template <class Item>
std::string write_rules(const std::vector<Rule<Item>>& rules) {
  return write_rules(std::span<const Rule<Item>>(rules));
}

}  // namespace edm::assoc
