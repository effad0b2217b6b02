#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "narmine/corpus.hpp"

namespace nm {

struct Itemset {
  std::vector<CategoryId> items;  // sorted ascending, unique, non-empty
  std::uint64_t count = 0;        // supporting transactions

  friend bool operator==(const Itemset&, const Itemset&) = default;
};

/// lhs -> rhs with metrics derived from exact counts. Rules loaded from a
/// published table carry n == 0 and only the metric fields; a metric that is
/// unknown is NaN.
struct AssociationRule {
  Itemset lhs;
  Itemset rhs;
  std::uint64_t count = 0;  // transactions containing lhs and rhs
  std::uint64_t n = 0;
  double support = 0.0;
  double confidence = 0.0;
  double lift = 0.0;

  bool has_counts() const noexcept { return n != 0; }
};

struct MiningParams {
  double minSupport = 0.01;
  double minConfidence = 0.9;
  std::size_t maxItemsetLen = 10;
  std::size_t maxRhsLen = 1;
  /// Threads used for candidate counting. Results do not depend on it.
  std::size_t workers = 1;

  /// Throws ConfigError for out-of-range values.
  void validate() const;
};

/// Per-item transaction bitmaps. Bit t of item i is set when transaction t
/// contains i; itemset supports are AND-popcounts over these rows.
class ItemBitmaps {
 public:
  explicit ItemBitmaps(const TransactionSet& ts);

  std::size_t words() const noexcept { return words_; }
  std::size_t items() const noexcept { return items_; }
  std::span<const std::uint64_t> row(CategoryId item) const noexcept {
    return {bits_.data() + static_cast<std::size_t>(item) * words_, words_};
  }
  std::uint64_t count(CategoryId item) const noexcept;
  /// Items must be valid and non-empty.
  std::uint64_t count(std::span<const CategoryId> items) const;

 private:
  std::size_t words_ = 0;
  std::size_t items_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Number of transactions containing every item. Throws ConfigError for an
/// empty itemset and InvariantError for an index outside the vocabulary.
std::uint64_t support_count(std::span<const CategoryId> itemset,
                            const TransactionSet& ts);

/// Level-wise Apriori. Returns every itemset of length <= maxItemsetLen with
/// count / N >= minSupport, sorted by (length, items).
std::vector<Itemset> frequent_itemsets(const TransactionSet& ts,
                                       const MiningParams& params);

/// Rules X -> Y for every frequent Z = X + Y with |Z| >= 2, 1 <= |Y| <=
/// maxRhsLen and confidence >= minConfidence. Throws InvariantError when a
/// supplied count disagrees with ts or a needed subset is missing.
std::vector<AssociationRule> generate_rules(std::span<const Itemset> frequents,
                                            const TransactionSet& ts,
                                            const MiningParams& params);

/// Metrics of an arbitrary rule counted directly on ts.
AssociationRule make_rule(std::vector<CategoryId> lhs,
                          std::vector<CategoryId> rhs, const TransactionSet& ts);

/// Strict weak order: confidence desc, lift desc, support desc, then lhs and
/// rhs item indices lexicographically.
bool rule_precedes(const AssociationRule& a, const AssociationRule& b);
std::vector<AssociationRule> rank_rules(std::vector<AssociationRule> rules);

/// Table-layout strings for one rule.
struct RuleRow {
  std::string lhs;
  std::string rhs;
  std::string support;     // `decimals` places
  std::string confidence;  // `decimals` places, empty when unknown
  std::string lift;        // `decimals - 1` places
};
RuleRow format_rule_row(const AssociationRule& rule,
                        const CategoryVocabulary& vocab, int decimals = 4);

/// "{a,b}"
std::string format_itemset(std::span<const CategoryId> items,
                           const CategoryVocabulary& vocab);
/// "{a,b} → {c}"
std::string format_rule(const AssociationRule& rule,
                        const CategoryVocabulary& vocab);

/// Rule export: `ID LHS RHS SUPPORT CONFIDENCE LIFT`, tab separated, 1-based
/// IDs in the given order.
std::string write_rules_table(std::span<const AssociationRule> rules,
                              const CategoryVocabulary& vocab);
/// `ID ITEMSET COUNT SUPPORT`, tab separated.
std::string write_itemsets_table(std::span<const Itemset> itemsets,
                                 const CategoryVocabulary& vocab,
                                 std::uint64_t n);
/// Reads the LHS/RHS columns of a rules table and recounts every metric on
/// ts. The printed metric columns are ignored.
std::vector<AssociationRule> parse_rules_table(
    std::string_view text, const TransactionSet& ts,
    std::string_view source = "<rules>");

}  // namespace nm
