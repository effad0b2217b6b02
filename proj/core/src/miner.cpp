#include "narmine/miner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "narmine/error.hpp"
#include "narmine/text.hpp"

namespace nm {

void MiningParams::validate() const {
  if (!(minSupport > 0.0 && minSupport <= 1.0))
    throw ConfigError("min support must lie in (0,1]");
  if (!(minConfidence >= 0.0 && minConfidence <= 1.0))
    throw ConfigError("min confidence must lie in [0,1]");
  if (maxItemsetLen < 1) throw ConfigError("max itemset length must be >= 1");
  if (maxRhsLen < 1) throw ConfigError("max rhs length must be >= 1");
  if (workers < 1) throw ConfigError("worker count must be >= 1");
}

// ---- bitmaps ------------------------------------------------------------------

ItemBitmaps::ItemBitmaps(const TransactionSet& ts)
    : words_((ts.n() + 63) / 64),
      items_(ts.vocabulary().size()),
      bits_(words_ * items_, 0) {
  for (std::size_t t = 0; t < ts.n(); ++t)
    for (CategoryId item : ts[t].items())
      bits_[static_cast<std::size_t>(item) * words_ + t / 64] |=
          std::uint64_t{1} << (t % 64);
}

std::uint64_t ItemBitmaps::count(CategoryId item) const noexcept {
  std::uint64_t total = 0;
  for (std::uint64_t w : row(item)) total += static_cast<std::uint64_t>(std::popcount(w));
  return total;
}

std::uint64_t ItemBitmaps::count(std::span<const CategoryId> items) const {
  if (items.empty()) throw InvariantError("ItemBitmaps::count needs at least one item");
  if (items.size() == 1) return count(items[0]);
  std::uint64_t total = 0;
  for (std::size_t w = 0; w < words_; ++w) {
    std::uint64_t word = ~std::uint64_t{0};
    for (CategoryId item : items) word &= bits_[static_cast<std::size_t>(item) * words_ + w];
    total += static_cast<std::uint64_t>(std::popcount(word));
  }
  return total;
}

std::uint64_t support_count(std::span<const CategoryId> itemset,
                            const TransactionSet& ts) {
  if (itemset.empty()) throw ConfigError("support of the empty itemset is not defined");
  for (CategoryId id : itemset)
    if (!ts.vocabulary().contains(id))
      throw InvariantError("item index " + std::to_string(id) + " outside vocabulary");
  std::uint64_t total = 0;
  for (const Transaction& t : ts.transactions()) {
    bool all = true;
    for (CategoryId id : itemset)
      if (!t.contains(id)) {
        all = false;
        break;
      }
    total += all ? 1 : 0;
  }
  return total;
}

// ---- Apriori --------------------------------------------------------------------

namespace {

// Smallest count c with c / n >= minSupport, evaluated exactly as the
// definition is stated so borderline thresholds agree with a direct check.
std::uint64_t min_count(double minSupport, std::uint64_t n) {
  const double nd = static_cast<double>(n);
  auto meets = [&](std::uint64_t c) { return static_cast<double>(c) / nd >= minSupport; };
  auto c = static_cast<std::uint64_t>(std::max(0.0, std::floor(minSupport * nd)));
  while (c > 0 && meets(c - 1)) --c;
  while (c <= n && !meets(c)) ++c;
  return std::max<std::uint64_t>(c, 1);
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  constexpr std::size_t kMinPerWorker = 256;
  workers = std::min(workers, std::max<std::size_t>(1, count / kMinPerWorker));
  if (workers <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : threads) t.join();
}

// One Apriori level: sorted itemsets of equal length plus their bitmaps.
struct Level {
  std::vector<Itemset> sets;
  std::vector<std::uint64_t> bits;  // sets.size() * words

  std::span<const std::uint64_t> row(std::size_t i, std::size_t words) const {
    return {bits.data() + i * words, words};
  }
};

bool contains_sorted(const std::vector<Itemset>& sets,
                     std::span<const CategoryId> items) {
  auto it = std::lower_bound(sets.begin(), sets.end(), items,
                             [](const Itemset& s, std::span<const CategoryId> key) {
                               return std::lexicographical_compare(
                                   s.items.begin(), s.items.end(), key.begin(), key.end());
                             });
  return it != sets.end() && std::equal(it->items.begin(), it->items.end(),
                                        items.begin(), items.end());
}

struct Candidate {
  std::uint32_t left;   // index into previous level
  std::uint32_t right;  // index into previous level
};

}  // namespace

std::vector<Itemset> frequent_itemsets(const TransactionSet& ts,
                                       const MiningParams& params) {
  params.validate();
  std::vector<Itemset> result;
  if (ts.n() == 0) return result;

  const ItemBitmaps bitmaps(ts);
  const std::size_t words = bitmaps.words();
  const std::uint64_t threshold = min_count(params.minSupport, ts.n());

  Level level;
  for (CategoryId item = 0; item < bitmaps.items(); ++item) {
    const std::uint64_t c = bitmaps.count(item);
    if (c < threshold) continue;
    level.sets.push_back({{item}, c});
    auto row = bitmaps.row(item);
    level.bits.insert(level.bits.end(), row.begin(), row.end());
  }

  for (std::size_t k = 2;; ++k) {
    result.insert(result.end(), level.sets.begin(), level.sets.end());
    if (k > params.maxItemsetLen || level.sets.size() < 2) break;

    // Join pairs sharing a (k-2)-prefix, then prune by the (k-1)-subsets that
    // drop one of the first k-2 items (the other two are the parents).
    std::vector<Candidate> candidates;
    std::vector<CategoryId> probe(k - 1);
    const auto& prev = level.sets;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const auto& a = prev[i].items;
      for (std::size_t j = i + 1; j < prev.size(); ++j) {
        const auto& b = prev[j].items;
        if (!std::equal(a.begin(), a.end() - 1, b.begin())) break;
        bool keep = true;
        for (std::size_t drop = 0; drop + 2 < k && keep; ++drop) {
          std::size_t p = 0;
          for (std::size_t q = 0; q < a.size(); ++q)
            if (q != drop) probe[p++] = a[q];
          probe[p] = b.back();
          keep = contains_sorted(prev, probe);
        }
        if (keep)
          candidates.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      }
    }
    if (candidates.empty()) break;

    std::vector<std::uint64_t> counts(candidates.size(), 0);
    parallel_for(candidates.size(), params.workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t c = begin; c < end; ++c) {
        const auto ra = level.row(candidates[c].left, words);
        const auto rb = level.row(candidates[c].right, words);
        std::uint64_t total = 0;
        for (std::size_t w = 0; w < words; ++w)
          total += static_cast<std::uint64_t>(std::popcount(ra[w] & rb[w]));
        counts[c] = total;
      }
    });

    Level next;
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (counts[c] < threshold) continue;
      std::vector<CategoryId> items = prev[candidates[c].left].items;
      items.push_back(prev[candidates[c].right].items.back());
      next.sets.push_back({std::move(items), counts[c]});
      kept.push_back(c);
    }
    if (k < params.maxItemsetLen) {
      next.bits.assign(kept.size() * words, 0);
      parallel_for(kept.size(), params.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          const auto ra = level.row(candidates[kept[s]].left, words);
          const auto rb = level.row(candidates[kept[s]].right, words);
          std::uint64_t* out = next.bits.data() + s * words;
          for (std::size_t w = 0; w < words; ++w) out[w] = ra[w] & rb[w];
        }
      });
    }
    level = std::move(next);
    if (level.sets.empty()) break;
  }
  return result;
}

// ---- rules --------------------------------------------------------------------------

namespace {

void fill_metrics(AssociationRule& rule) {
  const auto n = static_cast<double>(rule.n);
  rule.support = static_cast<double>(rule.count) / n;
  rule.confidence = static_cast<double>(rule.count) / static_cast<double>(rule.lhs.count);
  __extension__ typedef unsigned __int128 u128;
  const u128 num = static_cast<u128>(rule.count) * rule.n;
  const u128 den = static_cast<u128>(rule.lhs.count) * rule.rhs.count;
  constexpr u128 kExact = u128{1} << 53;
  if (num < kExact && den < kExact)
    rule.lift = static_cast<double>(num) / static_cast<double>(den);
  else
    rule.lift = rule.confidence / (static_cast<double>(rule.rhs.count) / n);
}

void check_itemset(std::span<const CategoryId> items, const CategoryVocabulary& vocab,
                   const char* what) {
  if (items.empty()) throw InvariantError(std::string(what) + " is empty");
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!vocab.contains(items[i]))
      throw InvariantError(std::string(what) + " has item index outside vocabulary");
    if (i > 0 && items[i - 1] >= items[i])
      throw InvariantError(std::string(what) + " is not sorted and duplicate-free");
  }
}

}  // namespace

AssociationRule make_rule(std::vector<CategoryId> lhs, std::vector<CategoryId> rhs,
                          const TransactionSet& ts) {
  std::sort(lhs.begin(), lhs.end());
  lhs.erase(std::unique(lhs.begin(), lhs.end()), lhs.end());
  std::sort(rhs.begin(), rhs.end());
  rhs.erase(std::unique(rhs.begin(), rhs.end()), rhs.end());
  check_itemset(lhs, ts.vocabulary(), "rule lhs");
  check_itemset(rhs, ts.vocabulary(), "rule rhs");
  std::vector<CategoryId> both;
  std::set_union(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(), std::back_inserter(both));
  if (both.size() != lhs.size() + rhs.size())
    throw InvariantError("rule lhs and rhs overlap");
  if (ts.n() == 0) throw InvariantError("rule metrics need at least one transaction");

  const ItemBitmaps bitmaps(ts);
  AssociationRule rule;
  rule.lhs = {std::move(lhs), 0};
  rule.rhs = {std::move(rhs), 0};
  rule.lhs.count = bitmaps.count(rule.lhs.items);
  rule.rhs.count = bitmaps.count(rule.rhs.items);
  rule.count = bitmaps.count(both);
  rule.n = ts.n();
  if (rule.lhs.count == 0)
    throw InvariantError("rule lhs never occurs; confidence is undefined");
  fill_metrics(rule);
  return rule;
}

std::vector<AssociationRule> generate_rules(std::span<const Itemset> frequents,
                                            const TransactionSet& ts,
                                            const MiningParams& params) {
  params.validate();
  std::vector<AssociationRule> rules;
  if (frequents.empty()) return rules;
  if (ts.n() == 0) throw InvariantError("frequent itemsets given for an empty transaction set");

  const ItemBitmaps bitmaps(ts);
  std::map<std::vector<CategoryId>, std::uint64_t> counts;
  for (const Itemset& z : frequents) {
    check_itemset(z.items, ts.vocabulary(), "frequent itemset");
    const std::uint64_t actual = bitmaps.count(z.items);
    if (actual != z.count)
      throw InvariantError("frequent itemset " + format_itemset(z.items, ts.vocabulary()) +
                           " claims count " + std::to_string(z.count) + " but ts has " +
                           std::to_string(actual));
    counts.emplace(z.items, z.count);
  }
  auto count_of = [&](const std::vector<CategoryId>& items, bool mustExist) {
    if (auto it = counts.find(items); it != counts.end()) return it->second;
    if (mustExist)
      throw InvariantError("antecedent " + format_itemset(items, ts.vocabulary()) +
                           " missing from the frequent itemsets");
    return bitmaps.count(items);
  };

  std::vector<std::size_t> pick;
  for (const Itemset& z : frequents) {
    const std::size_t size = z.items.size();
    if (size < 2) continue;
    const std::size_t maxRhs = std::min(params.maxRhsLen, size - 1);
    for (std::size_t r = 1; r <= maxRhs; ++r) {
      // Positions of the rhs, enumerated as r-combinations in lexicographic order.
      pick.resize(r);
      for (std::size_t i = 0; i < r; ++i) pick[i] = i;
      for (;;) {
        AssociationRule rule;
        rule.count = z.count;
        rule.n = ts.n();
        std::size_t p = 0;
        for (std::size_t i = 0; i < size; ++i) {
          if (p < r && pick[p] == i) {
            rule.rhs.items.push_back(z.items[i]);
            ++p;
          } else {
            rule.lhs.items.push_back(z.items[i]);
          }
        }
        rule.lhs.count = count_of(rule.lhs.items, true);
        if (static_cast<double>(rule.count) / static_cast<double>(rule.lhs.count) >=
            params.minConfidence) {
          rule.rhs.count = count_of(rule.rhs.items, false);
          fill_metrics(rule);
          rules.push_back(std::move(rule));
        }
        // Advance to the next combination.
        std::size_t i = r;
        while (i > 0 && pick[i - 1] == size - r + (i - 1)) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < r; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
  }
  return rules;
}

namespace {

double sort_key(double metric) {
  return std::isnan(metric) ? -std::numeric_limits<double>::infinity() : metric;
}

}  // namespace

bool rule_precedes(const AssociationRule& a, const AssociationRule& b) {
  const double ca = sort_key(a.confidence), cb = sort_key(b.confidence);
  if (ca != cb) return ca > cb;
  const double la = sort_key(a.lift), lb = sort_key(b.lift);
  if (la != lb) return la > lb;
  const double sa = sort_key(a.support), sb = sort_key(b.support);
  if (sa != sb) return sa > sb;
  if (a.lhs.items != b.lhs.items) return a.lhs.items < b.lhs.items;
  return a.rhs.items < b.rhs.items;
}

std::vector<AssociationRule> rank_rules(std::vector<AssociationRule> rules) {
  std::stable_sort(rules.begin(), rules.end(), rule_precedes);
  return rules;
}

// ---- formatting -----------------------------------------------------------------------

std::string format_itemset(std::span<const CategoryId> items,
                           const CategoryVocabulary& vocab) {
  std::string out = "{";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += vocab.name(items[i]);
  }
  out += '}';
  return out;
}

std::string format_rule(const AssociationRule& rule, const CategoryVocabulary& vocab) {
  return format_itemset(rule.lhs.items, vocab) + " → " +
         format_itemset(rule.rhs.items, vocab);
}

RuleRow format_rule_row(const AssociationRule& rule, const CategoryVocabulary& vocab,
                        int decimals) {
  RuleRow row;
  row.lhs = format_itemset(rule.lhs.items, vocab);
  row.rhs = format_itemset(rule.rhs.items, vocab);
  const int liftDecimals = std::max(0, decimals - 1);
  __extension__ typedef unsigned __int128 u128;
  const u128 liftNum = static_cast<u128>(rule.count) * rule.n;
  const u128 liftDen = static_cast<u128>(rule.lhs.count) * rule.rhs.count;
  constexpr u128 kMax = std::numeric_limits<std::uint64_t>::max();
  if (rule.has_counts() && rule.lhs.count > 0 && rule.rhs.count > 0 && liftNum <= kMax &&
      liftDen <= kMax) {
    row.support = text::format_ratio(rule.count, rule.n, decimals);
    row.confidence = text::format_ratio(rule.count, rule.lhs.count, decimals);
    row.lift = text::format_ratio(static_cast<std::uint64_t>(liftNum),
                                  static_cast<std::uint64_t>(liftDen), liftDecimals);
    return row;
  }
  auto render = [](double v, int d) { return std::isnan(v) ? std::string() : text::format_fixed(v, d); };
  row.support = render(rule.support, decimals);
  row.confidence = render(rule.confidence, decimals);
  row.lift = render(rule.lift, liftDecimals);
  return row;
}

}  // namespace nm
