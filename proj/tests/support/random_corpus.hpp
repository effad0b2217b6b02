#pragma once

// Randomized inputs for property tests. Uses std::mt19937_64 so that the
// generators stay independent of the library's own PRNG.

#include <random>
#include <string>
#include <vector>

#include "narmine/corpus.hpp"

namespace nm::testing {

inline CategoryVocabulary letters(std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return CategoryVocabulary(std::move(names));
}

/// Up to maxItems categories and maxTransactions rows; each item is present
/// with a per-item probability drawn once per corpus so densities vary.
inline TransactionSet random_transactions(std::mt19937_64& rng, std::size_t maxItems,
                                          std::size_t maxTransactions,
                                          std::size_t minTransactions = 1) {
  std::uniform_int_distribution<std::size_t> itemCount(1, maxItems);
  std::uniform_int_distribution<std::size_t> rowCount(minTransactions, maxTransactions);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t items = itemCount(rng);
  const std::size_t rows = rowCount(rng);
  std::vector<double> density(items);
  for (double& d : density) d = 0.1 + 0.8 * unit(rng);
  std::vector<Transaction> ts;
  for (std::size_t t = 0; t < rows; ++t) {
    std::vector<CategoryId> chosen;
    for (std::size_t i = 0; i < items; ++i)
      if (unit(rng) < density[i]) chosen.push_back(static_cast<CategoryId>(i));
    ts.emplace_back("t" + std::to_string(t), std::move(chosen));
  }
  return TransactionSet(letters(items), std::move(ts));
}

/// Random ground-truth annotations with boxes inside the unit square.
inline std::vector<Annotation> random_annotations(std::mt19937_64& rng, std::size_t vocabSize,
                                                  std::size_t maxCount) {
  std::uniform_int_distribution<std::size_t> count(0, maxCount);
  std::uniform_int_distribution<CategoryId> category(0, static_cast<CategoryId>(vocabSize - 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Annotation> out(count(rng));
  for (Annotation& a : out) {
    a.category = category(rng);
    const double w = 0.01 + 0.5 * unit(rng);
    const double h = 0.01 + 0.5 * unit(rng);
    const double cx = w / 2 + (1 - w) * unit(rng);
    const double cy = h / 2 + (1 - h) * unit(rng);
    a.box = BoundingBox::clamped(cx, cy, w, h);
  }
  return out;
}

}  // namespace nm::testing
