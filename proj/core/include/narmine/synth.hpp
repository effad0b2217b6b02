#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "narmine/corpus.hpp"

namespace nm {

/// Whenever the full lhs is injected or present, rhs is added with
/// probability `conditional`.
struct PlantedRule {
  std::vector<CategoryId> lhs;
  std::vector<CategoryId> rhs;
  double lhsRate = 0.0;      // chance of injecting the whole lhs
  double conditional = 1.0;  // chance of adding rhs when lhs is present
};

struct SynthSpec {
  CategoryVocabulary vocabulary;
  std::uint64_t n = 0;
  std::vector<double> baseRates;  // one per category
  std::vector<PlantedRule> planted;
  std::uint64_t seed = 0;

  /// Throws ConfigError on a rate outside [0,1], n == 0, overlapping
  /// lhs/rhs, empty sides, or a wrong baseRates length.
  void validate() const;
};

/// JSON: {"categories":[names], "n", "seed", "baseRates":{name: rate},
/// "planted":[{"lhs":[names], "rhs":[names], "lhsRate", "conditional"}]}.
/// Categories missing from baseRates get rate 0.
SynthSpec parse_synth_spec(std::string_view text,
                           std::string_view source = "<synth>");

/// Draws n transactions from one SplitMix64 stream seeded with spec.seed.
/// For each transaction, in this order:
///   1. for every category in id order: include it if uniform() < baseRate;
///   2. for every planted rule in order: add the lhs if uniform() < lhsRate;
///   3. repeat passes over the planted rules in order until nothing changes:
///      a rule not yet triggered whose lhs is now contained is triggered
///      and adds its rhs if uniform() < conditional.
/// Each rule triggers at most once per transaction, so with conditional = 1
/// every transaction containing an lhs also contains its rhs. Image ids are
/// "syn" followed by the zero-padded 1-based index.
TransactionSet generate(const SynthSpec& spec);

/// Closed-form P(item in t) when every planted rule is disjoint from all the
/// others (no item shared between two rules). Then
///   item in lhs of r:  1 - (1 - b)(1 - lhsRate)
///   item in rhs of r:  1 - (1 - b)(1 - conditional * pL),
///                      pL = 1 - (1 - lhsRate)(1 - prod of lhs base rates)
///   otherwise:         b
/// Returns nullopt when rules share items.
std::optional<double> expected_item_support(const SynthSpec& spec,
                                            CategoryId item);

}  // namespace nm
