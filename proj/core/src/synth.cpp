#include "narmine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "narmine/error.hpp"
#include "narmine/random.hpp"

namespace nm {

namespace {

bool is_rate(double r) { return r >= 0.0 && r <= 1.0; }

}  // namespace

void SynthSpec::validate() const {
  if (n == 0) throw ConfigError("synthetic corpus needs n >= 1");
  if (vocabulary.empty()) throw ConfigError("synthetic corpus needs at least one category");
  if (baseRates.size() != vocabulary.size())
    throw ConfigError("expected " + std::to_string(vocabulary.size()) + " base rates, got " +
                      std::to_string(baseRates.size()));
  for (std::size_t i = 0; i < baseRates.size(); ++i)
    if (!is_rate(baseRates[i]))
      throw ConfigError("base rate of '" + vocabulary.names()[i] + "' outside [0,1]");
  for (std::size_t r = 0; r < planted.size(); ++r) {
    const PlantedRule& rule = planted[r];
    const std::string where = "planted rule " + std::to_string(r + 1);
    if (rule.lhs.empty() || rule.rhs.empty()) throw ConfigError(where + " has an empty side");
    if (!is_rate(rule.lhsRate) || !is_rate(rule.conditional))
      throw ConfigError(where + " has a rate outside [0,1]");
    for (const auto* side : {&rule.lhs, &rule.rhs})
      for (CategoryId id : *side)
        if (!vocabulary.contains(id)) throw ConfigError(where + " uses an unknown category");
    for (CategoryId id : rule.lhs)
      if (std::find(rule.rhs.begin(), rule.rhs.end(), id) != rule.rhs.end())
        throw ConfigError(where + " has overlapping lhs and rhs");
  }
}

SynthSpec parse_synth_spec(std::string_view text, std::string_view source) {
  using json = nlohmann::json;
  const std::string src(source);
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError::at_offset(src, e.byte, e.what());
  }
  auto fail = [&](const std::string& what) { throw ParseError(src, 0, what); };
  auto rate = [&](const json& v, const std::string& what) {
    if (!v.is_number()) fail(what + " must be a number");
    const double r = v.get<double>();
    if (!is_rate(r)) throw ConfigError(src + ": " + what + " = " + std::to_string(r) + " outside [0,1]");
    return r;
  };
  if (!doc.is_object()) fail("synth spec must be an object");

  SynthSpec spec;
  const auto cats = doc.find("categories");
  if (cats == doc.end() || !cats->is_array()) fail("missing \"categories\" array");
  std::vector<std::string> names;
  for (const json& c : *cats) {
    if (!c.is_string()) fail("category names must be strings");
    names.push_back(c.get<std::string>());
  }
  try {
    spec.vocabulary = CategoryVocabulary(std::move(names));
  } catch (const InvariantError& e) {
    fail(e.what());
  }

  const auto n = doc.find("n");
  if (n == doc.end() || !n->is_number_unsigned() || n->get<std::uint64_t>() == 0)
    fail("\"n\" must be a positive integer");
  spec.n = n->get<std::uint64_t>();
  if (const auto seed = doc.find("seed"); seed != doc.end()) {
    if (!seed->is_number_unsigned()) fail("\"seed\" must be a non-negative integer");
    spec.seed = seed->get<std::uint64_t>();
  }

  auto lookup = [&](const json& name, const std::string& where) -> CategoryId {
    if (!name.is_string()) fail(where + ": category names must be strings");
    auto id = spec.vocabulary.find(name.get<std::string>());
    if (!id) fail(where + ": unknown category '" + name.get<std::string>() + "'");
    return *id;
  };

  spec.baseRates.assign(spec.vocabulary.size(), 0.0);
  if (const auto base = doc.find("baseRates"); base != doc.end()) {
    if (!base->is_object()) fail("\"baseRates\" must map category names to rates");
    for (const auto& [name, value] : base->items())
      spec.baseRates[lookup(json(name), "baseRates")] = rate(value, "base rate of '" + name + "'");
  }
  if (const auto planted = doc.find("planted"); planted != doc.end()) {
    if (!planted->is_array()) fail("\"planted\" must be an array");
    for (std::size_t r = 0; r < planted->size(); ++r) {
      const json& p = (*planted)[r];
      const std::string where = "planted[" + std::to_string(r) + "]";
      if (!p.is_object()) fail(where + " must be an object");
      PlantedRule rule;
      for (auto [key, side] : {std::pair{"lhs", &rule.lhs}, std::pair{"rhs", &rule.rhs}}) {
        const auto it = p.find(key);
        if (it == p.end() || !it->is_array()) fail(where + ": missing \"" + key + "\" array");
        for (const json& name : *it) side->push_back(lookup(name, where));
      }
      const auto lhsRate = p.find("lhsRate");
      if (lhsRate == p.end()) fail(where + ": missing \"lhsRate\"");
      rule.lhsRate = rate(*lhsRate, where + ".lhsRate");
      if (const auto cond = p.find("conditional"); cond != p.end())
        rule.conditional = rate(*cond, where + ".conditional");
      spec.planted.push_back(std::move(rule));
    }
  }
  spec.validate();
  return spec;
}

TransactionSet generate(const SynthSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const std::size_t items = spec.vocabulary.size();
  const std::size_t digits = std::to_string(spec.n).size();

  std::vector<Transaction> transactions;
  transactions.reserve(spec.n);
  std::vector<bool> present(items);
  std::vector<bool> triggered(spec.planted.size());
  auto contains_all = [&](const std::vector<CategoryId>& side) {
    return std::all_of(side.begin(), side.end(), [&](CategoryId id) { return present[id]; });
  };

  for (std::uint64_t t = 0; t < spec.n; ++t) {
    for (std::size_t i = 0; i < items; ++i) present[i] = rng.uniform() < spec.baseRates[i];
    for (const PlantedRule& rule : spec.planted)
      if (rng.uniform() < rule.lhsRate)
        for (CategoryId id : rule.lhs) present[id] = true;
    std::fill(triggered.begin(), triggered.end(), false);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t r = 0; r < spec.planted.size(); ++r) {
        const PlantedRule& rule = spec.planted[r];
        if (triggered[r] || !contains_all(rule.lhs)) continue;
        triggered[r] = true;
        changed = true;
        if (rng.uniform() < rule.conditional)
          for (CategoryId id : rule.rhs) present[id] = true;
      }
    }

    std::vector<CategoryId> chosen;
    for (std::size_t i = 0; i < items; ++i)
      if (present[i]) chosen.push_back(static_cast<CategoryId>(i));
    std::string id = std::to_string(t + 1);
    id.insert(0, digits - id.size(), '0');
    transactions.emplace_back("syn" + id, std::move(chosen));
  }
  return TransactionSet(spec.vocabulary, std::move(transactions));
}

std::optional<double> expected_item_support(const SynthSpec& spec, CategoryId item) {
  spec.validate();
  if (!spec.vocabulary.contains(item)) throw ConfigError("unknown category index");
  std::vector<int> owner(spec.vocabulary.size(), -1);
  for (std::size_t r = 0; r < spec.planted.size(); ++r)
    for (const auto* side : {&spec.planted[r].lhs, &spec.planted[r].rhs})
      for (CategoryId id : *side) {
        if (owner[id] >= 0 && owner[id] != static_cast<int>(r)) return std::nullopt;
        owner[id] = static_cast<int>(r);
      }

  const double base = spec.baseRates[item];
  if (owner[item] < 0) return base;
  const PlantedRule& rule = spec.planted[static_cast<std::size_t>(owner[item])];
  if (std::find(rule.lhs.begin(), rule.lhs.end(), item) != rule.lhs.end())
    return 1.0 - (1.0 - base) * (1.0 - rule.lhsRate);
  double lhsByBase = 1.0;
  for (CategoryId id : rule.lhs) lhsByBase *= spec.baseRates[id];
  const double lhsPresent = 1.0 - (1.0 - rule.lhsRate) * (1.0 - lhsByBase);
  return 1.0 - (1.0 - base) * (1.0 - rule.conditional * lhsPresent);
}

}  // namespace nm
