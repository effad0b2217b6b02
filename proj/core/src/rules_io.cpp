#include <string>

#include "narmine/error.hpp"
#include "narmine/miner.hpp"
#include "narmine/text.hpp"

namespace nm {

std::string write_rules_table(std::span<const AssociationRule> rules,
                              const CategoryVocabulary& vocab) {
  std::string out = "ID\tLHS\tRHS\tSUPPORT\tCONFIDENCE\tLIFT\n";
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const RuleRow row = format_rule_row(rules[i], vocab);
    out += std::to_string(i + 1);
    for (const std::string* cell :
         {&row.lhs, &row.rhs, &row.support, &row.confidence, &row.lift}) {
      out += '\t';
      out += *cell;
    }
    out += '\n';
  }
  return out;
}

std::string write_itemsets_table(std::span<const Itemset> itemsets,
                                 const CategoryVocabulary& vocab, std::uint64_t n) {
  std::string out = "ID\tITEMSET\tCOUNT\tSUPPORT\n";
  for (std::size_t i = 0; i < itemsets.size(); ++i) {
    out += std::to_string(i + 1);
    out += '\t';
    out += format_itemset(itemsets[i].items, vocab);
    out += '\t';
    out += std::to_string(itemsets[i].count);
    out += '\t';
    out += text::format_ratio(itemsets[i].count, n, 4);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<CategoryId> parse_braced(std::string_view cell, const CategoryVocabulary& vocab,
                                     const std::string& source, std::size_t line) {
  cell = text::trim(cell);
  if (cell.size() < 2 || cell.front() != '{' || cell.back() != '}')
    throw ParseError(source, line, "itemset '" + std::string(cell) + "' must be written {a,b}");
  std::vector<CategoryId> items;
  for (std::string_view name : text::split(cell.substr(1, cell.size() - 2), ',')) {
    name = text::trim(name);
    if (name.empty()) throw ParseError(source, line, "empty item in itemset");
    auto id = vocab.find(name);
    if (!id) throw ParseError(source, line, "unknown category '" + std::string(name) + "'");
    items.push_back(*id);
  }
  return items;
}

}  // namespace

std::vector<AssociationRule> parse_rules_table(std::string_view text,
                                               const TransactionSet& ts,
                                               std::string_view source) {
  const std::string src(source);
  std::vector<AssociationRule> rules;
  const auto lines = text::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const auto cells = text::split(lines[i], '\t');
    if (i == 0 && text::trim(cells[0]) == "ID") continue;
    if (cells.size() < 3)
      throw ParseError(src, i + 1, "expected columns ID, LHS, RHS, ...");
    auto lhs = parse_braced(cells[1], ts.vocabulary(), src, i + 1);
    auto rhs = parse_braced(cells[2], ts.vocabulary(), src, i + 1);
    try {
      rules.push_back(make_rule(std::move(lhs), std::move(rhs), ts));
    } catch (const InvariantError& e) {
      throw ParseError(src, i + 1, e.what());
    }
  }
  return rules;
}

}  // namespace nm
