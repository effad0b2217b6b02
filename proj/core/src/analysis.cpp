#include "narmine/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "narmine/error.hpp"
#include "narmine/text.hpp"

namespace nm {

namespace {

std::vector<std::uint64_t> item_counts(const TransactionSet& ts) {
  std::vector<std::uint64_t> counts(ts.vocabulary().size(), 0);
  for (const Transaction& t : ts.transactions())
    for (CategoryId id : t.items()) ++counts[id];
  return counts;
}

}  // namespace

// ---- frequency --------------------------------------------------------------

FrequencyTable frequency_table(const TransactionSet& ts) {
  FrequencyTable table;
  table.n = ts.n();
  const auto counts = item_counts(ts);
  const CategoryVocabulary& vocab = ts.vocabulary();
  for (CategoryId id = 0; id < counts.size(); ++id) {
    if (counts[id] == 0) continue;
    table.rows.push_back({vocab.name(id), id, counts[id],
                          static_cast<double>(counts[id]) / static_cast<double>(table.n)});
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const FrequencyRow& a, const FrequencyRow& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.category < b.category;
            });
  return table;
}

std::string write_frequency_table(const FrequencyTable& table) {
  std::string out = "CATEGORY\tCOUNT\tFRACTION\n";
  for (const FrequencyRow& row : table.rows) {
    out += row.category;
    out += '\t';
    out += std::to_string(row.count);
    out += '\t';
    out += text::format_ratio(row.count, table.n, 4);
    out += '\n';
  }
  return out;
}

// ---- rule graph ---------------------------------------------------------------

const GraphNode* RuleGraph::find_node(std::string_view id) const {
  auto it = std::find_if(nodes_.begin(), nodes_.end(),
                         [&](const GraphNode& n) { return n.nodeId == id; });
  return it == nodes_.end() ? nullptr : &*it;
}

bool RuleGraph::add_node(GraphNode node) {
  if (find_node(node.nodeId) != nullptr) return false;
  nodes_.push_back(std::move(node));
  return true;
}

bool RuleGraph::add_edge(GraphEdge edge) {
  if (edge.lhs.empty() || edge.rhs.empty()) return false;
  for (const auto* side : {&edge.lhs, &edge.rhs})
    for (const std::string& id : *side)
      if (find_node(id) == nullptr) return false;
  for (const GraphEdge& e : edges_)
    if (e.lhs == edge.lhs && e.rhs == edge.rhs) return false;
  edges_.push_back(std::move(edge));
  return true;
}

RuleGraph build_rule_graph(std::span<const AssociationRule> rules,
                           const CategoryVocabulary& vocab,
                           std::span<const double> itemFrequency) {
  RuleGraph graph;
  for (const AssociationRule& rule : rules) {
    GraphEdge edge{{}, {}, rule.support, rule.confidence, rule.lift};
    for (auto [items, names] : {std::pair{&rule.lhs.items, &edge.lhs},
                                std::pair{&rule.rhs.items, &edge.rhs}}) {
      for (CategoryId id : *items) {
        const double frequency = id < itemFrequency.size() ? itemFrequency[id] : 0.0;
        graph.add_node({vocab.name(id), frequency});
        names->push_back(vocab.name(id));
      }
    }
    graph.add_edge(std::move(edge));
  }
  return graph;
}

RuleGraph build_rule_graph(std::span<const AssociationRule> rules,
                           const TransactionSet& ts) {
  const auto counts = item_counts(ts);
  std::vector<double> frequency(counts.size(), 0.0);
  if (ts.n() > 0)
    for (std::size_t i = 0; i < counts.size(); ++i)
      frequency[i] = static_cast<double>(counts[i]) / static_cast<double>(ts.n());
  return build_rule_graph(rules, ts.vocabulary(), frequency);
}

// ---- endpoints ------------------------------------------------------------------

EndpointRanking top_endpoints(std::span<const AssociationRule> rules,
                              const CategoryVocabulary& vocab, std::size_t k) {
  if (k == 0) throw ConfigError("top_endpoints needs k >= 1");
  std::map<std::string, std::size_t> lhs, rhs, any;
  for (const AssociationRule& rule : rules) {
    for (CategoryId id : rule.lhs.items) {
      ++lhs[vocab.name(id)];
      ++any[vocab.name(id)];
    }
    for (CategoryId id : rule.rhs.items) {
      ++rhs[vocab.name(id)];
      ++any[vocab.name(id)];
    }
  }
  auto ranked = [k](const std::map<std::string, std::size_t>& counts) {
    std::vector<EndpointCount> out;
    for (const auto& [name, c] : counts) out.push_back({name, c});
    // std::map iterates by name, so a stable sort by count keeps name order on ties.
    std::stable_sort(out.begin(), out.end(),
                     [](const EndpointCount& a, const EndpointCount& b) { return a.rules > b.rules; });
    if (out.size() > k) out.resize(k);
    return out;
  };
  return {ranked(lhs), ranked(rhs), ranked(any)};
}

// ---- paracoord ------------------------------------------------------------------

ParacoordTable paracoord(std::span<const AssociationRule> rules,
                         const CategoryVocabulary& vocab,
                         std::span<const std::uint64_t> itemWeight) {
  ParacoordTable table;
  for (const AssociationRule& rule : rules)
    table.width = std::max(table.width, rule.lhs.items.size());
  auto weight = [&](CategoryId id) -> std::uint64_t {
    return id < itemWeight.size() ? itemWeight[id] : 0;
  };
  for (const AssociationRule& rule : rules) {
    std::vector<CategoryId> order = rule.lhs.items;
    std::sort(order.begin(), order.end(), [&](CategoryId a, CategoryId b) {
      if (weight(a) != weight(b)) return weight(a) > weight(b);
      return vocab.name(a) < vocab.name(b);
    });
    ParacoordRow row;
    row.positions.reserve(table.width);
    for (CategoryId id : order) row.positions.push_back(vocab.name(id));
    row.positions.resize(table.width);
    row.rhs = rule.rhs.items.size() == 1 ? vocab.name(rule.rhs.items[0])
                                         : format_itemset(rule.rhs.items, vocab);
    row.support = rule.support;
    row.confidence = rule.confidence;
    row.lift = rule.lift;
    table.rows.push_back(std::move(row));
  }
  return table;
}

ParacoordTable paracoord(std::span<const AssociationRule> rules, const TransactionSet& ts) {
  return paracoord(rules, ts.vocabulary(), item_counts(ts));
}

ParacoordTable paracoord(std::span<const AssociationRule> rules,
                         const CategoryVocabulary& vocab) {
  std::vector<std::uint64_t> touched(vocab.size(), 0);
  for (const AssociationRule& rule : rules) {
    for (CategoryId id : rule.lhs.items) ++touched.at(id);
    for (CategoryId id : rule.rhs.items) ++touched.at(id);
  }
  return paracoord(rules, vocab, touched);
}

std::string write_paracoord(const ParacoordTable& table) {
  std::string out;
  for (std::size_t p = 0; p < table.width; ++p) out += "P" + std::to_string(p + 1) + "\t";
  out += "RHS\tSUPPORT\tCONFIDENCE\tLIFT\n";
  auto metric = [](double v, int d) { return std::isnan(v) ? std::string() : text::format_fixed(v, d); };
  for (const ParacoordRow& row : table.rows) {
    for (const std::string& cell : row.positions) {
      out += cell;
      out += '\t';
    }
    out += row.rhs;
    out += '\t' + metric(row.support, 4);
    out += '\t' + metric(row.confidence, 4);
    out += '\t' + metric(row.lift, 3);
    out += '\n';
  }
  return out;
}

// ---- detection evaluation ---------------------------------------------------------

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0 || ih <= 0) return 0.0;
  // Areas from edges, like the intersection, so that iou(a, a) is exactly 1.
  const double inter = iw * ih;
  const double areaA = (a.right() - a.left()) * (a.bottom() - a.top());
  const double areaB = (b.right() - b.left()) * (b.bottom() - b.top());
  const double uni = areaA + areaB - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

namespace {

struct Tally {
  std::uint64_t tp = 0, fp = 0, fn = 0;
};

void match_image(const ImageRecord* gt, const ImageRecord* det, double threshold,
                 const CategoryVocabulary& vocab, std::map<CategoryId, Tally>& tallies) {
  std::map<CategoryId, std::vector<const Annotation*>> truth, found;
  auto check = [&](const Annotation& a, const std::string& id) {
    if (!vocab.contains(a.category))
      throw InvariantError("image '" + id + "': category index " + std::to_string(a.category) +
                           " outside vocabulary");
  };
  if (gt)
    for (const Annotation& a : gt->annotations) {
      check(a, gt->imageId);
      truth[a.category].push_back(&a);
    }
  if (det)
    for (const Annotation& a : det->annotations) {
      check(a, det->imageId);
      found[a.category].push_back(&a);
    }

  for (auto& [category, boxes] : truth) tallies[category].fn += boxes.size();
  for (auto& [category, dets] : found) {
    std::stable_sort(dets.begin(), dets.end(),
                     [](const Annotation* a, const Annotation* b) { return a->score > b->score; });
    Tally& tally = tallies[category];
    static const std::vector<const Annotation*> kNone;
    const auto it = truth.find(category);
    const auto& boxes = it == truth.end() ? kNone : it->second;
    std::vector<bool> used(boxes.size(), false);
    for (const Annotation* d : dets) {
      std::size_t best = boxes.size();
      double bestIou = -1.0;
      for (std::size_t g = 0; g < boxes.size(); ++g) {
        if (used[g]) continue;
        const double overlap = iou(d->box, boxes[g]->box);
        if (overlap > bestIou) {
          bestIou = overlap;
          best = g;
        }
      }
      if (best < boxes.size() && bestIou >= threshold) {
        used[best] = true;
        ++tally.tp;
        --tally.fn;
      } else {
        ++tally.fp;
      }
    }
  }
}

}  // namespace

DetectionEvalReport evaluate_detections(std::span<const ImageRecord> gt,
                                        std::span<const ImageRecord> det,
                                        const CategoryVocabulary& vocab,
                                        double iouThreshold) {
  if (!(iouThreshold >= 0.0 && iouThreshold <= 1.0))
    throw ConfigError("IoU threshold must lie in [0,1]");
  for (const ImageRecord& r : det)
    for (const Annotation& a : r.annotations)
      if (!(a.score >= 0.0 && a.score <= 1.0))
        throw ConfigError("image '" + r.imageId + "': detection score outside [0,1]");

  std::map<std::string, const ImageRecord*> truthById, detById;
  for (const ImageRecord& r : gt)
    if (!truthById.emplace(r.imageId, &r).second)
      throw ConfigError("duplicate ground-truth imageId '" + r.imageId + "'");
  for (const ImageRecord& r : det)
    if (!detById.emplace(r.imageId, &r).second)
      throw ConfigError("duplicate detection imageId '" + r.imageId + "'");

  std::map<CategoryId, Tally> tallies;
  auto run = [&](const ImageRecord* g, const ImageRecord* d) {
    match_image(g, d, iouThreshold, vocab, tallies);
  };
  for (const auto& [id, g] : truthById) {
    auto it = detById.find(id);
    run(g, it == detById.end() ? nullptr : it->second);
  }
  for (const auto& [id, d] : detById)
    if (!truthById.contains(id)) run(nullptr, d);

  DetectionEvalReport report;
  report.iouThreshold = iouThreshold;
  for (const auto& [category, t] : tallies) {
    CategoryEval e;
    e.category = vocab.name(category);
    e.id = category;
    e.truePositives = t.tp;
    e.falsePositives = t.fp;
    e.falseNegatives = t.fn;
    if (t.tp + t.fp > 0)
      e.precision = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
    if (t.tp + t.fn > 0)
      e.recall = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
    report.categories.push_back(std::move(e));
  }
  return report;
}

std::string write_eval_report(const DetectionEvalReport& report) {
  std::string out = "CATEGORY\tTP\tFP\tFN\tPRECISION\tRECALL\n";
  auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? std::string("NA") : text::format_ratio(num, den, 4);
  };
  for (const CategoryEval& e : report.categories) {
    out += e.category + '\t' + std::to_string(e.truePositives) + '\t' +
           std::to_string(e.falsePositives) + '\t' + std::to_string(e.falseNegatives) + '\t' +
           ratio(e.truePositives, e.truePositives + e.falsePositives) + '\t' +
           ratio(e.truePositives, e.truePositives + e.falseNegatives) + '\n';
  }
  return out;
}

}  // namespace nm
