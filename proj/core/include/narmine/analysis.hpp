#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "narmine/corpus.hpp"
#include "narmine/miner.hpp"

namespace nm {

// ---- frequency ------------------------------------------------------------

struct FrequencyRow {
  std::string category;
  CategoryId id = 0;
  std::uint64_t count = 0;  // transactions containing the category
  double fraction = 0.0;    // count / N
};

struct FrequencyTable {
  std::uint64_t n = 0;
  std::vector<FrequencyRow> rows;  // count desc, then name
};

/// Presence counts; categories that never occur are omitted.
FrequencyTable frequency_table(const TransactionSet& ts);
/// `CATEGORY COUNT FRACTION`, tab separated, 4-decimal fractions.
std::string write_frequency_table(const FrequencyTable& table);

// ---- rule graph -----------------------------------------------------------

struct GraphNode {
  std::string nodeId;
  double frequency = 0.0;  // item support
};

struct GraphEdge {
  std::vector<std::string> lhs;
  std::vector<std::string> rhs;
  double support = 0.0;
  double confidence = 0.0;
  double lift = 0.0;
};

/// Item nodes and one edge per rule. Every edge endpoint is a node and no two
/// edges share the same (lhs, rhs).
class RuleGraph {
 public:
  /// Adds or keeps an existing node; returns false when it was present.
  bool add_node(GraphNode node);
  /// Rejects an edge whose (lhs, rhs) already exists or whose endpoints are
  /// not nodes; the graph is left unchanged and false is returned.
  bool add_edge(GraphEdge edge);

  const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  const GraphNode* find_node(std::string_view id) const;

 private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
};

/// Nodes in first-appearance order over the rules (lhs then rhs).
/// itemFrequency[i] is the support of category i.
RuleGraph build_rule_graph(std::span<const AssociationRule> rules,
                           const CategoryVocabulary& vocab,
                           std::span<const double> itemFrequency);
RuleGraph build_rule_graph(std::span<const AssociationRule> rules,
                           const TransactionSet& ts);

/// Graphviz export. Node `width` grows with item support; edge `penwidth`
/// and the red intensity of `color` grow with lift; the edge label carries
/// the rule support. One edge statement per rule, multi-item sides written
/// as `{ "a" "b" }`.
std::string to_dot(const RuleGraph& graph);
/// {"nodes":[{"nodeId","frequency"}],"edges":[{"lhs","rhs","support",
/// "confidence","lift"}]}; unknown metrics are null.
std::string to_json(const RuleGraph& graph);

// ---- endpoints ------------------------------------------------------------

struct EndpointCount {
  std::string category;
  std::size_t rules = 0;
};

struct EndpointRanking {
  std::vector<EndpointCount> antecedents;  // rules with the item in the LHS
  std::vector<EndpointCount> consequents;  // rules with the item in the RHS
  std::vector<EndpointCount> combined;     // rules touching the item at all
};

/// Each list holds at most k entries, by count desc then name. Throws
/// ConfigError when k == 0.
EndpointRanking top_endpoints(std::span<const AssociationRule> rules,
                              const CategoryVocabulary& vocab, std::size_t k);

// ---- parallel coordinates --------------------------------------------------

struct ParacoordRow {
  std::vector<std::string> positions;  // LHS items, padded with ""
  std::string rhs;
  double support = 0.0;
  double confidence = 0.0;
  double lift = 0.0;
};

struct ParacoordTable {
  std::size_t width = 0;  // longest LHS
  std::vector<ParacoordRow> rows;
};

/// One row per rule. LHS items are placed by descending itemWeight, ties by
/// name. A single-item RHS is its bare name, otherwise "{a,b}".
ParacoordTable paracoord(std::span<const AssociationRule> rules,
                         const CategoryVocabulary& vocab,
                         std::span<const std::uint64_t> itemWeight);
/// Weights are the item presence counts of ts.
ParacoordTable paracoord(std::span<const AssociationRule> rules,
                         const TransactionSet& ts);
/// Weights are the number of rules touching each item.
ParacoordTable paracoord(std::span<const AssociationRule> rules,
                         const CategoryVocabulary& vocab);
/// `P1..Pk RHS SUPPORT CONFIDENCE LIFT`, tab separated.
std::string write_paracoord(const ParacoordTable& table);

// ---- detection evaluation ---------------------------------------------------

double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

struct CategoryEval {
  std::string category;
  CategoryId id = 0;
  std::uint64_t truePositives = 0;
  std::uint64_t falsePositives = 0;
  std::uint64_t falseNegatives = 0;
  std::optional<double> precision;  // empty when TP + FP == 0
  std::optional<double> recall;     // empty when TP + FN == 0
};

struct DetectionEvalReport {
  double iouThreshold = 0.5;
  std::vector<CategoryEval> categories;  // categories seen in gt or det, by id
};

/// Greedy matching per image and category: detections in descending score
/// (input order on ties) each take the unused ground-truth box of highest
/// IoU, provided IoU >= iouThreshold. Images only present in det count as
/// all false positives. Throws ConfigError for a score outside [0,1].
DetectionEvalReport evaluate_detections(std::span<const ImageRecord> gt,
                                        std::span<const ImageRecord> det,
                                        const CategoryVocabulary& vocab,
                                        double iouThreshold = 0.5);
/// `CATEGORY TP FP FN PRECISION RECALL`, tab separated, "NA" when undefined.
std::string write_eval_report(const DetectionEvalReport& report);

}  // namespace nm
