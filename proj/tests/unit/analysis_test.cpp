#include <gtest/gtest.h>

#include <json.hpp>
#include <random>

#include "narmine/analysis.hpp"
#include "narmine/error.hpp"
#include "narmine/ingest.hpp"
#include "narmine/synth.hpp"
#include "published_rules.hpp"
#include "random_corpus.hpp"

namespace nm {
namespace {

using Items = std::vector<CategoryId>;

const CategoryVocabulary& fullVocab() {
  static const CategoryVocabulary v = parse_categories(read_file(std::filesystem::path(NARMINE_DATA_DIR) / "categories.txt"));
  return v;
}

TEST(FrequencyTable, PresenceCounts) {
  const auto ts = parse_transactions_table("i1\tperson,mask\ni2\tperson\n");
  const FrequencyTable t = frequency_table(ts);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].category, "person");
  EXPECT_EQ(t.rows[0].count, 2u);
  EXPECT_EQ(t.rows[1].category, "mask");
  EXPECT_DOUBLE_EQ(t.rows[1].fraction, 0.5);
  EXPECT_EQ(write_frequency_table(t), "CATEGORY\tCOUNT\tFRACTION\nperson\t2\t1.0000\nmask\t1\t0.5000\n");
  EXPECT_TRUE(frequency_table(TransactionSet()).rows.empty());
}

TEST(FrequencyTable, MatchesSingletonSupport) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    const auto ts = testing::random_transactions(rng, 10, 80);
    for (const FrequencyRow& row : frequency_table(ts).rows)
      EXPECT_DOUBLE_EQ(row.fraction, static_cast<double>(support_count(Items{row.id}, ts)) /
                                         static_cast<double>(ts.n()));
  }
}

TEST(FrequencyTable, PersonDominatesTableLikeCorpus) {
  const auto spec = parse_synth_spec(read_file(std::filesystem::path(NARMINE_DATA_DIR) / "synth" / "tag_corpus.json"));
  const FrequencyTable t = frequency_table(generate(spec));
  ASSERT_FALSE(t.rows.empty());
  EXPECT_EQ(t.rows[0].category, "person");
  EXPECT_GT(t.rows[0].fraction, 0.55);
}

AssociationRule simple_rule(Items lhs, Items rhs) {
  AssociationRule r;
  r.lhs.items = std::move(lhs);
  r.rhs.items = std::move(rhs);
  r.support = 0.5;
  r.confidence = 1.0;
  r.lift = 2.0;
  return r;
}

TEST(RuleGraph, SingleRule) {
  const CategoryVocabulary v({"a", "b"});
  const std::vector<AssociationRule> rules{simple_rule({0}, {1})};
  const std::vector<double> freq{0.5, 0.75};
  const RuleGraph g = build_rule_graph(rules, v, freq);
  EXPECT_EQ(g.nodes().size(), 2u);
  EXPECT_EQ(g.edges().size(), 1u);
  EXPECT_DOUBLE_EQ(g.find_node("b")->frequency, 0.75);
}

TEST(RuleGraph, DuplicateEdgeRejected) {
  const CategoryVocabulary v({"a", "b"});
  const std::vector<AssociationRule> rules{simple_rule({0}, {1}), simple_rule({0}, {1})};
  const RuleGraph g = build_rule_graph(rules, v, std::vector<double>{0.5, 0.5});
  EXPECT_EQ(g.edges().size(), 1u);
  RuleGraph h = g;
  EXPECT_FALSE(h.add_edge({{"a"}, {"b"}, 0.1, 0.1, 0.1}));
  EXPECT_FALSE(h.add_edge({{"a"}, {"zzz"}, 0.1, 0.1, 0.1}));
  EXPECT_EQ(h.edges().size(), 1u);
}

TEST(RuleGraph, EdgesMatchRulesAndNodesMatchItems) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto ts = testing::random_transactions(rng, 8, 64, 10);
    MiningParams p;
    p.minSupport = 0.2;
    p.minConfidence = 0.5;
    const auto rules = generate_rules(frequent_itemsets(ts, p), ts, p);
    const RuleGraph g = build_rule_graph(rules, ts);
    EXPECT_EQ(g.edges().size(), rules.size());
    std::set<std::string> items;
    for (const auto& r : rules) {
      for (CategoryId id : r.lhs.items) items.insert(ts.vocabulary().name(id));
      for (CategoryId id : r.rhs.items) items.insert(ts.vocabulary().name(id));
    }
    std::set<std::string> nodes;
    for (const auto& n : g.nodes()) nodes.insert(n.nodeId);
    EXPECT_EQ(nodes, items);
  }
}

TEST(RuleGraph, PublishedRulesHubNodes) {
  const auto rules = testing::published_as_rules(fullVocab());
  const std::vector<AssociationRule> first17(rules.begin(), rules.begin() + 17);
  const auto ranking = top_endpoints(first17, fullVocab(), 4);
  std::set<std::string> hubs;
  for (const auto& e : ranking.combined) hubs.insert(e.category);
  EXPECT_EQ(hubs, (std::set<std::string>{"person", "window", "outside", "buildings"}));
  const RuleGraph g = build_rule_graph(first17, fullVocab(), std::vector<double>(64, 0.1));
  EXPECT_EQ(g.edges().size(), 17u);
}

TEST(GraphExport, DotAndJson) {
  const CategoryVocabulary v({"buildings", "street", "outside"});
  const std::vector<AssociationRule> rules{simple_rule({0, 1}, {2})};
  const RuleGraph g = build_rule_graph(rules, v, std::vector<double>{0.1, 0.2, 0.3});
  const std::string dot = to_dot(g);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("{ \"buildings\" \"street\" } -> \"outside\""), std::string::npos);
  EXPECT_NE(dot.find("penwidth="), std::string::npos);
  EXPECT_NE(dot.find("width=0.9000"), std::string::npos);

  const auto doc = nlohmann::json::parse(to_json(g));
  ASSERT_EQ(doc["nodes"].size(), 3u);
  EXPECT_EQ(doc["nodes"][0]["nodeId"], "buildings");
  EXPECT_TRUE(doc["nodes"][0].contains("frequency"));
  const auto& edge = doc["edges"][0];
  for (const char* key : {"lhs", "rhs", "support", "confidence", "lift"}) EXPECT_TRUE(edge.contains(key)) << key;
  EXPECT_EQ(edge["lhs"], nlohmann::json({"buildings", "street"}));

  const auto empty = nlohmann::json::parse(to_json(RuleGraph()));
  EXPECT_TRUE(empty["nodes"].empty());
  EXPECT_TRUE(empty["edges"].empty());
}

TEST(TopEndpoints, CountsAndTies) {
  const CategoryVocabulary v({"a", "b", "c"});
  const std::vector<AssociationRule> rules{simple_rule({0}, {2}), simple_rule({1}, {2})};
  const auto r = top_endpoints(rules, v, 3);
  ASSERT_EQ(r.consequents.size(), 1u);
  EXPECT_EQ(r.consequents[0].category, "c");
  EXPECT_EQ(r.consequents[0].rules, 2u);
  ASSERT_EQ(r.antecedents.size(), 2u);
  EXPECT_EQ(r.antecedents[0].category, "a");  // tie broken by name
  EXPECT_TRUE(top_endpoints(std::vector<AssociationRule>{}, v, 2).combined.empty());
  EXPECT_THROW(top_endpoints(rules, v, 0), ConfigError);
}

TEST(TopEndpoints, PublishedRules) {
  const auto rules = testing::published_as_rules(fullVocab());
  const auto r = top_endpoints(rules, fullVocab(), 4);
  std::set<std::string> combined;
  for (const auto& e : r.combined) combined.insert(e.category);
  EXPECT_EQ(combined, (std::set<std::string>{"person", "window", "outside", "buildings"}));
  EXPECT_EQ(r.combined[0].category, "person");
  EXPECT_EQ(r.consequents[0].category, "person");
  EXPECT_EQ(r.consequents[1].category, "window");
}

TEST(Paracoord, OrdersPadsAndCounts) {
  const CategoryVocabulary v({"x", "y", "z"});
  const std::vector<AssociationRule> rules{simple_rule({0, 1}, {2}), simple_rule({0}, {2})};
  const std::vector<std::uint64_t> weight{5, 9, 1};
  const ParacoordTable t = paracoord(rules, v, weight);
  EXPECT_EQ(t.width, 2u);
  EXPECT_EQ(t.rows[0].positions, (std::vector<std::string>{"y", "x"}));
  EXPECT_EQ(t.rows[1].positions, (std::vector<std::string>{"x", ""}));
  EXPECT_EQ(t.rows[1].rhs, "z");
  EXPECT_EQ(write_paracoord(t),
            "P1\tP2\tRHS\tSUPPORT\tCONFIDENCE\tLIFT\n"
            "y\tx\tz\t0.5000\t1.0000\t2.000\n"
            "x\t\tz\t0.5000\t1.0000\t2.000\n");
  const auto published = paracoord(testing::published_as_rules(fullVocab()), fullVocab());
  EXPECT_EQ(published.rows.size(), 20u);
  EXPECT_EQ(published.width, 4u);
}

BoundingBox box(double cx, double cy, double w, double h) { return BoundingBox{cx, cy, w, h}; }

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(iou(box(0.5, 0.5, 0.2, 0.2), box(0.5, 0.5, 0.2, 0.2)), 1.0);
  EXPECT_DOUBLE_EQ(iou(box(0.2, 0.2, 0.1, 0.1), box(0.8, 0.8, 0.1, 0.1)), 0.0);
  // Halves of the unit square overlapping on a quarter: 0.25 / 0.75.
  EXPECT_NEAR(iou(box(0.25, 0.5, 0.5, 1.0), box(0.5, 0.5, 0.5, 1.0)), 1.0 / 3.0, 1e-12);
}

TEST(Iou, SymmetricBoundedReflexive) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    const auto anns = testing::random_annotations(rng, 1, 2);
    if (anns.size() < 2) continue;
    const double ab = iou(anns[0].box, anns[1].box);
    EXPECT_DOUBLE_EQ(ab, iou(anns[1].box, anns[0].box));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_DOUBLE_EQ(iou(anns[0].box, anns[0].box), 1.0);
  }
}

Annotation det(CategoryId c, BoundingBox b, double score) {
  return {c, b, score, AnnotationSource::detector};
}
Annotation truth(CategoryId c, BoundingBox b) { return {c, b, 1.0, AnnotationSource::groundTruth}; }

TEST(EvaluateDetections, PerfectAndEmpty) {
  const CategoryVocabulary v({"person"});
  const std::vector<ImageRecord> gt{{"i", {truth(0, box(0.5, 0.5, 0.2, 0.2))}}};
  const std::vector<ImageRecord> perfect{{"i", {det(0, box(0.5, 0.5, 0.2, 0.2), 0.9)}}};
  auto r = evaluate_detections(gt, perfect, v);
  ASSERT_EQ(r.categories.size(), 1u);
  EXPECT_EQ(*r.categories[0].precision, 1.0);
  EXPECT_EQ(*r.categories[0].recall, 1.0);

  r = evaluate_detections(gt, {}, v);
  EXPECT_FALSE(r.categories[0].precision.has_value());
  EXPECT_EQ(*r.categories[0].recall, 0.0);
  EXPECT_EQ(write_eval_report(r), "CATEGORY\tTP\tFP\tFN\tPRECISION\tRECALL\nperson\t0\t0\t1\tNA\t0.0000\n");
}

TEST(EvaluateDetections, HandTrace) {
  // det is the first gt box shifted by 0.125: IoU = 0.375 / 0.625 = 0.6.
  const CategoryVocabulary v({"person"});
  const std::vector<ImageRecord> gt{{"i", {truth(0, box(0.25, 0.5, 0.5, 1.0)), truth(0, box(0.8, 0.5, 0.1, 0.2))}}};
  const std::vector<ImageRecord> found{{"i", {det(0, box(0.375, 0.5, 0.5, 1.0), 0.7)}}};
  EXPECT_NEAR(iou(gt[0].annotations[0].box, found[0].annotations[0].box), 0.6, 1e-12);
  const auto r = evaluate_detections(gt, found, v, 0.5);
  const CategoryEval& e = r.categories[0];
  EXPECT_EQ(e.truePositives, 1u);
  EXPECT_EQ(e.falseNegatives, 1u);
  EXPECT_EQ(e.falsePositives, 0u);
  EXPECT_DOUBLE_EQ(*e.recall, 0.5);
}

TEST(EvaluateDetections, ThirdOverlapMissesAtHalf) {
  const CategoryVocabulary v({"person"});
  const std::vector<ImageRecord> gt{{"i", {truth(0, box(0.25, 0.5, 0.5, 1.0))}}};
  const std::vector<ImageRecord> found{{"i", {det(0, box(0.5, 0.5, 0.5, 1.0), 0.9)}}};
  const auto e = evaluate_detections(gt, found, v, 0.5).categories[0];
  EXPECT_EQ(e.truePositives, 0u);
  EXPECT_EQ(e.falsePositives, 1u);
  EXPECT_EQ(e.falseNegatives, 1u);
}

TEST(EvaluateDetections, GreedyByScoreAndUnknownImages) {
  const CategoryVocabulary v({"person", "cat"});
  const auto g = box(0.5, 0.5, 0.4, 0.4);
  const std::vector<ImageRecord> gt{{"i", {truth(0, g)}}};
  // Two detections of one box: the higher score takes it, the other is FP.
  const std::vector<ImageRecord> found{
      {"i", {det(0, box(0.52, 0.5, 0.4, 0.4), 0.4), det(0, g, 0.95)}},
      {"ghost", {det(1, g, 0.8)}}};
  const auto r = evaluate_detections(gt, found, v);
  ASSERT_EQ(r.categories.size(), 2u);
  EXPECT_EQ(r.categories[0].truePositives, 1u);
  EXPECT_EQ(r.categories[0].falsePositives, 1u);
  EXPECT_EQ(r.categories[1].falsePositives, 1u);
  EXPECT_FALSE(r.categories[1].recall.has_value());

  std::vector<ImageRecord> bad{{"i", {det(0, g, 1.5)}}};
  EXPECT_THROW(evaluate_detections(gt, bad, v), ConfigError);
}

TEST(EvaluateDetections, CountIdentities) {
  std::mt19937_64 rng(44);
  const CategoryVocabulary v({"a", "b", "c"});
  for (int round = 0; round < 30; ++round) {
    std::vector<ImageRecord> gt, found;
    std::map<CategoryId, std::uint64_t> gtCount, detCount;
    for (int i = 0; i < 8; ++i) {
      const std::string id = "img" + std::to_string(i);
      gt.push_back({id, testing::random_annotations(rng, 3, 5)});
      ImageRecord d{id, testing::random_annotations(rng, 3, 5)};
      for (Annotation& a : d.annotations) {
        a.source = AnnotationSource::detector;
        a.score = std::uniform_real_distribution<double>(0, 1)(rng);
      }
      for (const auto& a : gt.back().annotations) ++gtCount[a.category];
      for (const auto& a : d.annotations) ++detCount[a.category];
      found.push_back(std::move(d));
    }
    for (const CategoryEval& e : evaluate_detections(gt, found, v, 0.3).categories) {
      EXPECT_EQ(e.truePositives + e.falseNegatives, gtCount[e.id]);
      EXPECT_EQ(e.truePositives + e.falsePositives, detCount[e.id]);
    }
  }
}

}  // namespace
}  // namespace nm
