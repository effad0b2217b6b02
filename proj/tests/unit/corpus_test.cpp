#include <gtest/gtest.h>

#include <random>
#include <set>

#include "narmine/corpus.hpp"
#include "narmine/error.hpp"
#include "narmine/random.hpp"
#include "random_corpus.hpp"

namespace nm {
namespace {

Annotation ann(CategoryId c, double score = 1.0,
               AnnotationSource source = AnnotationSource::groundTruth) {
  Annotation a;
  a.category = c;
  a.score = score;
  a.source = source;
  return a;
}

const CategoryVocabulary& vocab() {
  static const CategoryVocabulary v({"person", "mask", "cat", "window", "buildings"});
  return v;
}
constexpr CategoryId kPerson = 0, kMask = 1, kCat = 2, kWindow = 3, kBuildings = 4;

TEST(CategoryVocabulary, IndexNameBijection) {
  EXPECT_EQ(vocab().size(), 5u);
  for (CategoryId i = 0; i < vocab().size(); ++i) EXPECT_EQ(vocab().index(vocab().name(i)), i);
  EXPECT_FALSE(vocab().find("dog").has_value());
  EXPECT_THROW(vocab().index("dog"), InvariantError);
  EXPECT_THROW(vocab().name(99), InvariantError);
}

TEST(CategoryVocabulary, RejectsDuplicateAndEmptyNames) {
  EXPECT_THROW(CategoryVocabulary({"a", "b", "a"}), InvariantError);
  EXPECT_THROW(CategoryVocabulary({"a", ""}), InvariantError);
}

TEST(BoundingBox, ClampsWithinTolerance) {
  const auto box = BoundingBox::clamped(1.0 + 5e-7, 0.5, 0.2, 1.0 + 5e-7);
  EXPECT_TRUE(box.valid());
  EXPECT_LE(box.right(), 1.0 + kBoxTolerance);
  EXPECT_DOUBLE_EQ(box.h, 1.0);
}

TEST(BoundingBox, ClipsEdgesRunningPastTheBorder) {
  const auto box = BoundingBox::clamped(0.95, 0.5, 0.2, 0.5);
  EXPECT_TRUE(box.valid());
  EXPECT_NEAR(box.left(), 0.85, 1e-12);
  EXPECT_NEAR(box.right(), 1.0, 1e-12);
  // Clipping is idempotent.
  EXPECT_EQ(BoundingBox::clamped(box.cx, box.cy, box.w, box.h), box);
}

TEST(BoundingBox, RejectsOutOfRangeFields) {
  EXPECT_THROW(BoundingBox::clamped(1.1, 0.5, 0.1, 0.1), InvariantError);
  EXPECT_THROW(BoundingBox::clamped(0.5, 0.5, 0.0, 0.1), InvariantError);
  EXPECT_THROW(BoundingBox::clamped(0.5, 0.5, 0.1, -0.2), InvariantError);
  EXPECT_THROW(BoundingBox::clamped(0.5, 0.5, 1.01, 0.1), InvariantError);
}

TEST(ToTransaction, DeduplicatesRepeatedObjects) {
  ImageRecord r{"img1", {ann(kPerson), ann(kPerson), ann(kPerson), ann(kMask)}};
  const Transaction t = to_transaction(r, vocab(), 0.0);
  EXPECT_EQ(t.imageId(), "img1");
  EXPECT_EQ(std::vector<CategoryId>(t.items().begin(), t.items().end()),
            (std::vector<CategoryId>{kPerson, kMask}));
}

TEST(ToTransaction, EmptyRecordGivesEmptySet) {
  EXPECT_EQ(to_transaction({"img2", {}}, vocab(), 0.0).size(), 0u);
}

TEST(ToTransaction, FiltersByScore) {
  ImageRecord r{"img3",
                {ann(kPerson, 0.9, AnnotationSource::detector), ann(kCat, 0.3, AnnotationSource::detector)}};
  const Transaction t = to_transaction(r, vocab(), 0.5);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_TRUE(t.contains(kPerson));
  EXPECT_FALSE(t.contains(kCat));
}

TEST(ToTransaction, InvalidCategoryNamesImage) {
  ImageRecord r{"broken-image", {ann(42)}};
  try {
    to_transaction(r, vocab(), 0.0);
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("broken-image"), std::string::npos);
  }
  EXPECT_THROW(to_transaction({"x", {}}, vocab(), 1.5), ConfigError);
}

TEST(Merge, ConcatenatesGroundTruthFirst) {
  ImageRecord gt{"img", {ann(kPerson)}};
  ImageRecord det{"img", {ann(kMask, 0.8, AnnotationSource::detector)}};
  const ImageRecord m = merge(gt, det);
  ASSERT_EQ(m.annotations.size(), 2u);
  EXPECT_EQ(m.annotations[0].source, AnnotationSource::groundTruth);
  EXPECT_EQ(m.annotations[1].category, kMask);
}

TEST(Merge, SameObjectCollapsesAtItemLevel) {
  ImageRecord gt{"img", {ann(kPerson)}};
  ImageRecord det{"img", {ann(kPerson, 0.9, AnnotationSource::detector)}};
  const ImageRecord m = merge(gt, det);
  EXPECT_EQ(m.annotations.size(), 2u);
  EXPECT_EQ(to_transaction(m, vocab(), 0.5).size(), 1u);
}

TEST(Merge, EmptyGroundTruth) {
  ImageRecord det{"img", {ann(kWindow, 0.7, AnnotationSource::detector),
                          ann(kBuildings, 0.6, AnnotationSource::detector)}};
  const Transaction t = to_transaction(merge({"img", {}}, det), vocab(), 0.5);
  EXPECT_EQ(t.size(), 2u);
}

TEST(Merge, MismatchedIdsThrow) {
  EXPECT_THROW(merge({"a", {}}, {"b", {}}), ConfigError);
}

TEST(Merge, ItemsAreUnionOfParts) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 100; ++round) {
    ImageRecord gt{"img", testing::random_annotations(rng, vocab().size(), 6)};
    ImageRecord det{"img", testing::random_annotations(rng, vocab().size(), 6)};
    for (auto& a : det.annotations) {
      a.source = AnnotationSource::detector;
      a.score = std::uniform_real_distribution<double>(0, 1)(rng);
    }
    const double threshold = 0.5;
    std::set<CategoryId> expected;
    const Transaction fromGt = to_transaction(gt, vocab(), threshold);
    const Transaction fromDet = to_transaction(det, vocab(), threshold);
    expected.insert(fromGt.items().begin(), fromGt.items().end());
    expected.insert(fromDet.items().begin(), fromDet.items().end());
    const Transaction merged = to_transaction(merge(gt, det), vocab(), threshold);
    EXPECT_EQ(std::set<CategoryId>(merged.items().begin(), merged.items().end()), expected);

    // Duplicating an annotation never changes the item set.
    if (!gt.annotations.empty()) {
      ImageRecord dup = gt;
      dup.annotations.push_back(dup.annotations.front());
      EXPECT_EQ(to_transaction(dup, vocab(), threshold), to_transaction(gt, vocab(), threshold));
    }
  }
}

TEST(TransactionSet, RejectsDuplicateIdsAndBadItems) {
  EXPECT_THROW(TransactionSet(vocab(), {Transaction("a", {0}), Transaction("a", {1})}),
               InvariantError);
  EXPECT_THROW(TransactionSet(vocab(), {Transaction("a", {7})}), InvariantError);
  const TransactionSet ok(vocab(), {Transaction("a", {1, 0, 1})});
  EXPECT_EQ(ok.n(), 1u);
  EXPECT_EQ(ok[0].size(), 2u);
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("id" + std::to_string(i));
  return out;
}

TEST(Split, TenIdsExactProportions) {
  const auto r = split(ids(10), {0.7, 0.2, 0.1}, 42);
  EXPECT_EQ(r.train.size(), 7u);
  EXPECT_EQ(r.validation.size(), 2u);
  EXPECT_EQ(r.test.size(), 1u);
}

TEST(Split, CorpusOf927) {
  // |val| = round(185.4) = 185, |test| = round(92.7) = 93, train gets 649.
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 2020ull}) {
    const auto r = split(ids(927), {0.7, 0.2, 0.1}, seed);
    EXPECT_EQ(r.train.size(), 649u);
    EXPECT_EQ(r.validation.size(), 185u);
    EXPECT_EQ(r.test.size(), 93u);
  }
}

TEST(Split, GoldenPartition) {
  // Frozen from an independent implementation of the documented procedure.
  const auto r = split(ids(10), {0.7, 0.2, 0.1}, 42);
  EXPECT_EQ(r.train, (std::vector<std::string>{"id0", "id9", "id5", "id8", "id6", "id4", "id7"}));
  EXPECT_EQ(r.validation, (std::vector<std::string>{"id2", "id1"}));
  EXPECT_EQ(r.test, (std::vector<std::string>{"id3"}));
}

TEST(Split, DeterministicDisjointExhaustive) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = rng() % 300;
    std::uniform_real_distribution<double> unit(0, 1);
    double a = unit(rng), b = unit(rng) * (1 - a);
    const SplitRatios ratios{a, b, 1 - a - b};
    const auto all = ids(n);
    const auto r1 = split(all, ratios, round);
    const auto r2 = split(all, ratios, round);
    EXPECT_EQ(r1.train, r2.train);
    EXPECT_EQ(r1.validation, r2.validation);
    EXPECT_EQ(r1.test, r2.test);
    std::multiset<std::string> joined(r1.train.begin(), r1.train.end());
    joined.insert(r1.validation.begin(), r1.validation.end());
    joined.insert(r1.test.begin(), r1.test.end());
    EXPECT_EQ(joined, std::multiset<std::string>(all.begin(), all.end()));
    const double nd = static_cast<double>(n);
    EXPECT_LT(std::abs(static_cast<double>(r1.validation.size()) - nd * ratios.validation), 1.0);
    EXPECT_LT(std::abs(static_cast<double>(r1.test.size()) - nd * ratios.test), 1.0);
    EXPECT_LT(std::abs(static_cast<double>(r1.train.size()) - nd * ratios.train), 1.0 + 1e-9);
  }
}

TEST(Split, EmptyInputAndBadRatios) {
  const auto r = split({}, {0.7, 0.2, 0.1}, 1);
  EXPECT_TRUE(r.train.empty() && r.validation.empty() && r.test.empty());
  EXPECT_THROW(split(ids(3), {0.5, 0.5, 0.1}, 1), ConfigError);
  EXPECT_THROW(split(ids(3), {1.2, -0.1, -0.1}, 1), ConfigError);
}

TEST(SplitMix64, ReferenceStream) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
}

TEST(SplitMix64, BoundedAndUniformRanges) {
  SplitMix64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(rng.bounded(7), 7u);
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace nm
