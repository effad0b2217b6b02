#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nm {

/// 0-based index into a CategoryVocabulary.
using CategoryId = std::uint32_t;

/// Ordered, duplicate-free list of category names. Index <-> name is a
/// bijection and indices never change after construction.
class CategoryVocabulary {
 public:
  CategoryVocabulary() = default;

  /// Throws InvariantError on an empty or repeated name.
  explicit CategoryVocabulary(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  bool contains(CategoryId id) const noexcept { return id < names_.size(); }

  /// Throws InvariantError when id is out of range.
  const std::string& name(CategoryId id) const;
  std::optional<CategoryId> find(std::string_view name) const;
  /// Throws InvariantError for an unknown name.
  CategoryId index(std::string_view name) const;

  const std::vector<std::string>& names() const noexcept { return names_; }

  friend bool operator==(const CategoryVocabulary& a,
                         const CategoryVocabulary& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, CategoryId, std::less<>> lookup_;
};

/// Boxes may overflow the unit square by this much before ingest rejects them.
inline constexpr double kBoxTolerance = 1e-6;

/// Normalized center/extent rectangle.
struct BoundingBox {
  double cx = 0.5;
  double cy = 0.5;
  double w = 1.0;
  double h = 1.0;

  /// Validates and clamps raw coordinates. Fields outside their range by at
  /// most kBoxTolerance are clamped; edges running past the image border are
  /// clipped to it. Anything else throws InvariantError.
  static BoundingBox clamped(double cx, double cy, double w, double h);

  double left() const noexcept { return cx - w / 2; }
  double right() const noexcept { return cx + w / 2; }
  double top() const noexcept { return cy - h / 2; }
  double bottom() const noexcept { return cy + h / 2; }
  double area() const noexcept { return w * h; }

  /// True when 0<=cx,cy<=1, 0<w,h<=1 and edges lie within the tolerance.
  bool valid() const noexcept;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class AnnotationSource { groundTruth, detector };

struct Annotation {
  CategoryId category = 0;
  BoundingBox box;
  double score = 1.0;  // ground truth is always 1.0
  AnnotationSource source = AnnotationSource::groundTruth;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct ImageRecord {
  std::string imageId;
  std::vector<Annotation> annotations;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// One image as a market basket: the set of categories present.
class Transaction {
 public:
  Transaction() = default;
  /// Items are sorted and deduplicated.
  Transaction(std::string imageId, std::vector<CategoryId> items);

  const std::string& imageId() const noexcept { return imageId_; }
  /// Sorted ascending, no duplicates.
  std::span<const CategoryId> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool contains(CategoryId id) const noexcept;

  friend bool operator==(const Transaction&, const Transaction&) = default;

 private:
  std::string imageId_;
  std::vector<CategoryId> items_;
};

/// The mining input. Immutable once built.
class TransactionSet {
 public:
  TransactionSet() = default;
  /// Throws InvariantError on repeated imageIds or item indices outside the
  /// vocabulary.
  TransactionSet(CategoryVocabulary vocabulary,
                 std::vector<Transaction> transactions);

  const CategoryVocabulary& vocabulary() const noexcept { return vocabulary_; }
  std::span<const Transaction> transactions() const noexcept {
    return transactions_;
  }
  std::size_t n() const noexcept { return transactions_.size(); }
  bool empty() const noexcept { return transactions_.empty(); }
  const Transaction& operator[](std::size_t i) const { return transactions_[i]; }

  friend bool operator==(const TransactionSet&, const TransactionSet&) = default;

 private:
  CategoryVocabulary vocabulary_;
  std::vector<Transaction> transactions_;
};

/// Items are the categories of annotations scoring at least scoreThreshold.
/// Throws InvariantError naming the image for an invalid category, and
/// ConfigError for a threshold outside [0,1].
Transaction to_transaction(const ImageRecord& record,
                           const CategoryVocabulary& vocab,
                           double scoreThreshold);

/// Ground-truth annotations followed by detector annotations. Duplicates are
/// kept; they collapse later in to_transaction. Throws ConfigError when the
/// imageIds differ.
ImageRecord merge(const ImageRecord& groundTruth, const ImageRecord& detected);

struct SplitRatios {
  double train = 0.7;
  double validation = 0.2;
  double test = 0.1;
};

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

/// Deterministic partition of imageIds.
///
/// The ids are shuffled with nm::shuffle (Fisher-Yates over SplitMix64 seeded
/// with `seed`). Bucket sizes: |validation| = llround(n * validation),
/// |test| = min(llround(n * test), n - |validation|), and the training bucket
/// takes the remainder. The shuffled order is then cut train | validation |
/// test. Throws ConfigError when a ratio is negative or the sum differs from 1
/// by more than 1e-9.
SplitResult split(std::span<const std::string> imageIds,
                  const SplitRatios& ratios, std::uint64_t seed);

}  // namespace nm
