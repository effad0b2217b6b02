#include "narmine/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>

#include "narmine/error.hpp"
#include "narmine/random.hpp"

namespace nm {

// ---- CategoryVocabulary -----------------------------------------------------

CategoryVocabulary::CategoryVocabulary(std::vector<std::string> names)
    : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty())
      throw InvariantError("category " + std::to_string(i) + " has an empty name");
    auto [it, inserted] =
        lookup_.emplace(names_[i], static_cast<CategoryId>(i));
    if (!inserted)
      throw InvariantError("duplicate category '" + names_[i] + "' at indices " +
                           std::to_string(it->second) + " and " +
                           std::to_string(i));
  }
}

const std::string& CategoryVocabulary::name(CategoryId id) const {
  if (!contains(id))
    throw InvariantError("category index " + std::to_string(id) +
                         " outside vocabulary of size " +
                         std::to_string(size()));
  return names_[id];
}

std::optional<CategoryId> CategoryVocabulary::find(std::string_view name) const {
  auto it = lookup_.find(name);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

CategoryId CategoryVocabulary::index(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw InvariantError("unknown category '" + std::string(name) + "'");
}

// ---- BoundingBox ------------------------------------------------------------

namespace {

// Clipping only kicks in beyond floating-point noise so that a clipped box
// re-parses to itself.
constexpr double kClipSlack = 1e-9;

double clamp_field(double value, double lo, double hi, const char* field) {
  if (!std::isfinite(value))
    throw InvariantError(std::string("box field ") + field + " is not finite");
  if (value < lo - kBoxTolerance || value > hi + kBoxTolerance)
    throw InvariantError(std::string("box field ") + field + " = " +
                         std::to_string(value) + " outside [" +
                         std::to_string(lo) + "," + std::to_string(hi) + "]");
  return std::clamp(value, lo, hi);
}

void clip_axis(double& center, double& extent, const char* axis) {
  double lo = center - extent / 2;
  double hi = center + extent / 2;
  if (lo >= -kClipSlack && hi <= 1 + kClipSlack) return;
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  if (hi - lo <= 0)
    throw InvariantError(std::string("box has no extent along ") + axis +
                         " after clipping");
  center = (lo + hi) / 2;
  extent = hi - lo;
}

}  // namespace

BoundingBox BoundingBox::clamped(double cx, double cy, double w, double h) {
  if (!(w > 0)) throw InvariantError("box width must be positive");
  if (!(h > 0)) throw InvariantError("box height must be positive");
  BoundingBox box;
  box.cx = clamp_field(cx, 0.0, 1.0, "cx");
  box.cy = clamp_field(cy, 0.0, 1.0, "cy");
  box.w = clamp_field(w, 0.0, 1.0, "w");
  box.h = clamp_field(h, 0.0, 1.0, "h");
  clip_axis(box.cx, box.w, "x");
  clip_axis(box.cy, box.h, "y");
  return box;
}

bool BoundingBox::valid() const noexcept {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return in_unit(cx) && in_unit(cy) && w > 0 && w <= 1 && h > 0 && h <= 1 &&
         left() >= -kBoxTolerance && right() <= 1 + kBoxTolerance &&
         top() >= -kBoxTolerance && bottom() <= 1 + kBoxTolerance;
}

// ---- Transaction / TransactionSet ------------------------------------------

Transaction::Transaction(std::string imageId, std::vector<CategoryId> items)
    : imageId_(std::move(imageId)), items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool Transaction::contains(CategoryId id) const noexcept {
  return std::binary_search(items_.begin(), items_.end(), id);
}

TransactionSet::TransactionSet(CategoryVocabulary vocabulary,
                               std::vector<Transaction> transactions)
    : vocabulary_(std::move(vocabulary)),
      transactions_(std::move(transactions)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(transactions_.size());
  for (const Transaction& t : transactions_) {
    if (t.imageId().empty())
      throw InvariantError("transaction with empty imageId");
    if (!seen.insert(t.imageId()).second)
      throw InvariantError("duplicate imageId '" + t.imageId() + "'");
    for (CategoryId item : t.items())
      if (!vocabulary_.contains(item))
        throw InvariantError("image '" + t.imageId() + "': item index " +
                             std::to_string(item) + " outside vocabulary");
  }
}

// ---- operations -------------------------------------------------------------

Transaction to_transaction(const ImageRecord& record,
                           const CategoryVocabulary& vocab,
                           double scoreThreshold) {
  if (!(scoreThreshold >= 0.0 && scoreThreshold <= 1.0))
    throw ConfigError("score threshold must lie in [0,1]");
  std::vector<CategoryId> items;
  items.reserve(record.annotations.size());
  for (const Annotation& a : record.annotations) {
    if (!vocab.contains(a.category))
      throw InvariantError("image '" + record.imageId + "': category index " +
                           std::to_string(a.category) + " outside vocabulary");
    if (a.score >= scoreThreshold) items.push_back(a.category);
  }
  return Transaction(record.imageId, std::move(items));
}

ImageRecord merge(const ImageRecord& groundTruth, const ImageRecord& detected) {
  if (groundTruth.imageId != detected.imageId)
    throw ConfigError("cannot merge records of images '" +
                      groundTruth.imageId + "' and '" + detected.imageId + "'");
  ImageRecord merged{groundTruth.imageId, groundTruth.annotations};
  merged.annotations.insert(merged.annotations.end(),
                            detected.annotations.begin(),
                            detected.annotations.end());
  return merged;
}

SplitResult split(std::span<const std::string> imageIds,
                  const SplitRatios& ratios, std::uint64_t seed) {
  for (double r : {ratios.train, ratios.validation, ratios.test})
    if (!(r >= 0.0) || !std::isfinite(r))
      throw ConfigError("split ratios must be non-negative");
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (std::fabs(sum - 1.0) > 1e-9)
    throw ConfigError("split ratios must sum to 1 (got " + std::to_string(sum) +
                      ")");

  std::vector<std::string> order(imageIds.begin(), imageIds.end());
  SplitMix64 rng(seed);
  shuffle(order, rng);

  const std::size_t n = order.size();
  auto bucket = [n](double fraction) {
    return std::min<std::size_t>(
        n, static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction)));
  };
  const std::size_t validation = bucket(ratios.validation);
  const std::size_t test = std::min(bucket(ratios.test), n - validation);
  const std::size_t train = n - validation - test;

  SplitResult result;
  auto first = std::make_move_iterator(order.begin());
  result.train.assign(first, first + static_cast<std::ptrdiff_t>(train));
  result.validation.assign(first + static_cast<std::ptrdiff_t>(train),
                           first + static_cast<std::ptrdiff_t>(train + validation));
  result.test.assign(first + static_cast<std::ptrdiff_t>(train + validation),
                     std::make_move_iterator(order.end()));
  return result;
}

}  // namespace nm
