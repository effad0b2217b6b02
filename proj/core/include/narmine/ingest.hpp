#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "narmine/corpus.hpp"

namespace nm {

/// One category name per non-empty line; the n-th accepted line gets id n-1.
/// Blank lines and lines starting with '#' do not consume an id.
CategoryVocabulary parse_categories(std::string_view text,
                                    std::string_view source = "<categories>");

/// Canonical names for one entry of a brace-delimited category list:
/// multi-word entries become lowerCamel tokens, and a small correction table
/// repairs known list typos (see docs/categories.md). May return zero, one
/// or two names.
std::vector<std::string> canonical_category_names(std::string_view rawEntry);

/// Parses "Name = { a, b c, ... }" (or a bare comma list) into a vocabulary
/// using canonical_category_names on every entry.
CategoryVocabulary parse_category_list(std::string_view text,
                                       std::string_view source = "<list>");

/// Label file: one object per line, `classId cx cy w h`, normalized floats.
std::vector<Annotation> parse_label_file(std::string_view text,
                                         const CategoryVocabulary& vocab,
                                         std::string_view source = "<labels>");
/// Emits the shortest decimal forms that parse back to the same doubles.
std::string write_label_file(std::span<const Annotation> annotations);

/// Detector output document; see docs/detections.schema.json.
std::vector<ImageRecord> parse_detections(std::string_view text,
                                          const CategoryVocabulary& vocab,
                                          std::string_view source = "<detections>");
std::string write_detections(std::span<const ImageRecord> records,
                             const CategoryVocabulary& vocab);

/// `imageId<TAB>item,item,...` per line. Without a vocabulary one is inferred
/// from the file and sorted by name.
TransactionSet parse_transactions_table(
    std::string_view text, const CategoryVocabulary* vocab = nullptr,
    std::string_view source = "<transactions>");
/// Items on each line are written in name order. LF line endings.
std::string write_transactions_table(const TransactionSet& ts);

/// One image id per non-empty line.
std::vector<std::string> parse_id_list(std::string_view text,
                                       std::string_view source = "<ids>");
std::string write_id_list(std::span<const std::string> ids);

struct CorpusManifest {
  std::filesystem::path categoriesPath;
  std::vector<std::filesystem::path> labelDirs;
  std::optional<std::filesystem::path> detectionsPath;
  double scoreThreshold = 0.5;
  bool dropEmpty = false;
};

/// JSON manifest {"categories", "labelDirs", "detections", "scoreThreshold",
/// "dropEmpty"}. Relative paths resolve against baseDir.
CorpusManifest parse_manifest(std::string_view text,
                              const std::filesystem::path& baseDir,
                              std::string_view source = "<manifest>");

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Reads every `<imageId>.txt` in dir (sorted by name) as ground truth.
std::vector<ImageRecord> load_label_dir(const std::filesystem::path& dir,
                                        const CategoryVocabulary& vocab);

/// Ground truth and detector records for the images of a manifest, joined by
/// imageId and sorted by it. Images seen only by the detector are included.
struct LoadedCorpus {
  CategoryVocabulary vocabulary;
  std::vector<ImageRecord> groundTruth;
  std::vector<ImageRecord> detections;
};
LoadedCorpus load_corpus(const CorpusManifest& manifest);

/// merge + to_transaction for every image of a loaded corpus.
TransactionSet build_transactions(const LoadedCorpus& corpus,
                                  double scoreThreshold, bool dropEmpty);

}  // namespace nm
