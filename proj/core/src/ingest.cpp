#include "narmine/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "narmine/error.hpp"
#include "narmine/text.hpp"

namespace nm {

using json = nlohmann::json;

namespace {

std::string src(std::string_view source) { return std::string(source); }

std::string shortest(double value) {
  std::array<char, 32> buffer{};
  auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  (void)ec;
  return std::string(buffer.data(), ptr);
}

}  // namespace

// ---- categories ---------------------------------------------------------------

CategoryVocabulary parse_categories(std::string_view text,
                                    std::string_view source) {
  std::vector<std::string> names;
  std::map<std::string, std::size_t, std::less<>> first_line;
  const auto lines = text::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = text::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto [it, inserted] = first_line.emplace(std::string(line), i + 1);
    if (!inserted)
      throw ParseError(src(source), i + 1,
                       "duplicate category '" + std::string(line) +
                           "' (first defined on line " +
                           std::to_string(it->second) + ")");
    names.emplace_back(line);
  }
  if (names.empty()) throw ParseError(src(source), 0, "no categories defined");
  return CategoryVocabulary(std::move(names));
}

std::vector<std::string> canonical_category_names(std::string_view rawEntry) {
  // Known defects of the published list: two names fused into one entry, and
  // one name split across two entries.
  struct Correction {
    std::string_view raw;
    std::vector<std::string> names;
  };
  static const std::array<Correction, 3> corrections{{
      {"window inside", {"window", "inside"}},
      {"empty toilet", {"emptyToiletPaperRoll"}},
      {"paper roll", {}},
  }};
  const std::string_view entry = text::trim(rawEntry);
  std::string normalized;
  for (std::string_view word : text::split_whitespace(entry)) {
    if (!normalized.empty()) normalized += ' ';
    normalized += word;
  }
  for (const Correction& c : corrections)
    if (normalized == c.raw) return c.names;
  if (normalized.empty()) return {};
  return {text::to_lower_camel(normalized)};
}

CategoryVocabulary parse_category_list(std::string_view text,
                                       std::string_view source) {
  std::string_view body = text;
  if (const auto open = body.find('{'); open != std::string_view::npos) {
    const auto close = body.find('}', open);
    if (close == std::string_view::npos)
      throw ParseError(src(source), 0, "unterminated '{' in category list");
    body = body.substr(open + 1, close - open - 1);
  }
  std::vector<std::string> names;
  std::set<std::string, std::less<>> seen;
  for (std::string_view entry : text::split(body, ',')) {
    for (std::string& name : canonical_category_names(entry)) {
      if (!seen.insert(name).second)
        throw ParseError(src(source), 0, "duplicate category '" + name + "'");
      names.push_back(std::move(name));
    }
  }
  if (names.empty()) throw ParseError(src(source), 0, "no categories defined");
  return CategoryVocabulary(std::move(names));
}

// ---- label files --------------------------------------------------------------

std::vector<Annotation> parse_label_file(std::string_view text,
                                         const CategoryVocabulary& vocab,
                                         std::string_view source) {
  std::vector<Annotation> annotations;
  const auto lines = text::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineNo = i + 1;
    const auto fields = text::split_whitespace(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() != 5)
      throw ParseError(src(source), lineNo,
                       "expected 5 fields `classId cx cy w h`, found " +
                           std::to_string(fields.size()));
    std::uint64_t classId = 0;
    if (!text::parse_uint(fields[0], classId))
      throw ParseError(src(source), lineNo,
                       "class id '" + std::string(fields[0]) + "' is not a non-negative integer");
    if (classId >= vocab.size())
      throw ParseError(src(source), lineNo,
                       "class id " + std::to_string(classId) +
                           " out of range (vocabulary has " +
                           std::to_string(vocab.size()) + " categories)");
    std::array<double, 4> v{};
    for (std::size_t f = 0; f < 4; ++f)
      if (!text::parse_double(fields[f + 1], v[f]))
        throw ParseError(src(source), lineNo,
                         "field " + std::to_string(f + 2) + " '" +
                             std::string(fields[f + 1]) + "' is not a number");
    Annotation a;
    a.category = static_cast<CategoryId>(classId);
    a.score = 1.0;
    a.source = AnnotationSource::groundTruth;
    try {
      a.box = BoundingBox::clamped(v[0], v[1], v[2], v[3]);
    } catch (const InvariantError& e) {
      throw ParseError(src(source), lineNo, e.what());
    }
    annotations.push_back(a);
  }
  return annotations;
}

std::string write_label_file(std::span<const Annotation> annotations) {
  std::string out;
  for (const Annotation& a : annotations) {
    out += std::to_string(a.category);
    for (double v : {a.box.cx, a.box.cy, a.box.w, a.box.h}) {
      out += ' ';
      out += shortest(v);
    }
    out += '\n';
  }
  return out;
}

// ---- detections ---------------------------------------------------------------

namespace {

class DetectionReader {
 public:
  DetectionReader(const CategoryVocabulary& vocab, std::string_view source)
      : vocab_(vocab), source_(source) {}

  [[noreturn]] void fail(const std::string& where, const std::string& what) const {
    throw ParseError(src(source_), 0, where + ": " + what);
  }

  double number(const json& parent, const char* key, const std::string& where) const {
    auto it = parent.find(key);
    if (it == parent.end()) fail(where, std::string("missing \"") + key + "\"");
    if (!it->is_number()) fail(where, std::string("\"") + key + "\" is not a number");
    return it->get<double>();
  }

  CategoryId category(const json& value, const std::string& where) const {
    if (value.is_string()) {
      const auto& name = value.get_ref<const std::string&>();
      if (auto id = vocab_.find(name)) return *id;
      fail(where, "unknown category '" + name + "'");
    }
    if (value.is_number_unsigned()) {
      const auto id = value.get<std::uint64_t>();
      if (id < vocab_.size()) return static_cast<CategoryId>(id);
      fail(where, "category index " + std::to_string(id) + " out of range");
    }
    fail(where, "category must be a name or a non-negative index");
  }

  Annotation detection(const json& d, const std::string& where) const {
    if (!d.is_object()) fail(where, "detection must be an object");
    auto cat = d.find("category");
    if (cat == d.end()) fail(where, "missing \"category\"");
    Annotation a;
    a.source = AnnotationSource::detector;
    a.category = category(*cat, where);
    a.score = number(d, "score", where);
    if (!(a.score >= 0.0 && a.score <= 1.0))
      fail(where, "score " + std::to_string(a.score) + " outside [0,1]");
    auto box = d.find("box");
    if (box == d.end() || !box->is_object()) fail(where, "missing \"box\" object");
    const std::string bw = where + ".box";
    try {
      a.box = BoundingBox::clamped(number(*box, "cx", bw), number(*box, "cy", bw),
                                   number(*box, "w", bw), number(*box, "h", bw));
    } catch (const InvariantError& e) {
      fail(bw, e.what());
    }
    return a;
  }

 private:
  const CategoryVocabulary& vocab_;
  std::string_view source_;
};

}  // namespace

std::vector<ImageRecord> parse_detections(std::string_view text,
                                          const CategoryVocabulary& vocab,
                                          std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError::at_offset(src(source), e.byte, e.what());
  }
  DetectionReader reader(vocab, source);
  if (!doc.is_array()) reader.fail("$", "document must be an array of records");

  std::vector<ImageRecord> records;
  std::set<std::string, std::less<>> ids;
  for (std::size_t r = 0; r < doc.size(); ++r) {
    const json& rec = doc[r];
    const std::string where = "$[" + std::to_string(r) + "]";
    if (!rec.is_object()) reader.fail(where, "record must be an object");
    auto id = rec.find("imageId");
    if (id == rec.end() || !id->is_string() || id->get_ref<const std::string&>().empty())
      reader.fail(where, "missing or empty \"imageId\"");
    ImageRecord record{id->get<std::string>(), {}};
    if (!ids.insert(record.imageId).second)
      reader.fail(where, "duplicate imageId '" + record.imageId + "'");
    auto dets = rec.find("detections");
    if (dets != rec.end()) {
      if (!dets->is_array()) reader.fail(where, "\"detections\" must be an array");
      for (std::size_t d = 0; d < dets->size(); ++d)
        record.annotations.push_back(reader.detection(
            (*dets)[d], where + ".detections[" + std::to_string(d) + "]"));
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::string write_detections(std::span<const ImageRecord> records,
                             const CategoryVocabulary& vocab) {
  json doc = json::array();
  for (const ImageRecord& r : records) {
    json dets = json::array();
    for (const Annotation& a : r.annotations) {
      dets.push_back({{"category", vocab.name(a.category)},
                      {"score", a.score},
                      {"box", {{"cx", a.box.cx}, {"cy", a.box.cy}, {"w", a.box.w}, {"h", a.box.h}}}});
    }
    doc.push_back({{"imageId", r.imageId}, {"detections", std::move(dets)}});
  }
  return doc.dump(2) + "\n";
}

// ---- transactions table ---------------------------------------------------------

TransactionSet parse_transactions_table(std::string_view text,
                                        const CategoryVocabulary* vocab,
                                        std::string_view source) {
  struct Row {
    std::string id;
    std::vector<std::string_view> names;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::map<std::string, std::size_t, std::less<>> idLine;
  const auto lines = text::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (text::trim(line).empty()) continue;
    const std::size_t tab = line.find('\t');
    Row row{std::string(line.substr(0, tab)), {}, i + 1};
    if (row.id.empty()) throw ParseError(src(source), i + 1, "empty imageId");
    auto [it, inserted] = idLine.emplace(row.id, i + 1);
    if (!inserted)
      throw ParseError(src(source), i + 1,
                       "imageId '" + row.id + "' repeats line " +
                           std::to_string(it->second));
    if (tab != std::string_view::npos && tab + 1 < line.size()) {
      const std::string_view items = line.substr(tab + 1);
      if (items.find('\t') != std::string_view::npos)
        throw ParseError(src(source), i + 1, "more than two tab-separated columns");
      for (std::string_view token : text::split(items, ',')) {
        if (token.empty()) throw ParseError(src(source), i + 1, "empty item token");
        row.names.push_back(token);
      }
    }
    rows.push_back(std::move(row));
  }

  CategoryVocabulary inferred;
  if (vocab == nullptr) {
    std::set<std::string, std::less<>> all;
    for (const Row& row : rows)
      for (std::string_view name : row.names) all.emplace(name);
    inferred = CategoryVocabulary(std::vector<std::string>(all.begin(), all.end()));
    vocab = &inferred;
  }

  std::vector<Transaction> transactions;
  transactions.reserve(rows.size());
  for (Row& row : rows) {
    std::vector<CategoryId> items;
    items.reserve(row.names.size());
    for (std::string_view name : row.names) {
      auto id = vocab->find(name);
      if (!id)
        throw ParseError(src(source), row.line,
                         "unknown category '" + std::string(name) + "'");
      items.push_back(*id);
    }
    transactions.emplace_back(std::move(row.id), std::move(items));
  }
  return TransactionSet(*vocab, std::move(transactions));
}

std::string write_transactions_table(const TransactionSet& ts) {
  const CategoryVocabulary& vocab = ts.vocabulary();
  std::string out;
  std::vector<std::string_view> names;
  for (const Transaction& t : ts.transactions()) {
    names.clear();
    for (CategoryId id : t.items()) names.push_back(vocab.name(id));
    std::sort(names.begin(), names.end());
    out += t.imageId();
    out += '\t';
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out += ',';
      out += names[i];
    }
    out += '\n';
  }
  return out;
}

// ---- id lists -------------------------------------------------------------------

std::vector<std::string> parse_id_list(std::string_view text,
                                       std::string_view source) {
  std::vector<std::string> ids;
  std::set<std::string, std::less<>> seen;
  const auto lines = text::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view id = text::trim(lines[i]);
    if (id.empty()) continue;
    if (!seen.emplace(id).second)
      throw ParseError(src(source), i + 1, "duplicate id '" + std::string(id) + "'");
    ids.emplace_back(id);
  }
  return ids;
}

std::string write_id_list(std::span<const std::string> ids) {
  std::string out;
  for (const std::string& id : ids) {
    out += id;
    out += '\n';
  }
  return out;
}

// ---- manifest and files -----------------------------------------------------------

CorpusManifest parse_manifest(std::string_view text,
                              const std::filesystem::path& baseDir,
                              std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError::at_offset(src(source), e.byte, e.what());
  }
  auto fail = [&](const std::string& what) -> void {
    throw ParseError(src(source), 0, what);
  };
  if (!doc.is_object()) fail("manifest must be an object");
  auto resolve = [&](const json& value, const char* key) {
    if (!value.is_string()) fail(std::string("\"") + key + "\" must be a path string");
    std::filesystem::path p = value.get<std::string>();
    return p.is_absolute() ? p : baseDir / p;
  };

  CorpusManifest manifest;
  auto cats = doc.find("categories");
  if (cats == doc.end()) fail("missing \"categories\"");
  manifest.categoriesPath = resolve(*cats, "categories");
  if (auto dirs = doc.find("labelDirs"); dirs != doc.end()) {
    if (!dirs->is_array()) fail("\"labelDirs\" must be an array");
    for (const json& d : *dirs) manifest.labelDirs.push_back(resolve(d, "labelDirs"));
  }
  if (auto det = doc.find("detections"); det != doc.end() && !det->is_null())
    manifest.detectionsPath = resolve(*det, "detections");
  if (auto th = doc.find("scoreThreshold"); th != doc.end()) {
    if (!th->is_number()) fail("\"scoreThreshold\" must be a number");
    manifest.scoreThreshold = th->get<double>();
    if (!(manifest.scoreThreshold >= 0.0 && manifest.scoreThreshold <= 1.0))
      fail("\"scoreThreshold\" must lie in [0,1]");
  }
  if (auto drop = doc.find("dropEmpty"); drop != doc.end()) {
    if (!drop->is_boolean()) fail("\"dropEmpty\" must be a boolean");
    manifest.dropEmpty = drop->get<bool>();
  }
  if (manifest.labelDirs.empty() && !manifest.detectionsPath)
    fail("manifest names neither label directories nor a detections file");
  return manifest;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::vector<ImageRecord> load_label_dir(const std::filesystem::path& dir,
                                        const CategoryVocabulary& vocab) {
  if (!std::filesystem::is_directory(dir))
    throw ParseError(dir.string(), 0, "not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<ImageRecord> records;
  records.reserve(files.size());
  for (const auto& file : files)
    records.push_back({file.stem().string(),
                       parse_label_file(read_file(file), vocab, file.string())});
  return records;
}

LoadedCorpus load_corpus(const CorpusManifest& manifest) {
  LoadedCorpus corpus;
  corpus.vocabulary = parse_categories(read_file(manifest.categoriesPath),
                                       manifest.categoriesPath.string());
  std::map<std::string, std::string> origin;
  for (const auto& dir : manifest.labelDirs) {
    for (ImageRecord& r : load_label_dir(dir, corpus.vocabulary)) {
      auto [it, inserted] = origin.emplace(r.imageId, dir.string());
      if (!inserted)
        throw ParseError(dir.string(), 0,
                         "imageId '" + r.imageId + "' already loaded from " + it->second);
      corpus.groundTruth.push_back(std::move(r));
    }
  }
  if (manifest.detectionsPath)
    corpus.detections = parse_detections(read_file(*manifest.detectionsPath),
                                         corpus.vocabulary,
                                         manifest.detectionsPath->string());
  auto by_id = [](const ImageRecord& a, const ImageRecord& b) {
    return a.imageId < b.imageId;
  };
  std::sort(corpus.groundTruth.begin(), corpus.groundTruth.end(), by_id);
  std::sort(corpus.detections.begin(), corpus.detections.end(), by_id);
  return corpus;
}

TransactionSet build_transactions(const LoadedCorpus& corpus,
                                  double scoreThreshold, bool dropEmpty) {
  std::map<std::string, ImageRecord> images;
  for (const ImageRecord& r : corpus.groundTruth) images[r.imageId] = r;
  for (const ImageRecord& r : corpus.detections) {
    auto [it, inserted] = images.try_emplace(r.imageId, ImageRecord{r.imageId, {}});
    it->second = merge(it->second, r);
  }
  std::vector<Transaction> transactions;
  transactions.reserve(images.size());
  for (const auto& [id, record] : images) {
    Transaction t = to_transaction(record, corpus.vocabulary, scoreThreshold);
    if (dropEmpty && t.size() == 0) continue;
    transactions.push_back(std::move(t));
  }
  return TransactionSet(corpus.vocabulary, std::move(transactions));
}

}  // namespace nm
