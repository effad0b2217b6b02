#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "narmine/analysis.hpp"
#include "narmine/corpus.hpp"
#include "narmine/error.hpp"
#include "narmine/ingest.hpp"
#include "narmine/miner.hpp"
#include "narmine/synth.hpp"
#include "narmine/text.hpp"

namespace nm::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

struct MineOptions {
  double minSupport = 0.01;
  double minConfidence = 0.9;
  std::size_t maxLen = 10;
  std::size_t maxRhs = 1;
  std::size_t workers = 1;

  MiningParams params() const {
    MiningParams p;
    p.minSupport = minSupport;
    p.minConfidence = minConfidence;
    p.maxItemsetLen = maxLen;
    p.maxRhsLen = maxRhs;
    p.workers = workers;
    p.validate();
    return p;
  }
};

void add_mine_flags(CLI::App& cmd, MineOptions& o) {
  cmd.add_option("--min-support", o.minSupport, "Minimum itemset support in (0,1]")
      ->capture_default_str();
  cmd.add_option("--min-confidence", o.minConfidence, "Minimum rule confidence in [0,1]")
      ->capture_default_str();
  cmd.add_option("--max-len", o.maxLen, "Longest itemset to mine")->capture_default_str();
  cmd.add_option("--max-rhs", o.maxRhs, "Longest rule consequent")->capture_default_str();
  cmd.add_option("--workers", o.workers, "Counting threads")->capture_default_str();
}

TransactionSet load_table(const std::string& path, const std::string& categories) {
  if (categories.empty()) return parse_transactions_table(read_file(path), nullptr, path);
  const CategoryVocabulary vocab = parse_categories(read_file(categories), categories);
  return parse_transactions_table(read_file(path), &vocab, path);
}

std::vector<AssociationRule> load_or_mine_rules(const TransactionSet& ts,
                                                const std::string& rulesPath,
                                                const MineOptions& options) {
  if (!rulesPath.empty()) return parse_rules_table(read_file(rulesPath), ts, rulesPath);
  const MiningParams params = options.params();
  if (ts.empty()) return {};
  const auto frequents = frequent_itemsets(ts, params);
  return rank_rules(generate_rules(frequents, ts, params));
}

std::string join_ranking(const std::vector<EndpointCount>& ranking) {
  std::string out;
  for (const EndpointCount& e : ranking) {
    if (!out.empty()) out += ", ";
    out += e.category + "(" + std::to_string(e.rules) + ")";
  }
  return out;
}

SplitRatios parse_ratios(const std::string& spec) {
  const auto parts = text::split(spec, ',');
  if (parts.size() != 3) throw ConfigError("--ratios expects three comma-separated fractions");
  double v[3];
  for (std::size_t i = 0; i < 3; ++i)
    if (!text::parse_double(text::trim(parts[i]), v[i]))
      throw ConfigError("--ratios: '" + std::string(parts[i]) + "' is not a number");
  return {v[0], v[1], v[2]};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Streams io{out, err};
  CLI::App app{"Association-rule mining over per-image object annotations", "narmine"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
  app.require_subcommand(1);

  // ingest ---------------------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "Label files and detections -> transactions table");
  std::string manifestPath, categoriesPath, detectionsPath, outDir = ".";
  std::vector<std::string> labelDirs;
  std::optional<double> scoreThreshold;
  bool dropEmpty = false;
  ingest->add_option("manifest", manifestPath, "JSON corpus manifest");
  ingest->add_option("--categories", categoriesPath, "Category file, one name per line");
  ingest->add_option("--labels", labelDirs, "Directory of <imageId>.txt label files");
  ingest->add_option("--detections", detectionsPath, "Detector output document");
  ingest->add_option("--score-threshold", scoreThreshold, "Minimum detector score (default 0.5)");
  ingest->add_flag("--drop-empty", dropEmpty, "Drop images without any accepted object");
  ingest->add_option("--out-dir", outDir, "Output directory")->capture_default_str();

  // mine -----------------------------------------------------------------------
  auto* mine = app.add_subcommand("mine", "Apriori rules and frequent itemsets");
  std::string tablePath, tableCategories;
  MineOptions mineOptions;
  mine->add_option("table", tablePath, "Transactions table")->required();
  mine->add_option("--categories", tableCategories, "Category file fixing the vocabulary");
  add_mine_flags(*mine, mineOptions);
  mine->add_option("--out-dir", outDir, "Output directory")->capture_default_str();

  // graph ----------------------------------------------------------------------
  auto* graph = app.add_subcommand("graph", "Rule graph export (DOT or JSON)");
  std::string rulesPath, format = "dot";
  std::size_t top = 4;
  graph->add_option("table", tablePath, "Transactions table")->required();
  graph->add_option("--categories", tableCategories, "Category file fixing the vocabulary");
  graph->add_option("--rules", rulesPath, "Rules table to draw instead of mining");
  graph->add_option("--format", format, "dot | obj")->capture_default_str();
  graph->add_option("--top", top, "Endpoints to report")->capture_default_str();
  add_mine_flags(*graph, mineOptions);
  graph->add_option("--out-dir", outDir, "Output directory")->capture_default_str();

  // freq -----------------------------------------------------------------------
  auto* freq = app.add_subcommand("freq", "Category presence frequencies");
  freq->add_option("table", tablePath, "Transactions table")->required();
  freq->add_option("--categories", tableCategories, "Category file fixing the vocabulary");
  freq->add_option("--out-dir", outDir, "Output directory")->capture_default_str();

  // paracoord ------------------------------------------------------------------
  auto* para = app.add_subcommand("paracoord", "Parallel-coordinates rule table");
  para->add_option("table", tablePath, "Transactions table")->required();
  para->add_option("--categories", tableCategories, "Category file fixing the vocabulary");
  para->add_option("--rules", rulesPath, "Rules table to lay out instead of mining");
  add_mine_flags(*para, mineOptions);
  para->add_option("--out-dir", outDir, "Output directory")->capture_default_str();

  // split ----------------------------------------------------------------------
  auto* splitCmd = app.add_subcommand("split", "Seeded train/validation/test split of image ids");
  std::string idsPath, ratios = "0.7,0.2,0.1";
  std::uint64_t seed = kDefaultSeed;
  splitCmd->add_option("ids", idsPath, "File with one image id per line")->required();
  splitCmd->add_option("--ratios", ratios, "train,validation,test")->capture_default_str();
  splitCmd->add_option("--seed", seed, "Shuffle seed")->envname("NM_SEED")->capture_default_str();
  splitCmd->add_option("--out-dir", outDir, "Output directory")->capture_default_str();

  // synth ----------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Synthetic transactions with planted rules");
  std::string specPath;
  std::optional<std::uint64_t> synthSeed;
  synth->add_option("spec", specPath, "JSON generator spec")->required();
  synth->add_option("--seed", synthSeed, "Override the spec seed")->envname("NM_SEED");
  synth->add_option("--out-dir", outDir, "Output directory")->capture_default_str();

  // eval -----------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Detection precision/recall against ground truth");
  std::string gtDir;
  double iouThreshold = 0.5;
  eval->add_option("--categories", categoriesPath, "Category file")->required();
  eval->add_option("--gt-dir", gtDir, "Ground-truth label directory")->required();
  eval->add_option("--detections", detectionsPath, "Detector output document")->required();
  eval->add_option("--iou", iouThreshold, "IoU needed for a match")->capture_default_str();
  eval->add_option("--out-dir", outDir, "Output directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    io.err << "narmine: " << e.what() << "\n";
    return kUsage;
  }

  const fs::path dir(outDir);
  auto emit = [&](const std::string& name, std::string_view contents) {
    write_file(dir / name, contents);
    io.out << "wrote " << (dir / name).string() << "\n";
  };

  try {
    if (*ingest) {
      CorpusManifest manifest;
      if (!manifestPath.empty()) {
        const fs::path mp(manifestPath);
        manifest = parse_manifest(read_file(mp), mp.parent_path(), manifestPath);
      }
      if (!categoriesPath.empty()) manifest.categoriesPath = categoriesPath;
      for (const auto& d : labelDirs) manifest.labelDirs.emplace_back(d);
      if (!detectionsPath.empty()) manifest.detectionsPath = detectionsPath;
      if (scoreThreshold) manifest.scoreThreshold = *scoreThreshold;
      if (dropEmpty) manifest.dropEmpty = true;
      if (manifest.categoriesPath.empty())
        throw ConfigError("ingest needs a category file (--categories or manifest)");
      if (manifest.labelDirs.empty() && !manifest.detectionsPath)
        throw ConfigError("ingest needs --labels and/or --detections");
      if (!(manifest.scoreThreshold >= 0.0 && manifest.scoreThreshold <= 1.0))
        throw ConfigError("--score-threshold must lie in [0,1]");

      const LoadedCorpus corpus = load_corpus(manifest);
      const TransactionSet ts =
          build_transactions(corpus, manifest.scoreThreshold, manifest.dropEmpty);
      emit("transactions.tsv", write_transactions_table(ts));
      io.out << "N=" << ts.n() << " vocabulary=" << ts.vocabulary().size() << "\n";
      return kOk;
    }

    if (*mine) {
      const MiningParams params = mineOptions.params();
      const TransactionSet ts = load_table(tablePath, tableCategories);
      if (ts.empty()) io.err << "narmine: warning: " << tablePath << " has no transactions\n";
      std::vector<Itemset> frequents;
      std::vector<AssociationRule> rules;
      if (!ts.empty()) {
        frequents = frequent_itemsets(ts, params);
        rules = rank_rules(generate_rules(frequents, ts, params));
      }
      emit("rules.tsv", write_rules_table(rules, ts.vocabulary()));
      emit("itemsets.tsv", write_itemsets_table(frequents, ts.vocabulary(), ts.n()));
      io.out << "N=" << ts.n() << " itemsets=" << frequents.size() << " rules=" << rules.size()
             << "\n";
      return kOk;
    }

    if (*graph) {
      if (format != "dot" && format != "obj")
        throw ConfigError("--format must be 'dot' or 'obj', not '" + format + "'");
      if (top == 0) throw ConfigError("--top must be >= 1");
      const TransactionSet ts = load_table(tablePath, tableCategories);
      const auto rules = load_or_mine_rules(ts, rulesPath, mineOptions);
      const RuleGraph g = build_rule_graph(rules, ts);
      if (format == "dot")
        emit("graph.dot", to_dot(g));
      else
        emit("graph.json", to_json(g));
      const EndpointRanking ranking = top_endpoints(rules, ts.vocabulary(), top);
      io.out << "nodes=" << g.nodes().size() << " edges=" << g.edges().size() << "\n";
      io.out << "top endpoints: " << join_ranking(ranking.combined) << "\n";
      io.out << "top antecedents: " << join_ranking(ranking.antecedents) << "\n";
      io.out << "top consequents: " << join_ranking(ranking.consequents) << "\n";
      return kOk;
    }

    if (*freq) {
      const TransactionSet ts = load_table(tablePath, tableCategories);
      const FrequencyTable table = frequency_table(ts);
      emit("frequency.tsv", write_frequency_table(table));
      return kOk;
    }

    if (*para) {
      const TransactionSet ts = load_table(tablePath, tableCategories);
      const auto rules = load_or_mine_rules(ts, rulesPath, mineOptions);
      emit("paracoord.tsv", write_paracoord(paracoord(rules, ts)));
      return kOk;
    }

    if (*splitCmd) {
      const SplitRatios r = parse_ratios(ratios);
      const auto ids = parse_id_list(read_file(idsPath), idsPath);
      const SplitResult result = split(ids, r, seed);
      emit("train.txt", write_id_list(result.train));
      emit("validation.txt", write_id_list(result.validation));
      emit("test.txt", write_id_list(result.test));
      io.out << "train=" << result.train.size() << " validation=" << result.validation.size()
             << " test=" << result.test.size() << "\n";
      return kOk;
    }

    if (*synth) {
      SynthSpec spec = parse_synth_spec(read_file(specPath), specPath);
      if (synthSeed) spec.seed = *synthSeed;
      const TransactionSet ts = generate(spec);
      emit("transactions.tsv", write_transactions_table(ts));
      io.out << "N=" << ts.n() << " vocabulary=" << ts.vocabulary().size() << "\n";
      return kOk;
    }

    if (*eval) {
      const CategoryVocabulary vocab = parse_categories(read_file(categoriesPath), categoriesPath);
      const auto truth = load_label_dir(gtDir, vocab);
      const auto found = parse_detections(read_file(detectionsPath), vocab, detectionsPath);
      const DetectionEvalReport report = evaluate_detections(truth, found, vocab, iouThreshold);
      emit("eval.tsv", write_eval_report(report));
      return kOk;
    }
  } catch (const ParseError& e) {
    io.err << "narmine: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    io.err << "narmine: " << e.what() << "\n";
    return kUsage;
  } catch (const InvariantError& e) {
    io.err << "narmine: internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    io.err << "narmine: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace nm::cli
