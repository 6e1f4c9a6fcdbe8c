#include "wove/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include "wove/atomic_file.hpp"
#include "wove/composer.hpp"
#include "wove/cooccur.hpp"
#include "wove/corpus.hpp"
#include "wove/errors.hpp"
#include "wove/evaluator.hpp"
#include "wove/report.hpp"
#include "wove/trainer.hpp"

namespace wove {

namespace {

struct Options {
  std::vector<std::string> inputs;
  std::string output;
  std::string vocab = "vocab.txt";
  std::string input;
  std::string prefix = "coocc";
  std::uint64_t min_count = kDefaultMinCount;
  int window = kDefaultWindow;
  std::string mode = "baseline";
  std::size_t memory_mb = 512;
  TrainConfig train;
  std::string export_mode = "sum";
  std::string method = "direct";
  std::string vectors;
  std::string questions;
  std::vector<std::string> pairs;
  double scale = 10.0;
  double threshold = kDefaultSynonymThreshold;
  std::vector<std::string> reports;
};

std::ifstream open_input(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open input file: " + path);
  return in;
}

Vocabulary load_vocab(const std::string& path) {
  auto in = open_input(path);
  try {
    return Vocabulary::read(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

EmbeddingMatrix load_vectors(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_vectors(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

/// Writes through an AtomicFile when `path` is set, else to `out`.
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  AtomicFile file(path);
  write(file.stream());
  file.commit();
}

ExportMode parse_export(const std::string& name) {
  return name == "pivot" ? ExportMode::pivot_only : ExportMode::sum;
}

void add_train_flags(CLI::App* sub, TrainConfig& cfg) {
  sub->add_option("--dim", cfg.dim, "Vector dimensionality k")->capture_default_str();
  sub->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
  sub->add_option("--eta", cfg.eta, "Initial AdaGrad learning rate")->capture_default_str();
  sub->add_option("--x-max", cfg.x_max, "Weighting cutoff x_max")->capture_default_str();
  sub->add_option("--alpha", cfg.alpha, "Weighting exponent")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  sub->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
}

void log_training(std::ostream& err, const TrainReport& report) {
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    err << "epoch " << (e + 1) << " mean loss " << format_real(report.epoch_loss[e]);
    if (report.skipped_updates[e]) err << " (skipped " << report.skipped_updates[e] << ")";
    err << '\n';
  }
}

EncodedCorpus read_corpus(const std::vector<std::string>& inputs, const Vocabulary& vocab) {
  EncodedCorpus corpus;
  for (const auto& path : inputs) {
    auto in = open_input(path);
    read_documents(in, [&](std::vector<std::string>&& tokens) {
      corpus.add_document(encode(tokens, vocab));
    });
  }
  return corpus;
}

// Subcommands ----------------------------------------------------------------

void cmd_vocab(const Options& o, std::ostream& out, std::ostream& err) {
  VocabCounter counter;
  for (const auto& path : o.inputs) {
    auto in = open_input(path);
    read_documents(in, [&](std::vector<std::string>&& tokens) { counter.add(tokens); });
  }
  const auto vocab = counter.build(o.min_count);
  emit(o.output, out, [&](std::ostream& s) { vocab.write(s); });
  err << "vocab: " << counter.total_tokens() << " tokens, " << counter.counts().size()
      << " types, " << vocab.size() << " kept (min count " << o.min_count << ")\n";
}

void cmd_cooccur(const Options& o, std::ostream& err) {
  const auto vocab = load_vocab(o.vocab);
  const auto corpus = read_corpus(o.inputs, vocab);
  CountOptions count;
  count.workers = o.train.workers;
  count.memory_bytes = o.memory_mb << 20;
  if (o.mode == "baseline") {
    const auto m = count_baseline(corpus, vocab.size(), o.window, count);
    write_shard(baseline_shard_path(o.prefix), m);
    err << "cooccur: " << m.nnz() << " nonzero entries -> " << baseline_shard_path(o.prefix).string()
        << '\n';
  } else {
    const auto set = count_positional(corpus, vocab.size(), o.window, count);
    write_positional(o.prefix, set);
    for (const auto& [p, m] : set.matrices()) {
      err << "cooccur: offset " << p << ": " << m.nnz() << " nonzero entries -> "
          << positional_shard_path(o.prefix, p).string() << '\n';
    }
  }
}

void cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  o.train.validate();
  const auto vocab = load_vocab(o.vocab);
  open_input(o.input, true);
  const auto matrix = read_shard(o.input, vocab.size());
  if (matrix.empty()) throw DataError(o.input + ": co-occurrence matrix is empty");
  const auto result = train(matrix, o.train);
  log_training(err, result.report);
  const auto emb = emit_vectors(result.model, vocab.words(), parse_export(o.export_mode));
  emit(o.output, out, [&](std::ostream& s) { write_vectors(s, emb); });
}

void cmd_compose(const Options& o, std::ostream& err) {
  o.train.validate();
  const auto method = parse_method(o.method);
  if (method == CompositionMethod::reduced) {
    try {
      reduced_block_dim(o.train.dim, o.window);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const auto vocab = load_vocab(o.vocab);
  for (int p : signed_offsets(o.window)) open_input(positional_shard_path(o.prefix, p).string(), true);
  const auto matrices = read_positional(o.prefix, o.window, vocab.size());
  const auto words = vocab.words();
  const auto mode = parse_export(o.export_mode);

  ComposedEmbeddings composed;
  if (method == CompositionMethod::reduced) {
    composed = reduced_concat(matrices, o.train, words, mode);
  } else {
    const auto pe = train_positional(matrices, o.train, o.train.dim, words, mode);
    composed = method == CompositionMethod::direct ? direct_concat(pe) : weighted_concat(pe);
  }

  AtomicFile vectors(o.output);
  write_vectors(vectors.stream(), composed.vectors);
  AtomicFile meta(o.output + ".meta");
  write_metadata(meta.stream(), composed);
  vectors.commit();
  meta.commit();
  err << "compose: " << to_string(method) << ", " << composed.layout.size() << " blocks of "
      << composed.block_dim << " -> " << composed.total_dim() << " dimensions\n";
}

void cmd_eval_analogy(const Options& o, std::ostream& out) {
  const UnitEmbeddings emb(load_vectors(o.vectors));
  auto in = open_input(o.questions);
  const auto questions = read_analogy_questions(in);
  if (questions.empty()) throw DataError(o.questions + ": no analogy questions");
  EvalReport report;
  report.analogy = eval_analogy(emb, questions);
  write_report(out, report);
  if (!o.output.empty()) emit(o.output, out, [&](std::ostream& s) { write_report(s, report); });
}

void cmd_eval_sim(const Options& o, std::ostream& out) {
  const UnitEmbeddings emb(load_vectors(o.vectors));
  EvalReport report;
  for (const auto& path : o.pairs) {
    auto in = open_input(path);
    const auto scored = read_scored_pairs(in, o.scale);
    const auto dataset =
        extract_synonyms(scored, o.threshold, std::filesystem::path(path).stem().string());
    if (dataset.pairs.empty()) {
      throw DataError(path + ": no pairs at or above the synonym threshold");
    }
    report.similarity.push_back(eval_similarity(emb, dataset));
  }
  write_report(out, report);
  if (!o.output.empty()) emit(o.output, out, [&](std::ostream& s) { write_report(s, report); });
}

void cmd_compare(const Options& o, std::ostream& out) {
  if (o.reports.size() < 2 || o.reports.size() % 2 != 0) {
    throw UsageError("compare takes reports in base/new pairs");
  }
  std::vector<std::vector<ComparisonRow>> all;
  for (std::size_t k = 0; k < o.reports.size(); k += 2) {
    auto base_in = open_input(o.reports[k]);
    auto new_in = open_input(o.reports[k + 1]);
    const auto base = read_key_values(base_in);
    const auto candidate = read_key_values(new_in);
    all.push_back(compare_reports(base, candidate));
    write_comparison_table(out, "# " + o.reports[k + 1] + " vs " + o.reports[k], all.back());
    out << '\n';
  }
  if (all.size() > 1) {
    out << "# mean relative improvement over " << all.size() << " comparisons\n";
    for (const auto& [metric, mean] : mean_improvements(all)) {
      out << metric << ' ' << format_fixed(mean) << "%\n";
    }
  }
}

// Config file ----------------------------------------------------------------

std::map<std::string, std::string> read_config(const std::string& path) {
  auto in = open_input(path);
  std::map<std::string, std::string> cfg;
  for (const auto& [k, v] : read_key_values(in)) {
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    cfg[trim(k)] = trim(v);
  }
  return cfg;
}

/// Injects config-file defaults as `--key=value` right after the subcommand
/// name, for keys the command line does not already set.
std::vector<std::string> apply_config(const std::vector<std::string>& args, CLI::App& app) {
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      config_path = args[++k];
    } else if (args[k].starts_with("--config=")) {
      config_path = args[k].substr(9);
    } else {
      rest.push_back(args[k]);
    }
  }
  if (config_path.empty()) return rest;

  const auto cfg = read_config(config_path);
  auto subs = app.get_subcommands([](CLI::App*) { return true; });
  auto sub_pos = std::find_if(rest.begin() + 1, rest.end(), [&](const std::string& a) {
    return std::any_of(subs.begin(), subs.end(), [&](CLI::App* s) { return s->get_name() == a; });
  });
  for (const auto& [key, value] : cfg) {
    const std::string flag = "--" + key;
    const bool known = std::any_of(subs.begin(), subs.end(), [&](CLI::App* s) {
      return s->get_option_no_throw(flag) != nullptr;
    });
    if (!known) throw UsageError("unknown key '" + key + "' in config file " + config_path);
    if (sub_pos == rest.end()) continue;
    CLI::App* sub = app.get_subcommand(*sub_pos);
    if (sub->get_option_no_throw(flag) == nullptr) continue;
    const bool given = std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
      return a == flag || a.starts_with(flag + "=");
    });
    if (given) continue;
    const auto at = sub_pos - rest.begin() + 1;
    rest.insert(rest.begin() + at, flag + "=" + value);
    sub_pos = rest.begin() + (at - 1);
  }
  return rest;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Positional co-occurrence word embeddings: counting, training, composition, evaluation",
               "wove"};
  app.set_version_flag("--version", std::string("wove ") + kVersion);
  app.require_subcommand(1);
  app.add_option("--config", "Plain-text key=value file supplying flag defaults");

  Options o;

  auto* vocab = app.add_subcommand("vocab", "Build the frequency-filtered vocabulary");
  vocab->add_option("--min-count", o.min_count, "Drop words seen fewer times")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  vocab->add_option("-o,--output", o.output, "Vocabulary file (default: stdout)");
  vocab->add_option("inputs", o.inputs, "Corpus text files")->required();

  auto* cooccur = app.add_subcommand("cooccur", "Count co-occurrences into shard files");
  cooccur->add_option("--vocab", o.vocab, "Vocabulary file")->capture_default_str();
  cooccur->add_option("--window", o.window, "Max context distance W")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cooccur->add_option("--mode", o.mode, "Counting mode")
      ->capture_default_str()
      ->check(CLI::IsMember({"baseline", "positional"}));
  cooccur->add_option("--memory", o.memory_mb, "In-memory accumulation budget in MB")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cooccur->add_option("--workers", o.train.workers, "Counting threads")->capture_default_str();
  cooccur->add_option("-o,--output", o.prefix, "Shard file prefix")->capture_default_str();
  cooccur->add_option("inputs", o.inputs, "Corpus text files")->required();

  auto* trainc = app.add_subcommand("train", "Train vectors on one co-occurrence shard");
  trainc->add_option("--vocab", o.vocab, "Vocabulary file")->capture_default_str();
  trainc->add_option("-i,--input", o.input, "Co-occurrence shard file")->required();
  trainc->add_option("-o,--output", o.output, "Vector file (default: stdout)");
  add_train_flags(trainc, o.train);
  trainc->add_option("--export", o.export_mode, "Exported vectors: w + w~ (sum) or w (pivot)")
      ->capture_default_str()
      ->check(CLI::IsMember({"sum", "pivot"}));

  auto* compose = app.add_subcommand("compose", "Train positional vectors and concatenate them");
  compose->add_option("--vocab", o.vocab, "Vocabulary file")->capture_default_str();
  compose->add_option("-i,--input", o.prefix, "Positional shard prefix")->capture_default_str();
  compose->add_option("--method", o.method, "Composition method")
      ->capture_default_str()
      ->check(CLI::IsMember({"direct", "reduced", "weighted"}));
  compose->add_option("--window", o.window, "Max context distance W")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  compose->add_option("-o,--output", o.output, "Composed vector file")->required();
  add_train_flags(compose, o.train);
  compose->add_option("--export", o.export_mode, "Exported vectors: w + w~ (sum) or w (pivot)")
      ->capture_default_str()
      ->check(CLI::IsMember({"sum", "pivot"}));

  auto* analogy = app.add_subcommand("eval-analogy", "Score vectors on analogy questions");
  analogy->add_option("--vectors", o.vectors, "Vector file")->required();
  analogy->add_option("--questions", o.questions, "Analogy question file")->required();
  analogy->add_option("-o,--output", o.output, "Also write the report here");

  auto* sim = app.add_subcommand("eval-sim", "Score vectors by synonym rank in the top 10");
  sim->add_option("--vectors", o.vectors, "Vector file")->required();
  sim->add_option("--pairs", o.pairs, "Scored pair files (word1 word2 score)")->required();
  sim->add_option("--scale", o.scale, "Maximum score of the pair files")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim->add_option("--threshold", o.threshold, "Minimum score/scale for a synonym pair")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  sim->add_option("-o,--output", o.output, "Also write the report here");

  auto* compare = app.add_subcommand("compare", "Relative improvement tables between reports");
  compare->add_option("reports", o.reports, "Report files as base new [base new ...]")->required();

  try {
    auto argv = apply_config(args, app);
    std::vector<std::string> reversed(argv.rbegin(), argv.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (vocab->parsed()) cmd_vocab(o, out, err);
    if (cooccur->parsed()) cmd_cooccur(o, err);
    if (trainc->parsed()) cmd_train(o, out, err);
    if (compose->parsed()) cmd_compose(o, err);
    if (analogy->parsed()) cmd_eval_analogy(o, out);
    if (sim->parsed()) cmd_eval_sim(o, out);
    if (compare->parsed()) cmd_compare(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace wove
