// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "wove/cli.hpp"
#include "wove/composer.hpp"
#include "wove/cooccur.hpp"
#include "wove/evaluator.hpp"
#include "wove/report.hpp"
#include "wove/trainer.hpp"

using namespace wove;
using wove::testing::TempDir;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

/// Largest |m - oracle| over the union of both supports.
double max_deviation(const CoocMatrix& m, const wove::testing::DenseCounts& oracle) {
  double worst = 0.0;
  for (const auto& [key, value] : oracle) {
    worst = std::max(worst, std::abs(m.at(key.first, key.second) - value));
  }
  for (const auto& e : m.entries()) {
    if (!oracle.contains({e.i, e.j})) worst = std::max(worst, std::abs(e.value));
  }
  return worst;
}

// Counting ------------------------------------------------------------------

struct CountingCase {
  EncodedCorpus corpus;
  int window;
};

std::vector<CountingCase> counting_cases() {
  std::vector<CountingCase> cases;
  for (int k = 0; k < 20; ++k) {
    cases.push_back({wove::testing::random_corpus(100 + k, 10000, 200), 1 + k % 5});
  }
  return cases;
}

Outcome counting_oracle(const std::vector<CountingCase>& cases) {
  double worst = 0.0;
  double counting_time = 0.0;
  for (const auto& c : cases) {
    const auto t0 = Clock::now();
    const auto base = count_baseline(c.corpus, 200, c.window);
    const auto pos = count_positional(c.corpus, 200, c.window);
    counting_time += seconds_since(t0);
    worst = std::max(worst, max_deviation(base, wove::testing::brute_force_baseline(c.corpus, c.window)));
    for (int p : signed_offsets(c.window)) {
      worst = std::max(worst, max_deviation(pos.at(p), wove::testing::brute_force_positional(c.corpus, p)));
    }
  }
  return {worst <= 1e-12 && counting_time < 5.0,
          fmt("max deviation %.3g, counting time %.3f s", worst, counting_time)};
}

Outcome decomposition(const std::vector<CountingCase>& cases) {
  double worst = 0.0;
  for (const auto& c : cases) {
    worst = std::max(worst, verify_decomposition(count_baseline(c.corpus, 200, c.window),
                                                 count_positional(c.corpus, 200, c.window)));
  }
  return {worst < 1e-9, fmt("max residual %.3g over 20 corpora", worst)};
}

// Training ------------------------------------------------------------------

double record_loss(const GloveModel& m, const CoocEntry& r, double x_max, double alpha) {
  const double f = r.value < x_max ? std::pow(r.value / x_max, alpha) : 1.0;
  double s = m.pivot_bias(r.i) + m.context_bias(r.j) - std::log(r.value);
  for (std::size_t d = 0; d < m.dim(); ++d) s += m.pivot(r.i)[d] * m.context(r.j)[d];
  return f * s * s;
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_real_distribution<double> xdist(0.2, 200.0);
  const double h = 1e-5;
  const std::size_t dim = 8;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    GloveModel m(4, dim);
    for (WordId id = 0; id < 4; ++id) {
      for (auto& v : m.pivot(id)) v = u(gen);
      for (auto& v : m.context(id)) v = u(gen);
      m.pivot_bias(id) = u(gen);
      m.context_bias(id) = u(gen);
    }
    const CoocEntry r{static_cast<WordId>(trial % 4), static_cast<WordId>((trial + 1) % 4), xdist(gen)};
    const auto g = loss_and_grad(m, r, 100.0, 0.75);
    auto check = [&](double analytic, double& param) {
      const double saved = param;
      param = saved + h;
      const double up = record_loss(m, r, 100.0, 0.75);
      param = saved - h;
      const double down = record_loss(m, r, 100.0, 0.75);
      param = saved;
      const double numeric = (up - down) / (2 * h);
      const double rel =
          std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      worst = std::max(worst, rel);
    };
    for (std::size_t d = 0; d < dim; ++d) {
      check(g.pivot[d], m.pivot(r.i)[d]);
      check(g.context[d], m.context(r.j)[d]);
    }
    check(g.pivot_bias, m.pivot_bias(r.i));
    check(g.context_bias, m.context_bias(r.j));
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-4 && elapsed < 1.0,
          fmt("max relative error %.3g over 100 instances, %.3f s", worst, elapsed)};
}

Outcome closed_form() {
  const auto m = CoocMatrix::from_entries(2, {{0, 1, std::numbers::e}});
  TrainConfig cfg;
  cfg.dim = 2;
  cfg.epochs = 500;
  cfg.workers = 1;
  const auto model = train(m, cfg).model;
  double fit = model.pivot_bias(0) + model.context_bias(1);
  for (std::size_t d = 0; d < 2; ++d) fit += model.pivot(0)[d] * model.context(1)[d];
  return {std::abs(fit - 1.0) <= 1e-3, fmt("w.w~ + b + b~ = %.6f after 500 epochs", fit)};
}

// Composition ---------------------------------------------------------------

PositionalEmbeddings random_positional(int window, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  const std::vector<std::string> words = {"a", "b", "c"};
  std::map<int, EmbeddingMatrix> per_offset;
  for (int p : signed_offsets(window)) {
    EmbeddingMatrix e(words, dim);
    for (WordId id = 0; id < e.size(); ++id) {
      for (auto& v : e.row(id)) v = nd(gen);
    }
    per_offset.emplace(p, std::move(e));
  }
  return PositionalEmbeddings(window, std::move(per_offset));
}

PositionalCoocSet tiny_positional(int window) {
  EncodedCorpus corpus;
  corpus.add_document({0, 1, 2, 0, 2, 1, 0, 1, 2, 2, 1, 0});
  return count_positional(corpus, 3, window);
}

Outcome dimension_laws() {
  const std::size_t d2 = direct_concat(random_positional(2, 100, 1)).total_dim();
  const std::size_t d5 = direct_concat(random_positional(5, 100, 2)).total_dim();

  TrainConfig cfg;
  cfg.dim = 100;
  cfg.epochs = 1;
  const std::vector<std::string> words = {"a", "b", "c"};
  const std::size_t r2 = reduced_concat(tiny_positional(2), cfg, words).total_dim();
  const std::size_t r3 = reduced_concat(tiny_positional(3), cfg, words).total_dim();

  const auto pe1 = random_positional(1, 100, 3);
  const bool same = weighted_concat(pe1).vectors == direct_concat(pe1).vectors;

  const bool pass = d2 == 400 && d5 == 1000 && r2 == 100 && r3 == 96 && same;
  return {pass, "direct W=2 " + std::to_string(d2) + ", direct W=5 " + std::to_string(d5) +
                    ", reduced W=2 " + std::to_string(r2) + ", reduced W=3 " + std::to_string(r3) +
                    ", weighted==direct at W=1 " + (same ? "yes" : "no")};
}

// Order sensitivity ---------------------------------------------------------

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  return ab / std::sqrt(aa * bb);
}

/// Filler text with embedded "m1 c" and "c m2" pairs, c drawn from a shared
/// companion set. Within +-2 both markers see the same unordered neighbours,
/// but m1 always precedes its companion and m2 always follows it.
EncodedCorpus mirrored_corpus(std::uint64_t seed, WordId m1, WordId m2, WordId first_companion,
                              WordId first_filler, std::size_t vocab, std::size_t min_tokens) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<WordId> companion(first_companion, first_filler - 1);
  std::uniform_int_distribution<WordId> filler(first_filler, static_cast<WordId>(vocab - 1));
  std::bernoulli_distribution insert(0.1), which(0.5);
  EncodedCorpus corpus;
  std::size_t tokens = 0;
  while (tokens < min_tokens) {
    std::vector<WordId> doc;
    for (int slot = 0; slot < 100; ++slot) {
      if (!insert(gen)) {
        doc.push_back(filler(gen));
        continue;
      }
      const WordId c = companion(gen);
      if (which(gen)) {
        doc.insert(doc.end(), {m1, c});
      } else {
        doc.insert(doc.end(), {c, m2});
      }
    }
    tokens += doc.size();
    corpus.add_document(std::move(doc));
  }
  return corpus;
}

Outcome order_sensitivity() {
  const auto t0 = Clock::now();
  constexpr WordId m1 = 0, m2 = 1, first_companion = 2, first_filler = 22;
  constexpr std::size_t vocab = 522;
  std::vector<std::string> words(vocab);
  for (std::size_t id = 0; id < vocab; ++id) words[id] = "w" + std::to_string(id);

  std::vector<double> gaps;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto corpus =
        mirrored_corpus(1000 + seed, m1, m2, first_companion, first_filler, vocab, 200000);
    TrainConfig cfg;
    cfg.dim = 50;
    cfg.seed = seed;
    const auto glove = emit_vectors(train(count_baseline(corpus, vocab, 2), cfg).model, words);
    const auto wove =
        direct_concat(train_positional(count_positional(corpus, vocab, 2), cfg, 50, words)).vectors;
    const double cb = cosine(glove.row(m1), glove.row(m2));
    const double cw = cosine(wove.row(m1), wove.row(m2));
    gaps.push_back(cb - cw);
    detail += fmt("%.3f ", cb - cw);
  }
  std::sort(gaps.begin(), gaps.end());
  const double median = gaps[2];
  const double elapsed = seconds_since(t0);
  return {median >= 0.3 && elapsed < 600.0,
          "gaps " + detail + fmt("median %.3f, %.1f s", median, elapsed)};
}

// Report arithmetic ---------------------------------------------------------

Outcome report_arithmetic() {
  struct Cell {
    double base, candidate, published;
  };
  const Cell cells[] = {
      {2709, 4273, 57.73}, {5314, 7516, 41.43}, {6532, 8517, 30.38}, {7096, 8892, 25.31},
      {7089, 8891, 25.42}, {2709, 4336, 60.05}, {5314, 6383, 20.11}, {6532, 6273, -3.96},
      {7096, 6978, -1.66}, {7089, 7238, 2.10},
  };
  double worst = 0.0;
  for (const auto& c : cells) {
    worst = std::max(worst, std::abs(relative_improvement(c.candidate, c.base) - c.published));
  }
  const AnalogyTally tally{19544, 19544, 7096};
  const double acc = tally.accuracy();
  const bool acc_ok = format_fixed(acc) == "36.31";
  return {worst <= 0.01 && acc_ok,
          fmt("max cell deviation %.4f, 7096/19544 = %.4f%%", worst, acc)};
}

// Similarity protocol -------------------------------------------------------

Outcome similarity_protocol() {
  // Unit vectors at 0, 10, 20, 30, 40 degrees: t's neighbours are n0..n3 in order.
  const std::vector<std::string> words = {"t", "n0", "n1", "n2", "n3"};
  EmbeddingMatrix emb(words, 2);
  for (WordId id = 0; id < 5; ++id) {
    const double angle = 10.0 * id * std::numbers::pi / 180.0;
    emb.row(id)[0] = std::cos(angle);
    emb.row(id)[1] = std::sin(angle);
  }
  const UnitEmbeddings unit(emb);
  const SynonymDataset ds{"hand", {{"t", "n0"}, {"t", "n3"}, {"t", "absent"}, {"absent", "t"},
                                   {"n3", "n2"}}};
  const auto r = eval_similarity(unit, ds);
  const std::vector<int> expected = {0, 3, 10, 10, 0};
  const bool ranks_ok = r.ranks == expected;
  const bool avg_ok = std::abs(r.average_rank - 23.0 / 5.0) < 1e-12 && r.found == 3;

  // Ranks {10, 10, 8}: 11 words on a quarter circle, synonym ninth nearest.
  std::vector<std::string> many;
  for (int k = 0; k < 11; ++k) many.push_back("v" + std::to_string(k));
  EmbeddingMatrix arc(many, 2);
  for (WordId id = 0; id < 11; ++id) {
    const double angle = 8.0 * id * std::numbers::pi / 180.0;
    arc.row(id)[0] = std::cos(angle);
    arc.row(id)[1] = std::sin(angle);
  }
  const SynonymDataset three{"three", {{"v0", "oov"}, {"oov", "v1"}, {"v0", "v9"}}};
  const auto r3 = eval_similarity(UnitEmbeddings(arc), three);
  const bool three_ok = r3.ranks == std::vector<int>{10, 10, 8} && r3.found == 1 &&
                        format_fixed(r3.average_rank) == "9.33";

  return {ranks_ok && avg_ok && three_ok,
          fmt("5-word average %.2f (found %.0f), {10,10,8} average %.2f", r.average_rank,
              static_cast<double>(r.found), r3.average_rank)};
}

// End-to-end determinism ----------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_corpus(const std::string& path, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> word(0, 59);
  std::ofstream out(path);
  for (int line = 0; line < 400; ++line) {
    for (int k = 0; k < 25; ++k) out << (k ? " " : "") << "word" << word(gen);
    out << (line % 20 == 19 ? "\n\n" : "\n");
  }
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "wove");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (code != 0) std::fprintf(stderr, "wove %s failed: %s\n", args[1].c_str(), err.str().c_str());
  return code;
}

std::pair<std::string, std::string> pipeline(const TempDir& dir, const std::string& corpus) {
  const auto vocab = dir / "vocab.txt";
  const std::string common = "--seed=11";
  if (run({"vocab", "-o", vocab, corpus}) != 0) return {};
  if (run({"cooccur", "--vocab", vocab, "--window", "2", "-o", dir / "base", corpus}) != 0) return {};
  if (run({"cooccur", "--vocab", vocab, "--window", "2", "--mode", "positional", "-o", dir / "pos",
           corpus}) != 0) {
    return {};
  }
  if (run({"train", "--vocab", vocab, "-i", dir / "base.bin", "-o", dir / "glove.txt", "--dim",
           "16", "--epochs", "5", "--workers", "1", common}) != 0) {
    return {};
  }
  if (run({"compose", "--vocab", vocab, "-i", dir / "pos", "--method", "direct", "--window", "2",
           "--dim", "8", "--epochs", "5", "--workers", "1", "-o", dir / "wove.txt", common}) != 0) {
    return {};
  }
  return {slurp(dir / "glove.txt"), slurp(dir / "wove.txt")};
}

Outcome determinism() {
  TempDir input;
  const auto corpus = input / "corpus.txt";
  write_text_corpus(corpus, 5);
  TempDir first, second;
  const auto a = pipeline(first, corpus);
  const auto b = pipeline(second, corpus);
  const bool nonempty = !a.first.empty() && !a.second.empty();
  const bool same = a == b;
  return {nonempty && same, std::string("baseline vectors ") +
                                (a.first == b.first ? "identical" : "differ") + ", composed vectors " +
                                (a.second == b.second ? "identical" : "differ") + ", " +
                                std::to_string(a.first.size() + a.second.size()) + " bytes"};
}

}  // namespace

int main() {
  const auto cases = counting_cases();
  report(1, "counting matches brute-force oracle", [&] { return counting_oracle(cases); });
  report(2, "decomposition identity", [&] { return decomposition(cases); });
  report(3, "gradient check", gradient_check);
  report(4, "closed-form convergence", closed_form);
  report(5, "dimensionality laws", dimension_laws);
  report(6, "order sensitivity", order_sensitivity);
  report(7, "report arithmetic", report_arithmetic);
  report(8, "similarity protocol", similarity_protocol);
  report(9, "end-to-end determinism", determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
