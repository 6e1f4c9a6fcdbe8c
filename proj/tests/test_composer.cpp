#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "wove/composer.hpp"
#include "wove/errors.hpp"
#include "wove/rng.hpp"

using namespace wove;

namespace {

std::vector<std::string> make_words(std::size_t n) {
  std::vector<std::string> w;
  for (std::size_t k = 0; k < n; ++k) w.push_back("w" + std::to_string(k));
  return w;
}

/// Positional embeddings filled with seeded noise; no training involved.
PositionalEmbeddings synthetic(int window, std::size_t vocab, std::size_t dim, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::map<int, EmbeddingMatrix> per_offset;
  for (int p : signed_offsets(window)) {
    EmbeddingMatrix emb(make_words(vocab), dim);
    for (WordId id = 0; id < vocab; ++id) {
      for (double& v : emb.row(id)) v = rng.uniform(-1, 1);
    }
    per_offset.emplace(p, std::move(emb));
  }
  return PositionalEmbeddings(window, std::move(per_offset));
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.dim = 6;
  cfg.epochs = 3;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("direct concatenation has dimension 2Wk and ascending block order") {
  const auto pe2 = synthetic(2, 3, 100, 1);
  const auto direct2 = direct_concat(pe2);
  CHECK(direct2.total_dim() == 400);
  CHECK(direct2.layout == std::vector<int>{-2, -1, 1, 2});
  CHECK(direct_concat(synthetic(5, 2, 100, 2)).total_dim() == 1000);

  for (WordId id = 0; id < 3; ++id) {
    const auto first = direct2.vectors.row(id).first(100);
    const auto source = pe2.at(-2).row(id);
    CHECK(std::equal(first.begin(), first.end(), source.begin()));
    for (int p : direct2.layout) {
      const auto block = direct2.block(id, p);
      CHECK(std::equal(block.begin(), block.end(), pe2.at(p).row(id).begin()));
    }
  }
  CHECK(direct_concat(pe2) == direct2);
}

TEST_CASE("weighted concatenation scales each block by 1/|p|") {
  const auto pe = synthetic(3, 4, 7, 3);
  const auto direct = direct_concat(pe);
  const auto weighted = weighted_concat(pe);
  CHECK(weighted.total_dim() == direct.total_dim());
  for (WordId id = 0; id < 4; ++id) {
    for (int p : weighted.layout) {
      const auto w = weighted.block(id, p);
      const auto d = direct.block(id, p);
      for (std::size_t k = 0; k < w.size(); ++k) {
        CHECK(w[k] == d[k] * (1.0 / std::abs(p)));
        if (std::abs(p) == 1) CHECK(w[k] == d[k]);
      }
      const auto recovered = weighted.positional_vector(id, p);
      for (std::size_t k = 0; k < recovered.size(); ++k) {
        CHECK(recovered[k] == doctest::Approx(pe.at(p).row(id)[k]).epsilon(1e-14));
      }
    }
  }
  const auto pe1 = synthetic(1, 5, 9, 4);
  CHECK(weighted_concat(pe1).vectors == direct_concat(pe1).vectors);
}

TEST_CASE("reduced concatenation uses floor(k/2W) per block") {
  CHECK(reduced_block_dim(100, 2) == 25);
  CHECK(reduced_block_dim(100, 3) == 16);
  CHECK(reduced_block_dim(100, 1) == 50);
  CHECK(2 * 3 * reduced_block_dim(100, 3) == 96);
  CHECK_THROWS_AS(reduced_block_dim(4, 3), std::invalid_argument);

  const auto corpus = wove::testing::random_corpus(8, 4000, 30, 300);
  const auto set = count_positional(corpus, 30, 2);
  auto cfg = small_config();
  cfg.dim = 10;
  const auto reduced = reduced_concat(set, cfg, make_words(30));
  CHECK(reduced.block_dim == 2);
  CHECK(reduced.total_dim() == 8);
  CHECK(reduced.base_dim == 10);
  CHECK(reduced.method == CompositionMethod::reduced);

  cfg.dim = 3;
  CHECK_THROWS_AS(reduced_concat(set, cfg, make_words(30)), std::invalid_argument);
}

TEST_CASE("train_positional trains one embedding per offset") {
  const auto corpus = wove::testing::random_corpus(6, 4000, 25, 300);
  const auto words = make_words(25);
  const auto set2 = count_positional(corpus, 25, 2);
  const auto pe2 = train_positional(set2, small_config(), 6, words);
  CHECK(pe2.per_offset().size() == 4);
  CHECK(pe2.dim() == 6);

  const auto set1 = count_positional(corpus, 25, 1);
  const auto pe1 = train_positional(set1, small_config(), 6, words);
  CHECK(pe1.per_offset().size() == 2);
  // Seeds derive from (seed, offset), so adding offsets leaves the others alone.
  CHECK(pe1.at(1) == pe2.at(1));
  CHECK(pe1.at(-1) == pe2.at(-1));

  CHECK(train_positional(set2, small_config(), 6, words) == pe2);
  auto parallel = small_config();
  parallel.workers = 3;
  CHECK(train_positional(set2, parallel, 6, words) == pe2);
  CHECK_FALSE(pe2.at(1) == pe2.at(2));
}

TEST_CASE("train_positional names an empty offset") {
  EncodedCorpus corpus;
  corpus.add_document({0, 1});
  const auto set = count_positional(corpus, 2, 2);
  try {
    train_positional(set, small_config(), 4, make_words(2));
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("-2") != std::string::npos);
  }
  CHECK_THROWS_AS(train_positional(set, small_config(), 0, make_words(2)), std::invalid_argument);
}

TEST_CASE("metadata sidecar") {
  const auto composed = weighted_concat(synthetic(2, 2, 5, 9));
  std::ostringstream out;
  write_metadata(out, composed);
  CHECK(out.str() ==
        "method=weighted\nwindow=2\ndim=5\nblock_dim=5\ntotal_dim=20\nblock_order=-2,-1,+1,+2\n");
  CHECK(parse_method("reduced") == CompositionMethod::reduced);
  CHECK_THROWS_AS(parse_method("sum"), std::invalid_argument);
}
