// Copyright 2026 The chanvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "chanvec/corpus.h"
#include "chanvec/embed.h"
#include "chanvec/error.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace chanvec {
namespace {

std::vector<double> RandomVec(std::mt19937_64& rng, int dims) {
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<double> v(static_cast<size_t>(dims));
  for (auto& x : v) x = g(rng);
  return v;
}

CbowExample RandomExample(std::mt19937_64& rng, int dims) {
  CbowExample ex;
  const int context = 1 + static_cast<int>(rng() % 6);
  const int negatives = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < context; ++i) ex.context.push_back(RandomVec(rng, dims));
  ex.target = RandomVec(rng, dims);
  for (int i = 0; i < negatives; ++i) ex.negatives.push_back(RandomVec(rng, dims));
  return ex;
}

double Norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Relative error of `analytic` against central differences of CbowLoss
// with respect to the vector `param` points into.
double FiniteDifferenceError(CbowExample& ex, std::vector<double>* param,
                             const std::vector<double>& analytic) {
  const double h = 1e-6;
  std::vector<double> numeric(param->size());
  for (size_t i = 0; i < param->size(); ++i) {
    const double keep = (*param)[i];
    (*param)[i] = keep + h;
    const double up = CbowLoss(ex);
    (*param)[i] = keep - h;
    const double down = CbowLoss(ex);
    (*param)[i] = keep;
    numeric[i] = (up - down) / (2 * h);
  }
  std::vector<double> diff(numeric.size());
  for (size_t i = 0; i < diff.size(); ++i) diff[i] = numeric[i] - analytic[i];
  const double scale = std::max({Norm(numeric), Norm(analytic), 1e-8});
  return Norm(diff) / scale;
}

TEST(CbowGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    CbowExample ex = RandomExample(rng, 4);
    const CbowGradient g = CbowLossGradient(ex);
    EXPECT_NEAR(g.loss, CbowLoss(ex), 1e-12);
    for (size_t c = 0; c < ex.context.size(); ++c) {
      CbowExample copy = ex;
      EXPECT_LE(FiniteDifferenceError(copy, &copy.context[c], g.d_context[c]), 1e-4);
    }
    {
      CbowExample copy = ex;
      EXPECT_LE(FiniteDifferenceError(copy, &copy.target, g.d_target), 1e-4);
    }
    for (size_t n = 0; n < ex.negatives.size(); ++n) {
      CbowExample copy = ex;
      EXPECT_LE(FiniteDifferenceError(copy, &copy.negatives[n], g.d_negatives[n]), 1e-4);
    }
  }
}

TEST(CosineSimilarity, KnownValues) {
  const std::vector<double> v = {0.3, -1.2, 2.0};
  EXPECT_NEAR(CosineSimilarity(v, v), 1.0, 1e-15);
  EXPECT_EQ(CosineSimilarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_NEAR(CosineSimilarity(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}),
              0.9746318, 1e-6);
  EXPECT_THROW(CosineSimilarity(std::vector<double>{0, 0}, std::vector<double>{1, 0}), Error);
  EXPECT_THROW(CosineSimilarity(std::vector<double>{1}, std::vector<double>{1, 0}), Error);
}

TEST(Nearest, DuplicateAndSelfExclusion) {
  const EmbeddingSet set(2, {{"Q", {1, 1}}, {"X", {1, 1}}, {"Y", {1, -1}}});
  const std::vector<ChannelId> only_x = {"X"};
  const auto one = Nearest(set, "Q", 1, &only_x);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].id, "X");
  EXPECT_NEAR(one[0].similarity, 1.0, 1e-15);

  const std::vector<ChannelId> with_self = {"Q", "X", "Y"};
  for (const auto& n : Nearest(set, "Q", 5, &with_self)) EXPECT_NE(n.id, "Q");
  EXPECT_EQ(Nearest(set, "Q", 5).size(), 2u);
}

TEST(Nearest, MatchesExhaustiveScan) {
  const auto vectors = oracle::RandomVectors(200, 8, 21);
  const EmbeddingSet set(8, vectors);
  for (const auto& [id, v] : vectors) {
    const auto got = Nearest(set, id, 10);
    const auto want = oracle::ScanNearest(vectors, id, 10);
    ASSERT_EQ(got.size(), want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].id, want[i].first);
      EXPECT_NEAR(got[i].similarity, want[i].second, 1e-12);
    }
  }
}

TEST(Nearest, TiesBreakById) {
  const EmbeddingSet set(2, {{"q", {1, 0}}, {"b", {0, 1}}, {"a", {0, -1}}, {"c", {0, 2}}});
  const auto n = Nearest(set, "q", 3);
  ASSERT_EQ(n.size(), 3u);
  EXPECT_EQ(n[0].id, "a");
  EXPECT_EQ(n[1].id, "b");
  EXPECT_EQ(n[2].id, "c");
}

TEST(Nearest, ZeroQueryIsUnsupported) {
  const EmbeddingSet set(2, {{"z", {0, 0}}, {"x", {1, 0}}});
  try {
    Nearest(set, "z", 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedChannel);
  }
  EXPECT_THROW(Nearest(set, "missing", 1), Error);
}

Corpus TwoCommunityCorpus() {
  std::mt19937_64 rng(9);
  std::vector<CommenterRecord> records;
  for (int u = 0; u < 600; ++u) {
    const int community = u % 2;
    std::vector<int> pool(20);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    CommenterRecord r;
    r.commenter_id = "u" + std::to_string(u);
    for (int i = 0; i < 6; ++i) {
      r.channel_ids.push_back("g" + std::to_string(community) + "-" + std::to_string(pool[i]));
    }
    records.push_back(std::move(r));
  }
  return BuildCorpus(records, CorpusConfig{});
}

TEST(TrainEmbeddings, ShapeAndDeterminism) {
  const Corpus corpus = TwoCommunityCorpus();
  EmbeddingConfig config;
  config.dims = 16;
  config.epochs = 3;
  config.deterministic = true;
  TrainingStats stats;
  const EmbeddingSet a = TrainEmbeddings(corpus, config, &stats);
  EXPECT_EQ(a.size(), 40u);
  EXPECT_EQ(a.dims(), 16);
  for (const auto& id : a.ids()) EXPECT_EQ(a.Vector(id).size(), 16u);
  EXPECT_EQ(stats.epoch_loss.size(), 3u);
  EXPECT_EQ(a, TrainEmbeddings(corpus, config));
}

TEST(TrainEmbeddings, SeparatesCommunities) {
  const Corpus corpus = TwoCommunityCorpus();
  EmbeddingConfig config;
  config.dims = 32;
  config.deterministic = true;
  const EmbeddingSet set = TrainEmbeddings(corpus, config);
  double intra = 0, inter = 0;
  int n_intra = 0, n_inter = 0;
  for (const auto& a : set.ids()) {
    for (const auto& b : set.ids()) {
      if (a >= b) continue;
      const double c = CosineSimilarity(set.Vector(a), set.Vector(b));
      if (a.substr(0, 2) == b.substr(0, 2)) {
        intra += c;
        ++n_intra;
      } else {
        inter += c;
        ++n_inter;
      }
    }
  }
  EXPECT_GE(intra / n_intra - inter / n_inter, 0.3);
}

TEST(TrainEmbeddings, LossDecreases) {
  EmbeddingConfig config;
  config.dims = 16;
  config.epochs = 8;
  config.deterministic = true;
  TrainingStats stats;
  TrainEmbeddings(TwoCommunityCorpus(), config, &stats);
  EXPECT_LT(stats.epoch_loss.back(), stats.epoch_loss.front());
}

TEST(TrainEmbeddings, MultiThreadedRunsCover) {
  EmbeddingConfig config;
  config.dims = 8;
  config.epochs = 2;
  config.threads = 2;
  const EmbeddingSet set = TrainEmbeddings(TwoCommunityCorpus(), config);
  EXPECT_EQ(set.size(), 40u);
  for (size_t i = 0; i < set.size(); ++i) {
    for (double x : set.VectorAt(i)) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(TrainEmbeddings, RejectsBadConfig) {
  EmbeddingConfig config;
  config.dims = 0;
  EXPECT_THROW(TrainEmbeddings(TwoCommunityCorpus(), config), Error);
  config = EmbeddingConfig{};
  config.window = 0;
  EXPECT_THROW(config.Validate(), Error);
  config = EmbeddingConfig{};
  config.initial_lr = -1;
  EXPECT_THROW(config.Validate(), Error);
}

TEST(EmbeddingIo, RoundTripsWithinPrintPrecision) {
  const auto vectors = oracle::RandomVectors(20, 5, 3);
  const EmbeddingSet set(5, vectors);
  const auto path = std::filesystem::temp_directory_path() / "chanvec_emb_io.txt";
  WriteEmbeddingsText(path, set);
  const EmbeddingSet back = ReadEmbeddingsText(path);
  ASSERT_EQ(back.ids(), set.ids());
  for (size_t i = 0; i < set.size(); ++i) {
    for (int d = 0; d < 5; ++d) {
      EXPECT_NEAR(back.VectorAt(i)[d], set.VectorAt(i)[d], 1e-5 * (1 + std::abs(set.VectorAt(i)[d])));
    }
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace chanvec
