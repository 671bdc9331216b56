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

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "chanvec/corpus.h"
#include "chanvec/embed.h"
#include "chanvec/eval.h"
#include "chanvec/knn.h"
#include "chanvec/synth.h"

namespace chanvec {
namespace {

Corpus BenchCorpus() {
  EcosystemConfig w;
  w.n_communities = 4;
  w.channels_per_community = 50;
  w.n_commenters = 4000;
  w.mean_subs_per_commenter = 15;
  const Ecosystem eco = GenerateEcosystem(w);
  return ShuffleSentences(BuildCorpus(FullRecords(*eco.truth), CorpusConfig{}), 1);
}

void BM_TrainEpoch(benchmark::State& state) {
  static const Corpus corpus = BenchCorpus();
  EmbeddingConfig config;
  config.dims = static_cast<int>(state.range(0));
  config.epochs = 1;
  config.deterministic = true;
  for (auto _ : state) benchmark::DoNotOptimize(TrainEmbeddings(corpus, config));
  state.SetItemsProcessed(state.iterations() * corpus.TokenCount());
}
BENCHMARK(BM_TrainEpoch)->Arg(16)->Arg(200)->Unit(benchmark::kMillisecond);

EmbeddingSet RandomSet(int n, int dims) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::map<ChannelId, std::vector<double>> vectors;
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(static_cast<size_t>(dims));
    for (auto& x : v) x = g(rng);
    vectors["c" + std::to_string(i)] = std::move(v);
  }
  return EmbeddingSet(dims, std::move(vectors));
}

void BM_Nearest(benchmark::State& state) {
  const EmbeddingSet set = RandomSet(static_cast<int>(state.range(0)), 200);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Nearest(set, set.ids()[i++ % set.size()], kDefaultK));
  }
}
BENCHMARK(BM_Nearest)->Arg(1000)->Arg(10000);

void BM_KnnScore(benchmark::State& state) {
  const EmbeddingSet set = RandomSet(5000, 200);
  std::set<ChannelId> pos, neg;
  for (size_t i = 0; i < 1000; ++i) (i % 2 ? pos : neg).insert(set.ids()[i]);
  const auto labeled = LabeledDataset::Binary(pos, neg);
  size_t i = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(KnnScore(set, labeled, set.ids()[i], kDefaultK));
    i = i + 1 < set.size() ? i + 1 : 1000;
  }
}
BENCHMARK(BM_KnnScore);

void BM_RocAuc(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<ScoredLabel> s;
  for (int64_t i = 0; i < state.range(0); ++i) {
    s.push_back({static_cast<double>(rng() % 1000) / 1000.0, static_cast<int>(rng() % 2)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(RocAuc(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RocAuc)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oNLogN);

}  // namespace
}  // namespace chanvec

BENCHMARK_MAIN();
