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

#include "commands.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "chanvec/corpus.h"
#include "chanvec/csv.h"
#include "chanvec/discovery.h"
#include "chanvec/embed.h"
#include "chanvec/eval.h"
#include "chanvec/knn.h"
#include "chanvec/synth.h"
#include "chanvec/util.h"
#include "manifest.h"

namespace chanvec::tools {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::string FormatOptional(const std::optional<double>& x) {
  return x ? FormatDouble(*x) : "";
}

json OptionalJson(const std::optional<double>& x) {
  return x ? json(*x) : json(nullptr);
}

void EnsureParent(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) Fail(ErrorCode::kIo, "cannot create " + path.parent_path().string());
  }
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + dir.string());
}

// Runs `write` against a temporary sibling, then renames it over `path`.
void WriteOutput(const fs::path& path, const std::function<void(const fs::path&)>& write) {
  EnsureParent(path);
  fs::path tmp = path;
  tmp += ".tmp";
  write(tmp);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot rename into " + path.string());
}

void WriteCsvOutput(const fs::path& path,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream body;
  for (const auto& r : rows) csv::WriteRecord(body, r);
  EnsureParent(path);
  WriteFileAtomically(path, body.str());
}

// Every option of `sub` with its parsed or default value.
void RecordOptions(const CLI::App& sub, RunManifest& manifest) {
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name();
    if (name.empty() || name == "--help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (size_t i = 0; i < results.size(); ++i) {
        if (i > 0) value += ",";
        value += results[i];
      }
      if (results.empty()) value = "true";
    } else {
      value = opt->get_default_str();
    }
    manifest.SetParameter(name, value);
  }
}

fs::path ManifestFor(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

std::vector<ChannelId> ReadIdList(const fs::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<ChannelId> ids;
  for (std::string line; std::getline(in, line);) {
    std::istringstream words(line);
    std::string id;
    if (words >> id) ids.push_back(id);
  }
  return ids;
}

// ---------------------------------------------------------------------------
// synth-gen

struct SynthGenOptions {
  fs::path out;
  EcosystemConfig world;
  int label_community = 0;
  int label_positives = 50;
  int label_negatives = 50;
  std::string tag = "target";
};

void AddSynthGen(CLI::App& app, std::function<void()>& action,
                 const std::vector<std::string>& argv) {
  auto opts = std::make_shared<SynthGenOptions>();
  opts->world.mean_subs_per_commenter = 20;
  auto* sub = app.add_subcommand("synth-gen", "Generate a synthetic world with planted communities");
  sub->add_option("--out", opts->out, "Output directory")->required();
  sub->add_option("--communities", opts->world.n_communities)->capture_default_str();
  sub->add_option("--channels-per-community", opts->world.channels_per_community)->capture_default_str();
  sub->add_option("--commenters", opts->world.n_commenters)->capture_default_str();
  sub->add_option("--mean-subs", opts->world.mean_subs_per_commenter)->capture_default_str();
  sub->add_option("--affinity", opts->world.in_community_affinity)->capture_default_str();
  sub->add_option("--public-rate", opts->world.public_profile_rate)->capture_default_str();
  sub->add_option("--sample-cap", opts->world.sample_subs_cap)->capture_default_str();
  sub->add_option("--full-per-channel", opts->world.full_subs_commenters_per_channel)->capture_default_str();
  sub->add_option("--comments-per-video", opts->world.comments_per_video)->capture_default_str();
  sub->add_option("--videos", opts->world.videos_sampled)->capture_default_str();
  sub->add_option("--subs-exponent", opts->world.subscriber_exponent)->capture_default_str();
  sub->add_option("--min-subs", opts->world.min_subscribers)->capture_default_str();
  sub->add_option("--max-subs", opts->world.max_subscribers)->capture_default_str();
  sub->add_option("--comment-saturation-subs", opts->world.comment_saturation_subs)->capture_default_str();
  sub->add_option("--seed", opts->world.seed)->capture_default_str();
  sub->add_option("--label-community", opts->label_community)->capture_default_str();
  sub->add_option("--label-positives", opts->label_positives)->capture_default_str();
  sub->add_option("--label-negatives", opts->label_negatives)->capture_default_str();
  sub->add_option("--tag", opts->tag)->capture_default_str();
  sub->callback([&action, sub, opts, argv] {
    action = [sub, opts, argv] {
      RunManifest manifest("synth-gen", argv);
      RecordOptions(*sub, manifest);
      manifest.SetSeed(opts->world.seed);
      const Ecosystem eco = GenerateEcosystem(opts->world);
      const GroundTruth& truth = *eco.truth;
      if (opts->label_community < 0 ||
          opts->label_community >= opts->world.n_communities) {
        Fail(ErrorCode::kInvalidArgument, "--label-community out of range");
      }
      // Most-subscribed channels of the community are the known positives.
      std::vector<ChannelId> members = truth.CommunityChannels(opts->label_community);
      std::stable_sort(members.begin(), members.end(), [&](const auto& a, const auto& b) {
        return truth.channels.at(a).subscriber_count >
               truth.channels.at(b).subscriber_count;
      });
      std::vector<ChannelId> others;
      for (const auto& [id, t] : truth.channels) {
        if (t.community != opts->label_community) others.push_back(id);
      }
      if (static_cast<size_t>(opts->label_positives) > members.size() ||
          static_cast<size_t>(opts->label_negatives) > others.size() ||
          opts->label_positives < 0 || opts->label_negatives < 0) {
        Fail(ErrorCode::kInvalidArgument, "not enough channels to label");
      }
      std::mt19937_64 rng(MixSeed(opts->world.seed, 0x1abe1));
      std::shuffle(others.begin(), others.end(), rng);
      std::vector<LabelRow> rows;
      for (int i = 0; i < opts->label_positives; ++i) {
        rows.push_back({members[static_cast<size_t>(i)], LabelKind::kBinary, "1", opts->tag});
      }
      for (int i = 0; i < opts->label_negatives; ++i) {
        rows.push_back({others[static_cast<size_t>(i)], LabelKind::kBinary, "0", opts->tag});
      }
      std::sort(rows.begin(), rows.end(),
                [](const auto& a, const auto& b) { return a.channel_id < b.channel_id; });

      EnsureDir(opts->out);
      ExportWorld(truth, opts->world, opts->out);
      WriteOutput(opts->out / "labels.csv",
                  [&](const fs::path& p) { WriteLabelsCsv(p, rows); });
      for (const char* f : {"channels.csv", "subscriptions.jsonl", "world.json", "labels.csv"}) {
        manifest.AddOutput(opts->out / f);
      }
      manifest.Write(opts->out / "manifest.json");
    };
  });
}

// ---------------------------------------------------------------------------
// build-corpus

struct CorpusOptions {
  fs::path subscriptions;
  fs::path out;
  CorpusConfig corpus;
  uint64_t seed = 1;
  bool no_shuffle = false;
};

Corpus CorpusFromSubscriptions(const fs::path& path, const CorpusConfig& config,
                               uint64_t seed, bool shuffle) {
  const auto records = ReadRecordsJsonl(path);
  Corpus corpus = BuildCorpus(records, config);
  return shuffle ? ShuffleSentences(std::move(corpus), seed) : corpus;
}

void AddBuildCorpus(CLI::App& app, std::function<void()>& action,
                    const std::vector<std::string>& argv) {
  auto opts = std::make_shared<CorpusOptions>();
  auto* sub = app.add_subcommand("build-corpus", "Filter and shuffle subscription sentences");
  sub->add_option("--subscriptions", opts->subscriptions, "Subscriptions JSONL")->required();
  sub->add_option("--out", opts->out, "Corpus text file")->required();
  sub->add_option("--min-channel-freq", opts->corpus.min_channel_freq)->capture_default_str();
  sub->add_option("--min-sentence-len", opts->corpus.min_sentence_len)->capture_default_str();
  sub->add_option("--seed", opts->seed)->capture_default_str();
  sub->add_flag("--no-shuffle", opts->no_shuffle, "Keep the original channel order");
  sub->callback([&action, sub, opts, argv] {
    action = [sub, opts, argv] {
      RunManifest manifest("build-corpus", argv);
      RecordOptions(*sub, manifest);
      manifest.SetSeed(opts->seed);
      manifest.AddInput(opts->subscriptions);
      const Corpus corpus = CorpusFromSubscriptions(
          opts->subscriptions, opts->corpus, opts->seed, !opts->no_shuffle);
      WriteOutput(opts->out, [&](const fs::path& p) { WriteCorpusText(p, corpus); });
      manifest.AddOutput(opts->out);
      json stats;
      stats["sentences"] = corpus.sentences.size();
      stats["channels"] = corpus.channel_counts.size();
      stats["tokens"] = corpus.TokenCount();
      manifest.SetExtra("corpus", stats.dump());
      manifest.Write(ManifestFor(opts->out));
    };
  });
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  fs::path corpus;
  fs::path subscriptions;
  fs::path out;
  EmbeddingConfig embedding;
  CorpusConfig corpus_config;
};

void AddEmbeddingFlags(CLI::App* sub, EmbeddingConfig& e) {
  sub->add_option("--dims", e.dims)->capture_default_str();
  sub->add_option("--window", e.window)->capture_default_str();
  sub->add_option("--epochs", e.epochs)->capture_default_str();
  sub->add_option("--negative", e.negative_samples)->capture_default_str();
  sub->add_option("--lr", e.initial_lr)->capture_default_str();
  sub->add_option("--min-count", e.min_count)->capture_default_str();
  sub->add_option("--threads", e.threads, "Workers (0: CHANVEC_THREADS or all cores)")
      ->capture_default_str();
  sub->add_flag("--deterministic", e.deterministic,
                "Single-threaded training with reproducible output");
}

void AddTrain(CLI::App& app, std::function<void()>& action,
              const std::vector<std::string>& argv) {
  auto opts = std::make_shared<TrainOptions>();
  auto* sub = app.add_subcommand("train", "Train channel embeddings");
  auto* corpus_opt = sub->add_option("--corpus", opts->corpus, "Corpus text file");
  auto* subs_opt = sub->add_option("--subscriptions", opts->subscriptions,
                                   "Subscriptions JSONL (corpus built on the fly)");
  corpus_opt->excludes(subs_opt);
  sub->add_option("--out", opts->out, "Embeddings text file")->required();
  AddEmbeddingFlags(sub, opts->embedding);
  sub->add_option("--seed", opts->embedding.seed)->capture_default_str();
  sub->add_option("--min-channel-freq", opts->corpus_config.min_channel_freq)->capture_default_str();
  sub->add_option("--min-sentence-len", opts->corpus_config.min_sentence_len)->capture_default_str();
  sub->callback([&action, sub, opts, argv] {
    action = [sub, opts, argv] {
      if (opts->corpus.empty() == opts->subscriptions.empty()) {
        Fail(ErrorCode::kInvalidArgument, "give exactly one of --corpus or --subscriptions");
      }
      RunManifest manifest("train", argv);
      RecordOptions(*sub, manifest);
      manifest.SetSeed(opts->embedding.seed);
      Corpus corpus;
      if (!opts->corpus.empty()) {
        manifest.AddInput(opts->corpus);
        corpus = ReadCorpusText(opts->corpus);
      } else {
        manifest.AddInput(opts->subscriptions);
        corpus = CorpusFromSubscriptions(opts->subscriptions, opts->corpus_config,
                                         opts->embedding.seed, true);
      }
      TrainingStats stats;
      const EmbeddingSet set = TrainEmbeddings(corpus, opts->embedding, &stats);
      WriteOutput(opts->out, [&](const fs::path& p) { WriteEmbeddingsText(p, set); });
      manifest.AddOutput(opts->out);
      json extra;
      extra["epoch_loss"] = stats.epoch_loss;
      extra["channels"] = set.size();
      manifest.SetExtra("training", extra.dump());
      manifest.Write(ManifestFor(opts->out));
    };
  });
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyOptions {
  fs::path embeddings;
  fs::path labels;
  fs::path ensemble;
  fs::path queries;
  fs::path out;
  std::string tag;
  std::string mode;
  int k = kDefaultK;
  double threshold = 0.5;
};

void AddClassify(CLI::App& app, std::function<void()>& action,
                 const std::vector<std::string>& argv) {
  auto opts = std::make_shared<ClassifyOptions>();
  auto* sub = app.add_subcommand("classify", "Score channels by their nearest labeled neighbors");
  sub->add_option("--embeddings", opts->embeddings)->required();
  sub->add_option("--labels", opts->labels, "Labels CSV")->required();
  sub->add_option("--tag", opts->tag, "Tag selecting label rows")->capture_default_str();
  sub->add_option("--out", opts->out, "Predictions CSV")->required();
  sub->add_option("--k", opts->k)->capture_default_str();
  sub->add_option("--threshold", opts->threshold, "Binary decision threshold (score >= threshold)")
      ->capture_default_str();
  sub->add_option("--mode", opts->mode, "binary, multiclass or regression (default: from labels)")
      ->check(CLI::IsMember({"binary", "multiclass", "regression"}));
  sub->add_option("--ensemble", opts->ensemble, "Second embeddings file averaged in (binary)");
  sub->add_option("--queries", opts->queries, "Channel ids to score, one per line");
  sub->callback([&action, sub, opts, argv] {
    action = [sub, opts, argv] {
      RunManifest manifest("classify", argv);
      RecordOptions(*sub, manifest);
      manifest.AddInput(opts->embeddings);
      manifest.AddInput(opts->labels);
      const EmbeddingSet set = ReadEmbeddingsText(opts->embeddings);
      const LabeledDataset labeled = DatasetFromRows(ReadLabelsCsv(opts->labels), opts->tag);
      std::optional<EmbeddingSet> second;
      if (!opts->ensemble.empty()) {
        manifest.AddInput(opts->ensemble);
        second = ReadEmbeddingsText(opts->ensemble);
      }
      std::string mode = opts->mode;
      if (mode.empty()) {
        mode = labeled.kind() == LabelKind::kBinary        ? "binary"
               : labeled.kind() == LabelKind::kCategorical ? "multiclass"
                                                           : "regression";
      }
      if (second && mode != "binary") {
        Fail(ErrorCode::kInvalidArgument, "--ensemble applies to binary mode only");
      }
      std::vector<ChannelId> queries;
      if (!opts->queries.empty()) {
        manifest.AddInput(opts->queries);
        queries = ReadIdList(opts->queries);
      } else {
        for (const ChannelId& id : set.ids()) {
          if (!labeled.Contains(id)) queries.push_back(id);
        }
      }

      std::vector<std::vector<std::string>> rows = {
          {"channel_id", "score", "predicted_label", "status"}};
      int64_t scored = 0;
      for (const ChannelId& q : queries) {
        try {
          if (mode == "binary") {
            std::vector<Prediction> preds = {KnnScore(set, labeled, q, opts->k)};
            if (second) {
              try {
                preds.push_back(KnnScore(*second, labeled, q, opts->k));
              } catch (const Error& e) {
                if (e.code() != ErrorCode::kUnsupportedChannel) throw;
              }
            }
            const double score = EnsembleScore(preds);
            const bool positive = Classify(score, opts->threshold) == Decision::kPositive;
            rows.push_back({q, FormatDouble(score), positive ? "1" : "0", "ok"});
          } else {
            const Prediction p = mode == "multiclass"
                                     ? KnnMulticlass(set, labeled, q, opts->k)
                                     : KnnRegression(set, labeled, q, opts->k);
            rows.push_back({q, FormatDouble(p.score), LabelToString(p.predicted_label), "ok"});
          }
          ++scored;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kUnsupportedChannel) throw;
          rows.push_back({q, "", "", "unsupported"});
        }
      }
      if (scored == 0) Fail(ErrorCode::kEmptyResult, "no query channel could be scored");
      WriteCsvOutput(opts->out, rows);
      manifest.AddOutput(opts->out);
      manifest.Write(ManifestFor(opts->out));
    };
  });
}

// ---------------------------------------------------------------------------
// cv

struct CvOptions {
  fs::path embeddings;
  fs::path labels;
  fs::path out;
  std::string tag;
  std::string folds = "hold-one-out";
  int k = kDefaultK;
  uint64_t seed = 1;
  double min_recall = 0.9;
  std::optional<double> threshold;
};

int ParseFolds(const std::string& text) {
  if (text == "hold-one-out" || text == "loo") return kHoldOneOut;
  try {
    size_t used = 0;
    const int folds = std::stoi(text, &used);
    if (used == text.size() && folds >= 2) return folds;
  } catch (const std::exception&) {
  }
  Fail(ErrorCode::kInvalidArgument, "--folds must be an integer >= 2 or hold-one-out");
}

void AddCv(CLI::App& app, std::function<void()>& action,
           const std::vector<std::string>& argv) {
  auto opts = std::make_shared<CvOptions>();
  auto* sub = app.add_subcommand("cv", "Cross-validate the KNN classifier on a labeled set");
  sub->add_option("--embeddings", opts->embeddings)->required();
  sub->add_option("--labels", opts->labels)->required();
  sub->add_option("--tag", opts->tag)->capture_default_str();
  sub->add_option("--out", opts->out, "Output directory")->required();
  sub->add_option("--folds", opts->folds, "Fold count or hold-one-out")->capture_default_str();
  sub->add_option("--k", opts->k)->capture_default_str();
  sub->add_option("--seed", opts->seed)->capture_default_str();
  sub->add_option("--min-recall", opts->min_recall, "Recall floor for threshold selection")
      ->capture_default_str();
  sub->add_option("--threshold", opts->threshold, "Fixed threshold instead of selection");
  sub->callback([&action, sub, opts, argv] {
    action = [sub, opts, argv] {
      RunManifest manifest("cv", argv);
      RecordOptions(*sub, manifest);
      manifest.SetSeed(opts->seed);
      manifest.AddInput(opts->embeddings);
      manifest.AddInput(opts->labels);
      const int folds = ParseFolds(opts->folds);
      const EmbeddingSet set = ReadEmbeddingsText(opts->embeddings);
      const LabeledDataset labeled = DatasetFromRows(ReadLabelsCsv(opts->labels), opts->tag);
      const CrossValidation cv = CrossValidate(set, labeled, opts->k, folds, opts->seed);
      if (cv.scored.empty()) Fail(ErrorCode::kEmptyResult, "no labeled channel has an embedding");
      const auto scores = ToScoredLabels(cv.scored);
      const double threshold =
          opts->threshold ? *opts->threshold : SelectThreshold(scores, opts->min_recall);
      MetricsReport metrics = ConfusionMetrics(scores, threshold);
      const bool both = metrics.counts.tp + metrics.counts.fn > 0 &&
                        metrics.counts.fp + metrics.counts.tn > 0;
      if (both) metrics.roc_auc = RocAuc(scores);

      json j;
      j["base_rate"] = metrics.base_rate;
      j["precision"] = OptionalJson(metrics.precision);
      j["recall"] = OptionalJson(metrics.recall);
      j["roc_auc"] = OptionalJson(metrics.roc_auc);
      j["threshold"] = threshold;
      j["threshold_selected"] = !opts->threshold.has_value();
      j["counts"] = {{"tp", metrics.counts.tp}, {"fp", metrics.counts.fp},
                     {"tn", metrics.counts.tn}, {"fn", metrics.counts.fn}};
      j["k"] = opts->k;
      j["folds"] = folds == kHoldOneOut ? json("hold-one-out") : json(folds);
      j["n_scored"] = cv.scored.size();
      j["unsupported"] = cv.unsupported;

      EnsureDir(opts->out);
      WriteFileAtomically(opts->out / "metrics.json", j.dump(2) + "\n");
      WriteCsvOutput(opts->out / "metrics.csv",
                     {{"base_rate", "precision", "recall", "roc_auc", "threshold", "tp",
                       "fp", "tn", "fn"},
                      {FormatDouble(metrics.base_rate), FormatOptional(metrics.precision),
                       FormatOptional(metrics.recall), FormatOptional(metrics.roc_auc),
                       FormatDouble(threshold), std::to_string(metrics.counts.tp),
                       std::to_string(metrics.counts.fp), std::to_string(metrics.counts.tn),
                       std::to_string(metrics.counts.fn)}});
      std::vector<std::vector<std::string>> rows = {{"channel_id", "score", "label"}};
      for (const auto& s : cv.scored) {
        rows.push_back({s.channel_id, FormatDouble(s.score), std::to_string(s.label)});
      }
      WriteCsvOutput(opts->out / "scores.csv", rows);
      for (const char* f : {"metrics.json", "metrics.csv", "scores.csv"}) {
        manifest.AddOutput(opts->out / f);
      }
      manifest.Write(opts->out / "manifest.json");
    };
  });
}

// ---------------------------------------------------------------------------
// discover

struct DiscoverOptions {
  fs::path world;
  fs::path labels;
  fs::path out;
  std::string tag;
  DiscoveryConfig config;
  bool fixed_threshold = false;
  bool resume = false;
  bool deterministic = false;
  int window = 8;
  int epochs = 15;
  int negative = 5;
  int threads = 0;
};

void AddDiscover(CLI::App& app, std::function<void()>& action,
                 const std::vector<std::string>& argv) {
  auto opts = std::make_shared<DiscoverOptions>();
  DiscoveryConfig& c = opts->config;
  auto* sub = app.add_subcommand("discover", "Iterative channel discovery plus final prediction");
  sub->add_option("--world", opts->world, "Synthetic world directory (synth-gen output)")
      ->required();
  sub->add_option("--labels", opts->labels, "Binary labels CSV")->required();
  sub->add_option("--tag", opts->tag)->capture_default_str();
  sub->add_option("--out", opts->out, "Output directory")->required();
  sub->add_option("--k", c.k)->capture_default_str();
  sub->add_option("--tau", c.tau, "Minimum new candidates to continue")->capture_default_str();
  sub->add_option("--max-rounds", c.max_rounds)->capture_default_str();
  sub->add_option("--threshold", c.knn_threshold, "Final-prediction KNN threshold")
      ->capture_default_str();
  sub->add_option("--min-recall", c.min_recall)->capture_default_str();
  sub->add_option("--cv-folds", c.cv_folds)->capture_default_str();
  sub->add_flag("--fixed-threshold", opts->fixed_threshold,
                "Use --threshold in every round instead of cross-validated selection");
  sub->add_option("--min-embed-subs", c.min_commenter_subs_embed)->capture_default_str();
  sub->add_option("--min-final-subs", c.min_commenter_subs_final)->capture_default_str();
  sub->add_option("--heuristic-negative-subs", c.heuristic_negative_min_subs)
      ->capture_default_str();
  sub->add_option("--min-channel-freq", c.corpus.min_channel_freq)->capture_default_str();
  sub->add_option("--min-sentence-len", c.corpus.min_sentence_len)->capture_default_str();
  sub->add_option("--dims", c.embedding_main.dims)->capture_default_str();
  sub->add_option("--small-dims", c.embedding_small.dims)->capture_default_str();
  sub->add_option("--window", opts->window)->capture_default_str();
  sub->add_option("--epochs", opts->epochs)->capture_default_str();
  sub->add_option("--negative", opts->negative)->capture_default_str();
  sub->add_option("--threads", opts->threads)->capture_default_str();
  sub->add_option("--seed", c.seed)->capture_default_str();
  sub->add_flag("--deterministic", opts->deterministic);
  sub->add_flag("--resume", opts->resume, "Continue from the checkpoint in --out");
  sub->callback([&action, sub, opts, argv] {
    action = [sub, opts, argv] {
      DiscoveryConfig config = opts->config;
      config.reselect_threshold = !opts->fixed_threshold;
      for (EmbeddingConfig* e : {&config.embedding_main, &config.embedding_small}) {
        e->window = opts->window;
        e->epochs = opts->epochs;
        e->negative_samples = opts->negative;
        e->threads = opts->threads;
        e->deterministic = opts->deterministic;
        e->seed = config.seed;
      }
      config.Validate();

      RunManifest manifest("discover", argv);
      RecordOptions(*sub, manifest);
      manifest.SetSeed(config.seed);
      manifest.AddInput(opts->labels);
      for (const char* f : {"world.json", "channels.csv", "subscriptions.jsonl"}) {
        manifest.AddInput(opts->world / f);
      }
      World world = ImportWorld(opts->world);
      const SyntheticSource source(std::make_shared<GroundTruth>(std::move(world.truth)),
                                   world.config);

      EnsureDir(opts->out);
      const fs::path state_dir = opts->out / "state";
      DiscoveryState state;
      if (opts->resume && HasCheckpoint(state_dir)) {
        state = LoadCheckpoint(state_dir);
      } else {
        state = DiscoveryState::Initialize(
            DatasetFromRows(ReadLabelsCsv(opts->labels), opts->tag));
      }
      const auto observer = [&](const DiscoveryState& s, const RoundSummary&) {
        SaveCheckpoint(s, state_dir);
        WriteRoundLog(opts->out / "rounds.jsonl", s.log);
      };
      state = RunDiscovery(std::move(state), source, config, observer);
      SaveCheckpoint(state, state_dir);
      WriteRoundLog(opts->out / "rounds.jsonl", state.log);

      const FinalPredictionResult final_result = FinalPrediction(state, config);
      std::vector<std::vector<std::string>> rows = {
          {"channel_id", "score", "main_score", "small_score", "commenter_subs", "round"}};
      for (const auto& d : final_result.discovered) {
        rows.push_back({d.channel_id, FormatDouble(d.score), FormatDouble(d.main_score),
                        FormatOptional(d.small_score), std::to_string(d.commenter_subs),
                        std::to_string(d.round)});
      }
      WriteCsvOutput(opts->out / "discovered.csv", rows);
      std::vector<std::vector<std::string>> cand = {{"channel_id", "round", "labeled"}};
      for (const auto& [id, round] : state.provenance) {
        cand.push_back({id, std::to_string(round), state.labeled.Contains(id) ? "1" : "0"});
      }
      WriteCsvOutput(opts->out / "candidates.csv", cand);

      for (const char* f : {"rounds.jsonl", "discovered.csv", "candidates.csv",
                            "state/state.json", "state/records.jsonl"}) {
        manifest.AddOutput(opts->out / f);
      }
      json summary;
      summary["rounds"] = state.log.size();
      summary["candidates"] = state.candidates.size();
      summary["discovered"] = final_result.discovered.size();
      manifest.SetExtra("discovery", summary.dump());
      manifest.Write(opts->out / "manifest.json");
      if (final_result.discovered.empty()) {
        Fail(ErrorCode::kEmptyResult, "final prediction discovered no channel");
      }
    };
  });
}

// ---------------------------------------------------------------------------
// report

struct ReportOptions {
  fs::path tag_metrics;
  fs::path annotations;
  fs::path predictions;
  fs::path channels;
  fs::path channel_tags;
  fs::path out;
  double pol_precision = 1.0;
  double pol_recall = 1.0;
  int64_t head_subs = kDefaultHeadMinSubs;
};

std::ifstream OpenCsv(const fs::path& path, std::optional<csv::Header>& header) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  auto head = csv::ReadRecord(in);
  if (!head) Fail(ErrorCode::kInputFormat, path.string() + " is empty");
  header.emplace(std::move(*head));
  return in;
}

double ParseNumber(const std::string& text, const fs::path& path) {
  try {
    size_t used = 0;
    const double x = std::stod(text, &used);
    if (used == text.size()) return x;
  } catch (const std::exception&) {
  }
  Fail(ErrorCode::kInputFormat, path.string() + ": bad number '" + text + "'");
}

const std::string& Field(const std::vector<std::string>& row, size_t i,
                         const fs::path& path) {
  if (i >= row.size()) Fail(ErrorCode::kInputFormat, path.string() + ": short row");
  return row[i];
}

void AddReport(CLI::App& app, std::function<void()>& action,
               const std::vector<std::string>& argv) {
  auto opts = std::make_shared<ReportOptions>();
  auto* sub = app.add_subcommand("report", "Per-tag statistics and head-vs-tail view aggregation");
  sub->add_option("--tag-metrics", opts->tag_metrics, "CSV tag,n_channels,precision,recall")
      ->required();
  sub->add_option("--pol-precision", opts->pol_precision, "Discovery-stage precision")
      ->capture_default_str();
  sub->add_option("--pol-recall", opts->pol_recall, "Discovery-stage recall")
      ->capture_default_str();
  sub->add_option("--annotations", opts->annotations, "CSV reviewer,channel_id,tag,value");
  sub->add_option("--predictions", opts->predictions, "CSV channel_id,tag,value");
  sub->add_option("--channels", opts->channels,
                  "CSV channel_id,subscriber_count,views_12mo,origin");
  sub->add_option("--channel-tags", opts->channel_tags, "CSV channel_id,tag");
  sub->add_option("--head-subs", opts->head_subs, "Head channels have at least this many subscribers")
      ->capture_default_str();
  sub->add_option("--out", opts->out, "Output directory")->required();
  sub->callback([&action, sub, opts, argv] {
    action = [sub, opts, argv] {
      RunManifest manifest("report", argv);
      RecordOptions(*sub, manifest);
      std::map<std::string, TagStats> stats;
      {
        manifest.AddInput(opts->tag_metrics);
        std::optional<csv::Header> h;
        auto in = OpenCsv(opts->tag_metrics, h);
        const size_t tag = h->Index("tag"), n = h->Index("n_channels"),
                     p = h->Index("precision"), r = h->Index("recall");
        while (auto row = csv::ReadRecord(in)) {
          TagStats s;
          s.tag = Field(*row, tag, opts->tag_metrics);
          s.n_channels = static_cast<int64_t>(ParseNumber(Field(*row, n, opts->tag_metrics), opts->tag_metrics));
          s.precision = ParseNumber(Field(*row, p, opts->tag_metrics), opts->tag_metrics);
          s.recall = ParseNumber(Field(*row, r, opts->tag_metrics), opts->tag_metrics);
          s.multiplier =
              TagMultiplier(opts->pol_precision, opts->pol_recall, s.precision, s.recall);
          stats[s.tag] = s;
        }
      }
      if (!opts->annotations.empty()) {
        manifest.AddInput(opts->annotations);
        std::map<std::string, Annotations> by_tag;
        std::optional<csv::Header> h;
        auto in = OpenCsv(opts->annotations, h);
        const size_t rev = h->Index("reviewer"), ch = h->Index("channel_id"),
                     tag = h->Index("tag"), val = h->Index("value");
        while (auto row = csv::ReadRecord(in)) {
          const auto& path = opts->annotations;
          by_tag[Field(*row, tag, path)][Field(*row, ch, path)][Field(*row, rev, path)] =
              static_cast<int>(ParseNumber(Field(*row, val, path), path));
        }
        std::map<std::string, std::map<ChannelId, int>> model;
        if (!opts->predictions.empty()) {
          manifest.AddInput(opts->predictions);
          std::optional<csv::Header> ph;
          auto pin = OpenCsv(opts->predictions, ph);
          const size_t pch = ph->Index("channel_id"), ptag = ph->Index("tag"),
                       pval = ph->Index("value");
          while (auto row = csv::ReadRecord(pin)) {
            const auto& path = opts->predictions;
            model[Field(*row, ptag, path)][Field(*row, pch, path)] =
                static_cast<int>(ParseNumber(Field(*row, pval, path), path));
          }
        }
        for (auto& [tag_name, s] : stats) {
          auto a = by_tag.find(tag_name);
          if (a == by_tag.end()) continue;
          s.reviewer_agreement = ReviewerAgreement(a->second);
          if (auto m = model.find(tag_name); m != model.end()) {
            s.model_agreement = ModelAgreement(m->second, a->second);
          }
        }
      }

      EnsureDir(opts->out);
      std::vector<std::vector<std::string>> stat_rows = {
          {"tag", "n_channels", "precision", "recall", "multiplier", "reviewer_agreement",
           "model_agreement"}};
      json report;
      report["pol_precision"] = opts->pol_precision;
      report["pol_recall"] = opts->pol_recall;
      report["head_min_subs"] = opts->head_subs;
      json tags = json::array();
      std::map<std::string, double> multipliers;
      for (const auto& [tag, s] : stats) {
        multipliers[tag] = s.multiplier;
        stat_rows.push_back({tag, std::to_string(s.n_channels), FormatDouble(s.precision),
                             FormatDouble(s.recall), FormatDouble(s.multiplier),
                             FormatOptional(s.reviewer_agreement),
                             FormatOptional(s.model_agreement)});
        tags.push_back({{"tag", tag},
                        {"n_channels", s.n_channels},
                        {"precision", s.precision},
                        {"recall", s.recall},
                        {"multiplier", s.multiplier},
                        {"reviewer_agreement", OptionalJson(s.reviewer_agreement)},
                        {"model_agreement", OptionalJson(s.model_agreement)}});
      }
      report["tags"] = tags;
      WriteCsvOutput(opts->out / "tag_stats.csv", stat_rows);
      manifest.AddOutput(opts->out / "tag_stats.csv");

      if (!opts->channels.empty()) {
        if (opts->channel_tags.empty()) {
          Fail(ErrorCode::kInvalidArgument, "--channels needs --channel-tags");
        }
        manifest.AddInput(opts->channels);
        manifest.AddInput(opts->channel_tags);
        std::vector<ChannelViews> channels;
        {
          std::optional<csv::Header> h;
          auto in = OpenCsv(opts->channels, h);
          const size_t id = h->Index("channel_id"), subs = h->Index("subscriber_count"),
                       views = h->Index("views_12mo"), origin = h->Index("origin");
          while (auto row = csv::ReadRecord(in)) {
            const auto& path = opts->channels;
            ChannelViews c;
            c.id = Field(*row, id, path);
            c.subscriber_count = static_cast<int64_t>(ParseNumber(Field(*row, subs, path), path));
            const std::string& v = views < row->size() ? (*row)[views] : std::string();
            if (!v.empty()) c.views_12mo = static_cast<int64_t>(ParseNumber(v, path));
            c.origin = ParseChannelOrigin(Field(*row, origin, path));
            channels.push_back(std::move(c));
          }
        }
        std::map<ChannelId, std::set<std::string>> tag_predictions;
        {
          std::optional<csv::Header> h;
          auto in = OpenCsv(opts->channel_tags, h);
          const size_t id = h->Index("channel_id"), tag = h->Index("tag");
          while (auto row = csv::ReadRecord(in)) {
            tag_predictions[Field(*row, id, opts->channel_tags)].insert(
                Field(*row, tag, opts->channel_tags));
          }
        }
        const ViewsReport views =
            AggregateViews(channels, tag_predictions, multipliers, opts->head_subs);
        std::vector<std::vector<std::string>> view_rows = {
            {"tag", "multiplier", "share_of_all_views", "total_views", "head_channels",
             "head_views", "tail_channels", "tail_views", "head_share"}};
        std::vector<std::vector<std::string>> plot_rows = {
            {"tag", "segment", "channels", "views"}};
        json view_json = json::array();
        for (const TagViews& t : views.tags) {
          view_rows.push_back({t.tag, FormatDouble(t.multiplier),
                               FormatOptional(t.share_of_all_views), FormatDouble(t.total_views),
                               std::to_string(t.head_channels), FormatDouble(t.head_views),
                               std::to_string(t.tail_channels), FormatDouble(t.tail_views),
                               FormatOptional(t.head_share)});
          plot_rows.push_back({t.tag, "head", std::to_string(t.head_channels),
                               FormatDouble(t.head_views)});
          plot_rows.push_back({t.tag, "tail", std::to_string(t.tail_channels),
                               FormatDouble(t.tail_views)});
          view_json.push_back({{"tag", t.tag},
                               {"multiplier", t.multiplier},
                               {"share_of_all_views", OptionalJson(t.share_of_all_views)},
                               {"total_views", t.total_views},
                               {"head_channels", t.head_channels},
                               {"head_views", t.head_views},
                               {"tail_channels", t.tail_channels},
                               {"tail_views", t.tail_views},
                               {"raw_head_views", t.raw_head_views},
                               {"raw_tail_views", t.raw_tail_views},
                               {"head_share", OptionalJson(t.head_share)}});
        }
        report["views"] = view_json;
        report["missing_views"] = views.missing_views;
        if (!views.missing_views.empty()) {
          // Coverage warning; the run still succeeds.
          std::fprintf(stderr, "warning: %zu channel(s) without view counts were skipped\n",
                       views.missing_views.size());
        }
        WriteCsvOutput(opts->out / "tag_views.csv", view_rows);
        WriteCsvOutput(opts->out / "head_tail_plot.csv", plot_rows);
        manifest.AddOutput(opts->out / "tag_views.csv");
        manifest.AddOutput(opts->out / "head_tail_plot.csv");
      }
      WriteFileAtomically(opts->out / "report.json", report.dump(2) + "\n");
      manifest.AddOutput(opts->out / "report.json");
      manifest.Write(opts->out / "manifest.json");
    };
  });
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    case ErrorCode::kInputFormat:
    case ErrorCode::kUnknownChannel:
      return kExitInputFormat;
    case ErrorCode::kEmptyCorpus:
    case ErrorCode::kEmptyResult:
      return kExitEmptyResult;
    default:
      return kExitFailure;
  }
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Channel embeddings, nearest-neighbor classification and discovery", "chanvec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  std::function<void()> action;
  AddSynthGen(app, action, args);
  AddBuildCorpus(app, action, args);
  AddTrain(app, action, args);
  AddClassify(app, action, args);
  AddCv(app, action, args);
  AddDiscover(app, action, args);
  AddReport(app, action, args);

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(),
                                args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (action) action();
    return kExitOk;
  } catch (const Error& e) {
    err << "chanvec: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "chanvec: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace chanvec::tools
