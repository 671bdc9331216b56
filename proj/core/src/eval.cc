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

#include <algorithm>
#include <random>
#include <string>

#include "chanvec/eval.h"

namespace chanvec {

std::vector<ScoredLabel> ToScoredLabels(std::span<const ScoredChannel> scored) {
  std::vector<ScoredLabel> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back({s.score, s.label});
  return out;
}

MetricsReport ConfusionMetrics(std::span<const ScoredLabel> predictions,
                               double threshold) {
  if (predictions.empty()) {
    Fail(ErrorCode::kInvalidArgument, "no predictions to evaluate");
  }
  MetricsReport m;
  for (const auto& p : predictions) {
    const bool predicted = Classify(p.score, threshold) == Decision::kPositive;
    if (p.label == 1) {
      ++(predicted ? m.counts.tp : m.counts.fn);
    } else {
      ++(predicted ? m.counts.fp : m.counts.tn);
    }
  }
  const auto& c = m.counts;
  m.base_rate = static_cast<double>(c.tp + c.fn) / static_cast<double>(c.total());
  if (c.tp + c.fp > 0) {
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn > 0) {
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  return m;
}

double RocAuc(std::span<const ScoredLabel> predictions) {
  std::vector<ScoredLabel> sorted(predictions.begin(), predictions.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.score < b.score; });
  double positives = 0, negatives = 0, wins = 0;
  size_t i = 0;
  while (i < sorted.size()) {
    double group_pos = 0, group_neg = 0;
    const double s = sorted[i].score;
    for (; i < sorted.size() && sorted[i].score == s; ++i) {
      (sorted[i].label == 1 ? group_pos : group_neg) += 1;
    }
    // Positives beat every lower negative and tie with same-score ones.
    wins += group_pos * (negatives + 0.5 * group_neg);
    positives += group_pos;
    negatives += group_neg;
  }
  if (positives == 0 || negatives == 0) {
    Fail(ErrorCode::kInvalidArgument, "AUC needs both classes");
  }
  return wins / (positives * negatives);
}

std::vector<std::vector<ChannelId>> AssignFolds(std::vector<ChannelId> channels,
                                                int folds, uint64_t seed) {
  if (folds == kHoldOneOut) {
    std::vector<std::vector<ChannelId>> out;
    out.reserve(channels.size());
    for (auto& c : channels) out.push_back({std::move(c)});
    return out;
  }
  if (folds < 2) Fail(ErrorCode::kInvalidArgument, "need at least 2 folds");
  std::mt19937_64 rng(seed);
  std::shuffle(channels.begin(), channels.end(), rng);
  std::vector<std::vector<ChannelId>> out(static_cast<size_t>(folds));
  for (size_t i = 0; i < channels.size(); ++i) {
    out[i % out.size()].push_back(std::move(channels[i]));
  }
  return out;
}

CrossValidation CrossValidate(const EmbeddingSet& set,
                              const LabeledDataset& labeled, int k, int folds,
                              uint64_t seed) {
  if (labeled.kind() != LabelKind::kBinary) {
    Fail(ErrorCode::kInvalidArgument, "cross validation needs binary labels");
  }
  if (folds != kHoldOneOut && folds < 2) {
    Fail(ErrorCode::kInvalidArgument, "need at least 2 folds");
  }
  CrossValidation cv;
  std::vector<ChannelId> supported;
  for (const auto& [id, label] : labeled.labels()) {
    auto row = set.Find(id);
    if (row && set.HasDirection(*row)) {
      supported.push_back(id);
    } else {
      cv.unsupported.push_back(id);
    }
  }

  std::map<ChannelId, double> scores;
  for (const auto& fold : AssignFolds(supported, folds, seed)) {
    const std::set<ChannelId> held(fold.begin(), fold.end());
    std::vector<ChannelId> pool;
    pool.reserve(supported.size());
    for (const auto& c : supported) {
      if (!held.contains(c)) pool.push_back(c);
    }
    for (const auto& c : fold) {
      scores[c] = KnnScoreFromPool(set, labeled, c, k, pool).score;
    }
  }
  for (const auto& c : supported) {
    cv.scored.push_back(
        {c, scores.at(c), labeled.IsPositive(c) ? 1 : 0});
  }
  return cv;
}

std::optional<double> ReviewerAgreement(const Annotations& annotations) {
  int64_t pairs = 0, agree = 0;
  for (const auto& [channel, judgments] : annotations) {
    for (auto a = judgments.begin(); a != judgments.end(); ++a) {
      for (auto b = std::next(a); b != judgments.end(); ++b) {
        ++pairs;
        if (a->second == b->second) ++agree;
      }
    }
  }
  if (pairs == 0) return std::nullopt;
  return static_cast<double>(agree) / static_cast<double>(pairs);
}

std::optional<double> ModelAgreement(const std::map<ChannelId, int>& predictions,
                                     const Annotations& annotations) {
  int64_t pairs = 0, agree = 0;
  for (const auto& [channel, judgments] : annotations) {
    auto p = predictions.find(channel);
    if (p == predictions.end()) continue;
    for (const auto& [reviewer, value] : judgments) {
      ++pairs;
      if (value == p->second) ++agree;
    }
  }
  if (pairs == 0) return std::nullopt;
  return static_cast<double>(agree) / static_cast<double>(pairs);
}

double CombinedRecall(double recall_stage1, double recall_stage2) {
  for (double r : {recall_stage1, recall_stage2}) {
    if (!(r >= 0.0 && r <= 1.0)) {
      Fail(ErrorCode::kInvalidArgument, "recall must lie in [0, 1]");
    }
  }
  return recall_stage1 * recall_stage2;
}

double TagMultiplier(double pol_precision, double pol_recall,
                     double tag_precision, double tag_recall) {
  if (!(pol_recall > 0.0) || !(tag_recall > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "multiplier needs non-zero recalls");
  }
  return (pol_precision * tag_precision) / (pol_recall * tag_recall);
}

std::string_view ChannelOriginName(ChannelOrigin origin) {
  return origin == ChannelOrigin::kLabeled ? "labeled" : "discovered";
}

ChannelOrigin ParseChannelOrigin(std::string_view name) {
  if (name == "labeled") return ChannelOrigin::kLabeled;
  if (name == "discovered") return ChannelOrigin::kDiscovered;
  Fail(ErrorCode::kInputFormat, "unknown origin '" + std::string(name) + "'");
}

ViewsReport AggregateViews(
    std::span<const ChannelViews> channels,
    const std::map<ChannelId, std::set<std::string>>& tag_predictions,
    const std::map<std::string, double>& multipliers, int64_t head_min_subs) {
  if (head_min_subs < 0) {
    Fail(ErrorCode::kInvalidArgument, "head_min_subs must be >= 0");
  }
  ViewsReport report;
  std::map<std::string, TagViews> rows;
  for (const auto& [tag, m] : multipliers) {
    rows[tag].tag = tag;
    rows[tag].multiplier = m;
  }
  double all_views = 0.0;
  for (const ChannelViews& c : channels) {
    if (!c.views_12mo) {
      report.missing_views.push_back(c.id);
      continue;
    }
    const auto views = *c.views_12mo;
    all_views += static_cast<double>(views);
    auto tags = tag_predictions.find(c.id);
    if (tags == tag_predictions.end()) continue;
    const bool head = c.subscriber_count >= head_min_subs;
    for (const std::string& tag : tags->second) {
      TagViews& row = rows[tag];
      if (row.tag.empty()) {
        row.tag = tag;
        row.multiplier = 1.0;
      }
      const double scale =
          c.origin == ChannelOrigin::kDiscovered ? row.multiplier : 1.0;
      const double adjusted = scale * static_cast<double>(views);
      if (head) {
        ++row.head_channels;
        row.head_views += adjusted;
        row.raw_head_views += views;
      } else {
        ++row.tail_channels;
        row.tail_views += adjusted;
        row.raw_tail_views += views;
      }
    }
  }
  for (auto& [tag, row] : rows) {
    row.total_views = row.head_views + row.tail_views;
    if (row.total_views > 0.0) row.head_share = row.head_views / row.total_views;
    if (all_views > 0.0) row.share_of_all_views = row.total_views / all_views;
    report.tags.push_back(row);
  }
  return report;
}

}  // namespace chanvec
