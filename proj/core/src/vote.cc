// Copyright 2026 The liftseg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "liftseg/vote.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "io_util.h"
#include "liftseg/error.h"

namespace liftseg::vote {
namespace {

void CheckInputs(const VoteInputs& in) {
  const std::size_t n = in.partition.num_points();
  if (in.visibility.num_points() != n) {
    throw Error("visibility covers " + std::to_string(in.visibility.num_points()) +
                " points, partition has " + std::to_string(n));
  }
  if (in.membership.num_points() != n) {
    throw Error("membership covers " + std::to_string(in.membership.num_points()) +
                " points, partition has " + std::to_string(n));
  }
  if (in.visibility.num_views() != in.detections.num_views) {
    throw Error("visibility has " + std::to_string(in.visibility.num_views()) +
                " views, detections declare K=" + std::to_string(in.detections.num_views));
  }
  if (in.membership.num_detections() != in.detections.size()) {
    throw Error("membership has " + std::to_string(in.membership.num_detections()) +
                " detections, detection set has " + std::to_string(in.detections.size()));
  }
  if (in.detections.num_labels < 1) throw Error("detection set needs at least one label");
}

// Shared accumulation for both scoring rules.
Eigen::MatrixXd Accumulate(const VoteInputs& in, std::span<const double> weights,
                           VoteTape* tape) {
  CheckInputs(in);
  const int num_views = in.detections.num_views;
  const int num_labels = in.detections.num_labels;
  const std::size_t n = in.partition.num_points();
  const int s = in.partition.num_superpoints();

  std::vector<std::vector<int>> by_view(num_views);
  for (std::size_t b = 0; b < in.detections.size(); ++b) {
    by_view[in.detections.detections[b].view].push_back(static_cast<int>(b));
  }

  Eigen::MatrixXd numer = Eigen::MatrixXd::Zero(s, num_labels);
  std::vector<double> denom(s, 0.0);
  std::vector<double> best(static_cast<std::size_t>(num_labels) * n);
  std::vector<int> win(static_cast<std::size_t>(num_labels) * n);
  if (tape) {
    tape->num_views = num_views;
    tape->num_labels = num_labels;
    tape->num_points = n;
    tape->winner.assign(static_cast<std::size_t>(num_views) * num_labels * n, -1);
  }

  for (int k = 0; k < num_views; ++k) {
    std::fill(best.begin(), best.end(), 0.0);
    std::fill(win.begin(), win.end(), -1);
    for (int b : by_view[k]) {
      const int j = in.detections.detections[b].label;
      const double w = weights[b];
      double* row = best.data() + static_cast<std::size_t>(j) * n;
      int* wrow = win.data() + static_cast<std::size_t>(j) * n;
      for (int p : in.membership.members(b)) {
        if (w > row[p]) {
          row[p] = w;
          wrow[p] = b;
        }
      }
    }
    const auto vis = in.visibility.view(k);
    for (std::size_t p = 0; p < n; ++p) {
      if (!vis[p]) continue;
      const int i = in.partition.superpoint_of(p);
      denom[i] += 1.0;
      for (int j = 0; j < num_labels; ++j) {
        numer(i, j) += best[static_cast<std::size_t>(j) * n + p];
      }
    }
    if (tape) {
      for (int j = 0; j < num_labels; ++j) {
        std::copy_n(win.begin() + static_cast<std::ptrdiff_t>(j) * n, n,
                    tape->winner.begin() +
                        static_cast<std::ptrdiff_t>((static_cast<std::size_t>(k) * num_labels + j) * n));
      }
    }
  }

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(s, num_labels + 1);
  for (int i = 0; i < s; ++i) {
    if (denom[i] > 0.0) scores.row(i).head(num_labels) = numer.row(i) / denom[i];
  }
  if (tape) tape->denominators = std::move(denom);
  return scores;
}

}  // namespace

ScoreMatrix ScoreUnweighted(const VoteInputs& in, double null_threshold) {
  const std::vector<double> ones(in.detections.size(), 1.0);
  ScoreMatrix out{Accumulate(in, ones, nullptr), ScoreKind::kRawUnweighted};
  out.values.col(out.num_labels()).setConstant(null_threshold);
  return out;
}

ScoreMatrix ScoreWeighted(const VoteInputs& in, std::span<const double> weights,
                          VoteTape* tape) {
  if (weights.size() != in.detections.size()) {
    throw Error("got " + std::to_string(weights.size()) + " weights for " +
                std::to_string(in.detections.size()) + " detections");
  }
  for (std::size_t b = 0; b < weights.size(); ++b) {
    if (!(weights[b] >= 0.0) || !std::isfinite(weights[b])) {
      throw Error("weight of detection " + std::to_string(b) +
                  " must be finite and non-negative");
    }
  }
  return {Accumulate(in, weights, tape), ScoreKind::kRawWeighted};
}

std::vector<double> ScoreWeightedBackward(const VoteInputs& in, const VoteTape& tape,
                                          const Eigen::MatrixXd& grad_scores) {
  const int num_labels = tape.num_labels;
  const std::size_t n = tape.num_points;
  if (grad_scores.rows() != in.partition.num_superpoints() || grad_scores.cols() < num_labels) {
    throw Error("score gradient has the wrong shape");
  }
  std::vector<double> grad(in.detections.size(), 0.0);
  for (int k = 0; k < tape.num_views; ++k) {
    const auto vis = in.visibility.view(k);
    for (std::size_t p = 0; p < n; ++p) {
      if (!vis[p]) continue;
      const int i = in.partition.superpoint_of(p);
      const double inv = 1.0 / tape.denominators[i];
      for (int j = 0; j < num_labels; ++j) {
        const int b = tape.WinnerAt(k, j, p);
        if (b >= 0) grad[b] += grad_scores(i, j) * inv;
      }
    }
  }
  return grad;
}

ScoreMatrix NormalizeScores(const ScoreMatrix& raw, double null_score) {
  if (raw.kind != ScoreKind::kRawWeighted) {
    throw Error("softmax normalization expects weighted raw scores");
  }
  if (!std::isfinite(null_score) || !raw.values.allFinite()) {
    throw Error("cannot normalize non-finite scores");
  }
  const int num_labels = raw.num_labels();
  ScoreMatrix out{Eigen::MatrixXd(raw.values.rows(), num_labels + 1), ScoreKind::kNormalized};
  for (Eigen::Index i = 0; i < raw.values.rows(); ++i) {
    double m = null_score;
    for (int j = 0; j < num_labels; ++j) m = std::max(m, raw.values(i, j));
    double total = 0.0;
    for (int j = 0; j < num_labels; ++j) {
      out.values(i, j) = std::exp(raw.values(i, j) - m);
      total += out.values(i, j);
    }
    out.values(i, num_labels) = std::exp(null_score - m);
    total += out.values(i, num_labels);
    out.values.row(i) /= total;
  }
  return out;
}

SoftmaxGrad NormalizeScoresBackward(const ScoreMatrix& normalized,
                                    const Eigen::MatrixXd& grad_normalized) {
  const Eigen::MatrixXd& y = normalized.values;
  if (grad_normalized.rows() != y.rows() || grad_normalized.cols() != y.cols()) {
    throw Error("normalized-score gradient has the wrong shape");
  }
  const int num_labels = normalized.num_labels();
  SoftmaxGrad out;
  out.raw.resize(y.rows(), num_labels);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double dot = y.row(i).dot(grad_normalized.row(i));
    for (int j = 0; j < num_labels; ++j) {
      out.raw(i, j) = y(i, j) * (grad_normalized(i, j) - dot);
    }
    out.null_score += y(i, num_labels) * (grad_normalized(i, num_labels) - dot);
  }
  return out;
}

Labeling AssignLabels(const ScoreMatrix& scores,
                      const geom::SuperPointPartition& partition,
                      double null_threshold) {
  if (scores.kind == ScoreKind::kRawWeighted) {
    throw Error("weighted raw scores must be normalized before label assignment");
  }
  if (scores.num_superpoints() != partition.num_superpoints()) {
    throw Error("score matrix has " + std::to_string(scores.num_superpoints()) +
                " rows, partition has " + std::to_string(partition.num_superpoints()) +
                " super points");
  }
  const int num_labels = scores.num_labels();
  Labeling out;
  out.superpoint_labels.resize(scores.num_superpoints());
  for (int i = 0; i < scores.num_superpoints(); ++i) {
    int arg = num_labels;
    double best = scores.kind == ScoreKind::kRawUnweighted ? null_threshold
                                                            : scores.values(i, num_labels);
    // Scan null first, then labels from the highest index down, so ties land
    // on the lowest label.
    for (int j = num_labels - 1; j >= 0; --j) {
      if (scores.values(i, j) >= best) {
        best = scores.values(i, j);
        arg = j;
      }
    }
    out.superpoint_labels[i] = arg == num_labels ? kNullLabel : arg;
  }
  out.point_labels.resize(partition.num_points());
  for (std::size_t p = 0; p < partition.num_points(); ++p) {
    out.point_labels[p] = out.superpoint_labels[partition.superpoint_of(p)];
  }
  return out;
}

void WriteLabeling(const std::string& path, std::span<const int> point_labels) {
  std::string out;
  out.reserve(point_labels.size() * 8);
  for (std::size_t p = 0; p < point_labels.size(); ++p) {
    out += std::to_string(p) + " " + std::to_string(point_labels[p]) + "\n";
  }
  io::WriteFile(path, out);
}

std::vector<int> ReadLabeling(const std::string& path, std::size_t num_points) {
  const std::string text = io::ReadFile(path);
  std::vector<int> labels(num_points, kNullLabel);
  std::vector<char> seen(num_points, 0);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = io::SplitWhitespace(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    long long idx = 0, label = 0;
    if (tokens.size() != 2 || !io::ParseInt(tokens[0], idx) || !io::ParseInt(tokens[1], label)) {
      throw ParseError(path, line_no, "expected 'point_idx label_id'");
    }
    if (idx < 0 || idx >= static_cast<long long>(num_points)) {
      throw ParseError(path, line_no, "point index out of range");
    }
    if (label < -1) throw ParseError(path, line_no, "label must be >= -1");
    if (seen[idx]) throw ParseError(path, line_no, "duplicate point index");
    seen[idx] = 1;
    labels[idx] = static_cast<int>(label);
  }
  for (std::size_t p = 0; p < num_points; ++p) {
    if (!seen[p]) throw ParseError(path, 0, "missing label for point " + std::to_string(p));
  }
  return labels;
}

void WriteScores(const std::string& path, const ScoreMatrix& scores,
                 std::span<const std::string> label_names) {
  if (static_cast<int>(label_names.size()) != scores.num_labels()) {
    throw Error("label names do not match the score matrix");
  }
  std::string out;
  for (const auto& name : label_names) out += name + "\t";
  out += "null\n";
  for (Eigen::Index i = 0; i < scores.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < scores.values.cols(); ++j) {
      if (j > 0) out += "\t";
      out += io::FormatDouble(scores.values(i, j));
    }
    out += "\n";
  }
  io::WriteFile(path, out);
}

}  // namespace liftseg::vote
