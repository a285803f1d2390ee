// Copyright 2026 The latentbridge Authors.
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

#include "latentbridge/evaluation/diagnostics.hpp"

#include <nlohmann/json.hpp>

#include "latentbridge/evaluation/metrics.hpp"

namespace latentbridge {
namespace {

nlohmann::ordered_json report_json(const AlignmentReport& r) {
  nlohmann::ordered_json j;
  j["a_domain"] = r.a_domain;
  j["b_domain"] = r.b_domain;
  j["count"] = r.count;
  j["matched_cosine"] = r.matched_cosine;
  j["cross_cosine"] = r.cross_cosine;
  j["recall_at_1"] = r.recall_at_1;
  j["recall_at_5"] = r.recall_at_5;
  return j;
}

}  // namespace

AlignmentReport retrieval_diagnostics(std::span<const LatentCoordinate> a, std::span<const LatentCoordinate> b) {
  if (a.size() != b.size()) {
    throw MetricError("retrieval: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " coordinates");
  }
  if (a.size() < 2) throw MetricError("retrieval: at least two pairs are required");
  const std::size_t n = a.size();
  std::vector<double> sim(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sim[i * n + j] = a[i].cosine(b[j]);
  }
  AlignmentReport report;
  report.count = n;
  std::size_t hit1 = 0, hit5 = 0;
  double matched = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = sim[i * n + i];
    std::size_t rank = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double s = sim[i * n + j];
      if (s > target || (s == target && j < i)) ++rank;
      cross += s;
    }
    matched += target;
    hit1 += rank < 1;
    hit5 += rank < 5;
  }
  report.matched_cosine = matched / double(n);
  report.cross_cosine = cross / double(n * (n - 1));
  report.recall_at_1 = double(hit1) / double(n);
  report.recall_at_5 = double(hit5) / double(n);
  return report;
}

std::string to_json_text(const AlignmentReport& report) { return report_json(report).dump(2); }

std::string to_json_text(std::span<const AlignmentReport> reports) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : reports) j.push_back(report_json(r));
  return j.dump(2);
}

}  // namespace latentbridge
