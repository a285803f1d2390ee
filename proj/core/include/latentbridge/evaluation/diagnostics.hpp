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

#pragma once

#include <span>
#include <string>
#include <vector>

#include "latentbridge/model/model.hpp"

namespace latentbridge {

struct AlignmentReport {
  std::string a_domain;
  std::string b_domain;
  std::size_t count = 0;
  double matched_cosine = 0.0;  // mean cosine of index-matched pairs
  double cross_cosine = 0.0;    // mean cosine over mismatched pairs
  double recall_at_1 = 0.0;
  double recall_at_5 = 0.0;
};

// Row i of a queries b; its rank counts strictly closer b rows plus equally
// close rows at a lower index.
AlignmentReport retrieval_diagnostics(std::span<const LatentCoordinate> a, std::span<const LatentCoordinate> b);

std::string to_json_text(const AlignmentReport& report);
std::string to_json_text(std::span<const AlignmentReport> reports);

}  // namespace latentbridge
