/*
 * Copyright 2026 The privloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef PRIVLOC_ACCEPTANCE_H_
#define PRIVLOC_ACCEPTANCE_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace privloc {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  uint64_t seed = 20260101;
  // Criterion ids to run; empty runs all ten.
  std::vector<int> only;
  // Progress sink (one line per finished criterion); may be empty.
  std::function<void(const CriterionResult&)> on_result;
};

const std::vector<std::pair<int, std::string>>& CriterionNames();

CriterionResult RunCriterion(int id, uint64_t seed);
std::vector<CriterionResult> RunAcceptance(const AcceptanceOptions& options);

// "PASS  3 paillier-properties: ..." style line.
std::string FormatResult(const CriterionResult& r);

}  // namespace privloc

#endif  // PRIVLOC_ACCEPTANCE_H_
