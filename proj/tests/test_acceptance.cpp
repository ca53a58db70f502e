// Copyright 2026 The hamlab Authors
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

// Runs the acceptance suite and prints one PASS/FAIL line per criterion.
// Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "hamlab/selftest.hpp"

int main(int argc, char** argv) {
  std::string filter;
  std::uint64_t seed = hamlab::selftest::kDefaultSeed;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--filter") == 0 && i + 1 < argc) {
      filter = argv[++i];
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::fprintf(stderr, "usage: %s [--filter substring] [--seed n]\n",
                   argv[0]);
      return 64;
    }
  }
  const auto results = hamlab::selftest::run_all(filter, seed);
  bool all_pass = true;
  double total = 0.0;
  for (const auto& r : results) {
    std::printf("%s %-22s %s [%.1fs]\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.detail.c_str(), r.seconds);
    if (!r.pass) all_pass = false;
    total += r.seconds;
  }
  std::printf("%zu criteria, %s, %.1fs total\n", results.size(),
              all_pass ? "all passed" : "FAILURES PRESENT", total);
  return all_pass ? 0 : 1;
}
