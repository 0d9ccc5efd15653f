// Copyright 2026 The AFETM Authors
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

#ifndef AFETM_TESTS_TEST_UTIL_HPP_
#define AFETM_TESTS_TEST_UTIL_HPP_

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "afetm/calltree.hpp"
#include "afetm/common.hpp"
#include "afetm/selector.hpp"

#ifndef AFETM_SOURCE_DIR
#define AFETM_SOURCE_DIR "."
#endif

namespace afetm::testutil {

inline std::filesystem::path source_path(std::string_view rel) {
  return std::filesystem::path(AFETM_SOURCE_DIR) / rel;
}

inline std::filesystem::path webshop_path() { return source_path("data/webshop.json"); }

// n = 4; f1 covers {b1, b2} with w = 2, f2 covers {b2, b3} with w = 3, f3
// covers {b4} with w = 1.
inline CoverageInstance s1(double w_ub) {
  CoverageInstance inst;
  inst.n = 4;
  inst.ids = {"f1", "f2", "f3"};
  inst.covers = {{0, 1}, {1, 2}, {3}};
  inst.w = {2.0, 3.0, 1.0};
  inst.w_ub = w_ub;
  return inst;
}

// Up to n_max blocks and m_max functions, weights uniform in [0, 5],
// w_ub = p * sum(w) (at least a small positive value).
inline CoverageInstance random_instance(Rng& rng, std::size_t n_max, std::size_t m_max,
                                        double p) {
  CoverageInstance inst;
  inst.n = 1 + uniform_index(rng, n_max);
  const std::size_t m = 1 + uniform_index(rng, m_max);
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    inst.ids.push_back("f" + std::to_string(j));
    std::vector<std::size_t> cov;
    for (std::size_t i = 0; i < inst.n; ++i) {
      if (uniform01(rng) < 0.35) cov.push_back(i);
    }
    inst.covers.push_back(cov);
    inst.w.push_back(5.0 * uniform01(rng));
    total += inst.w.back();
  }
  inst.w_ub = std::max(p * total, 1e-6);
  return inst;
}

// Parses "A(B C(D))" notation; a top-level sequence gives a forest.
class TreeParser {
 public:
  explicit TreeParser(std::string_view s) : s_(s) {}

  CallTree parse() {
    CallTree t;
    skip();
    while (pos_ < s_.size()) {
      t.roots.push_back(node());
      skip();
    }
    return t;
  }

 private:
  CallTreeNode node() {
    std::string name;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                s_[pos_] == '_' || s_[pos_] == '*')) {
      name.push_back(s_[pos_++]);
    }
    if (name.empty()) throw std::runtime_error("tree parser: expected a name");
    CallTreeNode n;
    if (name.back() == '*') {  // trailing * marks a placeholder
      name.pop_back();
      n.placeholder = true;
    }
    n.function = name;
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      skip();
      while (pos_ < s_.size() && s_[pos_] != ')') {
        n.children.push_back(node());
        skip();
      }
      ++pos_;
    }
    return n;
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline CallTree tree(std::string_view s) { return TreeParser(s).parse(); }

}  // namespace afetm::testutil

#endif  // AFETM_TESTS_TEST_UTIL_HPP_
