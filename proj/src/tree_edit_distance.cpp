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

// Zhang-Shasha ordered tree edit distance with unit costs. Forests are
// handled by hanging them under a virtual root that matches for free.

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "afetm/calltree.hpp"

namespace afetm {
namespace {

constexpr int kVirtualRoot = -1;

class LabelTable {
 public:
  int id(const std::string& label) {
    auto [it, inserted] =
        ids_.try_emplace(label, static_cast<int>(ids_.size()));
    return it->second;
  }

 private:
  std::unordered_map<std::string, int> ids_;
};

// Postorder arrays, 1-based.
struct FlatTree {
  std::vector<int> label{0};
  std::vector<int> leftmost{0};
  std::vector<int> keyroots;

  int size() const { return static_cast<int>(label.size()) - 1; }

  int add(const std::vector<CallTreeNode>& children, int node_label,
          LabelTable& labels) {
    int first_leaf = 0;
    for (const auto& c : children) {
      const int idx = add(c.children, labels.id(c.function), labels);
      if (first_leaf == 0) first_leaf = leftmost[static_cast<std::size_t>(idx)];
    }
    label.push_back(node_label);
    const int self = size();
    leftmost.push_back(first_leaf == 0 ? self : first_leaf);
    return self;
  }

  void compute_keyroots() {
    // A keyroot is the highest-numbered node for its leftmost leaf.
    std::vector<int> highest(label.size(), 0);
    for (int i = 1; i <= size(); ++i) {
      highest[static_cast<std::size_t>(leftmost[static_cast<std::size_t>(i)])] = i;
    }
    for (int i = 1; i <= size(); ++i) {
      if (highest[static_cast<std::size_t>(leftmost[static_cast<std::size_t>(i)])] == i) {
        keyroots.push_back(i);
      }
    }
  }
};

FlatTree flatten(const CallTree& tree, LabelTable& labels) {
  FlatTree flat;
  flat.add(tree.roots, kVirtualRoot, labels);
  flat.compute_keyroots();
  return flat;
}

}  // namespace

std::size_t tree_edit_distance(const CallTree& a, const CallTree& b) {
  LabelTable labels;
  const FlatTree t1 = flatten(a, labels);
  const FlatTree t2 = flatten(b, labels);
  const int n1 = t1.size();
  const int n2 = t2.size();
  const auto stride = static_cast<std::size_t>(n2 + 1);
  std::vector<int> treedist(static_cast<std::size_t>(n1 + 1) * stride, 0);
  std::vector<int> forestdist(static_cast<std::size_t>(n1 + 2) *
                              static_cast<std::size_t>(n2 + 2));
  auto td = [&](int i, int j) -> int& {
    return treedist[static_cast<std::size_t>(i) * stride +
                    static_cast<std::size_t>(j)];
  };
  auto at = [](const std::vector<int>& v, int i) {
    return v[static_cast<std::size_t>(i)];
  };

  for (int i : t1.keyroots) {
    for (int j : t2.keyroots) {
      const int li = at(t1.leftmost, i);
      const int lj = at(t2.leftmost, j);
      const int rows = i - li + 2;
      const int cols = j - lj + 2;
      auto fd = [&](int x, int y) -> int& {
        return forestdist[static_cast<std::size_t>(x) *
                              static_cast<std::size_t>(cols) +
                          static_cast<std::size_t>(y)];
      };
      fd(0, 0) = 0;
      for (int x = 1; x < rows; ++x) fd(x, 0) = fd(x - 1, 0) + 1;
      for (int y = 1; y < cols; ++y) fd(0, y) = fd(0, y - 1) + 1;
      for (int di = li; di <= i; ++di) {
        const int x = di - li + 1;
        for (int dj = lj; dj <= j; ++dj) {
          const int y = dj - lj + 1;
          const int del = fd(x - 1, y) + 1;
          const int ins = fd(x, y - 1) + 1;
          if (at(t1.leftmost, di) == li && at(t2.leftmost, dj) == lj) {
            const int rel =
                fd(x - 1, y - 1) + (at(t1.label, di) != at(t2.label, dj) ? 1 : 0);
            fd(x, y) = std::min({del, ins, rel});
            td(di, dj) = fd(x, y);
          } else {
            const int sub = fd(at(t1.leftmost, di) - li, at(t2.leftmost, dj) - lj) +
                            td(di, dj);
            fd(x, y) = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return static_cast<std::size_t>(td(n1, n2));
}

}  // namespace afetm
