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

// Function call trees: the full-tracking FCT, its colored form, and the
// approximate tree (AFCT) rebuilt from a partially traced event stream.

#ifndef AFETM_CALLTREE_HPP_
#define AFETM_CALLTREE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afetm/common.hpp"

namespace afetm {

enum class Color : std::uint8_t { kNone, kWhite, kRed, kBlue };

std::string_view to_string(Color c);
Color color_from_string(std::string_view s);

struct CallTreeNode {
  FunctionId function;
  Color color = Color::kNone;
  // Materialized from a recorded callstack rather than from an event of its
  // own. Such nodes correspond to blue nodes of the colored tree.
  bool placeholder = false;
  std::vector<CallTreeNode> children;

  CallTreeNode() = default;
  explicit CallTreeNode(FunctionId fn) : function(std::move(fn)) {}

  CallTreeNode& add_child(FunctionId fn);
  std::size_t size() const;

  friend bool operator==(const CallTreeNode&, const CallTreeNode&) = default;
};

// A rooted ordered tree, or an ordered forest when reconstruction leaves
// several roots. An empty tree has no roots.
struct CallTree {
  std::vector<CallTreeNode> roots;

  CallTree() = default;
  explicit CallTree(CallTreeNode root) { roots.push_back(std::move(root)); }

  bool empty() const { return roots.empty(); }
  std::size_t size() const;
  std::size_t depth() const;

  friend bool operator==(const CallTree&, const CallTree&) = default;
};

// Function names in preorder.
std::vector<FunctionId> preorder(const CallTree& tree);

// One record of the trace stream. `caller` is absent for the entry function
// (its caller lies outside the program). `callstack`, when present, is the
// root-to-self function path and ends with `function`.
struct TraceEvent {
  std::uint64_t seq = 0;
  FunctionId function;
  std::optional<FunctionId> caller;
  std::optional<std::vector<FunctionId>> callstack;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// Which functions are traced, and which of those also record callstacks.
struct TracePlan {
  FunctionSet traced;
  FunctionSet callstack;

  void validate() const;
};

// Keeps the events of traced functions and drops callstacks of functions
// outside plan.callstack. Sequence numbers are preserved.
std::vector<TraceEvent> filter_events(std::span<const TraceEvent> events,
                                      const TracePlan& plan);

// --- Coloring ---------------------------------------------------------------

struct ColoringResult {
  std::vector<CallTree> colored;
  FunctionSet callstack;
};

// Node in `traced` -> white, otherwise red; a red node with a white
// descendant becomes blue and its nearest white descendant (first in the
// preorder of its subtree) joins the callstack set. Linear in total nodes.
ColoringResult color_fcts(std::span<const CallTree> fcts,
                          const FunctionSet& traced);

// Removes every red node. Red nodes never have white descendants, so whole
// red subtrees go away.
CallTree mask_red(const CallTree& colored);

// Merges siblings that call the same function (recursively, keeping the first
// occurrence's position). This is the shape an AFCT can represent.
CallTree collapse_duplicates(const CallTree& tree);

// Drops colors and placeholder flags.
CallTree strip_annotations(const CallTree& tree);

// --- AFCT construction ------------------------------------------------------

// Rebuilds the approximate call tree from a time-ordered adaptive trace.
// Callers never traced as functions become synthetic roots; events attach to
// the live instance of their caller on the current call path; events that
// carry a callstack are merged into the forest along that stack, creating
// placeholder nodes for untraced frames. The result is collapsed (no two
// siblings share a function). Throws on unordered sequence numbers or on a
// callstack inconsistent with its event.
CallTree build_afct(std::span<const TraceEvent> events);

// The table-driven variant: identifies tree nodes by function name alone
// (children of every instance of a function are pooled), grows the forest
// breadth-first from the synthetic roots with the recursion guard, then
// merges sub-trees along callstacks. Context-insensitive, so it only matches
// build_afct when a function's callees do not depend on its call context.
CallTree build_afct_by_name(std::span<const TraceEvent> events);

// --- Distances ----------------------------------------------------------------

// Unit-cost ordered tree edit distance (insert, delete, relabel).
std::size_t tree_edit_distance(const CallTree& a, const CallTree& b);

// |preorder index of located - preorder index of actual|, first occurrences.
std::size_t preorder_distance(const CallTree& tree, std::string_view located,
                              std::string_view actual);

// --- Canonical encodings ------------------------------------------------------

// Injective byte encoding of labels, order, colors and placeholder flags.
std::string canonical_form(const CallTree& tree);
CallTree decode_canonical(std::string_view encoded);

// Labels-only encodings used for structural comparison.
std::string shape_key(const CallTree& tree);
// Same, but with each node's children sorted: equal keys <=> equal as
// multisets of subtrees at every level.
std::string unordered_shape_key(const CallTree& tree);

}  // namespace afetm

#endif  // AFETM_CALLTREE_HPP_
