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

#include "afetm/calltree.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace afetm {

std::string_view to_string(Color c) {
  switch (c) {
    case Color::kNone:
      return "none";
    case Color::kWhite:
      return "white";
    case Color::kRed:
      return "red";
    case Color::kBlue:
      return "blue";
  }
  return "none";
}

Color color_from_string(std::string_view s) {
  if (s == "none") return Color::kNone;
  if (s == "white") return Color::kWhite;
  if (s == "red") return Color::kRed;
  if (s == "blue") return Color::kBlue;
  throw ParseError("unknown color '" + std::string(s) + "'");
}

CallTreeNode& CallTreeNode::add_child(FunctionId fn) {
  children.emplace_back(std::move(fn));
  return children.back();
}

std::size_t CallTreeNode::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::size_t CallTree::size() const {
  std::size_t n = 0;
  for (const auto& r : roots) n += r.size();
  return n;
}

namespace {

std::size_t node_depth(const CallTreeNode& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, node_depth(c));
  return d + 1;
}

void preorder_into(const CallTreeNode& n, std::vector<FunctionId>& out) {
  out.push_back(n.function);
  for (const auto& c : n.children) preorder_into(c, out);
}

}  // namespace

std::size_t CallTree::depth() const {
  std::size_t d = 0;
  for (const auto& r : roots) d = std::max(d, node_depth(r));
  return d;
}

std::vector<FunctionId> preorder(const CallTree& tree) {
  std::vector<FunctionId> out;
  for (const auto& r : tree.roots) preorder_into(r, out);
  return out;
}

void TracePlan::validate() const {
  for (const auto& f : callstack) {
    if (!traced.contains(f)) {
      throw ValidationError("trace plan: callstack function '" + f +
                            "' is not traced");
    }
  }
}

std::vector<TraceEvent> filter_events(std::span<const TraceEvent> events,
                                      const TracePlan& plan) {
  std::vector<TraceEvent> out;
  for (const auto& e : events) {
    if (!plan.traced.contains(e.function)) continue;
    TraceEvent kept = e;
    if (!plan.callstack.contains(e.function)) kept.callstack.reset();
    out.push_back(std::move(kept));
  }
  return out;
}

// --- Coloring ---------------------------------------------------------------

namespace {

void paint(CallTreeNode& n, const FunctionSet& traced) {
  n.color = traced.contains(n.function) ? Color::kWhite : Color::kRed;
  for (auto& c : n.children) paint(c, traced);
}

// Returns the first white node in the preorder of n's subtree (n included),
// recoloring red nodes that have one to blue on the way back up.
const CallTreeNode* promote(CallTreeNode& n, FunctionSet& callstack) {
  const CallTreeNode* nearest = nullptr;
  for (auto& c : n.children) {
    const CallTreeNode* found = promote(c, callstack);
    if (nearest == nullptr) nearest = found;
  }
  if (n.color == Color::kWhite) return &n;
  if (nearest != nullptr) {
    n.color = Color::kBlue;
    callstack.insert(nearest->function);
  }
  return nearest;
}

void mask_into(const CallTreeNode& n, std::vector<CallTreeNode>& out) {
  if (n.color == Color::kRed) return;
  CallTreeNode kept(n.function);
  kept.color = n.color;
  kept.placeholder = n.placeholder;
  for (const auto& c : n.children) mask_into(c, kept.children);
  out.push_back(std::move(kept));
}

int color_rank(Color c) {
  switch (c) {
    case Color::kWhite:
      return 3;
    case Color::kBlue:
      return 2;
    case Color::kRed:
      return 1;
    case Color::kNone:
      return 0;
  }
  return 0;
}

std::vector<CallTreeNode> collapse_list(std::vector<CallTreeNode> nodes) {
  std::vector<CallTreeNode> merged;
  std::unordered_map<std::string, std::size_t> slot;
  for (auto& n : nodes) {
    auto [it, inserted] = slot.try_emplace(n.function, merged.size());
    if (inserted) {
      merged.push_back(std::move(n));
      continue;
    }
    CallTreeNode& into = merged[it->second];
    if (color_rank(n.color) > color_rank(into.color)) into.color = n.color;
    into.placeholder = into.placeholder && n.placeholder;
    for (auto& c : n.children) into.children.push_back(std::move(c));
  }
  for (auto& m : merged) m.children = collapse_list(std::move(m.children));
  return merged;
}

void strip_into(CallTreeNode& n) {
  n.color = Color::kNone;
  n.placeholder = false;
  for (auto& c : n.children) strip_into(c);
}

}  // namespace

ColoringResult color_fcts(std::span<const CallTree> fcts,
                          const FunctionSet& traced) {
  ColoringResult result;
  result.colored.assign(fcts.begin(), fcts.end());
  for (auto& tree : result.colored) {
    for (auto& r : tree.roots) paint(r, traced);
    for (auto& r : tree.roots) promote(r, result.callstack);
  }
  return result;
}

CallTree mask_red(const CallTree& colored) {
  CallTree out;
  for (const auto& r : colored.roots) mask_into(r, out.roots);
  return out;
}

CallTree collapse_duplicates(const CallTree& tree) {
  CallTree out;
  out.roots = collapse_list(tree.roots);
  return out;
}

CallTree strip_annotations(const CallTree& tree) {
  CallTree out = tree;
  for (auto& r : out.roots) strip_into(r);
  return out;
}

// --- AFCT construction ------------------------------------------------------

namespace {

constexpr int kNoParent = -1;

// Index-based forest used while the tree is still growing, so node handles
// survive insertions.
class Forest {
 public:
  struct Node {
    FunctionId function;
    bool placeholder = true;
    int parent = kNoParent;
    bool detached = false;
    std::vector<int> children;
  };

  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  Node& node(int i) { return nodes_[static_cast<std::size_t>(i)]; }

  const std::vector<int>& roots() const { return roots_; }

  int find_child(int parent, std::string_view fn) const {
    const auto& list = parent == kNoParent ? roots_ : node(parent).children;
    for (int c : list) {
      if (node(c).function == fn) return c;
    }
    return kNoParent;
  }

  // Returns the child of `parent` calling `fn`, creating it if needed. A
  // node stops being a placeholder once an event of its own lands on it.
  int child(int parent, const FunctionId& fn, bool placeholder) {
    int c = find_child(parent, fn);
    if (c == kNoParent) {
      c = static_cast<int>(nodes_.size());
      nodes_.push_back(Node{fn, placeholder, parent, false, {}});
      (parent == kNoParent ? roots_ : node(parent).children).push_back(c);
    } else if (!placeholder) {
      node(c).placeholder = false;
    }
    return c;
  }

  // Always creates a new placeholder root, even if one shares the name.
  int add_root(const FunctionId& fn) {
    const int r = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{fn, true, kNoParent, false, {}});
    roots_.push_back(r);
    return r;
  }

  bool is_ancestor_or_self(int n, std::string_view fn) const {
    for (int cur = n; cur != kNoParent; cur = node(cur).parent) {
      if (node(cur).function == fn) return true;
    }
    return false;
  }

  // Moves the children of root `from` under `to` (merging equal functions)
  // and drops `from` from the root list.
  void graft_children(int from, int to) {
    std::vector<int> moving = node(from).children;
    node(from).children.clear();
    for (int c : moving) adopt(c, to);
    node(from).detached = true;
    std::erase(roots_, from);
  }

  CallTree materialize() const {
    CallTree out;
    for (int r : roots_) out.roots.push_back(build(r));
    return out;
  }

 private:
  void adopt(int c, int to) {
    const int existing = find_child(to, node(c).function);
    if (existing == kNoParent) {
      node(c).parent = to;
      node(to).children.push_back(c);
      return;
    }
    if (!node(c).placeholder) node(existing).placeholder = false;
    std::vector<int> grand = node(c).children;
    node(c).children.clear();
    node(c).detached = true;
    for (int g : grand) adopt(g, existing);
  }

  CallTreeNode build(int i) const {
    CallTreeNode out(node(i).function);
    out.placeholder = node(i).placeholder;
    for (int c : node(i).children) out.children.push_back(build(c));
    return out;
  }

  std::vector<Node> nodes_;
  std::vector<int> roots_;
};

std::string seq_context(const TraceEvent& e) {
  return "event seq " + std::to_string(e.seq) + " (" + e.function + ")";
}

void check_event(const TraceEvent& e, std::optional<std::uint64_t> last_seq) {
  if (last_seq && e.seq <= *last_seq) {
    throw ValidationError(seq_context(e) +
                          ": sequence numbers must strictly increase");
  }
  if (!e.callstack) return;
  const auto& cs = *e.callstack;
  if (cs.empty()) return;
  if (cs.back() != e.function) {
    throw ValidationError(seq_context(e) + ": callstack ends with '" +
                          cs.back() + "' instead of the event's function");
  }
  if (cs.size() == 1 && e.caller) {
    throw ValidationError(seq_context(e) + ": callstack says root but caller is '" +
                          *e.caller + "'");
  }
  if (cs.size() >= 2 && (!e.caller || *e.caller != cs[cs.size() - 2])) {
    throw ValidationError(seq_context(e) + ": callstack parent '" +
                          cs[cs.size() - 2] + "' disagrees with caller '" +
                          e.caller.value_or("<none>") + "'");
  }
}

bool has_stack(const TraceEvent& e) {
  return e.callstack.has_value() && !e.callstack->empty();
}

// Walks `chain` from the top level, reusing nodes and materializing
// placeholders, and returns the deepest node. `skip_root` is never reused as
// the top of the chain.
int materialize_chain(Forest& forest, std::span<const FunctionId> chain,
                      int skip_root = kNoParent) {
  int parent = kNoParent;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i == 0 && skip_root != kNoParent) {
      int found = kNoParent;
      for (int r : forest.roots()) {
        if (r != skip_root && forest.node(r).function == chain[0]) found = r;
      }
      if (found == kNoParent) found = forest.add_root(chain[0]);
      parent = found;
      continue;
    }
    parent = forest.child(parent, chain[i], true);
  }
  return parent;
}

}  // namespace

CallTree build_afct(std::span<const TraceEvent> events) {
  Forest forest;
  std::vector<int> path;  // call path of the most recent event
  std::vector<int> synthetic_roots;
  std::optional<std::uint64_t> last_seq;

  for (const auto& e : events) {
    check_event(e, last_seq);
    last_seq = e.seq;

    if (has_stack(e)) {
      const auto& cs = *e.callstack;
      path.clear();
      int parent = kNoParent;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        parent = forest.child(parent, cs[i], i + 1 != cs.size());
        path.push_back(parent);
      }
      continue;
    }
    if (!e.caller) {
      path.assign(1, forest.child(kNoParent, e.function, false));
      continue;
    }
    // Attach to the deepest live instance of the caller on the current path.
    auto hit = std::find_if(path.rbegin(), path.rend(), [&](int n) {
      return forest.node(n).function == *e.caller;
    });
    if (hit != path.rend()) {
      path.erase(hit.base(), path.end());
      path.push_back(forest.child(path.back(), e.function, false));
      continue;
    }
    // Caller never observed in this context: start a synthetic root.
    const int root = forest.child(kNoParent, *e.caller, true);
    if (std::find(synthetic_roots.begin(), synthetic_roots.end(), root) ==
        synthetic_roots.end()) {
      synthetic_roots.push_back(root);
    }
    path = {root, forest.child(root, e.function, false)};
  }

  // Sub-tree merging for synthetic roots that a later callstack can place.
  for (int root : synthetic_roots) {
    const auto& name = forest.node(root).function;
    if (!forest.node(root).placeholder || forest.node(root).detached) continue;
    for (const auto& e : events) {
      if (!has_stack(e) || !e.caller || *e.caller != name) continue;
      const auto& cs = *e.callstack;
      if (cs.size() < 3) continue;  // chain would be the root itself
      std::span<const FunctionId> chain(cs.data(), cs.size() - 1);
      const int target = materialize_chain(forest, chain, root);
      if (target != root) forest.graft_children(root, target);
      break;
    }
  }
  return forest.materialize();
}

CallTree build_afct_by_name(std::span<const TraceEvent> events) {
  std::optional<std::uint64_t> last_seq;
  for (const auto& e : events) {
    check_event(e, last_seq);
    last_seq = e.seq;
  }

  // Step 2: callers that never appear as traced functions are roots. The
  // entry function's absent caller plays the same role and is elided, so
  // events without a caller become roots themselves.
  FunctionSet traced_functions;
  for (const auto& e : events) traced_functions.insert(e.function);
  Forest forest;
  std::vector<int> frontier;
  std::vector<int> synthetic;
  for (const auto& e : events) {
    if (!e.caller) {
      if (forest.find_child(kNoParent, e.function) == kNoParent) {
        frontier.push_back(forest.child(kNoParent, e.function, false));
      }
    } else if (!traced_functions.contains(*e.caller) &&
               forest.find_child(kNoParent, *e.caller) == kNoParent) {
      const int r = forest.child(kNoParent, *e.caller, true);
      frontier.push_back(r);
      synthetic.push_back(r);
    }
  }

  // Step 3: grow breadth-first. The recursion guard admits a callee only if
  // it is not already an ancestor (or the node itself).
  std::deque<int> queue(frontier.begin(), frontier.end());
  while (!queue.empty()) {
    const int n = queue.front();
    queue.pop_front();
    const FunctionId name = forest.node(n).function;
    for (const auto& e : events) {
      if (!e.caller || *e.caller != name) continue;
      if (forest.find_child(n, e.function) != kNoParent) continue;
      if (forest.is_ancestor_or_self(n, e.function)) continue;
      queue.push_back(forest.child(n, e.function, false));
    }
  }

  // Step 4: merge sub-trees whose root's child recorded a callstack.
  for (int root : synthetic) {
    if (forest.node(root).detached) continue;
    const FunctionId name = forest.node(root).function;
    bool merged = false;
    for (int child : std::vector<int>(forest.node(root).children)) {
      if (merged) break;
      const FunctionId child_name = forest.node(child).function;
      for (const auto& e : events) {
        if (!e.caller || *e.caller != name || e.function != child_name ||
            !has_stack(e)) {
          continue;
        }
        const auto& cs = *e.callstack;
        if (cs.size() < 3) continue;
        std::span<const FunctionId> chain(cs.data(), cs.size() - 1);
        const int target = materialize_chain(forest, chain, root);
        if (target != root) forest.graft_children(root, target);
        merged = true;
        break;
      }
    }
  }
  return forest.materialize();
}

// --- Distances ------------------------------------------------------------------

std::size_t preorder_distance(const CallTree& tree, std::string_view located,
                              std::string_view actual) {
  const auto order = preorder(tree);
  auto index_of = [&](std::string_view fn) -> std::size_t {
    auto it = std::find(order.begin(), order.end(), fn);
    if (it == order.end()) {
      throw ValidationError("preorder_distance: function '" + std::string(fn) +
                            "' does not occur in the tree");
    }
    return static_cast<std::size_t>(it - order.begin());
  };
  const std::size_t a = index_of(located);
  const std::size_t b = index_of(actual);
  return a > b ? a - b : b - a;
}

// --- Canonical encodings ------------------------------------------------------

namespace {

char color_code(Color c) {
  switch (c) {
    case Color::kNone:
      return 'n';
    case Color::kWhite:
      return 'w';
    case Color::kRed:
      return 'r';
    case Color::kBlue:
      return 'b';
  }
  return 'n';
}

Color color_from_code(char c) {
  switch (c) {
    case 'n':
      return Color::kNone;
    case 'w':
      return Color::kWhite;
    case 'r':
      return Color::kRed;
    case 'b':
      return Color::kBlue;
    default:
      throw ParseError(std::string("canonical form: bad color code '") + c +
                       "'");
  }
}

void append_label(std::string& out, const std::string& label) {
  out += std::to_string(label.size());
  out += ':';
  out += label;
}

void encode_full(const CallTreeNode& n, std::string& out) {
  out += '(';
  append_label(out, n.function);
  out += color_code(n.color);
  out += n.placeholder ? 'p' : '-';
  for (const auto& c : n.children) encode_full(c, out);
  out += ')';
}

void encode_shape(const CallTreeNode& n, std::string& out) {
  out += '(';
  append_label(out, n.function);
  for (const auto& c : n.children) encode_shape(c, out);
  out += ')';
}

std::string encode_unordered(const CallTreeNode& n) {
  std::vector<std::string> keys;
  keys.reserve(n.children.size());
  for (const auto& c : n.children) keys.push_back(encode_unordered(c));
  std::sort(keys.begin(), keys.end());
  std::string out = "(";
  append_label(out, n.function);
  for (const auto& k : keys) out += k;
  out += ')';
  return out;
}

class CanonicalDecoder {
 public:
  explicit CanonicalDecoder(std::string_view s) : s_(s) {}

  CallTree decode() {
    CallTree out;
    while (pos_ < s_.size()) out.roots.push_back(node());
    return out;
  }

 private:
  CallTreeNode node() {
    expect('(');
    std::size_t len = 0;
    bool digits = false;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
      len = len * 10 + static_cast<std::size_t>(s_[pos_++] - '0');
      digits = true;
    }
    if (!digits) fail("label length");
    expect(':');
    if (pos_ + len + 2 > s_.size()) fail("label");
    CallTreeNode n(std::string(s_.substr(pos_, len)));
    pos_ += len;
    n.color = color_from_code(s_[pos_++]);
    const char p = s_[pos_++];
    if (p != 'p' && p != '-') fail("placeholder flag");
    n.placeholder = p == 'p';
    while (pos_ < s_.size() && s_[pos_] == '(') n.children.push_back(node());
    expect(')');
    return n;
  }

  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c) {
      fail(std::string("'") + c + "'");
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("canonical form: expected " + what + " at offset " +
                     std::to_string(pos_));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string canonical_form(const CallTree& tree) {
  std::string out;
  for (const auto& r : tree.roots) encode_full(r, out);
  return out;
}

CallTree decode_canonical(std::string_view encoded) {
  return CanonicalDecoder(encoded).decode();
}

std::string shape_key(const CallTree& tree) {
  std::string out;
  for (const auto& r : tree.roots) encode_shape(r, out);
  return out;
}

std::string unordered_shape_key(const CallTree& tree) {
  std::vector<std::string> keys;
  for (const auto& r : tree.roots) keys.push_back(encode_unordered(r));
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (const auto& k : keys) out += k;
  return out;
}

}  // namespace afetm
