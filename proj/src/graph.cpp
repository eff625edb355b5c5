#include "fermi/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "fermi/error.hpp"

namespace fermi {

int FeynmanGraph::incidence(int v) const {
  int d = 0;
  for (auto [a, b] : lines) d += (a == v) + (b == v);
  for (int e : ext) d += (e == v);
  return d;
}

std::vector<int> FeynmanGraph::external_vertices() const {
  std::vector<int> v = ext;
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool FeynmanGraph::connected() const { return connected_without(*this, std::vector<bool>(lines.size(), false)); }

bool FeynmanGraph::even_incidence() const {
  for (int v = 0; v < n; ++v)
    if (incidence(v) % 2 != 0) return false;
  return true;
}

void FeynmanGraph::validate() const {
  if (n <= 0) fail(ErrorCode::InvalidArgument, "graph has no vertices");
  for (auto [a, b] : lines)
    if (a < 0 || b < 0 || a >= n || b >= n) fail(ErrorCode::InvalidArgument, "line endpoint out of range");
  for (int e : ext)
    if (e < 0 || e >= n) fail(ErrorCode::InvalidArgument, "external leg vertex out of range");
  if (!connected()) fail(ErrorCode::InvalidArgument, "graph is disconnected");
}

FeynmanGraph parse_edge_list(const std::string& text) {
  FeynmanGraph g;
  std::istringstream in(text);
  std::string line;
  int max_v = -1, declared = -1, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto bad = [&] { fail(ErrorCode::Config, "malformed edge list at line " + std::to_string(lineno)); };
    std::string extra;
    if (first == "ext") {
      int v;
      if (!(ls >> v) || (ls >> extra) || v < 0) bad();
      g.ext.push_back(v);
      max_v = std::max(max_v, v);
    } else if (first == "vertices") {
      if (!(ls >> declared) || (ls >> extra) || declared <= 0) bad();
    } else {
      int a, b;
      try {
        std::size_t pos = 0;
        a = std::stoi(first, &pos);
        if (pos != first.size()) bad();
      } catch (const std::logic_error&) {
        bad();
      }
      if (!(ls >> b) || (ls >> extra) || a < 0 || b < 0) bad();
      g.lines.push_back({a, b});
      max_v = std::max({max_v, a, b});
    }
  }
  g.n = declared > 0 ? declared : max_v + 1;
  if (max_v >= g.n) fail(ErrorCode::Config, "vertex index exceeds declared vertex count");
  g.validate();
  return g;
}

std::string to_edge_list(const FeynmanGraph& g) {
  std::ostringstream out;
  out << "vertices " << g.n << "\n";
  for (auto [a, b] : g.lines) out << a << " " << b << "\n";
  for (int e : g.ext) out << "ext " << e << "\n";
  return out.str();
}

namespace {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

// adjacency lists sorted by line index
std::vector<std::vector<std::pair<int, int>>> adjacency(const FeynmanGraph& g, const std::vector<bool>* use) {
  std::vector<std::vector<std::pair<int, int>>> adj(g.n);
  for (int l = 0; l < g.line_count(); ++l) {
    if (use && !(*use)[l]) continue;
    auto [a, b] = g.lines[l];
    adj[a].push_back({l, b});
    if (a != b) adj[b].push_back({l, a});
  }
  return adj;
}

// lines of a shortest path from s to t, ties broken by lowest line index; empty optional-like flag
bool shortest_path(const FeynmanGraph& g, const std::vector<bool>& use, int s, int t, std::vector<int>& path) {
  auto adj = adjacency(g, &use);
  std::vector<int> via(g.n, -1), from(g.n, -1);
  std::vector<bool> seen(g.n, false);
  std::deque<int> q{s};
  seen[s] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    if (v == t) break;
    for (auto [l, w] : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        via[w] = l;
        from[w] = v;
        q.push_back(w);
      }
  }
  if (!seen[t]) return false;
  path.clear();
  for (int v = t; v != s; v = from[v]) path.push_back(via[v]);
  std::reverse(path.begin(), path.end());
  return true;
}

std::vector<bool> line_mask(const FeynmanGraph& g, const LineSet& set) {
  std::vector<bool> m(g.lines.size(), false);
  for (int l : set) {
    if (l < 0 || l >= g.line_count()) fail(ErrorCode::InvalidArgument, "line index out of range");
    m[l] = true;
  }
  return m;
}

bool contains(const LineSet& s, int l) { return std::find(s.begin(), s.end(), l) != s.end(); }

}  // namespace

bool connected_without(const FeynmanGraph& g, const std::vector<bool>& removed) {
  if (g.n <= 0) return false;
  UnionFind uf(g.n);
  int comps = g.n;
  for (int l = 0; l < g.line_count(); ++l)
    if (!removed[l] && uf.unite(g.lines[l].first, g.lines[l].second)) --comps;
  return comps == 1;
}

bool is_one_pi(const FeynmanGraph& g) {
  g.validate();
  std::vector<bool> removed(g.lines.size(), false);
  for (int l = 0; l < g.line_count(); ++l) {
    removed[l] = true;
    if (!connected_without(g, removed)) return false;
    removed[l] = false;
  }
  return true;
}

bool is_spanning_tree(const FeynmanGraph& g, const LineSet& tree) {
  if (static_cast<int>(tree.size()) != g.n - 1) return false;
  UnionFind uf(g.n);
  for (int l : tree) {
    if (l < 0 || l >= g.line_count()) return false;
    if (!uf.unite(g.lines[l].first, g.lines[l].second)) return false;
  }
  return true;
}

std::vector<LineSet> spanning_trees(const FeynmanGraph& g) {
  g.validate();
  std::vector<LineSet> out;
  int k = g.n - 1, m = g.line_count();
  if (k == 0) return {LineSet{}};
  if (k > m) return out;
  LineSet idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (is_spanning_tree(g, idx)) out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::vector<int> tree_path(const FeynmanGraph& g, const LineSet& tree, int v1, int v2) {
  if (v1 < 0 || v2 < 0 || v1 >= g.n || v2 >= g.n) fail(ErrorCode::InvalidArgument, "vertex not in graph");
  if (!is_spanning_tree(g, tree)) fail(ErrorCode::InvalidArgument, "not a spanning tree");
  std::vector<int> path;
  if (v1 == v2) return path;
  shortest_path(g, line_mask(g, tree), v1, v2, path);
  return path;
}

OverlappingLoops overlapping_loops(const FeynmanGraph& g, const LineSet& tree, int line) {
  g.validate();
  if (!g.even_incidence()) fail(ErrorCode::InvalidArgument, "odd incidence number");
  if (g.ext.size() != 2) fail(ErrorCode::InvalidArgument, "graph is not two-legged");
  if (!is_one_pi(g)) fail(ErrorCode::InvalidArgument, "graph is not 1PI");
  if (!is_spanning_tree(g, tree)) fail(ErrorCode::InvalidArgument, "not a spanning tree");
  auto ev = g.external_vertices();
  if (ev.size() == 2) {
    if (!contains(tree_path(g, tree, ev[0], ev[1]), line)) fail(ErrorCode::InvalidArgument, "line is not on the tree path");
  } else if (!contains(tree, line)) {
    fail(ErrorCode::InvalidArgument, "line is not in the tree");
  }
  auto [a, b] = g.lines[line];
  // sides of T - line
  std::vector<bool> tmask = line_mask(g, tree);
  tmask[line] = false;
  std::vector<int> side(g.n, 1);
  {
    auto adj = adjacency(g, &tmask);
    std::deque<int> q{a};
    side[a] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (auto [l, w] : adj[v])
        if (side[w] != 0) {
          side[w] = 0;
          q.push_back(w);
        }
    }
  }
  auto crossing = [&](const std::vector<int>& path) {
    for (int l : path)
      if (side[g.lines[l].first] != side[g.lines[l].second]) return l;
    return -1;
  };
  std::vector<bool> use(g.lines.size(), true);
  use[line] = false;
  std::vector<int> path;
  if (!shortest_path(g, use, a, b, path)) fail(ErrorCode::InvalidArgument, "graph is not 1PI");
  OverlappingLoops res;
  res.l1 = crossing(path);
  use[res.l1] = false;
  if (!shortest_path(g, use, a, b, path)) fail(ErrorCode::InvalidArgument, "cutting the line disconnects G - l1");
  res.l2 = crossing(path);
  if (res.l1 < 0 || res.l2 < 0 || contains(tree, res.l1) || contains(tree, res.l2))
    fail(ErrorCode::Internal, "crossing line search failed");
  auto swap_in = [&](int li) {
    LineSet t;
    for (int l : tree)
      if (l != line) t.push_back(l);
    t.push_back(li);
    std::sort(t.begin(), t.end());
    if (!is_spanning_tree(g, t)) fail(ErrorCode::Internal, "swapped tree is not spanning");
    return t;
  };
  res.t1 = swap_in(res.l1);
  res.t2 = swap_in(res.l2);
  return res;
}

bool is_two_legged_subset(const FeynmanGraph& g, const std::vector<int>& vertices) {
  if (vertices.empty()) return false;
  std::vector<bool> in(g.n, false);
  for (int v : vertices) {
    if (v < 0 || v >= g.n) return false;
    in[v] = true;
  }
  for (int e : g.ext)
    if (in[e]) return false;
  int boundary = 0;
  UnionFind uf(g.n);
  int comps = static_cast<int>(vertices.size());
  for (auto [a, b] : g.lines) {
    if (in[a] != in[b]) ++boundary;
    if (in[a] && in[b] && uf.unite(a, b)) --comps;
  }
  return boundary == 2 && comps == 1;
}

namespace {

class Collapser {
 public:
  explicit Collapser(const FeynmanGraph& g) : n_(g.n), alive_(g.n, true), ext_(g.ext) {
    for (int l = 0; l < g.line_count(); ++l) lines_.push_back({g.lines[l], {{l}, {}}});
  }

  FeynmanGraph current(std::vector<int>* map = nullptr) const {
    std::vector<int> m(n_, -1);
    int k = 0;
    for (int v = 0; v < n_; ++v)
      if (alive_[v]) m[v] = k++;
    FeynmanGraph g;
    g.n = k;
    for (const auto& l : lines_) g.lines.push_back({m[l.first.first], m[l.first.second]});
    for (int e : ext_) g.ext.push_back(m[e]);
    if (map) *map = m;
    return g;
  }

  std::vector<int> to_original(const std::vector<int>& map, const std::vector<int>& sub) const {
    std::vector<int> out;
    for (int v = 0; v < n_; ++v)
      if (map[v] >= 0 && std::find(sub.begin(), sub.end(), map[v]) != sub.end()) out.push_back(v);
    return out;
  }

  void collapse(const std::vector<int>& subset) {
    std::vector<int> map;
    FeynmanGraph g = current(&map);
    std::vector<int> local;
    for (int v : subset) {
      if (v < 0 || v >= n_ || !alive_[v]) fail(ErrorCode::InvalidArgument, "subgraph refers to a collapsed vertex");
      local.push_back(map[v]);
    }
    if (!is_two_legged_subset(g, local) || static_cast<int>(local.size()) >= g.n)
      fail(ErrorCode::InvalidArgument, "subgraph is not a proper two-legged subgraph");
    std::vector<bool> in(n_, false);
    for (int v : subset) in[v] = true;
    std::vector<Entry> kept;
    CollapsedLine merged;
    std::vector<int> ends;
    for (auto& l : lines_) {
      auto [a, b] = l.first;
      if (in[a] || in[b]) {
        merged.lines.insert(merged.lines.end(), l.second.lines.begin(), l.second.lines.end());
        merged.vertices.insert(merged.vertices.end(), l.second.vertices.begin(), l.second.vertices.end());
        if (!in[a]) ends.push_back(a);
        if (!in[b]) ends.push_back(b);
      } else {
        kept.push_back(std::move(l));
      }
    }
    merged.vertices.insert(merged.vertices.end(), subset.begin(), subset.end());
    std::sort(merged.lines.begin(), merged.lines.end());
    std::sort(merged.vertices.begin(), merged.vertices.end());
    kept.push_back({{std::min(ends[0], ends[1]), std::max(ends[0], ends[1])}, merged});
    lines_ = std::move(kept);
    for (int v : subset) alive_[v] = false;
  }

  CollapseResult result() const {
    CollapseResult r;
    r.graph = current(&r.vertex_map);
    for (const auto& l : lines_) r.origin.push_back(l.second);
    return r;
  }

 private:
  using Entry = std::pair<std::pair<int, int>, CollapsedLine>;
  int n_;
  std::vector<bool> alive_;
  std::vector<int> ext_;
  std::vector<Entry> lines_;
};

}  // namespace

CollapseResult collapse_strings(const FeynmanGraph& g, const std::vector<std::vector<int>>& subgraphs) {
  g.validate();
  Collapser c(g);
  for (const auto& s : subgraphs) c.collapse(s);
  return c.result();
}

std::vector<std::vector<int>> two_legged_proper_subgraphs(const FeynmanGraph& g) {
  if (g.n > 20) fail(ErrorCode::InvalidArgument, "graph too large for subset search");
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask + 1 < (1u << g.n); ++mask) {
    std::vector<int> s;
    for (int v = 0; v < g.n; ++v)
      if (mask & (1u << v)) s.push_back(v);
    if (is_two_legged_subset(g, s)) out.push_back(s);
  }
  return out;
}

bool has_two_legged_proper_subgraph(const FeynmanGraph& g) { return !two_legged_proper_subgraphs(g).empty(); }

CollapseResult collapse_all_strings(const FeynmanGraph& g) {
  g.validate();
  Collapser c(g);
  while (true) {
    std::vector<int> map;
    FeynmanGraph cur = c.current(&map);
    auto subs = two_legged_proper_subgraphs(cur);
    if (subs.empty()) break;
    auto best = std::max_element(subs.begin(), subs.end(),
                                 [](const auto& x, const auto& y) { return x.size() < y.size(); });
    c.collapse(c.to_original(map, *best));
  }
  return c.result();
}

int GnTree::depth(int f) const {
  int d = 0;
  while (forks.at(f).parent >= 0) {
    f = forks[f].parent;
    ++d;
  }
  return d;
}

std::vector<int> GnTree::children(int f) const {
  std::vector<int> c;
  for (int i = 0; i < size(); ++i)
    if (forks[i].parent == f) c.push_back(i);
  return c;
}

double GnTree::symmetry_factor() const {
  double s = 1.0;
  for (int f = 0; f < size(); ++f)
    for (int k = 2; k <= static_cast<int>(children(f).size()); ++k) s /= k;
  return s;
}

void GnTree::validate(const FeynmanGraph& g) const {
  if (forks.empty() || forks[0].parent != -1 || forks[0].kind != ForkKind::Root)
    fail(ErrorCode::InvalidArgument, "tree must start with a root fork");
  std::vector<int> all(g.n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> rv = forks[0].vertices;
  std::sort(rv.begin(), rv.end());
  if (rv != all) fail(ErrorCode::InvalidArgument, "root fork must represent the whole graph");
  for (int f = 1; f < size(); ++f) {
    const Fork& k = forks[f];
    if (k.parent < 0 || k.parent >= f) fail(ErrorCode::InvalidArgument, "parents must precede children");
    if (k.kind == ForkKind::Root) fail(ErrorCode::InvalidArgument, "only the first fork may be the root");
    if (k.vertices.empty()) fail(ErrorCode::InvalidArgument, "empty fork subgraph");
    const auto& pv = forks[k.parent].vertices;
    for (int v : k.vertices)
      if (std::find(pv.begin(), pv.end(), v) == pv.end())
        fail(ErrorCode::InvalidArgument, "fork subgraph not contained in its parent");
  }
  for (int f = 0; f < size(); ++f) {
    std::set<int> seen;
    for (int c : children(f))
      for (int v : forks[c].vertices)
        if (!seen.insert(v).second) fail(ErrorCode::InvalidArgument, "sibling fork subgraphs overlap");
  }
}

GnTree root_only_tree(const FeynmanGraph& g) {
  GnTree t;
  Fork r;
  r.kind = ForkKind::Root;
  r.vertices.resize(g.n);
  std::iota(r.vertices.begin(), r.vertices.end(), 0);
  t.forks.push_back(r);
  return t;
}

bool fork_scale_allowed(ForkKind kind, int scale, int parent_scale, int cutoff) {
  if (kind == ForkKind::CFork) return cutoff <= scale && scale <= parent_scale;
  return parent_scale < scale && scale <= 1;
}

std::vector<int> line_forks(const GnTree& tree, const FeynmanGraph& g) {
  std::vector<int> out(g.lines.size(), 0);
  for (int l = 0; l < g.line_count(); ++l) {
    int best = 0, best_depth = 0;
    for (int f = 1; f < tree.size(); ++f) {
      const auto& vs = tree.forks[f].vertices;
      bool has_a = std::find(vs.begin(), vs.end(), g.lines[l].first) != vs.end();
      bool has_b = std::find(vs.begin(), vs.end(), g.lines[l].second) != vs.end();
      int d = tree.depth(f);
      if (has_a && has_b && d > best_depth) {
        best = f;
        best_depth = d;
      }
    }
    out[l] = best;
  }
  return out;
}

std::vector<ScaleLabelling> enumerate_labellings(const GnTree& tree, const FeynmanGraph& g, int j, int cutoff) {
  tree.validate(g);
  if (!(cutoff <= j && j < 0)) fail(ErrorCode::InvalidArgument, "need cutoff <= j < 0");
  std::vector<int> lf = line_forks(tree, g);
  std::vector<ScaleLabelling> out;
  ScaleLabelling cur;
  cur.root_scale = j;
  cur.cutoff = cutoff;
  cur.fork_scale.assign(tree.size(), 0);
  cur.fork_scale[0] = j;
  auto rec = [&](auto&& self, int f) -> void {
    if (f == tree.size()) {
      cur.line_scale.resize(lf.size());
      for (std::size_t l = 0; l < lf.size(); ++l) cur.line_scale[l] = cur.fork_scale[lf[l]];
      out.push_back(cur);
      return;
    }
    const Fork& k = tree.forks[f];
    int ps = cur.fork_scale[k.parent];
    for (int s = cutoff; s <= 1; ++s)
      if (fork_scale_allowed(k.kind, s, ps, cutoff)) {
        cur.fork_scale[f] = s;
        self(self, f + 1);
      }
  };
  rec(rec, 1);
  return out;
}

namespace {

std::string encode(const FeynmanGraph& g, const std::vector<int>& perm) {
  int n = g.n;
  std::vector<int> adj(n * n, 0), ext(n, 0);
  for (auto [a, b] : g.lines) {
    int x = std::min(perm[a], perm[b]), y = std::max(perm[a], perm[b]);
    ++adj[x * n + y];
  }
  for (int e : g.ext) ++ext[perm[e]];
  std::string s = std::to_string(n) + ":";
  for (int v = 0; v < n; ++v) s += static_cast<char>('0' + ext[v]);
  s += ":";
  for (int x = 0; x < n; ++x)
    for (int y = x; y < n; ++y) s += static_cast<char>('0' + adj[x * n + y]);
  return s;
}

std::vector<int> best_permutation(const FeynmanGraph& g) {
  std::vector<int> perm(g.n), best;
  std::iota(perm.begin(), perm.end(), 0);
  std::string bs;
  do {
    std::string s = encode(g, perm);
    if (best.empty() || s < bs) {
      bs = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::string canonical_form(const FeynmanGraph& g) { return encode(g, best_permutation(g)); }

FeynmanGraph canonicalize(const FeynmanGraph& g) {
  auto perm = best_permutation(g);
  FeynmanGraph c;
  c.n = g.n;
  for (auto [a, b] : g.lines) c.lines.push_back({std::min(perm[a], perm[b]), std::max(perm[a], perm[b])});
  for (int e : g.ext) c.ext.push_back(perm[e]);
  std::sort(c.lines.begin(), c.lines.end());
  std::sort(c.ext.begin(), c.ext.end());
  return c;
}

std::vector<FeynmanGraph> enumerate_two_legged_1pi(int max_vertices) {
  if (max_vertices < 1 || max_vertices > 4) fail(ErrorCode::InvalidArgument, "max_vertices must lie in 1..4");
  std::vector<FeynmanGraph> out;
  for (int n = 1; n <= max_vertices; ++n) {
    std::map<std::string, FeynmanGraph> found;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) pairs.push_back({a, b});
    for (int e1 = 0; e1 < n; ++e1)
      for (int e2 = e1; e2 < n; ++e2) {
        FeynmanGraph g;
        g.n = n;
        g.ext = {e1, e2};
        std::vector<int> rem(n, 4);
        --rem[e1];
        --rem[e2];
        auto rec = [&](auto&& self, std::size_t pi) -> void {
          if (pi == pairs.size()) {
            if (std::any_of(rem.begin(), rem.end(), [](int r) { return r != 0; })) return;
            if (!g.connected() || !is_one_pi(g)) return;
            std::string key = canonical_form(g);
            if (!found.count(key)) found.emplace(key, canonicalize(g));
            return;
          }
          auto [a, b] = pairs[pi];
          int cap = a == b ? rem[a] / 2 : std::min(rem[a], rem[b]);
          for (int m = 0; m <= cap; ++m) {
            for (int k = 0; k < m; ++k) g.lines.push_back({a, b});
            if (a == b) rem[a] -= 2 * m;
            else {
              rem[a] -= m;
              rem[b] -= m;
            }
            self(self, pi + 1);
            if (a == b) rem[a] += 2 * m;
            else {
              rem[a] += m;
              rem[b] += m;
            }
            g.lines.resize(g.lines.size() - m);
          }
        };
        rec(rec, 0);
      }
    for (auto& [k, g] : found) out.push_back(g);
  }
  return out;
}

PropagatorExponent propagator_exponent(double w, int g) {
  if (g < 0) fail(ErrorCode::InvalidArgument, "negative fork count");
  return {-(1.0 + w), g};
}

namespace {

struct PlanState {
  LineSet tree;
  std::vector<int> vertex_count;
  LineSet differentiated;
  DerivativeSchedule steps;
};

}  // namespace

DerivativePlan plan_derivatives(const FeynmanGraph& g, const LineSet& tree, int budget) {
  g.validate();
  if (!is_spanning_tree(g, tree)) fail(ErrorCode::InvalidArgument, "not a spanning tree");
  if (budget < 0) fail(ErrorCode::InvalidArgument, "negative derivative budget");
  DerivativePlan plan;
  plan.initial_tree = tree;
  auto ev = g.external_vertices();
  // a tadpole depends on the external momentum only through v(0)
  if (g.n == 1 && ev.size() == 1) {
    plan.schedules.push_back({});
    return plan;
  }
  bool two_ext = ev.size() == 2;
  PlanState st{tree, std::vector<int>(g.n, 0), {}, {}};
  auto rec = [&](auto&& self, int left) -> void {
    if (left == 0) {
      plan.schedules.push_back(st.steps);
      return;
    }
    for (int v = 0; v < g.n; ++v) {
      // after two derivatives the loop momentum is shifted away from this vertex function
      if (st.vertex_count[v] >= 2) continue;
      ++st.vertex_count[v];
      st.steps.push_back({DerivativeTarget::Vertex, v, st.tree});
      self(self, left - 1);
      st.steps.pop_back();
      --st.vertex_count[v];
    }
    if (!two_ext) return;
    for (int l : tree_path(g, st.tree, ev[0], ev[1])) {
      // swap the differentiated line out of the tree only if more derivatives follow
      LineSet next = st.tree;
      if (left > 1) {
        OverlappingLoops ol = overlapping_loops(g, st.tree, l);
        if (!contains(st.differentiated, ol.l1)) next = ol.t1;
        else if (!contains(st.differentiated, ol.l2)) next = ol.t2;
        else fail(ErrorCode::Internal, "no admissible tree swap");
      }
      LineSet saved = st.tree;
      st.tree = next;
      st.differentiated.push_back(l);
      st.steps.push_back({DerivativeTarget::Line, l, next});
      self(self, left - 1);
      st.steps.pop_back();
      st.differentiated.pop_back();
      st.tree = saved;
    }
  };
  rec(rec, budget);
  return plan;
}

bool verify_plan(const FeynmanGraph& g, const DerivativePlan& plan, std::string* why) {
  auto bad = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  auto ev = g.external_vertices();
  for (const auto& sched : plan.schedules) {
    LineSet tree = plan.initial_tree;
    LineSet used;
    std::vector<int> count(g.n, 0);
    for (const auto& s : sched) {
      if (s.target == DerivativeTarget::Vertex) {
        if (s.id < 0 || s.id >= g.n) return bad("vertex out of range");
        if (++count[s.id] > 2) return bad("vertex function differentiated three times");
      } else {
        if (ev.size() != 2) return bad("propagator differentiated without a momentum path");
        if (contains(used, s.id)) return bad("line differentiated twice");
        for (int l : used)
          if (contains(tree, l)) return bad("differentiated line still carries the external momentum");
        if (!contains(tree_path(g, tree, ev[0], ev[1]), s.id)) return bad("line not on the tree path");
        used.push_back(s.id);
      }
      if (!is_spanning_tree(g, s.tree)) return bad("schedule tree is not spanning");
      tree = s.tree;
    }
  }
  return true;
}

long long kirchhoff_tree_count(const FeynmanGraph& g) {
  g.validate();
  if (g.n == 1) return 1;
  int m = g.n - 1;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
  for (auto [a, b] : g.lines) {
    if (a == b) continue;
    if (a < m) lap(a, a) += 1;
    if (b < m) lap(b, b) += 1;
    if (a < m && b < m) {
      lap(a, b) -= 1;
      lap(b, a) -= 1;
    }
  }
  return std::llround(lap.partialPivLu().determinant());
}

CorpusReport verify_corpus(const std::vector<FeynmanGraph>& corpus) {
  CorpusReport rep;
  for (std::size_t gi = 0; gi < corpus.size(); ++gi) {
    const FeynmanGraph& g = corpus[gi];
    std::string tag = "graph " + std::to_string(gi);
    ++rep.graphs;
    auto trees = spanning_trees(g);
    if (static_cast<long long>(trees.size()) == kirchhoff_tree_count(g)) ++rep.tree_count_matches;
    else rep.failures.push_back(tag + ": spanning tree count differs from the Laplacian determinant");
    auto ev = g.external_vertices();
    bool plans_ok = true;
    for (const auto& t : trees) {
      if (ev.size() == 2) {
        for (int l : tree_path(g, t, ev[0], ev[1])) {
          ++rep.lemma_cases;
          try {
            OverlappingLoops ol = overlapping_loops(g, t, l);
            bool ok = ol.l1 != ol.l2 && !contains(t, ol.l1) && !contains(t, ol.l2) && is_spanning_tree(g, ol.t1) &&
                      is_spanning_tree(g, ol.t2) && !contains(ol.t1, l) && !contains(ol.t2, l);
            if (ok) ++rep.lemma_passed;
            else rep.failures.push_back(tag + ": overlapping loops check failed on line " + std::to_string(l));
          } catch (const Error& err) {
            rep.failures.push_back(tag + ": " + err.what());
          }
        }
      }
      std::string why;
      try {
        if (!verify_plan(g, plan_derivatives(g, t), &why)) {
          plans_ok = false;
          rep.failures.push_back(tag + ": derivative plan rejected: " + why);
        }
      } catch (const Error& err) {
        plans_ok = false;
        rep.failures.push_back(tag + ": " + err.what());
      }
    }
    if (plans_ok) ++rep.plans_verified;
    CollapseResult c = collapse_all_strings(g);
    const FeynmanGraph& cg = c.graph;
    bool four = true;
    for (int v = 0; v < cg.n; ++v) four = four && cg.incidence(v) == 4;
    if (!(cg.ext.size() == 2 && four && is_one_pi(cg) && !has_two_legged_proper_subgraph(cg)))
      rep.failures.push_back(tag + ": collapsed graph violates its structural properties");
  }
  return rep;
}

}  // namespace fermi
