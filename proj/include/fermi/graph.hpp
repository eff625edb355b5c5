#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fermi {

using LineSet = std::vector<int>;  // sorted line indices

struct FeynmanGraph {
  int n = 0;
  std::vector<std::pair<int, int>> lines;
  std::vector<int> ext;  // vertex of each external leg

  int incidence(int v) const;
  int line_count() const { return static_cast<int>(lines.size()); }
  std::vector<int> external_vertices() const;  // distinct, sorted
  bool connected() const;
  bool even_incidence() const;
  void validate() const;  // vertex ranges and connectivity
};

FeynmanGraph parse_edge_list(const std::string& text);
std::string to_edge_list(const FeynmanGraph& g);

bool connected_without(const FeynmanGraph& g, const std::vector<bool>& removed);
bool is_one_pi(const FeynmanGraph& g);
bool is_spanning_tree(const FeynmanGraph& g, const LineSet& tree);
std::vector<LineSet> spanning_trees(const FeynmanGraph& g);
std::vector<int> tree_path(const FeynmanGraph& g, const LineSet& tree, int v1, int v2);

struct OverlappingLoops {
  int l1 = -1, l2 = -1;
  LineSet t1, t2;
};
OverlappingLoops overlapping_loops(const FeynmanGraph& g, const LineSet& tree, int line);

struct CollapsedLine {
  std::vector<int> lines;     // original lines merged into this one
  std::vector<int> vertices;  // original vertices of the collapsed string
};

struct CollapseResult {
  FeynmanGraph graph;
  std::vector<CollapsedLine> origin;  // per line of the collapsed graph
  std::vector<int> vertex_map;        // original vertex -> new vertex, -1 if collapsed
};

bool is_two_legged_subset(const FeynmanGraph& g, const std::vector<int>& vertices);
CollapseResult collapse_strings(const FeynmanGraph& g, const std::vector<std::vector<int>>& subgraphs);
std::vector<std::vector<int>> two_legged_proper_subgraphs(const FeynmanGraph& g);
bool has_two_legged_proper_subgraph(const FeynmanGraph& g);
CollapseResult collapse_all_strings(const FeynmanGraph& g);

enum class ForkKind { Root, RFork, CFork, Plain };

struct Fork {
  int parent = -1;
  ForkKind kind = ForkKind::Plain;
  std::vector<int> vertices;  // vertex set of the associated subgraph
};

struct GnTree {
  std::vector<Fork> forks;  // forks[0] is the root, parents precede children

  int size() const { return static_cast<int>(forks.size()); }
  int depth(int f) const;
  std::vector<int> children(int f) const;
  double symmetry_factor() const;  // product of 1/n_f! over forks, n_f = number of children
  void validate(const FeynmanGraph& g) const;
};

GnTree root_only_tree(const FeynmanGraph& g);

struct ScaleLabelling {
  int root_scale = 0;
  int cutoff = 0;
  std::vector<int> fork_scale;
  std::vector<int> line_scale;
};

bool fork_scale_allowed(ForkKind kind, int scale, int parent_scale, int cutoff);
std::vector<int> line_forks(const GnTree& tree, const FeynmanGraph& g);
std::vector<ScaleLabelling> enumerate_labellings(const GnTree& tree, const FeynmanGraph& g, int j, int cutoff);

std::vector<FeynmanGraph> enumerate_two_legged_1pi(int max_vertices);
std::string canonical_form(const FeynmanGraph& g);
FeynmanGraph canonicalize(const FeynmanGraph& g);

// M^{j (linear + gamma_count * gamma)} with linear = -(1 + w)
struct PropagatorExponent {
  double linear = 0.0;
  int gamma_count = 0;
  double at(int j, double gamma) const { return j * (linear + gamma_count * gamma); }
};
PropagatorExponent propagator_exponent(double w, int g);

enum class DerivativeTarget { Vertex, Line };

struct DerivativeStep {
  DerivativeTarget target = DerivativeTarget::Vertex;
  int id = 0;
  LineSet tree;  // spanning tree in use after the step
};

using DerivativeSchedule = std::vector<DerivativeStep>;

struct DerivativePlan {
  LineSet initial_tree;
  std::vector<DerivativeSchedule> schedules;  // one per admissible sequence of targets
};

constexpr int kDerivativeBudget = 3;

DerivativePlan plan_derivatives(const FeynmanGraph& g, const LineSet& tree, int budget = kDerivativeBudget);
bool verify_plan(const FeynmanGraph& g, const DerivativePlan& plan, std::string* why = nullptr);

}  // namespace fermi

namespace fermi {

// Spanning-tree count from the reduced Laplacian determinant.
long long kirchhoff_tree_count(const FeynmanGraph& g);

struct CorpusReport {
  int graphs = 0;
  long long lemma_cases = 0, lemma_passed = 0;
  int tree_count_matches = 0;
  int plans_verified = 0;
  std::vector<std::string> failures;
  bool all_passed() const { return failures.empty(); }
};

CorpusReport verify_corpus(const std::vector<FeynmanGraph>& corpus);

}  // namespace fermi
