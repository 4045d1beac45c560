#pragma once

// Parent-child groups over wavelet coefficients and the replica bookkeeping
// that turns overlapping groups into disjoint ones.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wavegroup/dwt.hpp"
#include "wavegroup/error.hpp"

namespace wavegroup {

struct TreeEdge {
  std::size_t parent;
  std::size_t child;

  auto operator<=>(const TreeEdge&) const = default;
};

struct TreeEdges {
  CoeffLayout layout;
  std::vector<TreeEdge> edges;  // sorted by (parent, child)
};

// Parent-child edges of the 2-D quadtree. A detail at level l > 1 and
// position (r, c) owns the four same-orientation details at level l-1,
// positions (2r + i, 2c + j).
inline TreeEdges build_quadtree(const CoeffLayout& layout) {
  if (!layout.is_2d()) throw dimension_error("quadtree needs a 2-D layout");
  if (layout.levels() < 2) throw no_edges_error("quadtree needs at least two decomposition levels");
  TreeEdges out{layout, {}};
  for (int l = 2; l <= layout.levels(); ++l) {
    for (Orientation o : kImageOrientations) {
      const Subband b = layout.subband(l, o);
      for (std::size_t r = 0; r < b.rows; ++r) {
        for (std::size_t c = 0; c < b.cols; ++c) {
          const std::size_t parent = layout.index({l, o, r, c});
          for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
              out.edges.push_back({parent, layout.index({l - 1, o, 2 * r + i, 2 * c + j})});
            }
          }
        }
      }
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

// Parent-child edges of the 1-D binary tree: detail (l, k) owns (l-1, 2k)
// and (l-1, 2k+1).
inline TreeEdges build_binary_tree(const CoeffLayout& layout) {
  if (layout.is_2d()) throw dimension_error("binary tree needs a 1-D layout");
  if (layout.levels() < 2) throw no_edges_error("binary tree needs at least two decomposition levels");
  TreeEdges out{layout, {}};
  for (int l = 2; l <= layout.levels(); ++l) {
    const Subband b = layout.subband(l);
    for (std::size_t k = 0; k < b.rows; ++k) {
      const std::size_t parent = layout.index({l, Orientation::detail, k, 0});
      out.edges.push_back({parent, layout.index({l - 1, Orientation::detail, 2 * k, 0})});
      out.edges.push_back({parent, layout.index({l - 1, Orientation::detail, 2 * k + 1, 0})});
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

inline TreeEdges build_tree(const CoeffLayout& layout) {
  return layout.is_2d() ? build_quadtree(layout) : build_binary_tree(layout);
}

// pc4: parent plus its four children. pc2: one group per (parent, child)
// edge on the quadtree. pc2_1d: the same on the binary tree.
enum class Scheme { pc4, pc2, pc2_1d };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::pc4: return "pc4";
    case Scheme::pc2: return "pc2";
    case Scheme::pc2_1d: return "pc2_1d";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& name) {
  if (name == "pc4" || name == "PC4") return Scheme::pc4;
  if (name == "pc2" || name == "PC2") return Scheme::pc2;
  if (name == "pc2_1d" || name == "PC2_1D") return Scheme::pc2_1d;
  throw scheme_error("unknown grouping scheme '" + name + "'");
}

using IndexGroups = std::vector<std::vector<std::size_t>>;

struct GroupStructure {
  IndexGroups groups;
  Scheme scheme = Scheme::pc2;
  CoeffLayout layout;

  std::size_t dim() const { return layout.size(); }
};

inline GroupStructure make_groups(const TreeEdges& tree, Scheme scheme) {
  const bool image = tree.layout.is_2d();
  if (scheme == Scheme::pc4 && !image) throw scheme_error("pc4 grouping needs a 2-D quadtree");
  if (scheme == Scheme::pc2_1d && image) throw scheme_error("pc2_1d grouping needs a 1-D binary tree");
  if (scheme == Scheme::pc2 && !image) scheme = Scheme::pc2_1d;

  std::vector<TreeEdge> edges = tree.edges;
  std::sort(edges.begin(), edges.end());
  GroupStructure gs{{}, scheme, tree.layout};
  const std::size_t n = tree.layout.size();
  for (const TreeEdge& e : edges) {
    if (e.parent >= n || e.child >= n) throw index_error("edge index out of range");
  }
  if (scheme == Scheme::pc4) {
    for (std::size_t k = 0; k < edges.size();) {
      std::vector<std::size_t> g{edges[k].parent};
      std::size_t j = k;
      for (; j < edges.size() && edges[j].parent == edges[k].parent; ++j) g.push_back(edges[j].child);
      gs.groups.push_back(std::move(g));
      k = j;
    }
  } else {
    for (const TreeEdge& e : edges) gs.groups.push_back({e.parent, e.child});
  }
  return gs;
}

inline GroupStructure make_groups(const CoeffLayout& layout, Scheme scheme) {
  return make_groups(build_tree(layout), scheme);
}

// Replicas are numbered group by group (replicated group g occupies the
// contiguous block [offset(g), offset(g+1))), followed by one singleton
// replica for each coefficient that belongs to no group.
class ReplicationMap {
 public:
  ReplicationMap() = default;

  ReplicationMap(const IndexGroups& groups, std::size_t n) : original_dim_(n), members_(n) {
    offsets_.push_back(0);
    for (const auto& g : groups) {
      if (g.empty()) throw index_error("empty group");
      for (std::size_t i : g) {
        if (i >= n) throw index_error("group index " + std::to_string(i) + " out of range");
        members_[i].push_back(replica_of_.size());
        replica_of_.push_back(i);
      }
      offsets_.push_back(replica_of_.size());
    }
    grouped_replicas_ = replica_of_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (members_[i].empty()) {
        members_[i].push_back(replica_of_.size());
        replica_of_.push_back(i);
        offsets_.push_back(replica_of_.size());
      }
    }
  }

  std::size_t original_dim() const { return original_dim_; }
  std::size_t total_replicas() const { return replica_of_.size(); }
  // Replicas that belong to a parent-child group (the rest are singletons).
  std::size_t grouped_replicas() const { return grouped_replicas_; }
  const std::vector<std::size_t>& replica_of() const { return replica_of_; }
  // The set J_i of replica indices of coefficient i.
  const std::vector<std::size_t>& replicas(std::size_t i) const { return members_.at(i); }
  std::size_t replica_count(std::size_t i) const { return members_.at(i).size(); }
  std::size_t max_replica_count() const {
    std::size_t m = 0;
    for (const auto& r : members_) m = std::max(m, r.size());
    return m;
  }

  // Replicated groups, singletons included; they partition [0, total_replicas).
  std::size_t group_count() const { return offsets_.size() - 1; }
  const std::vector<std::size_t>& group_offsets() const { return offsets_; }

  // Copy every coefficient to each of its replicas.
  Vec expand(const Vec& theta) const {
    if (static_cast<std::size_t>(theta.size()) != original_dim_) throw dimension_error("expand: length mismatch");
    Vec out(static_cast<Eigen::Index>(replica_of_.size()));
    for (std::size_t j = 0; j < replica_of_.size(); ++j) {
      out[static_cast<Eigen::Index>(j)] = theta[static_cast<Eigen::Index>(replica_of_[j])];
    }
    return out;
  }

  // Sum replicas back onto their coefficient.
  Vec collapse(const Vec& replicas) const {
    if (static_cast<std::size_t>(replicas.size()) != replica_of_.size()) {
      throw dimension_error("collapse: length mismatch");
    }
    Vec out = Vec::Zero(static_cast<Eigen::Index>(original_dim_));
    for (std::size_t j = 0; j < replica_of_.size(); ++j) {
      out[static_cast<Eigen::Index>(replica_of_[j])] += replicas[static_cast<Eigen::Index>(j)];
    }
    return out;
  }

  Vec replica_counts() const {
    Vec out(static_cast<Eigen::Index>(original_dim_));
    for (std::size_t i = 0; i < original_dim_; ++i) out[static_cast<Eigen::Index>(i)] = static_cast<double>(members_[i].size());
    return out;
  }

 private:
  std::size_t original_dim_ = 0;
  std::size_t grouped_replicas_ = 0;
  std::vector<std::size_t> replica_of_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::size_t> offsets_;
};

inline ReplicationMap make_replication_map(const GroupStructure& gs, std::size_t n) {
  return ReplicationMap(gs.groups, n);
}

inline ReplicationMap make_replication_map(const GroupStructure& gs) { return ReplicationMap(gs.groups, gs.dim()); }

// Debug text format: one group per line, indices separated by spaces.
inline void write_groups(std::ostream& os, const IndexGroups& groups) {
  for (const auto& g : groups) {
    for (std::size_t k = 0; k < g.size(); ++k) os << (k ? " " : "") << g[k];
    os << '\n';
  }
}

inline IndexGroups read_groups(std::istream& is) {
  IndexGroups out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<std::size_t> g;
    std::string tok;
    while (ls >> tok) {
      if (tok.find_first_not_of("0123456789") != std::string::npos) {
        throw parameter_error("bad group index '" + tok + "'");
      }
      g.push_back(std::stoull(tok));
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace wavegroup
