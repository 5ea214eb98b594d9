#include "crnlyap/structure.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace crnlyap {

namespace {

// Row echelon form with exact pivots; returns pivot column indices.
std::vector<int> reduce_rows(RationalMatrix& m) {
  std::vector<int> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = row; i < m.rows(); ++i) {
      if (!m(i, col).is_zero()) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != row) m.row(pivot).swap(m.row(row));
    Rational inv = m(row, col).reciprocal();
    for (Eigen::Index j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      Rational factor = m(i, col);
      for (Eigen::Index j = col; j < m.cols(); ++j)
        m(i, j) -= factor * m(row, j);
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  return pivots;
}

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Tarjan strongly connected components on the directed complex graph.
struct SccFinder {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> index, lowlink, component, stack;
  std::vector<bool> on_stack;
  int next_index = 0, next_component = 0;

  explicit SccFinder(const std::vector<std::vector<int>>& a)
      : adj(a),
        index(a.size(), -1),
        lowlink(a.size(), 0),
        component(a.size(), -1),
        on_stack(a.size(), false) {
    for (size_t v = 0; v < a.size(); ++v)
      if (index[v] < 0) visit(static_cast<int>(v));
  }

  void visit(int v) {
    index[v] = lowlink[v] = next_index++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        lowlink[v] = std::min(lowlink[v], lowlink[w]);
      } else if (on_stack[w]) {
        lowlink[v] = std::min(lowlink[v], index[w]);
      }
    }
    if (lowlink[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component[w] = next_component;
      } while (w != v);
      ++next_component;
    }
  }
};

}  // namespace

int rational_rank(RationalMatrix m) {
  return static_cast<int>(reduce_rows(m).size());
}

RationalMatrix rational_null_space(const RationalMatrix& m) {
  RationalMatrix rref = m;
  std::vector<int> pivots = reduce_rows(rref);
  const Eigen::Index cols = m.cols();
  std::vector<bool> is_pivot(cols, false);
  for (int p : pivots) is_pivot[p] = true;

  RationalMatrix basis(cols, cols - static_cast<Eigen::Index>(pivots.size()));
  Eigen::Index out = 0;
  for (Eigen::Index free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    RationalVector v = RationalVector::Zero(cols);
    v[free_col] = Rational(1);
    for (size_t r = 0; r < pivots.size(); ++r)
      v[pivots[r]] = -rref(static_cast<Eigen::Index>(r), free_col);
    basis.col(out++) = v;
  }
  return basis;
}

RationalMatrix orthogonal_complement(const RationalMatrix& basis) {
  if (basis.cols() == 0) {
    RationalMatrix id(basis.rows(), basis.rows());
    id.setZero();
    for (Eigen::Index i = 0; i < basis.rows(); ++i) id(i, i) = Rational(1);
    return id;
  }
  // y orthogonal to every column of `basis`  <=>  basis^T y = 0
  return rational_null_space(RationalMatrix(basis.transpose()));
}

StructureSummary structure(const Network& net) {
  const int n = net.num_species();
  const int r = net.num_reactions();
  const int m = net.num_complexes();

  StructureSummary s;
  s.stoich_matrix.resize(n, r);
  for (int i = 0; i < r; ++i)
    s.stoich_matrix.col(i) = net.reactions()[i].product - net.reactions()[i].reactant;

  RationalMatrix rref = s.stoich_matrix;
  std::vector<int> pivots = reduce_rows(rref);
  s.stoich_rank = static_cast<int>(pivots.size());
  s.subspace_basis.resize(n, s.stoich_rank);
  for (int c = 0; c < s.stoich_rank; ++c)
    s.subspace_basis.col(c) = s.stoich_matrix.col(pivots[c]);
  s.orthogonal_basis = orthogonal_complement(s.subspace_basis);

  s.num_complexes = m;

  UnionFind uf(m);
  std::vector<std::vector<int>> adj(m);
  for (int i = 0; i < r; ++i) {
    int a = net.reactant_complex(i);
    int b = net.product_complex(i);
    uf.unite(a, b);
    adj[a].push_back(b);
  }
  std::vector<int> roots;
  for (int c = 0; c < m; ++c) {
    int root = uf.find(c);
    if (std::find(roots.begin(), roots.end(), root) == roots.end()) roots.push_back(root);
  }
  s.num_linkage_classes = static_cast<int>(roots.size());
  s.deficiency = s.num_complexes - s.num_linkage_classes - s.stoich_rank;

  // Weakly reversible <=> every reaction's endpoints share a strongly
  // connected component.
  SccFinder scc(adj);
  s.weakly_reversible = true;
  for (int i = 0; i < r; ++i) {
    if (scc.component[net.reactant_complex(i)] != scc.component[net.product_complex(i)]) {
      s.weakly_reversible = false;
      break;
    }
  }
  return s;
}

}  // namespace crnlyap
