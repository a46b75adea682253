#include "flagein/algebra.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

#include "flagein/errors.hpp"

namespace flagein {

char family_char(Family f) {
  switch (f) {
    case Family::A: return 'A';
    case Family::B: return 'B';
    case Family::C: return 'C';
    case Family::D: return 'D';
  }
  return '?';
}

Family family_from_char(char c) {
  switch (c) {
    case 'A': case 'a': return Family::A;
    case 'B': case 'b': return Family::B;
    case 'C': case 'c': return Family::C;
    case 'D': case 'd': return Family::D;
  }
  throw BadFlag(std::string("unknown family '") + c + "'");
}

std::string BasisElement::label() const {
  switch (kind) {
    case BasisKind::V: return "v(" + std::to_string(i) + ")";
    case BasisKind::W: return "w(" + std::to_string(i) + "," + std::to_string(j) + ")";
    case BasisKind::U: return "u(" + std::to_string(i) + "," + std::to_string(j) + ")";
  }
  return "?";
}

std::string BasisElement::root_label() const {
  std::string s;
  for (size_t k = 0; k < root.size(); ++k) {
    int c = root[k];
    if (c == 0) continue;
    if (c > 0 && !s.empty()) s += "+";
    if (c < 0) s += "-";
    if (std::abs(c) != 1) s += std::to_string(std::abs(c));
    s += "l" + std::to_string(k + 1);
  }
  return s.empty() ? "cartan-compact" : s;
}

namespace {

struct Builder {
  int l;
  int roots_len;
  std::vector<BasisElement> out;

  std::vector<int> root(int i, int si, int j, int sj) const {
    std::vector<int> r(roots_len, 0);
    if (i > 0) r[i - 1] += si;
    if (j > 0) r[j - 1] += sj;
    return r;
  }
  void add(BasisKind kind, int i, int j, std::vector<Entry> e, std::vector<int> r) {
    out.push_back(BasisElement{kind, i, j, std::move(e), std::move(r)});
  }
};

// 0-based entry helper
Entry E(int r, int c, double v) { return Entry{r, c, v}; }

std::vector<BasisElement> make_basis(Family family, int l) {
  Builder b{l, family == Family::A ? l + 1 : l, {}};
  switch (family) {
    case Family::A: {
      const int n = l + 1;
      for (int i = 2; i <= n; ++i)
        for (int j = 1; j < i; ++j)
          b.add(BasisKind::W, i, j, {E(i - 1, j - 1, 1), E(j - 1, i - 1, -1)}, b.root(i, 1, j, -1));
      break;
    }
    case Family::B: {
      for (int k = 1; k <= l; ++k)
        b.add(BasisKind::V, k, k, {E(k, 0, 1), E(0, k, -1), E(l + k, 0, 1), E(0, l + k, -1)}, b.root(k, 1, 0, 0));
      for (int i = 2; i <= l; ++i)
        for (int j = 1; j < i; ++j)
          b.add(BasisKind::W, i, j, {E(i, j, 1), E(j, i, -1), E(l + i, l + j, 1), E(l + j, l + i, -1)},
                b.root(i, 1, j, -1));
      for (int i = 2; i <= l; ++i)
        for (int j = 1; j < i; ++j)
          b.add(BasisKind::U, i, j, {E(l + i, j, 1), E(l + j, i, -1), E(i, l + j, 1), E(j, l + i, -1)},
                b.root(i, 1, j, 1));
      break;
    }
    case Family::C: {
      for (int k = 1; k <= l; ++k)
        b.add(BasisKind::U, k, k, {E(l + k - 1, k - 1, 1), E(k - 1, l + k - 1, -1)}, b.root(k, 2, 0, 0));
      for (int i = 2; i <= l; ++i)
        for (int j = 1; j < i; ++j)
          b.add(BasisKind::W, i, j,
                {E(i - 1, j - 1, 1), E(j - 1, i - 1, -1), E(l + i - 1, l + j - 1, 1), E(l + j - 1, l + i - 1, -1)},
                b.root(i, 1, j, -1));
      for (int i = 2; i <= l; ++i)
        for (int j = 1; j < i; ++j)
          b.add(BasisKind::U, i, j,
                {E(l + i - 1, j - 1, 1), E(l + j - 1, i - 1, 1), E(i - 1, l + j - 1, -1), E(j - 1, l + i - 1, -1)},
                b.root(i, 1, j, 1));
      break;
    }
    case Family::D: {
      for (int i = 2; i <= l; ++i)
        for (int j = 1; j < i; ++j)
          b.add(BasisKind::W, i, j,
                {E(i - 1, j - 1, 1), E(j - 1, i - 1, -1), E(l + i - 1, l + j - 1, 1), E(l + j - 1, l + i - 1, -1)},
                b.root(i, 1, j, -1));
      for (int i = 2; i <= l; ++i)
        for (int j = 1; j < i; ++j)
          b.add(BasisKind::U, i, j,
                {E(l + i - 1, j - 1, 1), E(l + j - 1, i - 1, -1), E(i - 1, l + j - 1, 1), E(j - 1, l + i - 1, -1)},
                b.root(i, 1, j, 1));
      break;
    }
  }
  return b.out;
}

using SparseMat = std::map<std::pair<int, int>, double>;

SparseMat commutator(const std::vector<Entry>& x, const std::vector<Entry>& y) {
  SparseMat m;
  for (const auto& p : x)
    for (const auto& q : y) {
      if (p.col == q.row) m[{p.row, q.col}] += p.value * q.value;
      if (q.col == p.row) m[{q.row, p.col}] -= p.value * q.value;
    }
  for (auto it = m.begin(); it != m.end();) {
    if (it->second == 0.0) it = m.erase(it);
    else ++it;
  }
  return m;
}

}  // namespace

AlgebraModel build_algebra(Family family, int rank) {
  const int min_rank = family == Family::A ? 1 : (family == Family::D ? 3 : 2);
  if (rank < min_rank)
    throw UnsupportedRank(std::string("rank ") + std::to_string(rank) + " below minimum " +
                          std::to_string(min_rank) + " for family " + family_char(family));
  AlgebraModel m;
  m.family_ = family;
  m.rank_ = rank;
  switch (family) {
    case Family::A: m.ambient_dim_ = rank + 1; m.trace_scale_ = rank - 1; break;
    case Family::B: m.ambient_dim_ = 2 * rank + 1; m.trace_scale_ = 0.25; break;
    case Family::C: m.ambient_dim_ = 2 * rank; m.trace_scale_ = 0.25; break;
    case Family::D: m.ambient_dim_ = 2 * rank; m.trace_scale_ = 0.25; break;
  }
  if (family == Family::A && rank == 1) m.trace_scale_ = 1;  // so(2) is abelian; any positive scale
  m.basis_ = make_basis(family, rank);
  const int n = m.dim();
  const int N = m.ambient_dim_;

  m.position_index_.assign(static_cast<size_t>(N) * N, {});
  for (int a = 0; a < n; ++a)
    for (const auto& e : m.basis_[a].entries) m.position_index_[e.row * N + e.col].push_back({a, e.value});

  // gram from the trace form; checked against the block formula in tests
  m.gram_ = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (const auto& e : m.basis_[a].entries)
      for (const auto& [b, v] : m.position_index_[e.col * N + e.row]) m.gram_(a, b) += -m.trace_scale_ * e.value * v;

  m.ad_.assign(n, {});
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      SparseMat c = commutator(m.basis_[a].entries, m.basis_[b].entries);
      if (c.empty()) continue;
      std::map<int, double> coef;
      for (const auto& [pos, v] : c)
        for (const auto& [k, w] : m.position_index_[pos.second * N + pos.first]) coef[k] += -m.trace_scale_ * v * w;
      SparseMat rebuilt;
      for (auto& [k, t] : coef) {
        t /= m.gram_(k, k);
        for (const auto& e : m.basis_[k].entries) rebuilt[{e.row, e.col}] += t * e.value;
      }
      double res = 0;
      for (const auto& [pos, v] : c) res = std::max(res, std::abs(v - rebuilt[pos]));
      for (const auto& [pos, v] : rebuilt)
        if (!c.count(pos)) res = std::max(res, std::abs(v));
      if (res > 1e-12)
        throw ClosureViolation("bracket [" + m.basis_[a].label() + "," + m.basis_[b].label() +
                               "] leaves the span of the basis");
      for (const auto& [k, t] : coef) {
        if (t == 0.0) continue;
        m.structure_.push_back({a, b, k, t});
        m.ad_[a].push_back({double(k), double(b), t});
        m.ad_[b].push_back({double(k), double(a), -t});
      }
    }
  }

  // Killing form by ad-trace: K(a,a') = sum (ad_a)_{cb} (ad_a')_{bc}
  std::unordered_map<long long, std::vector<std::pair<int, double>>> by_pos;
  for (int a = 0; a < n; ++a)
    for (const auto& t : m.ad_[a]) by_pos[static_cast<long long>(t[0]) * n + static_cast<long long>(t[1])].push_back({a, t[2]});
  m.killing_ = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (const auto& t : m.ad_[a]) {
      auto it = by_pos.find(static_cast<long long>(t[1]) * n + static_cast<long long>(t[0]));
      if (it == by_pos.end()) continue;
      for (const auto& [a2, v] : it->second) m.killing_(a, a2) += t[2] * v;
    }
  return m;
}

int AlgebraModel::index_of(BasisKind kind, int i, int j) const {
  for (int a = 0; a < dim(); ++a) {
    const auto& b = basis_[a];
    if (b.kind != kind || b.i != i) continue;
    if (kind == BasisKind::V || b.j == j) return a;
  }
  return -1;
}

Eigen::MatrixXd AlgebraModel::matrix(int index) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ambient_dim_, ambient_dim_);
  for (const auto& e : basis_[index].entries) m(e.row, e.col) += e.value;
  return m;
}

Eigen::MatrixXd AlgebraModel::matrix(const AlgebraElement& x) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ambient_dim_, ambient_dim_);
  for (int a = 0; a < dim(); ++a)
    if (x[a] != 0.0)
      for (const auto& e : basis_[a].entries) m(e.row, e.col) += x[a] * e.value;
  return m;
}

AlgebraElement AlgebraModel::expand(const Eigen::MatrixXd& m, double tol) const {
  AlgebraElement x = AlgebraElement::Zero(dim());
  for (int a = 0; a < dim(); ++a) {
    double t = 0;
    for (const auto& e : basis_[a].entries) t += e.value * m(e.col, e.row);
    x[a] = -trace_scale_ * t / gram_(a, a);
  }
  const double res = (matrix(x) - m).cwiseAbs().maxCoeff();
  if (res > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) throw ClosureViolation("matrix is not in the span of the basis");
  return x;
}

AlgebraElement AlgebraModel::unit(int index) const {
  AlgebraElement x = AlgebraElement::Zero(dim());
  x[index] = 1;
  return x;
}

AlgebraElement AlgebraModel::bracket(const AlgebraElement& x, const AlgebraElement& y) const {
  if (x.size() != dim() || y.size() != dim()) throw Error("bracket: element of a different model");
  AlgebraElement z = AlgebraElement::Zero(dim());
  for (const auto& s : structure_) z[s.c] += s.value * (x[s.a] * y[s.b] - x[s.b] * y[s.a]);
  return z;
}

double AlgebraModel::ambient_inner_matrices(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) const {
  const int l = rank_;
  switch (family_) {
    case Family::A:
      return -trace_scale_ * (X * Y).trace();
    case Family::B: {
      // X = [[0,-a,-a],[a^T,A,B],[a^T,B,A]]
      const Eigen::VectorXd a = X.block(1, 0, l, 1), c = Y.block(1, 0, l, 1);
      const Eigen::MatrixXd A = X.block(1, 1, l, l), B = X.block(1, l + 1, l, l);
      const Eigen::MatrixXd C = Y.block(1, 1, l, l), D = Y.block(1, l + 1, l, l);
      return a.dot(c) - ((B * D).trace() + (A * C).trace()) / 2;
    }
    case Family::C: {
      // X = [[A,-B],[B,A]]
      const Eigen::MatrixXd A = X.block(0, 0, l, l), B = X.block(l, 0, l, l);
      const Eigen::MatrixXd C = Y.block(0, 0, l, l), D = Y.block(l, 0, l, l);
      return ((B * D).trace() - (A * C).trace()) / 2;
    }
    case Family::D: {
      // X = [[A,B],[B,A]]
      const Eigen::MatrixXd A = X.block(0, 0, l, l), B = X.block(0, l, l, l);
      const Eigen::MatrixXd C = Y.block(0, 0, l, l), D = Y.block(0, l, l, l);
      return -((A * C).trace() + (B * D).trace()) / 2;
    }
  }
  return 0;
}

double AlgebraModel::ambient_inner(const AlgebraElement& x, const AlgebraElement& y) const {
  return ambient_inner_matrices(matrix(x), matrix(y));
}

double AlgebraModel::killing(const AlgebraElement& x, const AlgebraElement& y) const {
  return x.dot(killing_ * y);
}

}  // namespace flagein
