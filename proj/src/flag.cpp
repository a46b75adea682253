#include "flagein/flag.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "flagein/errors.hpp"

namespace flagein {

std::shared_ptr<const AlgebraModel> algebra_for(Family family, int rank) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const AlgebraModel>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(static_cast<int>(family), rank);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto m = std::make_shared<const AlgebraModel>(build_algebra(family, rank));
  cache.emplace(key, m);
  return m;
}

int FlagSpec::block_begin(int i) const {
  int s = 1;
  for (int k = 0; k < i; ++k) s += partition[k];
  return s;
}

int FlagSpec::block_end(int i) const { return block_begin(i) + partition[i] - 1; }

std::vector<int> FlagSpec::theta() const {
  std::vector<int> t;
  for (int i = 0; i < blocks(); ++i)
    for (int a = block_begin(i); a < block_end(i); ++a) t.push_back(a);
  if (includes_last_root) t.push_back(rank());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::string FlagSpec::to_string() const {
  std::ostringstream os;
  os << family_char(family()) << ':' << rank() << ":[";
  for (size_t i = 0; i < partition.size(); ++i) os << (i ? "," : "") << partition[i];
  os << "]:" << (includes_last_root ? '+' : '-');
  return os.str();
}

std::string theta_string(const FlagSpec& spec) {
  std::ostringstream os;
  os << '{';
  auto t = spec.theta();
  for (size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << "a" << t[i];
  os << '}';
  return os.str();
}

FlagSpec make_flag(std::shared_ptr<const AlgebraModel> algebra, std::vector<int> partition, bool includes_last_root) {
  const int l = algebra->rank();
  const int total = algebra->family() == Family::A ? l + 1 : l;
  int sum = 0;
  for (int p : partition) {
    if (p <= 0) throw BadPartition("partition parts must be positive");
    sum += p;
  }
  if (sum != total)
    throw BadPartition("partition sums to " + std::to_string(sum) + ", expected " + std::to_string(total));
  if (algebra->family() == Family::A && includes_last_root) throw BadFlag("family A has no separate last root flag");
  FlagSpec s;
  s.algebra = std::move(algebra);
  s.partition = std::move(partition);
  s.includes_last_root = includes_last_root;
  s.inner_scale = 1.0;
  if (s.family() == Family::A && s.blocks() == 3) s.inner_scale = 1.0 / (2.0 * (l - 1));
  return s;
}

FlagSpec make_flag(Family family, int rank, std::vector<int> partition, bool includes_last_root) {
  return make_flag(algebra_for(family, rank), std::move(partition), includes_last_root);
}

FlagSpec parse_flag_spec(const std::string& text) {
  // FAMILY:l:[l_1,...,l_r]:(+|-)
  auto bad = [&]() { return BadFlag("malformed flag spec '" + text + "' (expected FAMILY:l:[l_1,...,l_r]:(+|-))"); };
  auto c1 = text.find(':');
  if (c1 != 1) throw bad();
  auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw bad();
  auto lb = text.find('[', c2);
  auto rb = text.find(']', c2);
  if (lb != c2 + 1 || rb == std::string::npos || rb + 3 != text.size() || text[rb + 1] != ':') throw bad();
  const char sign = text[rb + 2];
  if (sign != '+' && sign != '-') throw bad();
  Family f = family_from_char(text[0]);
  int l = 0;
  try {
    size_t used = 0;
    l = std::stoi(text.substr(c1 + 1, c2 - c1 - 1), &used);
    if (used != c2 - c1 - 1) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  std::vector<int> parts;
  std::string inner = text.substr(lb + 1, rb - lb - 1);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      parts.push_back(std::stoi(item, &used));
      if (used != item.size()) throw bad();
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  if (parts.empty()) throw bad();
  return make_flag(f, l, parts, sign == '+');
}

namespace {

// coefficients of a root (lambda coordinates) in the simple roots
Eigen::VectorXd simple_root_coordinates(Family family, int l, const std::vector<int>& root) {
  const int len = static_cast<int>(root.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(len, l);
  for (int i = 0; i < l; ++i) {
    if (i < l - 1 || family == Family::A) {
      S(i, i) = 1;
      S(i + 1, i) = -1;
    } else if (family == Family::B) {
      S(l - 1, i) = 1;
    } else if (family == Family::C) {
      S(l - 1, i) = 2;
    } else {
      S(l - 2, i) = 1;
      S(l - 1, i) = 1;
    }
  }
  Eigen::VectorXd r(len);
  for (int k = 0; k < len; ++k) r[k] = root[k];
  return S.colPivHouseholderQr().solve(r);
}

}  // namespace

Reductive split_reductive(const FlagSpec& spec) {
  const auto& alg = *spec.algebra;
  auto theta = spec.theta();
  std::vector<bool> in_theta(spec.rank() + 1, false);
  for (int t : theta) in_theta[t] = true;
  Reductive r;
  for (int a = 0; a < alg.dim(); ++a) {
    Eigen::VectorXd c = simple_root_coordinates(spec.family(), spec.rank(), alg.basis()[a].root);
    bool inside = true;
    for (int k = 0; k < c.size(); ++k)
      if (std::abs(c[k]) > 1e-9 && !in_theta[k + 1]) inside = false;
    (inside ? r.isotropy : r.tangent).push_back(a);
  }
  return r;
}

int Decomposition::class_of(int submodule) const {
  for (size_t c = 0; c < equiv_classes.size(); ++c)
    for (int m : equiv_classes[c])
      if (m == submodule) return static_cast<int>(c);
  return -1;
}

bool Decomposition::has_equivalent_summands() const {
  for (const auto& c : equiv_classes)
    if (c.size() > 1) return true;
  return false;
}

namespace {

struct Rules {
  const FlagSpec& spec;
  const AlgebraModel& alg;
  Decomposition dec;
  std::map<int, int> pos;  // algebra index -> tangent position

  explicit Rules(const FlagSpec& s) : spec(s), alg(*s.algebra) {
    auto red = split_reductive(s);
    dec.isotropy = red.isotropy;
    dec.tangent = red.tangent;
    for (size_t p = 0; p < dec.tangent.size(); ++p) pos[dec.tangent[p]] = static_cast<int>(p);
  }

  int idx(BasisKind k, int i, int j = 0) const {
    int a = alg.index_of(k, i, j);
    if (a < 0) throw Error("internal: missing basis element");
    return a;
  }
  Eigen::VectorXd vec(std::initializer_list<std::pair<int, double>> terms) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<int>(dec.tangent.size()));
    for (const auto& [a, c] : terms) {
      auto it = pos.find(a);
      if (it == pos.end()) throw Error("internal: rule vector leaves m_Theta");
      v[it->second] += c;
    }
    return v;
  }
  Eigen::VectorXd w(int i, int j, double c = 1) const { return vec({{idx(BasisKind::W, i, j), c}}); }
  Eigen::VectorXd u(int i, int j, double c = 1) const { return vec({{idx(BasisKind::U, i, j), c}}); }
  Eigen::VectorXd v(int k, double c = 1) const { return vec({{idx(BasisKind::V, k), c}}); }

  int add(std::string name, std::vector<Eigen::VectorXd> span) {
    dec.submodules.push_back(Submodule{std::move(name), std::move(span)});
    return static_cast<int>(dec.submodules.size()) - 1;
  }
  void single(int a) { dec.equiv_classes.push_back({a}); }
  void pair(int a, int b) { dec.equiv_classes.push_back({a, b}); }

  int b0(int blk) const { return spec.block_begin(blk); }
  int b1(int blk) const { return spec.block_end(blk); }
  static std::string nm(const std::string& base, int m, int n) {
    return base + "_" + std::to_string(m) + std::to_string(n);
  }
  static std::string nm(const std::string& base, int i) { return base + "_" + std::to_string(i); }

  // span of w (or u) over i in block m, j in block n (0-based blocks)
  std::vector<Eigen::VectorXd> cross(BasisKind k, int m, int n) const {
    std::vector<Eigen::VectorXd> s;
    for (int i = b0(m); i <= b1(m); ++i)
      for (int j = b0(n); j <= b1(n); ++j) s.push_back(k == BasisKind::W ? w(i, j) : u(i, j));
    return s;
  }
  std::vector<Eigen::VectorXd> inner_u(int blk) const {
    std::vector<Eigen::VectorXd> s;
    for (int a = b0(blk); a <= b1(blk); ++a)
      for (int t = b0(blk); t < a; ++t) s.push_back(u(a, t));
    return s;
  }
};

void rules_A(Rules& R) {
  const FlagSpec& s = R.spec;
  const int r = s.blocks();
  const int l = s.rank();
  auto theta = s.theta();
  if (l == 3 && theta == std::vector<int>{1, 3}) {
    int a = R.add("M_1", {R.w(3, 1) - R.w(4, 2), R.w(4, 1) + R.w(3, 2)});
    int b = R.add("M_2", {R.w(3, 1) + R.w(4, 2), R.w(4, 1) - R.w(3, 2)});
    R.single(a);
    R.single(b);
    return;
  }
  auto M = [&](int m, int n) { return R.cross(BasisKind::W, m, n); };
  if (l == 3 && theta.size() == 1) {
    const int i = theta[0];
    // the size-2 block is i-1 (0-based); singleton summand first, then the equivalent pair
    std::vector<std::pair<int, int>> all = {{1, 0}, {2, 0}, {2, 1}};
    std::vector<std::pair<int, int>> paired, lone;
    const int big = i - 1;
    for (auto mn : all) (mn.first == big || mn.second == big ? paired : lone).push_back(mn);
    int a = R.add(Rules::nm("M", lone[0].first + 1, lone[0].second + 1), M(lone[0].first, lone[0].second));
    auto span1 = M(paired[0].first, paired[0].second);
    auto span2 = M(paired[1].first, paired[1].second);
    if (i == 1) std::reverse(span2.begin(), span2.end());  // {w_42, w_41}
    int b = R.add(Rules::nm("M", paired[0].first + 1, paired[0].second + 1), span1);
    int c = R.add(Rules::nm("M", paired[1].first + 1, paired[1].second + 1), span2);
    R.single(a);
    R.pair(b, c);
    return;
  }
  std::map<std::pair<int, int>, int> ids;
  for (int m = 1; m < r; ++m)
    for (int n = 0; n < m; ++n) ids[{m, n}] = -1;
  // order by (m, n) lexicographically: M_21, M_31, M_32, ...
  for (auto& [mn, id] : ids) id = R.add(Rules::nm("M", mn.first + 1, mn.second + 1), M(mn.first, mn.second));
  if (l == 3 && theta.empty()) {
    auto id = [&](int m, int n) { return ids.at({m - 1, n - 1}); };
    R.pair(id(2, 1), id(4, 3));
    R.pair(id(3, 1), id(4, 2));
    R.pair(id(3, 2), id(4, 1));
    return;
  }
  for (auto& [mn, id] : ids) R.single(id);
}

void rules_B(Rules& R) {
  const FlagSpec& s = R.spec;
  const int r = s.blocks();
  const int l = s.rank();
  const bool last = s.includes_last_root;
  if (l == 4 && !last && r == 1) {
    int a = R.add("V_1", {R.v(1), R.v(2), R.v(3), R.v(4)});
    int b = R.add("T_1", {R.u(2, 1) + R.u(4, 3), R.u(3, 1) - R.u(4, 2), R.u(4, 1) + R.u(3, 2)});
    int c = R.add("T_2", {R.u(2, 1) - R.u(4, 3), R.u(3, 1) + R.u(4, 2), R.u(4, 1) - R.u(3, 2)});
    R.single(a);
    R.single(b);
    R.single(c);
    return;
  }
  const int top = last ? r - 1 : r;  // blocks 0..top-1 carry the generic summands
  if (!last) {
    for (int i = 0; i < r; ++i) {
      std::vector<Eigen::VectorXd> span;
      for (int k = R.b0(i); k <= R.b1(i); ++k) span.push_back(R.v(k));
      R.single(R.add(Rules::nm("V", i + 1), span));
    }
  } else {
    for (int i = 0; i < top; ++i)
      if (s.partition[i] > 1) R.single(R.add(Rules::nm("U", i + 1), R.inner_u(i)));
    for (int i = 0; i < top; ++i) {
      std::vector<Eigen::VectorXd> s1, s2;
      for (int t = R.b0(i); t <= R.b1(i); ++t) s2.push_back(R.v(t));
      for (int a = R.b0(r - 1); a <= R.b1(r - 1); ++a)
        for (int t = R.b0(i); t <= R.b1(i); ++t) {
          s1.push_back(R.w(a, t) - R.u(a, t));
          s2.push_back(R.w(a, t) + R.u(a, t));
        }
      R.single(R.add("(V_" + std::to_string(i + 1) + ")_1", s1));
      R.single(R.add("(V_" + std::to_string(i + 1) + ")_2", s2));
    }
  }
  for (int m = 1; m < top; ++m)
    for (int n = 0; n < m; ++n) {
      int a = R.add(Rules::nm("W", m + 1, n + 1), R.cross(BasisKind::W, m, n));
      int b = R.add(Rules::nm("U", m + 1, n + 1), R.cross(BasisKind::U, m, n));
      R.pair(a, b);
    }
  if (!last)
    for (int i = 0; i < r; ++i)
      if (s.partition[i] > 1) R.single(R.add(Rules::nm("U", i + 1), R.inner_u(i)));
}

void rules_C(Rules& R) {
  const FlagSpec& s = R.spec;
  const int r = s.blocks();
  const bool last = s.includes_last_root;
  const int top = last ? r - 1 : r;
  std::vector<int> vs;
  for (int i = 0; i < top; ++i) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<int>(R.dec.tangent.size()));
    for (int k = R.b0(i); k <= R.b1(i); ++k) z += R.u(k, k);
    vs.push_back(R.add(Rules::nm("V", i + 1), {z}));
  }
  if (!vs.empty()) R.dec.equiv_classes.push_back(vs);
  for (int i = 0; i < top; ++i) {
    if (s.partition[i] <= 1) continue;
    std::vector<Eigen::VectorXd> span;
    for (int k = R.b0(i); k < R.b1(i); ++k) span.push_back(R.u(k, k) - R.u(k + 1, k + 1));
    for (auto& x : R.inner_u(i)) span.push_back(x);
    R.single(R.add(Rules::nm("U", i + 1), span));
  }
  for (int m = 1; m < top; ++m)
    for (int n = 0; n < m; ++n) {
      int a = R.add(Rules::nm("W", m + 1, n + 1), R.cross(BasisKind::W, m, n));
      int b = R.add(Rules::nm("U", m + 1, n + 1), R.cross(BasisKind::U, m, n));
      R.pair(a, b);
    }
  if (last)
    for (int n = 0; n < r - 1; ++n) {
      std::vector<Eigen::VectorXd> span;
      for (int i = R.b0(r - 1); i <= R.b1(r - 1); ++i)
        for (int j = R.b0(n); j <= R.b1(n); ++j) {
          span.push_back(R.w(i, j));
          span.push_back(R.u(i, j));
        }
      R.single(R.add(Rules::nm("M", r, n + 1), span));
    }
}

void rules_D(Rules& R) {
  const FlagSpec& s = R.spec;
  const int r = s.blocks();
  const int l = s.rank();
  auto theta = s.theta();
  if (l == 4 && theta == std::vector<int>{1, 2, 3}) {
    int a = R.add("T_1", {R.u(2, 1) + R.u(4, 3), R.u(3, 1) - R.u(4, 2), R.u(4, 1) + R.u(3, 2)});
    int b = R.add("S_1", {R.u(4, 3) - R.u(2, 1), R.u(3, 1) + R.u(4, 2), R.u(4, 1) - R.u(3, 2)});
    R.single(a);
    R.single(b);
    return;
  }
  if (l == 4 && theta == std::vector<int>{1, 2, 4}) {
    // image of the {a1,a2,a3} splitting under eta (w_4j <-> u_4j)
    int a = R.add("T_1", {R.u(2, 1) + R.w(4, 3), R.u(3, 1) - R.w(4, 2), R.w(4, 1) + R.u(3, 2)});
    int b = R.add("S_1", {R.w(4, 3) - R.u(2, 1), R.u(3, 1) + R.w(4, 2), R.w(4, 1) - R.u(3, 2)});
    R.single(a);
    R.single(b);
    return;
  }
  const bool last = s.includes_last_root;
  const bool prev = std::find(theta.begin(), theta.end(), l - 1) != theta.end();
  int top = r;  // generic W/U and U_i range over blocks < top
  if (last) top = prev ? r - 1 : r - 2;
  for (int i = 0; i < top; ++i)
    if (s.partition[i] > 1) R.single(R.add(Rules::nm("U", i + 1), R.inner_u(i)));
  if (last && !prev) {
    std::vector<Eigen::VectorXd> span;
    const int q = r - 2;  // block r-1 (0-based r-2)
    for (int a = R.b0(q); a <= R.b1(q); ++a)
      for (int t = R.b0(q); t < a; ++t) span.push_back(R.u(a, t));
    for (int t = R.b0(q); t <= R.b1(q); ++t) span.push_back(R.w(l, t));
    R.single(R.add(Rules::nm("V", r - 1), span));
  }
  for (int m = 1; m < top; ++m)
    for (int n = 0; n < m; ++n) {
      int a = R.add(Rules::nm("W", m + 1, n + 1), R.cross(BasisKind::W, m, n));
      int b = R.add(Rules::nm("U", m + 1, n + 1), R.cross(BasisKind::U, m, n));
      R.pair(a, b);
    }
  if (last && prev)
    for (int n = 0; n < r - 1; ++n) {
      std::vector<Eigen::VectorXd> span;
      for (int i = R.b0(r - 1); i <= R.b1(r - 1); ++i)
        for (int j = R.b0(n); j <= R.b1(n); ++j) {
          span.push_back(R.w(i, j));
          span.push_back(R.u(i, j));
        }
      R.single(R.add(Rules::nm("M", r, n + 1), span));
    }
  if (last && !prev) {
    const int q = r - 2;
    for (int n = 0; n < r - 2; ++n) {
      std::vector<Eigen::VectorXd> sm, sn;
      for (int i = R.b0(q); i <= R.b1(q); ++i)
        for (int j = R.b0(n); j <= R.b1(n); ++j) {
          sm.push_back(R.w(i, j));
          sn.push_back(R.u(i, j));
        }
      for (int j = R.b0(n); j <= R.b1(n); ++j) {
        sm.push_back(R.u(l, j));
        sn.push_back(R.w(l, j));
      }
      int a = R.add(Rules::nm("M", n + 1), sm);
      int b = R.add(Rules::nm("N", n + 1), sn);
      R.pair(a, b);
    }
  }
}

bool is_sigma(const FlagSpec& s) { return static_cast<int>(s.theta().size()) == s.rank(); }

}  // namespace

bool decomposition_implemented(const FlagSpec& s) {
  if (is_sigma(s)) return true;
  const int l = s.rank();
  const auto& p = s.partition;
  const bool last = s.includes_last_root;
  switch (s.family()) {
    case Family::A:
      return true;
    case Family::B:
      if (l >= 5) return true;
      if (l < 3) return false;
      // only {a2..al} and {a1..a_{l-1}}; the Sigma-{a_d} splittings differ at this rank
      if (last && p.size() == 2 && p[0] == 1) return true;
      if (!last && p.size() == 1) return true;
      return false;
    case Family::C:
      if (l < 3) return false;
      if (l != 4) return true;
      if (!last && p.size() == 1) return true;
      if (last && p.size() == 2) return true;
      return false;
    case Family::D: {
      if (l >= 5) {
        // with a_{l-1} and a_l both in Theta, M_rn splits into its w+u and w-u halves
        auto t = s.theta();
        const bool prev = std::find(t.begin(), t.end(), l - 1) != t.end();
        return !(last && prev);
      }
      if (l < 4) return false;
      auto t = s.theta();
      using V = std::vector<int>;
      return t == V{1, 2} || t == V{2, 3} || t == V{2, 4} || t == V{1, 2, 3} || t == V{1, 2, 4};
    }
  }
  return false;
}

Decomposition decompose_isotropy(const FlagSpec& spec) {
  if (!decomposition_implemented(spec))
    throw UnimplementedCase("no decomposition rule for " + spec.to_string() + " (Theta=" + theta_string(spec) + ")");
  Rules R(spec);
  if (!R.dec.tangent.empty()) {
    switch (spec.family()) {
      case Family::A: rules_A(R); break;
      case Family::B: rules_B(R); break;
      case Family::C: rules_C(R); break;
      case Family::D: rules_D(R); break;
    }
  }
  int total = 0;
  for (const auto& m : R.dec.submodules) total += m.dim();
  if (total != static_cast<int>(R.dec.tangent.size()))
    throw InvariantFailure("submodules of " + spec.to_string() + " do not add up to m_Theta");
  return R.dec;
}

std::vector<Eigen::MatrixXd> component_generators(const FlagSpec& spec) {
  const int N = spec.algebra->ambient_dim();
  const int l = spec.rank();
  const int r = spec.blocks();
  std::vector<Eigen::MatrixXd> gens;
  auto flip = [&](std::vector<int> lambda_indices) {
    // lambda index k (1-based) -> ambient rows
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(N, N);
    for (int k : lambda_indices) {
      switch (spec.family()) {
        case Family::A: d(k - 1, k - 1) = -1; break;
        case Family::B: d(k, k) = -1; d(l + k, l + k) = -1; break;
        case Family::C:
        case Family::D: d(k - 1, k - 1) = -1; d(l + k - 1, l + k - 1) = -1; break;
      }
    }
    gens.push_back(d);
  };
  if (spec.family() == Family::C) {
    for (int i = 0; i < r; ++i) flip({spec.block_begin(i)});
  } else {
    for (int i = 0; i + 1 < r; ++i) flip({spec.block_begin(i), spec.block_begin(i + 1)});
  }
  return gens;
}

std::vector<Eigen::MatrixXd> ansatz_generators(const FlagSpec& spec) {
  const int N = spec.algebra->ambient_dim();
  const int l = spec.rank();
  std::vector<Eigen::MatrixXd> gens;
  if (spec.family() == Family::B && l == 3 && !spec.includes_last_root && spec.blocks() == 1) {
    Eigen::MatrixXd d = -Eigen::MatrixXd::Identity(N, N);
    d(0, 0) = 1;
    gens.push_back(d);
  }
  if (spec.family() == Family::D && l == 4 && decomposition_implemented(spec)) {
    auto dec = decompose_isotropy(spec);
    if (dec.submodules.size() == 3) {
      for (int i = 0; i < spec.blocks(); ++i)
        if (spec.partition[i] == 1) {
          Eigen::MatrixXd d = Eigen::MatrixXd::Identity(N, N);
          const int k = spec.block_begin(i);
          d(k - 1, k - 1) = d(l + k - 1, l + k - 1) = -1;
          gens.push_back(d);
          break;
        }
    }
  }
  return gens;
}

std::vector<FlagSpec> enumerate_small_flags(Family family, int rank) {
  auto alg = algebra_for(family, rank);
  const int total = family == Family::A ? rank + 1 : rank;
  std::vector<FlagSpec> out;
  // compositions of total, enumerated by cut masks
  for (int mask = 0; mask < (1 << (total - 1)); ++mask) {
    std::vector<int> parts;
    int cur = 1;
    for (int k = 0; k < total - 1; ++k) {
      if (mask & (1 << k)) {
        parts.push_back(cur);
        cur = 1;
      } else {
        ++cur;
      }
    }
    parts.push_back(cur);
    for (int last = 0; last < (family == Family::A ? 1 : 2); ++last) {
      FlagSpec s = make_flag(alg, parts, last == 1);
      if (!decomposition_implemented(s)) continue;
      auto d = decompose_isotropy(s);
      if (d.submodules.size() == 2 || d.submodules.size() == 3) out.push_back(s);
    }
  }
  return out;
}

}  // namespace flagein
