#include "flagein/einstein.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "flagein/errors.hpp"

namespace flagein {

const char* to_string(GroupStatus s) {
  switch (s) {
    case GroupStatus::ProvenDistinct: return "ProvenDistinct";
    case GroupStatus::WitnessedEquivalent: return "WitnessedEquivalent";
    case GroupStatus::Undecided: return "Undecided";
  }
  return "?";
}

const char* to_string(Provenance p) { return p == Provenance::ClosedForm ? "ClosedForm" : "NumericRoot"; }

int SolutionSet::group_of(int solution) const {
  for (size_t g = 0; g < groups.size(); ++g)
    for (int m : groups[g].members)
      if (m == solution) return static_cast<int>(g);
  return -1;
}

std::shared_ptr<const MetricSpace> shared_metric_space(const FlagSpec& spec) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const MetricSpace>> cache;
  const std::string key = spec.to_string();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto ms = std::make_shared<const MetricSpace>(invariant_metric_space(spec));
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, ms).first->second;
}

int gauge_index(const MetricSpace& space) {
  int g = -1;
  for (int i = 0; i < space.dim(); ++i)
    if (space.kinds[i] == CoeffKind::Scale) g = i;
  return g;
}

Eigen::VectorXd normalize_gauge(const MetricSpace& space, const Eigen::VectorXd& coeffs) {
  return coeffs / coeffs[gauge_index(space)];
}

EinsteinSolution make_solution(std::shared_ptr<const MetricSpace> space, const Eigen::VectorXd& coeffs,
                               Provenance provenance, std::string rule_id) {
  EinsteinSolution s;
  s.metric = make_metric(space, normalize_gauge(*space, coeffs));
  s.defect = einstein_defect(s.metric);
  s.provenance = provenance;
  s.rule_id = std::move(rule_id);
  return s;
}

// ---------------------------------------------------------------------------
// catalog

namespace {

int coeff_named(const MetricSpace& ms, const std::string& name) {
  for (int i = 0; i < ms.dim(); ++i)
    if (ms.coeff_names[i] == name) return i;
  throw InvariantFailure("metric space of " + ms.spec().to_string() + " has no coefficient " + name);
}

Eigen::VectorXd by_name(const MetricSpace& ms, const std::vector<std::pair<std::string, double>>& values) {
  if (static_cast<int>(values.size()) != ms.dim())
    throw InvariantFailure("catalog entry does not cover the metric space of " + ms.spec().to_string());
  Eigen::VectorXd c(ms.dim());
  for (const auto& [name, v] : values) c[coeff_named(ms, name)] = v;
  return c;
}

bool is_partition(const FlagSpec& s, Family f, std::vector<int> parts, bool last) {
  return s.family() == f && s.partition == parts && s.includes_last_root == last;
}

// A_3 with one block of size 2 and two of size 1
bool is_a3_pair_flag(const FlagSpec& s) {
  if (s.family() != Family::A || s.rank() != 3 || s.blocks() != 3) return false;
  return std::count(s.partition.begin(), s.partition.end(), 2) == 1;
}

// ambient permutation carrying the [2,1,1] layout to the layout of s
Eigen::MatrixXd a3_layout_map(const FlagSpec& s) {
  std::vector<int> target;
  for (int b = 0; b < 3; ++b)
    if (s.partition[b] == 2)
      for (int i = s.block_begin(b); i <= s.block_end(b); ++i) target.push_back(i - 1);
  for (int b = 0; b < 3; ++b)
    if (s.partition[b] == 1) target.push_back(s.block_begin(b) - 1);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(4, 4);
  for (int k = 0; k < 4; ++k) e(target[k], k) = 1;
  return e;
}

struct Branch {
  std::string id;
  Eigen::VectorXd coeffs;
};

std::vector<Branch> a3_pair_branches(const MetricSpace& ms) {
  const double q = 1.0 / 3;
  auto e = [&](double mu0, double mu1, double mu2, double b) {
    return by_name(ms, {{"a:M_32", mu0}, {"a:M_21", mu1}, {"a:M_31", mu2}, {"b:M_21~M_31", b}});
  };
  return {{"E1", e(4.0 / 3, 1, 1, 0)},
          {"E2", e(2 * q, q, 1, q)},
          {"E3", e(2, 3, 1, 1)},
          {"E4", e(2 * q, q, 1, -q)},
          {"E5", e(2, 3, 1, -1)}};
}

std::vector<Branch> three_block_branches(const MetricSpace& ms, int l1, int m) {
  const double a1 = 2.0 * m + l1 - 2;
  const double a2 = double(m) * (m + l1 - 1) * (2.0 * m + l1 - 2);
  const double d1 = double(l1) * l1 - 4.0 * (m - 1);
  const double d2 = double(m + l1 - 1) * (-double(l1) * l1 + l1 * double(m - 2) * (m - 2) + double(m) * m * m -
                                          4.0 * m * m + 8.0 * m - 4);
  auto e = [&](double x21, double x31) {
    return by_name(ms, {{"a:M_21", x21}, {"a:M_31", x31}, {"a:M_32", 1}});
  };
  std::vector<Branch> out;
  if (d1 >= 0) {
    const double r = std::sqrt(d1);
    out.push_back({"three-block-1", e((a1 + r) / (4 * (m - 1)), (a1 + r) / (4 * (m - 1)))});
    out.push_back({"three-block-2", e((a1 - r) / (4 * (m - 1)), (a1 - r) / (4 * (m - 1)))});
  }
  if (d2 >= 0) {
    const double r = m * std::sqrt(d2);
    const double den = 2.0 * m * m * (m + l1 - 1);
    out.push_back({"three-block-3", e((a2 + r) / den, (a2 - r) / den)});
    out.push_back({"three-block-4", e((a2 - r) / den, (a2 + r) / den)});
  }
  return out;
}

std::vector<Branch> catalog(const FlagSpec& s, const MetricSpace& ms) {
  const int l = s.rank();
  auto ones = [&] { return Branch{"normal", Eigen::VectorXd::Ones(ms.dim())}; };
  if (is_partition(s, Family::A, {2, 2}, false)) return {ones()};
  if (s.family() == Family::B && l >= 3 && is_partition(s, Family::B, {1, l - 1}, true))
    return {{"rho-mu", by_name(ms, {{"a:(V_1)_1", double(l - 2) / (l - 1)}, {"a:(V_1)_2", 1}})}};
  if (s.family() == Family::B && is_partition(s, Family::B, {l}, false)) {
    if (l == 4)
      return {{"mu-half", by_name(ms, {{"a:V_1", 0.5}, {"a:T_1", 1}, {"a:T_2", 1}})},
              {"mu-gamma", by_name(ms, {{"a:V_1", 1}, {"a:T_1", 1}, {"a:T_2", 1}})}};
    return {{"mu-half", by_name(ms, {{"a:V_1", 0.5}, {"a:U_1", 1}})},
            {"mu-ratio", by_name(ms, {{"a:V_1", double(l) / (2 * l - 4)}, {"a:U_1", 1}})}};
  }
  if (s.family() == Family::C && is_partition(s, Family::C, {l}, false)) return {};
  if (s.family() == Family::C && l >= 3 && is_partition(s, Family::C, {1, l - 1}, true))
    return {{"mu0-twice", by_name(ms, {{"a:V_1", 2}, {"a:M_21", 1}})}};
  if (is_partition(s, Family::D, {4}, false) || is_partition(s, Family::D, {3, 1}, true)) return {ones()};
  if (s.family() == Family::A && s.rank() == 3 && s.partition == std::vector<int>{2, 1, 1})
    return a3_pair_branches(ms);
  if (is_a3_pair_flag(s)) {
    // pull the [2,1,1] branches back along the layout permutation
    const FlagSpec src = make_flag(Family::A, 3, {2, 1, 1}, false);
    auto src_ms = shared_metric_space(src);
    const Eigen::MatrixXd r = adjoint_map(*ms.tangent, *src_ms->tangent, a3_layout_map(s).transpose());
    std::vector<Branch> out;
    for (auto& b : a3_pair_branches(*src_ms)) {
      auto c = pullback(*src_ms, b.coeffs, ms, r);
      if (!c) throw InvariantFailure("layout map does not transport the invariant metrics");
      out.push_back({b.id, *c});
    }
    return out;
  }
  if (s.family() == Family::A && s.blocks() == 3 && s.partition[1] == s.partition[2] && s.partition[1] >= 3 &&
      l != 3)
    return three_block_branches(ms, s.partition[0], s.partition[1]);
  if (s.family() == Family::D && l >= 4 && is_partition(s, Family::D, {l - 1, 1}, false)) {
    const double d = std::sqrt(double(l) * l - 5.0 * l + 4) / (2.0 * (l - 1));
    auto f = [&](double g, double l1, double l2, double b) {
      return by_name(ms, {{"a:U_1", g}, {"a:W_21", l1}, {"a:U_21", l2}, {"b:W_21~U_21", b}});
    };
    const double q = 1.0 / 3;
    return {{"F1", f(1, 1 - d, 1 + d, 0)},  {"F2", f(1, 1 + d, 1 - d, 0)}, {"F3", f(2 * q, q, 1, q)},
            {"F4", f(2, 3, 1, 1)},          {"F5", f(2 * q, q, 1, -q)},    {"F6", f(2, 3, 1, -1)}};
  }
  throw NoCatalogEntry("no closed-form catalog entry for " + s.to_string());
}

}  // namespace

bool has_closed_form(const FlagSpec& spec) {
  try {
    catalog(spec, *shared_metric_space(spec));
    return true;
  } catch (const NoCatalogEntry&) {
    return false;
  }
}

std::vector<EinsteinSolution> closed_form_solutions(const FlagSpec& spec) {
  auto ms = shared_metric_space(spec);
  std::vector<EinsteinSolution> out;
  for (auto& b : catalog(spec, *ms)) {
    // branches that coincide for this instance are reported once
    bool dup = false;
    for (const auto& o : out)
      if (homothety_distance(*ms, o.metric.coeffs, b.coeffs) < 1e-9) dup = true;
    if (dup) continue;
    out.push_back(make_solution(ms, b.coeffs, Provenance::ClosedForm, b.id));
  }
  return out;
}

// ---------------------------------------------------------------------------
// numeric solver

Eigen::VectorXd einstein_system(const ReducedRicci& rr, const Eigen::VectorXd& c) {
  const auto& ms = rr.space();
  const int g = gauge_index(ms);
  const Eigen::VectorXd rho = rr.rho(c);
  const double cg = rho[g] / c[g];
  double nrm = 0;
  int ns = 0;
  for (int i = 0; i < ms.dim(); ++i)
    if (ms.kinds[i] == CoeffKind::Scale) {
      nrm += std::abs(rho[i] / c[i]);
      ++ns;
    }
  nrm = nrm / ns + 1e-300;
  Eigen::VectorXd f(ms.dim() - 1);
  int k = 0;
  for (int i = 0; i < ms.dim(); ++i) {
    if (i == g) continue;
    if (ms.kinds[i] == CoeffKind::Scale) {
      f[k++] = (rho[i] / c[i] - cg) / nrm;
    } else {
      auto [m1, m2] = ms.coeff_modules[i];
      const double s = std::sqrt(c[ms.scale_index(m1)] * c[ms.scale_index(m2)]);
      f[k++] = (rho[i] - cg * c[i]) / s / nrm;
    }
  }
  return f;
}

namespace {

// unknowns: log of free diagonal coefficients, atanh of amplitude / sqrt(a_i a_j)
struct Chart {
  const MetricSpace& ms;
  int g;
  std::vector<int> index;  // coefficient of each unknown

  explicit Chart(const MetricSpace& m) : ms(m), g(gauge_index(m)) {
    for (int i = 0; i < m.dim(); ++i)
      if (i != g) index.push_back(i);
  }
  int size() const { return static_cast<int>(index.size()); }
  bool is_scale(int k) const { return ms.kinds[index[k]] == CoeffKind::Scale; }

  Eigen::VectorXd coeffs(const Eigen::VectorXd& y) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(ms.dim());
    c[g] = 1;
    for (int k = 0; k < size(); ++k)
      if (is_scale(k)) c[index[k]] = std::exp(y[k]);
    for (int k = 0; k < size(); ++k) {
      if (is_scale(k)) continue;
      auto [m1, m2] = ms.coeff_modules[index[k]];
      c[index[k]] = std::tanh(y[k]) * std::sqrt(c[ms.scale_index(m1)] * c[ms.scale_index(m2)]);
    }
    return c;
  }
};

struct Root {
  Eigen::VectorXd coeffs;
  double residual;
  bool singular;
};

Eigen::MatrixXd jacobian(const ReducedRicci& rr, const Chart& ch, const Eigen::VectorXd& y) {
  const int n = ch.size();
  const double h = 1e-5;
  Eigen::MatrixXd j(n, n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd yp = y, ym = y;
    yp[k] += h;
    ym[k] -= h;
    j.col(k) = (einstein_system(rr, ch.coeffs(yp)) - einstein_system(rr, ch.coeffs(ym))) / (2 * h);
  }
  return j;
}

double sys_norm(const ReducedRicci& rr, const Chart& ch, const Eigen::VectorXd& y) {
  for (int k = 0; k < y.size(); ++k)
    if (!std::isfinite(y[k]) || std::abs(y[k]) > 40) return INFINITY;
  const double v = einstein_system(rr, ch.coeffs(y)).norm();
  return std::isfinite(v) ? v : INFINITY;
}

std::optional<Root> newton(const ReducedRicci& rr, const Chart& ch, Eigen::VectorXd y) {
  double nf = sys_norm(rr, ch, y);
  if (!std::isfinite(nf)) return std::nullopt;
  bool singular = false;
  int stall = 0;
  for (int it = 0; it < 150; ++it) {
    const Eigen::VectorXd f = einstein_system(rr, ch.coeffs(y));
    const Eigen::MatrixXd j = jacobian(rr, ch, y);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smax = sv[0];
    if (!(smax > 0) || !std::isfinite(smax)) return std::nullopt;
    const Eigen::VectorXd uf = svd.matrixU().transpose() * f;
    Eigen::VectorXd plain = Eigen::VectorXd::Zero(y.size()), doubled = plain;
    singular = sv[sv.size() - 1] < 1e-4 * smax;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] < 1e-13 * smax) continue;
      const Eigen::VectorXd part = -(uf[i] / sv[i]) * svd.matrixV().col(i);
      plain += part;
      // near a double root Newton only halves the error along the kernel; the doubled step restores
      // quadratic convergence there
      doubled += (singular && nf < 1e-5 && sv[i] < 1e-4 * smax) ? (2 * part).eval() : part;
    }
    bool moved = false;
    for (const Eigen::VectorXd* step : {&doubled, &plain}) {
      Eigen::VectorXd d = *step;
      if (d.norm() > 3) d *= 3 / d.norm();
      for (double t = 1; t > 1e-9; t *= 0.5) {
        const Eigen::VectorXd yn = y + t * d;
        const double nn = sys_norm(rr, ch, yn);
        if (nn < nf) {
          stall = (d.norm() * t < 1e-14 * (1 + y.norm())) ? stall + 1 : 0;
          y = yn;
          nf = nn;
          moved = true;
          break;
        }
      }
      if (moved) break;
    }
    if (!moved || stall > 2) break;
  }
  if (!(nf < 1e-12)) return std::nullopt;
  return Root{ch.coeffs(y), nf, singular};
}

std::vector<double> axis(int n, double lo, double hi, bool scale) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.5 : double(i) / (n - 1);
    v[i] = scale ? std::log(lo) + t * (std::log(hi) - std::log(lo)) : std::atanh(-0.9 + 1.8 * t);
  }
  return v;
}

}  // namespace

double homothety_distance(const MetricSpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd x = normalize_gauge(space, a), y = normalize_gauge(space, b);
  return (x - y).cwiseAbs().maxCoeff() / std::max(1.0, x.cwiseAbs().maxCoeff());
}

std::vector<EinsteinSolution> dedup_homothety(std::vector<EinsteinSolution> solutions, double tol) {
  std::vector<EinsteinSolution> out;
  for (auto& s : solutions) {
    const auto& ms = *s.metric.space;
    bool merged = false;
    for (auto& o : out) {
      const double t = (o.singular && s.singular) ? 1e-3 : tol;
      if (homothety_distance(ms, o.metric.coeffs, s.metric.coeffs) >= t) continue;
      merged = true;
      if (o.provenance == Provenance::NumericRoot && s.provenance == Provenance::ClosedForm) o = s;
      break;
    }
    if (!merged) {
      s.metric.coeffs = normalize_gauge(ms, s.metric.coeffs);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<EinsteinSolution> numeric_sweep(const FlagSpec& spec, int grid, const NumericOptions& opt) {
  auto ms = shared_metric_space(spec);
  if (ms->dim() > 4)
    throw TooManyParameters(spec.to_string() + " has " + std::to_string(ms->dim()) + " metric parameters");
  ReducedRicci rr(ms);
  const Chart ch(*ms);
  const int n = ch.size();
  if (n == 0) {
    // one parameter: every metric is homothetic to the normal one
    auto s = make_solution(ms, Eigen::VectorXd::Ones(1), Provenance::NumericRoot, "numeric");
    return {s};
  }
  std::vector<std::vector<double>> axes;
  for (int k = 0; k < n; ++k) axes.push_back(axis(grid, opt.lo, opt.hi, ch.is_scale(k)));
  long total = 1;
  for (int k = 0; k < n; ++k) total *= grid;
  std::vector<std::optional<Root>> found(total);

#pragma omp parallel for schedule(dynamic, 8) if (opt.parallel)
  for (long idx = 0; idx < total; ++idx) {
    Eigen::VectorXd y(n);
    long r = idx;
    for (int k = 0; k < n; ++k) {
      y[k] = axes[k][r % grid];
      r /= grid;
    }
    found[idx] = newton(rr, ch, y);
  }

  std::vector<Root> roots;
  for (auto& f : found)
    if (f) roots.push_back(*f);
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    for (int i = 0; i < a.coeffs.size(); ++i)
      if (a.coeffs[i] != b.coeffs[i]) return a.coeffs[i] < b.coeffs[i];
    return false;
  });
  // cheap merge on coefficients before building frames
  std::vector<Root> reps;
  for (const auto& r : roots) {
    bool merged = false;
    for (auto& q : reps) {
      const double t = (q.singular && r.singular) ? 1e-3 : 1e-6;
      if (homothety_distance(*ms, q.coeffs, r.coeffs) < t) {
        if (r.residual < q.residual && !(q.singular && r.singular)) q = r;
        merged = true;
        break;
      }
    }
    if (!merged) reps.push_back(r);
  }
  std::vector<EinsteinSolution> out;
  for (const auto& r : reps) {
    auto s = make_solution(ms, r.coeffs, Provenance::NumericRoot, "numeric");
    s.singular = r.singular;
    if (!(s.defect.residual < 1e-9))
      throw InvariantFailure("numeric root of " + spec.to_string() + " fails the frame Einstein check (residual " +
                             std::to_string(s.defect.residual) + ")");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<EinsteinSolution> numeric_solutions(const FlagSpec& spec, const NumericOptions& opt) {
  auto first = numeric_sweep(spec, opt.grid, opt);
  auto second = numeric_sweep(spec, opt.confirm_grid, opt);
  if (first.size() == second.size()) return first;
  auto third = numeric_sweep(spec, opt.retry_grid, opt);
  if (third.size() == std::max(first.size(), second.size())) return third;
  throw ConvergenceGap(spec.to_string() + ": solution counts " + std::to_string(first.size()) + " (grid " +
                       std::to_string(opt.grid) + "), " + std::to_string(second.size()) + " (grid " +
                       std::to_string(opt.confirm_grid) + "), " + std::to_string(third.size()) + " (grid " +
                       std::to_string(opt.retry_grid) + ")");
}

// ---------------------------------------------------------------------------
// pullbacks and screening

Eigen::MatrixXd adjoint_map(const TangentModel& from, const TangentModel& to, const Eigen::MatrixXd& s) {
  const auto& alg = *from.spec.algebra;
  if (to.spec.algebra.get() != from.spec.algebra.get() && to.spec.algebra->dim() != alg.dim())
    throw InvariantFailure("adjoint map between different algebras");
  std::vector<int> pos(alg.dim(), -1);
  for (int p = 0; p < to.n; ++p) pos[to.dec.tangent[p]] = p;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(to.n, from.n);
  for (int q = 0; q < from.n; ++q) {
    Eigen::VectorXd x;
    try {
      x = alg.expand(s * alg.matrix(from.dec.tangent[q]) * s.transpose(), 1e-10);
    } catch (const ClosureViolation&) {
      throw InvariantFailure("map does not normalize the compact algebra");
    }
    for (int a = 0; a < alg.dim(); ++a) {
      if (std::abs(x[a]) < 1e-12) continue;
      if (pos[a] < 0) throw InvariantFailure("map does not preserve the tangent space");
      r(pos[a], q) = x[a] * to.norms[pos[a]] / from.norms[q];
    }
  }
  return r;
}

std::optional<Eigen::VectorXd> pullback(const MetricSpace& source, const Eigen::VectorXd& coeffs,
                                        const MetricSpace& target, const Eigen::MatrixXd& r) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(source.tangent->n, source.tangent->n);
  for (int i = 0; i < source.dim(); ++i) a += coeffs[i] * source.operator_basis[i];
  const Eigen::MatrixXd b = r.transpose() * a * r;
  const int p = target.dim();
  Eigen::MatrixXd gram(p, p);
  Eigen::VectorXd rhs(p);
  for (int i = 0; i < p; ++i) {
    rhs[i] = (target.operator_basis[i].array() * b.array()).sum();
    for (int j = 0; j < p; ++j)
      gram(i, j) = (target.operator_basis[i].array() * target.operator_basis[j].array()).sum();
  }
  const Eigen::VectorXd c = gram.ldlt().solve(rhs);
  Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(b.rows(), b.cols());
  for (int i = 0; i < p; ++i) rec += c[i] * target.operator_basis[i];
  if ((rec - b).norm() > 1e-9 * std::max(1.0, b.norm())) return std::nullopt;
  return c;
}

namespace {

Eigen::MatrixXd perm_matrix(int n, const std::vector<int>& image) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) e(image[k], k) = 1;
  return e;
}

}  // namespace

std::vector<Witness> witness_maps(const FlagSpec& spec) {
  std::vector<Witness> base;
  const int l = spec.rank();
  const int amb = spec.algebra->ambient_dim();
  if (is_a3_pair_flag(spec)) {
    Eigen::MatrixXd s3(4, 4), s4(4, 4), s5(4, 4);
    s3 << 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
    s4 << 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
    s5 << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
    const Eigen::MatrixXd e = a3_layout_map(spec);
    base.push_back({"psi3", e * s3 * e.transpose()});
    base.push_back({"psi4", e * s4 * e.transpose()});
    base.push_back({"psi5", e * s5 * e.transpose()});
  } else if (spec.family() == Family::A) {
    // swaps of equal blocks
    for (int b = 0; b < spec.blocks(); ++b)
      for (int c = b + 1; c < spec.blocks(); ++c) {
        if (spec.partition[b] != spec.partition[c]) continue;
        std::vector<int> img(amb);
        std::iota(img.begin(), img.end(), 0);
        for (int k = 0; k < spec.partition[b]; ++k)
          std::swap(img[spec.block_begin(b) - 1 + k], img[spec.block_begin(c) - 1 + k]);
        base.push_back({"swap" + std::to_string(b + 1) + std::to_string(c + 1), perm_matrix(amb, img)});
      }
  } else if (spec.family() == Family::D && is_partition(spec, Family::D, {l - 1, 1}, false)) {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(amb, amb);
    sigma.bottomRightCorner(l, l) *= -1;
    std::vector<int> img(amb);
    std::iota(img.begin(), img.end(), 0);
    std::swap(img[l - 1], img[2 * l - 1]);
    base.push_back({"sigma", sigma});
    base.push_back({"eta", perm_matrix(amb, img)});
  }
  // close under pairwise products
  std::vector<Witness> all = base;
  for (size_t i = 0; i < base.size(); ++i)
    for (size_t j = 0; j < base.size(); ++j)
      if (i != j) all.push_back({base[i].name + "*" + base[j].name, base[i].s * base[j].s});
  std::vector<Witness> valid;
  auto tm = shared_metric_space(spec)->tangent;
  for (auto& w : all) {
    try {
      adjoint_map(*tm, *tm, w.s);
      valid.push_back(std::move(w));
    } catch (const InvariantFailure&) {
    }
  }
  return valid;
}

SolutionSet equivalence_screen(SolutionSet set) {
  set.groups.clear();
  const int n = static_cast<int>(set.solutions.size());
  if (n == 0) return set;
  const auto& ms = *set.space;
  const auto witnesses = witness_maps(set.flag);
  std::vector<Eigen::MatrixXd> maps;
  for (const auto& w : witnesses) maps.push_back(adjoint_map(*ms.tangent, *ms.tangent, w.s));

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::vector<std::vector<std::string>> used(n);
  auto chat = [&](int i) { return set.solutions[i].defect.normalized_constant; };
  auto same_c = [&](int i, int j) {
    return std::abs(chat(i) - chat(j)) <= 1e-8 * std::max(std::abs(chat(i)), std::abs(chat(j)));
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || !same_c(i, j) || find(i) == find(j)) continue;
      for (size_t w = 0; w < maps.size(); ++w) {
        auto c = pullback(ms, set.solutions[i].metric.coeffs, ms, maps[w]);
        if (!c || homothety_distance(ms, *c, set.solutions[j].metric.coeffs) > 1e-8) continue;
        const int a = find(i), b = find(j);
        parent[b] = a;
        used[i].push_back(witnesses[w].name + ":" + std::to_string(i) + "->" + std::to_string(j));
        break;
      }
    }
  std::map<int, int> group_of_root;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (!group_of_root.count(r)) {
      group_of_root[r] = static_cast<int>(set.groups.size());
      set.groups.push_back({});
      set.groups.back().c_hat = chat(i);
    }
    auto& g = set.groups[group_of_root[r]];
    g.members.push_back(i);
    for (auto& w : used[i]) g.witnesses.push_back(w);
  }
  for (auto& g : set.groups) {
    bool shared = false;
    for (int j = 0; j < n; ++j)
      if (std::find(g.members.begin(), g.members.end(), j) == g.members.end() && same_c(g.members[0], j))
        shared = true;
    if (g.members.size() > 1)
      g.status = GroupStatus::WitnessedEquivalent;
    else
      g.status = shared ? GroupStatus::Undecided : GroupStatus::ProvenDistinct;
  }
  return set;
}

GroupStatus pair_status(const SolutionSet& set, int i, int j) {
  const int gi = set.group_of(i), gj = set.group_of(j);
  if (gi == gj) return GroupStatus::WitnessedEquivalent;
  const double a = set.groups[gi].c_hat, b = set.groups[gj].c_hat;
  if (std::abs(a - b) > 1e-8 * std::max(std::abs(a), std::abs(b))) return GroupStatus::ProvenDistinct;
  return GroupStatus::Undecided;
}

SolutionSet solve(const FlagSpec& spec, SolveMode mode) {
  SolutionSet set;
  set.flag = spec;
  set.space = shared_metric_space(spec);
  const bool closed = has_closed_form(spec);
  if (closed)
    set.catalog = "closed-form";
  else if (is_three_block_a(spec) && spec.partition[1] == spec.partition[2] && spec.partition[1] == 2)
    set.catalog = "undecided";
  else
    set.catalog = "bound-only";
  std::vector<EinsteinSolution> all;
  if (mode != SolveMode::Numeric && closed) all = closed_form_solutions(spec);
  if (mode == SolveMode::ClosedForm && !closed) throw NoCatalogEntry("no closed-form catalog entry for " + spec.to_string());
  if (mode != SolveMode::ClosedForm) {
    auto num = numeric_solutions(spec);
    all.insert(all.end(), num.begin(), num.end());
  }
  set.solutions = dedup_homothety(std::move(all));
  return equivalence_screen(std::move(set));
}

// ---------------------------------------------------------------------------

double normalized_scalar(const ReducedRicci& rr, const Eigen::VectorXd& coeffs) {
  const int n = rr.space().tangent->n;
  return rr.scalar(coeffs) * std::exp(rr.log_det(coeffs) / n);
}

Eigen::VectorXd normalized_scalar_gradient(const ReducedRicci& rr, const Eigen::VectorXd& coeffs, double h) {
  Eigen::VectorXd g(coeffs.size());
  for (int i = 0; i < coeffs.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(coeffs[i]));
    Eigen::VectorXd p = coeffs, m = coeffs;
    p[i] += step;
    m[i] -= step;
    g[i] = (normalized_scalar(rr, p) - normalized_scalar(rr, m)) / (2 * step);
  }
  return g;
}

// ---------------------------------------------------------------------------
// companion-matrix cross-check

bool is_three_block_a(const FlagSpec& spec) {
  if (spec.family() != Family::A || spec.blocks() != 3) return false;
  const auto& ms = *shared_metric_space(spec);
  return ms.dim() == 3 && !ms.decomposition().has_equivalent_summands();
}

namespace {

using Poly = std::vector<double>;  // coefficients, lowest degree first

Poly padd(Poly a, const Poly& b, double s = 1) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
  return a;
}

Poly pmul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

double peval(const Poly& p, double x) {
  double v = 0;
  for (size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

std::vector<std::complex<double>> proots(Poly p) {
  while (p.size() > 1 && std::abs(p.back()) < 1e-14 * Eigen::Map<Eigen::VectorXd>(p.data(), p.size()).cwiseAbs().maxCoeff())
    p.pop_back();
  const int d = static_cast<int>(p.size()) - 1;
  if (d < 1) return {};
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) c(i, i - 1) = 1;
  for (int i = 0; i < d; ++i) c(i, d - 1) = -p[i] / p[d];
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < d; ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

}  // namespace

std::vector<Eigen::VectorXd> three_block_companion(const FlagSpec& spec) {
  if (!is_three_block_a(spec)) throw UnimplementedCase("companion cross-check needs a three-block A flag");
  auto ms = shared_metric_space(spec);
  ReducedRicci rr(ms);
  const int g = gauge_index(*ms);
  std::vector<int> idx;
  for (int i = 0; i < 3; ++i)
    if (i != g) idx.push_back(i);
  idx.push_back(g);
  Eigen::Vector3d d;
  for (int k = 0; k < 3; ++k) d[k] = ms->decomposition().submodules[ms->coeff_modules[idx[k]].first].dim();

  // r_k = rho_k / x_k = b/(2x_k) + c/(2d_k) (x_k/(x_i x_j) - x_i/(x_k x_j) - x_j/(x_k x_i)); fit b, c at x = 1
  auto r_of = [&](const Eigen::Vector3d& x) {
    Eigen::VectorXd c(3);
    for (int k = 0; k < 3; ++k) c[idx[k]] = x[k];
    const Eigen::VectorXd rho = rr.rho(c);
    Eigen::Vector3d r;
    for (int k = 0; k < 3; ++k) r[k] = rho[idx[k]] / x[k];
    return r;
  };
  auto shape = [&](const Eigen::Vector3d& x, int k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    return Eigen::Vector2d(1 / (2 * x[k]), (x[k] / (x[i] * x[j]) - x[i] / (x[k] * x[j]) - x[j] / (x[k] * x[i])) / (2 * d[k]));
  };
  // two sample points; one alone cannot separate b and c when the d_k coincide
  const Eigen::Vector3d fit_pts[2] = {Eigen::Vector3d::Ones(), Eigen::Vector3d(1.3, 0.8, 1.0)};
  Eigen::Matrix<double, 6, 2> m;
  Eigen::Matrix<double, 6, 1> rhs;
  for (int p = 0; p < 2; ++p) {
    const Eigen::Vector3d r = r_of(fit_pts[p]);
    for (int k = 0; k < 3; ++k) {
      m.row(3 * p + k) = shape(fit_pts[p], k).transpose();
      rhs[3 * p + k] = r[k];
    }
  }
  const Eigen::Vector2d bc = m.colPivHouseholderQr().solve(rhs);
  const double b = bc[0], c = bc[1];
  auto model = [&](const Eigen::Vector3d& x) {
    Eigen::Vector3d r;
    for (int k = 0; k < 3; ++k) r[k] = shape(x, k).dot(bc);
    return r;
  };
  const Eigen::Vector3d probe(0.7, 1.9, 1.3);
  if ((model(probe) - r_of(probe)).norm() > 1e-9 * std::max(1.0, r_of(probe).norm()))
    throw InvariantFailure("three-block Ricci model does not fit " + spec.to_string());

  // with x3 = 1 and both sides times 2 x1 x2: E_k = a_k(x1) x2^2 + b_k(x1) x2 + c_k(x1), polynomials in x1
  const double k1 = c / d[0], k2 = c / d[1], k3 = c / d[2];
  const Poly a1{k3 - k1}, b1{b, -b}, c1{-k1 - k3, 0, k1 + k3};
  const Poly a2{k2 + k3}, b2{0, -b}, c2{-k2 - k3, b, k3 - k2};
  const Poly ac = padd(pmul(a1, c2), pmul(a2, c1), -1);            // a1 c2 - a2 c1
  const Poly ab = padd(pmul(a1, b2), pmul(a2, b1), -1);            // a1 b2 - a2 b1
  const Poly bcp = padd(pmul(b1, c2), pmul(b2, c1), -1);          // b1 c2 - b2 c1
  const Poly res = padd(pmul(ac, ac), pmul(ab, bcp), -1);

  std::vector<Eigen::VectorXd> out;
  auto e_of = [&](double x1, double x2) {
    return Eigen::Vector2d(peval(a1, x1) * x2 * x2 + peval(b1, x1) * x2 + peval(c1, x1),
                           peval(a2, x1) * x2 * x2 + peval(b2, x1) * x2 + peval(c2, x1));
  };
  for (auto z : proots(res)) {
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z)) || z.real() <= 1e-8) continue;
    const double x1 = z.real();
    std::vector<double> cands;
    const double den = peval(ab, x1);
    if (std::abs(den) > 1e-9) cands.push_back(-peval(ac, x1) / den);
    // common root of the two quadratics in x2, found from either one when the linear formula degenerates
    for (const auto& [qa, qb, qc] : {std::tuple{a1, b1, c1}, std::tuple{a2, b2, c2}}) {
      for (auto w : proots({peval(qc, x1), peval(qb, x1), peval(qa, x1)}))
        if (std::abs(w.imag()) < 1e-6 * std::max(1.0, std::abs(w))) cands.push_back(w.real());
    }
    for (double x2 : cands) {
      if (!(x2 > 1e-8)) continue;
      if (e_of(x1, x2).norm() > 1e-6 * (std::abs(b) + std::abs(c)) * std::max({1.0, x1 * x1, x2 * x2})) continue;
      Eigen::VectorXd x(3);
      x[idx[0]] = x1;
      x[idx[1]] = x2;
      x[idx[2]] = 1;
      bool dup = false;
      for (const auto& o : out)
        if ((o - x).cwiseAbs().maxCoeff() < 1e-6 * std::max(1.0, x.cwiseAbs().maxCoeff())) dup = true;
      if (!dup) out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Table 1

namespace {

std::string so(int n) { return "SO(" + std::to_string(n) + ")"; }

Table1Instance inst(const std::string& text, std::string manifold, int summands, bool equiv, std::optional<int> count,
                    int bound, std::optional<bool> normal) {
  Table1Instance t;
  t.spec = parse_flag_spec(text);
  t.manifold = std::move(manifold);
  t.summands = summands;
  t.equivalent = equiv;
  t.count = count;
  t.bound = bound;
  t.normal = normal;
  return t;
}

std::string spec_text(char fam, int l, const std::vector<int>& parts, bool last) {
  std::string s = std::string(1, fam) + ":" + std::to_string(l) + ":[";
  for (size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + std::to_string(parts[i]);
  return s + "]:" + (last ? "+" : "-");
}

Table1Instance three_block_instance(int l1, int l2, int l3) {
  const int l = l1 + l2 + l3 - 1;
  const std::string name = so(l + 1) + "/S(O(" + std::to_string(l1) + ")xO(" + std::to_string(l2) + ")xO(" +
                           std::to_string(l3) + "))";
  std::optional<int> count;
  if (l2 == l3 && l2 >= 3) {
    const double m = l2;
    const double t1 = 2 * std::sqrt(m - 1);
    const double t2 = ((m - 2) * (m - 2) + m * std::sqrt(m * m - 4 * m + 8)) / 2;
    auto eq = [](double a, double b) { return std::abs(a - b) < 1e-9; };
    if (eq(l1, t1) || eq(l1, t2))
      count = 3;
    else if (l1 < t1 || l1 > t2)
      count = 2;
    else
      count = 4;
  }
  return inst(spec_text('A', l, {l1, l2, l3}, false), name, 3, false, count, 4, std::nullopt);
}

}  // namespace

std::vector<Table1Instance> acceptance_instances() {
  std::vector<Table1Instance> v;
  v.push_back(inst("A:3:[2,2]:-", "SO(4)/S(O(2)xO(2))", 2, false, 1, -1, true));
  for (int l = 3; l <= 6; ++l)
    v.push_back(inst(spec_text('B', l, {1, l - 1}, true), "(" + so(l) + "x" + so(l + 1) + ")/(" + so(l - 1) + "x" + so(l) + ")",
                     2, false, 1, -1, false));
  for (int l : {3, 5, 6})
    v.push_back(inst(spec_text('B', l, {l}, false), "(" + so(l) + "x" + so(l + 1) + ")/" + so(l), 2, false, 2, -1, false));
  for (int l = 3; l <= 5; ++l)
    v.push_back(inst(spec_text('C', l, {l}, false), "U(" + std::to_string(l) + ")/O(" + std::to_string(l) + ")", 2,
                     false, 0, -1, false));
  for (int l = 3; l <= 5; ++l)
    v.push_back(inst(spec_text('C', l, {1, l - 1}, true),
                     "U(" + std::to_string(l) + ")/(O(1)xU(" + std::to_string(l - 1) + "))", 2, false, 1, -1, false));
  v.push_back(inst("D:4:[4]:-", "(SO(4)xSO(4))/SO(4)", 2, false, 1, -1, true));
  v.push_back(inst("A:3:[2,1,1]:-", "SO(4)/S(O(2)xO(1)xO(1))", 3, true, 5, -1, false));
  v.push_back(inst("B:4:[4]:-", "(SO(4)xSO(5))/SO(4)", 3, false, 2, -1, true));
  for (int l = 4; l <= 6; ++l)
    v.push_back(inst(spec_text('D', l, {l - 1, 1}, false),
                     "(" + so(l) + "x" + so(l) + ")/S(O(" + std::to_string(l - 1) + ")xO(1))", 3, true,
                     l == 4 ? 5 : 6, -1, l == 4));
  return v;
}

std::vector<Table1Instance> table1_instances(int max_l) {
  std::vector<Table1Instance> v;
  for (auto& t : acceptance_instances())
    if (t.spec.rank() <= max_l) v.push_back(t);
  for (int l = 7; l <= max_l; ++l) {
    v.push_back(inst(spec_text('B', l, {1, l - 1}, true), "(" + so(l) + "x" + so(l + 1) + ")/(" + so(l - 1) + "x" + so(l) + ")",
                     2, false, 1, -1, false));
    v.push_back(inst(spec_text('B', l, {l}, false), "(" + so(l) + "x" + so(l + 1) + ")/" + so(l), 2, false, 2, -1, false));
    v.push_back(inst(spec_text('C', l, {l}, false), "U(" + std::to_string(l) + ")/O(" + std::to_string(l) + ")", 2,
                     false, 0, -1, false));
    v.push_back(inst(spec_text('C', l, {1, l - 1}, true),
                     "U(" + std::to_string(l) + ")/(O(1)xU(" + std::to_string(l - 1) + "))", 2, false, 1, -1, false));
    v.push_back(inst(spec_text('D', l, {l - 1, 1}, false),
                     "(" + so(l) + "x" + so(l) + ")/S(O(" + std::to_string(l - 1) + ")xO(1))", 3, true, 6, -1, false));
  }
  // bound-only and three-block families
  for (int l = 2; l <= max_l; ++l) {
    if (l == 3) continue;
    for (int x = 1; x <= l + 1; ++x)
      for (int y = x; y <= l + 1; ++y) {
        const int z = l + 1 - x - y;
        if (z < y) continue;
        // multiset {x <= y <= z}; put an equal pair last
        if (x == y && y != z)
          v.push_back(three_block_instance(z, x, y));
        else
          v.push_back(three_block_instance(x, y, z));
      }
  }
  for (int l = 5; l <= max_l; ++l)
    for (int d = 2; d <= l - 1; ++d) {
      auto t = inst(spec_text('B', l, {d, l - d}, true),
                    "(" + so(l) + "x" + so(l + 1) + ")/(" + so(d) + "x" + so(l - d) + "x" + so(l - d + 1) + ")", 3,
                    false, std::nullopt, d == 2 ? 3 : 4, std::nullopt);
      const double necessary = double(l) * l * (l - 2) * (l - 2) - 2.0 * (d - 1) * (d - 1) * (d - 2) * (2 * l - d);
      if (d != 2 && necessary <= 0) t.bound = 0;
      v.push_back(t);
    }
  for (int l = 3; l <= max_l; ++l)
    for (int d = 2; d <= l - 1; ++d)
      v.push_back(inst(spec_text('C', l, {d, l - d}, true),
                       "U(" + std::to_string(l) + ")/(O(" + std::to_string(d) + ")xU(" + std::to_string(l - d) + "))",
                       3, false, std::nullopt, 2, std::nullopt));
  return v;
}

Table1Row table1_row(const Table1Instance& t) {
  Table1Row row;
  row.flag = t.spec.to_string();
  row.manifold = t.manifold;
  auto set = solve(t.spec, has_closed_form(t.spec) ? SolveMode::Both : SolveMode::Numeric);
  const auto& dec = set.space->decomposition();
  row.summands = static_cast<int>(dec.submodules.size());
  row.equivalent = dec.has_equivalent_summands();
  row.count = static_cast<int>(set.solutions.size());
  for (const auto& s : set.solutions) row.max_residual = std::max(row.max_residual, s.defect.residual);
  row.normal_is_einstein = einstein_defect(normal_metric(set.space)).residual < 1e-9;
  bool ok = row.summands == t.summands && row.equivalent == t.equivalent;
  if (t.count) {
    row.expected = std::to_string(*t.count);
    ok = ok && row.count == *t.count;
  } else {
    row.expected = "<=" + std::to_string(t.bound);
    ok = ok && row.count <= t.bound;
  }
  if (t.normal) ok = ok && row.normal_is_einstein == *t.normal;
  ok = ok && row.max_residual < 1e-9;
  row.match = ok;
  return row;
}

Table1Row table1_row(const FlagSpec& spec) {
  for (const auto& t : table1_instances(std::max(6, spec.rank())))
    if (t.spec.to_string() == spec.to_string()) return table1_row(t);
  Table1Instance t;
  t.spec = spec;
  t.manifold = spec.to_string();
  auto ms = shared_metric_space(spec);
  t.summands = static_cast<int>(ms->decomposition().submodules.size());
  t.equivalent = ms->decomposition().has_equivalent_summands();
  t.bound = 4;
  auto row = table1_row(t);
  row.expected = "-";
  return row;
}

}  // namespace flagein
