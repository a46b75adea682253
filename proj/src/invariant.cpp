#include "flagein/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "flagein/errors.hpp"

namespace flagein {

Eigen::VectorXd TangentModel::from_span(const Eigen::VectorXd& span_coeffs) const {
  return span_coeffs.cwiseProduct(norms);
}

Eigen::VectorXd TangentModel::to_algebra(const Eigen::VectorXd& f) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.algebra->dim());
  for (int p = 0; p < n; ++p) x[dec.tangent[p]] = f[p] / norms[p];
  return x;
}

Eigen::VectorXd TangentModel::bracket_m(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  for (const auto& b : brackets) z[b.r] += b.value * (x[b.p] * y[b.q] - x[b.q] * y[b.p]);
  return z;
}

std::shared_ptr<const TangentModel> tangent_model(const FlagSpec& spec, const Decomposition& dec,
                                                  const std::vector<Eigen::MatrixXd>& generators) {
  auto tm = std::make_shared<TangentModel>();
  tm->spec = spec;
  tm->dec = dec;
  const auto& alg = *spec.algebra;
  const int n = static_cast<int>(dec.tangent.size());
  tm->n = n;
  std::vector<int> pos(alg.dim(), -1);
  for (int p = 0; p < n; ++p) pos[dec.tangent[p]] = p;
  tm->norms.resize(n);
  for (int p = 0; p < n; ++p) tm->norms[p] = std::sqrt(alg.gram()(dec.tangent[p], dec.tangent[p]));
  const auto& nr = tm->norms;

  for (const auto& s : alg.structure()) {
    const int p = pos[s.a], q = pos[s.b], r = pos[s.c];
    if (p < 0 || q < 0 || r < 0) continue;
    tm->brackets.push_back({p, q, r, s.value * nr[r] / (nr[p] * nr[q])});
  }
  tm->killing.resize(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      tm->killing(p, q) = alg.killing_matrix()(dec.tangent[p], dec.tangent[q]) / (nr[p] * nr[q]);

  for (int a : dec.isotropy) {
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& t : alg.ad_table()[a]) {
      const int c = static_cast<int>(t[0]), b = static_cast<int>(t[1]);
      if (pos[b] < 0) continue;
      if (pos[c] < 0) throw InvariantFailure("[k_Theta, m_Theta] leaves m_Theta");
      trips.emplace_back(pos[c], pos[b], t[2] * nr[pos[c]] / nr[pos[b]]);
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    tm->ad_iso.push_back(std::move(m));
  }

  for (const auto& k : generators) {
    if (k.rows() != alg.ambient_dim() || k.cols() != alg.ambient_dim())
      throw GeneratorMismatch("generator has the wrong ambient size");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int q = 0; q < n; ++q) {
      Eigen::VectorXd x;
      try {
        x = alg.expand(k * alg.matrix(dec.tangent[q]) * k.transpose(), 1e-10);
      } catch (const ClosureViolation&) {
        throw GeneratorMismatch("generator does not normalize the algebra");
      }
      for (int a = 0; a < alg.dim(); ++a) {
        if (std::abs(x[a]) < 1e-12) continue;
        if (pos[a] < 0) throw GeneratorMismatch("generator does not preserve m_Theta");
        d(pos[a], q) = x[a] * nr[pos[a]] / nr[q];
      }
    }
    tm->discrete.push_back(std::move(d));
  }
  return tm;
}

namespace {

// Frobenius-orthonormal basis of k x k symmetric matrices
std::vector<Eigen::MatrixXd> sym_basis(int k) {
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(k, k);
      if (i == j) {
        e(i, i) = 1;
      } else {
        e(i, j) = e(j, i) = std::sqrt(0.5);
      }
      out.push_back(std::move(e));
    }
  return out;
}

// Accumulates linear constraints on the coefficients of a candidate basis and returns its kernel.
class KernelAccumulator {
 public:
  explicit KernelAccumulator(int unknowns) : d_(unknowns), r_(Eigen::MatrixXd::Zero(0, unknowns)) {}

  void add(const Eigen::MatrixXd& rows) {
    if (d_ == 0 || rows.rows() == 0) return;
    Eigen::MatrixXd stacked(r_.rows() + rows.rows(), d_);
    stacked << r_, rows;
    if (stacked.rows() <= d_) {
      r_ = stacked;
      return;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
    r_ = qr.matrixQR().topRows(d_).triangularView<Eigen::Upper>();
  }

  // columns: orthonormal kernel vectors
  Eigen::MatrixXd kernel(double rel_tol) const {
    if (d_ == 0) return Eigen::MatrixXd::Zero(0, 0);
    if (r_.rows() == 0) return Eigen::MatrixXd::Identity(d_, d_);
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(r_.rows(), d_), d_);
    padded.topRows(r_.rows()) = r_;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(padded, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s[0] : 0.0;
    int rank = 0;
    if (smax > 1e-14)
      for (int i = 0; i < s.size(); ++i)
        if (s[i] > rel_tol * smax) ++rank;
    return svd.matrixV().rightCols(d_ - rank);
  }

 private:
  int d_;
  Eigen::MatrixXd r_;
};

Eigen::VectorXd upper(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(n * (n + 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v[k++] = m(i, j);
  return v;
}

Eigen::VectorXd flat(const Eigen::MatrixXd& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

// constraint rows [H_d, M] for each candidate H_d
Eigen::MatrixXd commutator_rows(const std::vector<Eigen::MatrixXd>& cand, const Eigen::MatrixXd& m, bool skew) {
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXd rows(skew ? n * (n + 1) / 2 : n * n, cand.size());
  for (size_t d = 0; d < cand.size(); ++d) {
    Eigen::MatrixXd c = cand[d] * m - m * cand[d];
    rows.col(d) = skew ? upper(c) : flat(c);
  }
  return rows;
}

std::vector<Eigen::MatrixXd> combine(const std::vector<Eigen::MatrixXd>& cand, const Eigen::MatrixXd& kernel) {
  std::vector<Eigen::MatrixXd> out;
  for (int k = 0; k < kernel.cols(); ++k) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(cand.empty() ? 0 : cand[0].rows(), cand.empty() ? 0 : cand[0].cols());
    for (size_t d = 0; d < cand.size(); ++d) h += kernel(d, k) * cand[d];
    out.push_back(0.5 * (h + h.transpose()));
  }
  return out;
}

bool verify_commutant(const TangentModel& tm, const std::vector<Eigen::MatrixXd>& basis) {
  for (const auto& h : basis) {
    for (const auto& a : tm.ad_iso) {
      Eigen::MatrixXd c = h * a - a * h;
      if (c.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, Eigen::MatrixXd(a).cwiseAbs().maxCoeff())) return false;
    }
    for (const auto& g : tm.discrete)
      if ((h * g - g * h).cwiseAbs().maxCoeff() > 1e-10) return false;
  }
  return true;
}

Eigen::MatrixXd random_isotropy(const TangentModel& tm, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(tm.n, tm.n);
  for (const auto& a : tm.ad_iso) x += nd(rng) * Eigen::MatrixXd(a);
  return x;
}

}  // namespace

std::vector<Eigen::MatrixXd> commutant_exact(const TangentModel& tm) {
  const int n = tm.n;
  if (n == 0) return {};
  auto cand = sym_basis(n);
  KernelAccumulator acc(static_cast<int>(cand.size()));
  for (const auto& a : tm.ad_iso) acc.add(commutator_rows(cand, Eigen::MatrixXd(a), true));
  for (const auto& g : tm.discrete) acc.add(commutator_rows(cand, g, false));
  return combine(cand, acc.kernel(1e-8));
}

std::vector<Eigen::MatrixXd> commutant(const TangentModel& tm) {
  const int n = tm.n;
  if (n == 0) return {};
  std::mt19937_64 rng(20240611);
  std::vector<Eigen::MatrixXd> cand;
  if (tm.ad_iso.empty()) {
    if (n * (n + 1) / 2 > 20000) throw UnimplementedCase("commutant over all of Sym(m) is too large");
    cand = sym_basis(n);
  } else {
    // operators commuting with ad X preserve the eigenspaces of -(ad X)^2
    Eigen::MatrixXd x = random_isotropy(tm, rng);
    Eigen::MatrixXd s = -x * x;
    s = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    int start = 0;
    for (int i = 1; i <= n; ++i) {
      if (i < n && ev[i] - ev[i - 1] <= 1e-8 * scale) continue;
      const int k = i - start;
      Eigen::MatrixXd q = es.eigenvectors().middleCols(start, k);
      Eigen::MatrixXd xc = q.transpose() * x * q;
      auto local = sym_basis(k);
      KernelAccumulator acc(static_cast<int>(local.size()));
      acc.add(commutator_rows(local, xc, true));
      for (auto& h : combine(local, acc.kernel(1e-8))) cand.push_back(q * h * q.transpose());
      start = i;
    }
  }
  KernelAccumulator acc(static_cast<int>(cand.size()));
  if (!tm.ad_iso.empty())
    for (int t = 0; t < 4; ++t) acc.add(commutator_rows(cand, random_isotropy(tm, rng), true));
  for (const auto& g : tm.discrete) acc.add(commutator_rows(cand, g, false));
  auto basis = combine(cand, acc.kernel(1e-8));
  if (verify_commutant(tm, basis)) return basis;
  if (n <= 40) {
    basis = commutant_exact(tm);
    if (verify_commutant(tm, basis)) return basis;
  }
  throw InvariantFailure("commutant basis fails the isotropy check");
}

namespace {

Eigen::MatrixXd orthonormal_columns(const std::vector<Eigen::VectorXd>& vs) {
  const int n = vs.empty() ? 0 : static_cast<int>(vs[0].size());
  Eigen::MatrixXd q(n, vs.size());
  for (size_t k = 0; k < vs.size(); ++k) {
    Eigen::VectorXd v = vs[k];
    for (size_t j = 0; j < k; ++j) v -= q.col(j).dot(v) * q.col(j);
    for (size_t j = 0; j < k; ++j) v -= q.col(j).dot(v) * q.col(j);
    const double nv = v.norm();
    if (nv < 1e-10) throw InvariantFailure("submodule span vectors are linearly dependent");
    q.col(k) = v / nv;
  }
  return q;
}

}  // namespace

int MetricSpace::scale_index(int module) const {
  for (int i = 0; i < dim(); ++i)
    if (kinds[i] == CoeffKind::Scale && coeff_modules[i].first == module) return i;
  return -1;
}

MetricSpace invariant_metric_space(const FlagSpec& spec, const Decomposition& dec,
                                   const std::vector<Eigen::MatrixXd>& discrete_generators) {
  for (const auto& c : dec.equiv_classes)
    if (c.size() > 2)
      throw UnimplementedCase("a block of " + std::to_string(c.size()) +
                              " pairwise equivalent summands is not solved (" + spec.to_string() + ")");
  MetricSpace ms;
  ms.tangent = tangent_model(spec, dec, discrete_generators);
  const auto& tm = *ms.tangent;
  const int n = tm.n;
  const int s = static_cast<int>(dec.submodules.size());

  std::vector<Eigen::MatrixXd> q(s);
  int total = 0;
  for (int i = 0; i < s; ++i) {
    std::vector<Eigen::VectorXd> fs;
    for (const auto& v : dec.submodules[i].span) fs.push_back(tm.from_span(v));
    q[i] = orthonormal_columns(fs);
    total += static_cast<int>(q[i].cols());
  }
  if (total != n) throw InvariantFailure("submodule dimensions do not sum to dim m_Theta");
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      if ((q[i].transpose() * q[j]).cwiseAbs().maxCoeff() > 1e-12)
        throw InvariantFailure("submodules " + dec.submodules[i].name + " and " + dec.submodules[j].name +
                               " are not orthogonal");

  auto k = commutant(tm);
  int pairs = 0;
  for (const auto& c : dec.equiv_classes) pairs += c.size() == 2;
  if (static_cast<int>(k.size()) != s + pairs)
    throw InvariantFailure("commutant has dimension " + std::to_string(k.size()) + ", expected " +
                           std::to_string(s + pairs) + " for " + spec.to_string());

  for (int i = 0; i < s; ++i) {
    Eigen::MatrixXd p = q[i] * q[i].transpose();
    Eigen::MatrixXd rest = p;
    for (const auto& h : k) rest -= (h.cwiseProduct(p).sum()) * h;
    if (rest.norm() > 1e-8) throw InvariantFailure("projector onto " + dec.submodules[i].name + " is not invariant");
    ms.operator_basis.push_back(p);
    ms.kinds.push_back(CoeffKind::Scale);
    ms.coeff_names.push_back("a:" + dec.submodules[i].name);
    ms.coeff_modules.push_back({i, i});
  }

  auto declared = [&](int i, int j) {
    for (const auto& c : dec.equiv_classes)
      if (c.size() == 2 && ((c[0] == i && c[1] == j) || (c[0] == j && c[1] == i))) return true;
    return false;
  };
  std::map<int, Eigen::MatrixXd> tau_of;  // second module of a pair -> d x d matrix into its span
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j) {
      if (declared(i, j)) continue;
      for (const auto& h : k)
        if ((q[j].transpose() * h * q[i]).cwiseAbs().maxCoeff() > 1e-8)
          throw InvariantFailure("undeclared intertwiner between " + dec.submodules[i].name + " and " +
                                 dec.submodules[j].name);
    }
  for (const auto& c : dec.equiv_classes) {
    if (c.size() != 2) continue;
    const int i = c[0], j = c[1];
    const int di = static_cast<int>(q[i].cols()), dj = static_cast<int>(q[j].cols());
    if (di != dj) throw InvariantFailure("equivalent summands of different dimension");
    Eigen::MatrixXd stack(di * dj, k.size());
    for (size_t d = 0; d < k.size(); ++d) stack.col(d) = flat(q[j].transpose() * k[d] * q[i]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int t = 0; t < sv.size(); ++t)
      if (sv[t] > 1e-8 * std::max(sv[0], 1e-300)) ++rank;
    if (sv.size() == 0 || sv[0] < 1e-8 || rank != 1)
      throw InvariantFailure("intertwiner space between " + dec.submodules[i].name + " and " +
                             dec.submodules[j].name + " has dimension " + std::to_string(sv[0] < 1e-8 ? 0 : rank));
    Eigen::MatrixXd tau = Eigen::Map<const Eigen::MatrixXd>(svd.matrixU().col(0).data(), dj, di);
    tau /= std::sqrt((tau.transpose() * tau).trace() / di);
    if ((tau.transpose() * tau - Eigen::MatrixXd::Identity(di, di)).cwiseAbs().maxCoeff() > 1e-8)
      throw InvariantFailure("intertwiner is not a multiple of an isometry");
    Eigen::VectorXd img = q[j] * tau.col(0);
    Eigen::Index at = 0;
    img.cwiseAbs().maxCoeff(&at);
    for (Eigen::Index t = 0; t < img.size(); ++t)
      if (std::abs(img[t]) > std::abs(img[at]) - 1e-9) {
        at = t;
        break;
      }
    if (img[at] < 0) tau = -tau;
    Eigen::MatrixXd t = q[j] * tau * q[i].transpose();
    ms.operator_basis.push_back(t + t.transpose());
    ms.kinds.push_back(CoeffKind::Amplitude);
    ms.coeff_names.push_back("b:" + dec.submodules[i].name + "~" + dec.submodules[j].name);
    ms.coeff_modules.push_back({i, j});
    tau_of[j] = tau;
  }

  ms.adapted.resize(n, n);
  int off = 0;
  for (int i = 0; i < s; ++i) {
    ms.offsets.push_back(off);
    auto it = tau_of.find(i);
    Eigen::MatrixXd cols = q[i];
    if (it != tau_of.end()) cols = q[i] * it->second;
    ms.adapted.middleCols(off, cols.cols()) = cols;
    off += static_cast<int>(cols.cols());
  }
  return ms;
}

MetricSpace invariant_metric_space(const FlagSpec& spec) {
  auto dec = decompose_isotropy(spec);
  auto gens = component_generators(spec);
  for (auto& g : ansatz_generators(spec)) gens.push_back(std::move(g));
  return invariant_metric_space(spec, dec, gens);
}

Eigen::MatrixXd InvariantMetric::op() const {
  const int n = space->tangent->n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < space->dim(); ++i) a += coeffs[i] * space->operator_basis[i];
  return a;
}

namespace {

struct ClassBlock {
  std::vector<int> modules;
  Eigen::MatrixXd a;
};

std::vector<ClassBlock> class_blocks(const MetricSpace& ms, const Eigen::VectorXd& c) {
  const auto& dec = ms.decomposition();
  std::vector<std::vector<int>> classes = dec.equiv_classes;
  std::sort(classes.begin(), classes.end(),
            [](const auto& x, const auto& y) { return *std::min_element(x.begin(), x.end()) < *std::min_element(y.begin(), y.end()); });
  std::vector<ClassBlock> out;
  for (const auto& cl : classes) {
    ClassBlock b;
    b.modules = cl;
    const int k = static_cast<int>(cl.size());
    b.a = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < ms.dim(); ++i) {
      auto [m1, m2] = ms.coeff_modules[i];
      auto f1 = std::find(cl.begin(), cl.end(), m1), f2 = std::find(cl.begin(), cl.end(), m2);
      if (f1 == cl.end() || f2 == cl.end()) continue;
      const int x = static_cast<int>(f1 - cl.begin()), y = static_cast<int>(f2 - cl.begin());
      b.a(x, y) = b.a(y, x) = c[i];
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

double smallest_eigenvalue(const MetricSpace& space, const Eigen::VectorXd& coeffs) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : class_blocks(space, coeffs)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.a, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()[0]);
  }
  return m;
}

InvariantMetric make_metric(std::shared_ptr<const MetricSpace> space, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != space->dim())
    throw Error("metric needs " + std::to_string(space->dim()) + " coefficients, got " + std::to_string(coeffs.size()));
  const double ev = smallest_eigenvalue(*space, coeffs);
  if (!(ev > 0)) throw NotPositiveDefinite("metric operator is not positive definite", ev);
  return InvariantMetric{std::move(space), coeffs};
}

InvariantMetric normal_metric(std::shared_ptr<const MetricSpace> space) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space->dim());
  for (int i = 0; i < space->dim(); ++i) c[i] = space->kinds[i] == CoeffKind::Scale ? 1.0 : 0.0;
  return make_metric(std::move(space), c);
}

Eigen::VectorXd Frame::vector(int i) const { return tangent->to_algebra(f.col(i)); }

Frame orthonormal_frame(const InvariantMetric& metric) {
  const auto& ms = *metric.space;
  const double s = ms.spec().inner_scale;
  Frame fr;
  fr.tangent = ms.tangent;
  fr.inner_scale = s;
  const int n = ms.tangent->n;
  fr.f.resize(n, n);
  fr.eigenvalues.resize(n);
  int col = 0;
  for (const auto& b : class_blocks(ms, metric.coeffs)) {
    const int k = static_cast<int>(b.modules.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.a);
    Eigen::MatrixXd v = es.eigenvectors();
    const auto& ev = es.eigenvalues();
    if (k > 1 && ev[k - 1] - ev[0] <= 1e-12 * std::abs(ev[k - 1])) v = Eigen::MatrixXd::Identity(k, k);
    for (int e = 0; e < k; ++e) {
      for (int t = 0; t < k; ++t)
        if (std::abs(v(t, e)) > 1e-14) {
          if (v(t, e) < 0) v.col(e) = -v.col(e);
          break;
        }
      const int d = ms.decomposition().submodules[b.modules[0]].dim();
      const double scale = 1.0 / std::sqrt(s * ev[e]);
      for (int t = 0; t < d; ++t) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int m = 0; m < k; ++m) x += v(m, e) * ms.adapted.col(ms.offsets[b.modules[m]] + t);
        fr.f.col(col) = scale * x;
        fr.eigenvalues[col] = ev[e];
        fr.module.push_back(b.modules[0]);
        ++col;
      }
    }
  }
  return fr;
}

Frame eigen_frame(const InvariantMetric& metric) {
  const auto& ms = *metric.space;
  const double s = ms.spec().inner_scale;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(metric.op());
  Frame fr;
  fr.tangent = ms.tangent;
  fr.inner_scale = s;
  fr.eigenvalues = es.eigenvalues();
  fr.f = es.eigenvectors();
  for (int i = 0; i < fr.f.cols(); ++i) {
    fr.f.col(i) /= std::sqrt(s * fr.eigenvalues[i]);
    fr.module.push_back(-1);
  }
  return fr;
}

double metric_inner(const InvariantMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return metric.space->spec().inner_scale * x.dot(metric.op() * y);
}

}  // namespace flagein
