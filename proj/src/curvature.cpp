#include "flagein/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "flagein/errors.hpp"

namespace flagein {

namespace {

// out(i,j,k) = sum_r [F_i, F_j]_r G_rk, k fastest
std::vector<double> contract(const TangentModel& tm, const Eigen::MatrixXd& F, const Eigen::MatrixXd& G) {
  const int n = tm.n;
  // bracket entries grouped by target r: (q, p, v) means Gamma(p, q, r) = v
  std::vector<std::vector<std::array<double, 3>>> by_r(n);
  for (const auto& b : tm.brackets) {
    by_r[b.r].push_back({double(b.q), double(b.p), b.value});
    by_r[b.r].push_back({double(b.p), double(b.q), -b.value});
  }
  Eigen::MatrixXd dt = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n) * n);  // (r, i*n + j)
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < n; ++r) {
    if (by_r[r].empty()) continue;
    std::map<int, int> qcol;
    for (const auto& e : by_r[r]) qcol.emplace(static_cast<int>(e[0]), 0);
    int m = 0;
    for (auto& [q, c] : qcol) c = m++;
    Eigen::MatrixXd t1 = Eigen::MatrixXd::Zero(n, m);  // (i, q) -> sum_p F_pi Gamma(p,q,r)
    Eigen::MatrixXd fq(m, n);
    for (auto& [q, c] : qcol) fq.row(c) = F.row(q);
    for (const auto& e : by_r[r]) t1.col(qcol[static_cast<int>(e[0])]) += e[2] * F.row(static_cast<int>(e[1])).transpose();
    Eigen::MatrixXd d = t1 * fq;  // (i, j)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dt(r, static_cast<Eigen::Index>(i) * n + j) = d(i, j);
  }
  std::vector<double> out(static_cast<size_t>(n) * n * n);
  Eigen::Map<Eigen::MatrixXd> cm(out.data(), n, static_cast<Eigen::Index>(n) * n);
  cm.noalias() = G.transpose() * dt;
  return out;
}

// sA recovered from the frame: F F^T = (sA)^{-1}
Eigen::MatrixXd scaled_operator(const Frame& frame) {
  return (frame.f * frame.f.transpose()).inverse();
}

}  // namespace

FrameTensor frame_tensor(const Frame& frame) {
  FrameTensor t;
  t.n = frame.size();
  t.c = contract(*frame.tangent, frame.f, scaled_operator(frame) * frame.f);
  return t;
}

FrameTensor frame_tensor_serial(const Frame& frame) {
  const auto& tm = *frame.tangent;
  const int n = frame.size();
  const Eigen::MatrixXd g = scaled_operator(frame) * frame.f;
  FrameTensor t;
  t.n = n;
  t.c.assign(static_cast<size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd c = g.transpose() * tm.bracket_m(frame.f.col(i), frame.f.col(j));
      for (int k = 0; k < n; ++k) {
        t.c[(static_cast<size_t>(i) * n + j) * n + k] = c[k];
        t.c[(static_cast<size_t>(j) * n + i) * n + k] = -c[k];
      }
    }
  return t;
}

RicciForm ricci_form(const InvariantMetric& metric, const Frame& frame, bool parallel) {
  (void)metric;
  const int n = frame.size();
  RicciForm out;
  out.frame = frame;
  out.matrix = Eigen::MatrixXd::Zero(n, n);
  out.z = Eigen::VectorXd::Zero(n);
  if (n == 0) return out;
  FrameTensor t = parallel ? frame_tensor(frame) : frame_tensor_serial(frame);
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  Eigen::Map<const Eigen::MatrixXd> m1(t.c.data(), n, n2);  // (k, i*n+j)
  Eigen::Map<const Eigen::MatrixXd> m2(t.c.data(), n2, n);  // (j*n+k, i)
  const Eigen::MatrixXd killing = frame.f.transpose() * frame.tangent->killing * frame.f;
  Eigen::MatrixXd ric = -0.5 * (m2.transpose() * m2) - 0.5 * killing + 0.25 * (m1 * m1.transpose());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) out.z[k] += t(k, i, i);
  for (int k = 0; k < n; ++k) {
    if (out.z[k] == 0.0) continue;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) ric(p, q) -= 0.5 * out.z[k] * (t(k, p, q) + t(k, q, p));
  }
  out.matrix = 0.5 * (ric + ric.transpose());
  return out;
}

RicciForm ricci_form(const InvariantMetric& metric) { return ricci_form(metric, orthonormal_frame(metric)); }

Eigen::VectorXd u_map(const InvariantMetric& metric, const Frame& frame, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y) {
  const auto& tm = *frame.tangent;
  const Eigen::MatrixXd sa = frame.inner_scale * metric.op();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(tm.n);
  for (int k = 0; k < frame.size(); ++k) {
    const Eigen::VectorXd w = frame.f.col(k);
    const double c = tm.bracket_m(w, x).dot(sa * y) + tm.bracket_m(w, y).dot(sa * x);
    u += 0.5 * c * w;
  }
  return u;
}

double scalar_curvature(const InvariantMetric& metric, const Frame& frame) {
  const int n = frame.size();
  if (n == 0) return 0;
  FrameTensor t = frame_tensor(frame);
  double c2 = 0;
  for (double v : t.c) c2 += v * v;
  const Eigen::MatrixXd killing = frame.f.transpose() * frame.tangent->killing * frame.f;
  double z2 = 0;
  for (int k = 0; k < n; ++k) {
    double z = 0;
    for (int i = 0; i < n; ++i) z += t(k, i, i);
    z2 += z * z;
  }
  (void)metric;
  return -0.25 * c2 - 0.5 * killing.trace() - z2;
}

double scalar_curvature(const InvariantMetric& metric) { return scalar_curvature(metric, orthonormal_frame(metric)); }

EinsteinDefect einstein_defect(const RicciForm& ric) {
  EinsteinDefect d;
  const int n = static_cast<int>(ric.matrix.rows());
  if (n == 0) return d;
  d.c_best = ric.matrix.trace() / n;
  d.residual = (ric.matrix - d.c_best * Eigen::MatrixXd::Identity(n, n)).norm();
  double logdet = 0;
  for (int i = 0; i < n; ++i) logdet += std::log(ric.frame.eigenvalues[i]);
  d.normalized_constant = d.c_best * std::exp(logdet / n);
  return d;
}

EinsteinDefect einstein_defect(const InvariantMetric& metric) { return einstein_defect(ricci_form(metric)); }

Eigen::MatrixXd ricci_bilinear(const RicciForm& ric) {
  const Eigen::MatrixXd finv = ric.frame.f.inverse();
  return finv.transpose() * ric.matrix * finv;
}

// ---------------------------------------------------------------------------

ReducedRicci::ReducedRicci(std::shared_ptr<const MetricSpace> space) : space_(std::move(space)) {
  const auto& ms = *space_;
  const auto& dec = ms.decomposition();
  const auto& tm = *ms.tangent;
  classes_ = dec.equiv_classes;
  std::sort(classes_.begin(), classes_.end(), [](const auto& x, const auto& y) {
    return *std::min_element(x.begin(), x.end()) < *std::min_element(y.begin(), y.end());
  });
  for (const auto& c : classes_) class_dim_.push_back(dec.submodules[c[0]].dim());
  for (int c = 0; c < static_cast<int>(classes_.size()); ++c) {
    const int k = static_cast<int>(classes_[c].size());
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) slots_.push_back({c, a, b});
  }
  const int n = tm.n;
  std::vector<double> g = n ? contract(tm, ms.adapted, ms.adapted) : std::vector<double>{};
  auto gamma = [&](int p, int q, int r) { return g[(static_cast<size_t>(p) * n + q) * n + r]; };
  auto index = [&](int c, int sigma, int t) { return ms.offsets[classes_[c][sigma]] + t; };
  const int ns = static_cast<int>(slots_.size());
  w_.assign(static_cast<size_t>(ns) * ns * ns, 0.0);
  for (int x = 0; x < ns; ++x)
    for (int y = 0; y < ns; ++y)
      for (int z = 0; z < ns; ++z) {
        const auto& sx = slots_[x];
        const auto& sy = slots_[y];
        const auto& sz = slots_[z];
        double acc = 0;
        for (int t1 = 0; t1 < class_dim_[sx.cls]; ++t1)
          for (int t2 = 0; t2 < class_dim_[sy.cls]; ++t2)
            for (int t3 = 0; t3 < class_dim_[sz.cls]; ++t3) {
              const double a = gamma(index(sx.cls, sx.a, t1), index(sy.cls, sy.a, t2), index(sz.cls, sz.a, t3));
              if (a == 0.0) continue;
              acc += a * gamma(index(sx.cls, sx.b, t1), index(sy.cls, sy.b, t2), index(sz.cls, sz.b, t3));
            }
        w_[(static_cast<size_t>(x) * ns + y) * ns + z] = acc;
      }
  for (int c = 0, o = 0; c < static_cast<int>(classes_.size()); ++c) {
    class_offset_.push_back(o);
    o += static_cast<int>(classes_[c].size() * classes_[c].size());
  }
  coeff_slots_.resize(ms.dim());
  for (int i = 0; i < ms.dim(); ++i) {
    auto b = unit_blocks(i);
    for (int x = 0; x < ns; ++x)
      if (b[slots_[x].cls](slots_[x].a, slots_[x].b) != 0.0) coeff_slots_[i].push_back(x);
  }
  const Eigen::MatrixXd kap = ms.adapted.transpose() * tm.killing * ms.adapted;
  killing_trace_.resize(ms.dim());
  norm2_.resize(ms.dim());
  for (int i = 0; i < ms.dim(); ++i) {
    auto [m1, m2] = ms.coeff_modules[i];
    const int d = dec.submodules[m1].dim();
    double tr = 0;
    for (int t = 0; t < d; ++t) tr += kap(ms.offsets[m1] + t, ms.offsets[m2] + t);
    if (ms.kinds[i] == CoeffKind::Amplitude) {
      killing_trace_[i] = 2 * tr;
      norm2_[i] = 2 * d;
    } else {
      killing_trace_[i] = tr;
      norm2_[i] = d;
    }
  }
}

std::vector<Eigen::MatrixXd> ReducedRicci::blocks(const Eigen::VectorXd& coeffs) const {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& c : classes_) out.push_back(Eigen::MatrixXd::Zero(c.size(), c.size()));
  for (int i = 0; i < space_->dim(); ++i) {
    auto [m1, m2] = space_->coeff_modules[i];
    for (size_t c = 0; c < classes_.size(); ++c) {
      auto f1 = std::find(classes_[c].begin(), classes_[c].end(), m1);
      auto f2 = std::find(classes_[c].begin(), classes_[c].end(), m2);
      if (f1 == classes_[c].end() || f2 == classes_[c].end()) continue;
      const auto a = f1 - classes_[c].begin(), b = f2 - classes_[c].begin();
      out[c](a, b) = out[c](b, a) = coeffs[i];
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> ReducedRicci::unit_blocks(int coeff) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(space_->dim());
  e[coeff] = 1;
  return blocks(e);
}

Eigen::VectorXd ReducedRicci::rho(const Eigen::VectorXd& coeffs) const {
  const double s = space_->spec().inner_scale;
  const int ns = static_cast<int>(slots_.size());
  // flat slot values of s*A and its inverse; classes have at most two modules
  std::vector<double> a(ns, 0.0), ai(ns, 0.0);
  for (int i = 0; i < space_->dim(); ++i)
    for (int x : coeff_slots_[i]) a[x] = s * coeffs[i];
  for (size_t c = 0; c < classes_.size(); ++c) {
    const int o = class_offset_[c];
    if (classes_[c].size() == 1) {
      ai[o] = 1 / a[o];
    } else {
      const double det = a[o] * a[o + 3] - a[o + 1] * a[o + 2];
      ai[o] = a[o + 3] / det;
      ai[o + 3] = a[o] / det;
      ai[o + 1] = -a[o + 1] / det;
      ai[o + 2] = -a[o + 2] / det;
    }
  }
  std::vector<double> u(ns, 0.0), v(ns, 0.0);
  for (int x = 0; x < ns; ++x)
    for (int y = 0; y < ns; ++y) {
      const double* row = &w_[(static_cast<size_t>(x) * ns + y) * ns];
      const double l = ai[y], kl = ai[x] * ai[y];
      double acc = 0;
      for (int z = 0; z < ns; ++z) {
        acc += row[z] * a[z];
        v[z] += row[z] * kl;
      }
      u[x] += l * acc;
    }
  Eigen::VectorXd r(space_->dim());
  for (int i = 0; i < space_->dim(); ++i) {
    double phi1 = 0;
    for (int x : coeff_slots_[i]) phi1 += u[x];
    // A B_i A within the class of coefficient i
    const int c = slots_[coeff_slots_[i][0]].cls;
    const int k = static_cast<int>(classes_[c].size()), o = class_offset_[c];
    double phi2 = 0;
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q) {
        double acc = 0;
        for (int x : coeff_slots_[i]) acc += a[o + p * k + slots_[x].a] * a[o + slots_[x].b * k + q];
        phi2 += v[o + p * k + q] * acc;
      }
    r[i] = (-0.5 * phi1 - 0.5 * killing_trace_[i] + 0.25 * phi2) / norm2_[i];
  }
  return r;
}

double ReducedRicci::scalar(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& r) const {
  const double s = space_->spec().inner_scale;
  auto a = blocks(coeffs);
  double acc = 0;
  for (int i = 0; i < space_->dim(); ++i) {
    auto b = unit_blocks(i);
    for (size_t c = 0; c < a.size(); ++c) {
      if (b[c].isZero()) continue;
      const Eigen::MatrixXd ai = (s * a[c]).inverse();
      acc += r[i] * class_dim_[c] * (b[c] * ai).trace();
    }
  }
  return acc;
}

double ReducedRicci::scalar(const Eigen::VectorXd& coeffs) const { return scalar(coeffs, rho(coeffs)); }

double ReducedRicci::log_det(const Eigen::VectorXd& coeffs) const {
  const double s = space_->spec().inner_scale;
  auto a = blocks(coeffs);
  double acc = 0;
  for (size_t c = 0; c < a.size(); ++c) {
    const double d = (s * a[c]).determinant();
    if (!(d > 0)) throw NotPositiveDefinite("operator block is not positive definite", d);
    acc += class_dim_[c] * std::log(d);
  }
  return acc;
}

}  // namespace flagein
