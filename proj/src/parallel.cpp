#include "pberg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "pberg/error.hpp"

namespace pberg::par {

int thread_count() {
  int nt = omp_get_max_threads();
  if (const char* env = std::getenv("PBERG_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) nt = std::min(nt, cap);
  }
  return std::max(nt, 1);
}

namespace {

cplx ipow(cplx z, int e) {
  if (e < 0) return 1.0 / ipow(z, -e);
  cplx r = 1.0;
  cplx b = z;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

Eigen::MatrixXcd make_twiddle(const PolarLayout& layout, int m_lo, int m_hi) {
  const int nm = m_hi - m_lo + 1;
  Eigen::MatrixXcd t(layout.n_theta, nm);
  const double dtheta = 2.0 * std::numbers::pi / layout.n_theta;
  for (int j = 0; j < layout.n_theta; ++j) {
    for (int m = 0; m < nm; ++m) {
      // Reduce the phase before sin/cos to keep large |m| accurate.
      const long mj = static_cast<long>(m + m_lo) * j;
      const long red = ((mj % layout.n_theta) + layout.n_theta) % layout.n_theta;
      t(j, m) = std::polar(1.0, (m + m_lo) * layout.theta0 + red * dtheta);
    }
  }
  return t;
}

constexpr std::size_t kChunk = 512;

}  // namespace

GramPlan::GramPlan(const PolarLayout& layout, std::vector<int> powers)
    : layout_(layout), powers_(std::move(powers)) {
  require(!powers_.empty(), ErrorCode::Parameter, "empty power list");
  require(layout_.n_theta > 0 && layout_.n_rings() > 0, ErrorCode::Parameter,
          "empty polar layout");
  e_min_ = *std::min_element(powers_.begin(), powers_.end());
  e_max_ = *std::max_element(powers_.begin(), powers_.end());
  const int n = static_cast<int>(powers_.size());
  ring_pow_.resize(layout_.n_rings(), n);
  for (int ring = 0; ring < layout_.n_rings(); ++ring) {
    const double r = layout_.radii[ring];
    for (int k = 0; k < n; ++k) ring_pow_(ring, k) = std::pow(r, powers_[k]);
  }
  const int span = e_max_ - e_min_;
  twiddle_h_ = make_twiddle(layout_, -span, span);
  twiddle_s_ = make_twiddle(layout_, 2 * e_min_, 2 * e_max_);
}

Eigen::MatrixXcd GramPlan::ring_spectrum(const Eigen::MatrixXcd& values,
                                         const Eigen::MatrixXcd& twiddle) const {
  return values * twiddle;
}

Eigen::MatrixXcd GramPlan::hermitian(const Eigen::VectorXd& a) const {
  require(a.size() == layout_.n_nodes(), ErrorCode::Parameter, "node value size mismatch");
  const int rings = layout_.n_rings();
  const int n = static_cast<int>(powers_.size());
  // Row-major view: values(ring, j) = a[ring * n_theta + j].
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      av(a.data(), rings, layout_.n_theta);
  const Eigen::MatrixXcd spec = ring_spectrum(av.cast<cplx>(), twiddle_h_);
  const int span = e_max_ - e_min_;

  Eigen::MatrixXcd g(n, n);
  const int nt = thread_count();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1 && n >= 16)
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const int col = powers_[k] - powers_[j] + span;
      cplx s = 0.0;
      for (int ring = 0; ring < rings; ++ring) {
        s += (ring_pow_(ring, j) * ring_pow_(ring, k)) * spec(ring, col);
      }
      g(j, k) = s;
    }
  }
  for (int j = 0; j < n; ++j) {
    g(j, j) = cplx(g(j, j).real(), 0.0);
    for (int k = j + 1; k < n; ++k) g(k, j) = std::conj(g(j, k));
  }
  return g;
}

Eigen::MatrixXcd GramPlan::symmetric(const Eigen::VectorXcd& b) const {
  require(b.size() == layout_.n_nodes(), ErrorCode::Parameter, "node value size mismatch");
  const int rings = layout_.n_rings();
  const int n = static_cast<int>(powers_.size());
  const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      bv(b.data(), rings, layout_.n_theta);
  const Eigen::MatrixXcd spec = ring_spectrum(bv, twiddle_s_);

  Eigen::MatrixXcd g(n, n);
  const int nt = thread_count();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1 && n >= 16)
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const int col = powers_[k] + powers_[j] - 2 * e_min_;
      cplx s = 0.0;
      for (int ring = 0; ring < rings; ++ring) {
        s += (ring_pow_(ring, j) * ring_pow_(ring, k)) * spec(ring, col);
      }
      g(j, k) = s;
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) g(k, j) = g(j, k);
  }
  return g;
}

Eigen::MatrixXcd dense_gram_hermitian(const Eigen::MatrixXcd& B, const Eigen::VectorXd& a) {
  Eigen::MatrixXcd g = B.adjoint() * (a.cast<cplx>().asDiagonal() * B);
  return 0.5 * (g + g.adjoint());
}

Eigen::MatrixXcd dense_gram_symmetric(const Eigen::MatrixXcd& B, const Eigen::VectorXcd& b) {
  Eigen::MatrixXcd g = B.transpose() * (b.asDiagonal() * B);
  return 0.5 * (g + g.transpose());
}

double weighted_pnorm_pow(const Eigen::VectorXcd& f, const Eigen::VectorXd& w, double p) {
  require(f.size() == w.size(), ErrorCode::Parameter, "size mismatch");
  const std::size_t n = static_cast<std::size_t>(f.size());
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  const int nt = thread_count();
  const long nc = static_cast<long>(chunks);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1 && chunks > 4)
  for (long c = 0; c < nc; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (w[i] == 0.0) continue;
      const double m = std::abs(f[i]);
      s += w[i] * (p == 2.0 ? m * m : std::pow(m, p));
    }
    partial[c] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

namespace serial {

Eigen::MatrixXcd gram_hermitian(const std::vector<cplx>& nodes, const std::vector<int>& powers,
                                const Eigen::VectorXd& a) {
  const int n = static_cast<int>(powers.size());
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  std::vector<cplx> row(n);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (int k = 0; k < n; ++k) row[k] = ipow(nodes[i], powers[k]);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) g(j, k) += a[i] * std::conj(row[j]) * row[k];
    }
  }
  return g;
}

Eigen::MatrixXcd gram_symmetric(const std::vector<cplx>& nodes, const std::vector<int>& powers,
                                const Eigen::VectorXcd& b) {
  const int n = static_cast<int>(powers.size());
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  std::vector<cplx> row(n);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (int k = 0; k < n; ++k) row[k] = ipow(nodes[i], powers[k]);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) g(j, k) += b[i] * row[j] * row[k];
    }
  }
  return g;
}

double weighted_pnorm_pow(const Eigen::VectorXcd& f, const Eigen::VectorXd& w, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += w[i] * std::pow(std::abs(f[i]), p);
  return s;
}

}  // namespace serial

}  // namespace pberg::par
