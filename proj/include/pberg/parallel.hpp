#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial reference in
// pberg::par::serial that the tests compare against and bench/ times.

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <omp.h>

#include "pberg/domain.hpp"

namespace pberg::par {

/// Worker count: omp_get_max_threads() capped by $PBERG_THREADS.
int thread_count();

/// Evaluates f(0..n-1), possibly in parallel. Results come back in index
/// order; if any call throws, the exception of the lowest index is rethrown.
template <class F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const int nt = thread_count();
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt) if (nt > 1 && n > 1)
  for (long i = 0; i < count; ++i) {
    try {
      slots[i].emplace(f(static_cast<std::size_t>(i)));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Gram matrices of raw powers z^e over a polar tensor grid.
///
/// hermitian(a)(j,k) = sum_i a_i conj(z_i^{e_j}) z_i^{e_k}
/// symmetric(b)(j,k) = sum_i b_i z_i^{e_j} z_i^{e_k}
///
/// On a tensor grid the angular sum per ring is one DFT of the node values,
/// so assembly costs O(rings * n_theta * freqs + rings * n^2) instead of
/// O(nodes * n^2). Rows are split across threads; every entry is summed in
/// ring order, so results do not depend on the thread count.
class GramPlan {
public:
  GramPlan(const PolarLayout& layout, std::vector<int> powers);

  Eigen::MatrixXcd hermitian(const Eigen::VectorXd& a) const;
  Eigen::MatrixXcd symmetric(const Eigen::VectorXcd& b) const;

  const std::vector<int>& powers() const noexcept { return powers_; }
  const PolarLayout& layout() const noexcept { return layout_; }

private:
  Eigen::MatrixXcd ring_spectrum(const Eigen::MatrixXcd& values,
                                 const Eigen::MatrixXcd& twiddle) const;

  PolarLayout layout_;
  std::vector<int> powers_;
  int e_min_ = 0;
  int e_max_ = 0;
  Eigen::MatrixXd ring_pow_;      // rings x n: r^{e_k}
  Eigen::MatrixXcd twiddle_h_;    // n_theta x (2 span + 1): e^{i m theta_j}, m in [-span, span]
  Eigen::MatrixXcd twiddle_s_;    // n_theta x (2 span + 1): m in [2 e_min, 2 e_max]
};

/// Dense fallback for grids without tensor layout: B^H diag(a) B.
Eigen::MatrixXcd dense_gram_hermitian(const Eigen::MatrixXcd& B, const Eigen::VectorXd& a);
Eigen::MatrixXcd dense_gram_symmetric(const Eigen::MatrixXcd& B, const Eigen::VectorXcd& b);

/// sum_i w_i |f_i|^p, chunked so the rounding does not depend on threads.
double weighted_pnorm_pow(const Eigen::VectorXcd& f, const Eigen::VectorXd& w, double p);

namespace serial {

Eigen::MatrixXcd gram_hermitian(const std::vector<cplx>& nodes, const std::vector<int>& powers,
                                const Eigen::VectorXd& a);
Eigen::MatrixXcd gram_symmetric(const std::vector<cplx>& nodes, const std::vector<int>& powers,
                                const Eigen::VectorXcd& b);
double weighted_pnorm_pow(const Eigen::VectorXcd& f, const Eigen::VectorXd& w, double p);

}  // namespace serial

}  // namespace pberg::par
