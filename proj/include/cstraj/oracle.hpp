#pragma once

#include <cstddef>
#include <vector>

#include "cstraj/model.hpp"

namespace cstraj {

// Dense symmetric/general square matrix, row-major. Self-contained so the
// oracle carries no linear-algebra dependency.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  static Matrix identity(std::size_t n_);
};

// Operator matrices of q^2, q^4, p^2 in the occupation basis of a harmonic
// oscillator whose ground width equals the coherent width b (frequency
// hbar/b^2 at unit mass). q^4 is the square of q^2 built in an enlarged basis
// and cropped, so the two agree exactly with the explicit matrix elements.
struct SpectralBasis {
  std::size_t N = 0;
  Matrix q2;
  Matrix q4;
  Matrix p2;

  SpectralBasis(const ModelParams& params, std::size_t N);
};

// Eigendecomposition of a real symmetric matrix; energies ascend, vectors are
// orthonormal coefficient columns in the oscillator basis.
struct Eigensystem {
  std::vector<double> energies;
  Matrix vectors;  // column j = eigenvector of energies[j]
};

// H = P2/2 + lambda Q2/2 + beta Q4 in the oscillator basis of width b.
Matrix build_hamiltonian_matrix(const ModelParams& params, std::size_t N);

// Full eigendecomposition by cyclic Jacobi rotations. Throws
// NoConvergenceError after 100 sweeps and InvalidArgumentError for
// non-symmetric input.
Eigensystem diagonalize(const Matrix& H);

struct Overlap {
  Complex value;
  bool truncation_warning = false;
};

// <z|n> = sum_m v_n[m] <z|m>_osc with <z|m>_osc = exp(-|z|^2/2) (z*)^m /
// sqrt(m!), evaluated by a multiplicative recurrence. The warning flags a
// tail term above 1e-12 of the running sum at m = N-1.
Overlap husimi_overlap(const Eigensystem& eig, std::size_t n,
                       const CoherentLabel& z, const ModelParams& params);

// Exact propagator element K = sum_{n < n_levels} <z''|n><n|z'>
// exp(-i E_n T / hbar).
Overlap exact_csp(const Eigensystem& eig, const PropagatorLabels& labels,
                  const ModelParams& params, std::size_t n_levels);

// Closed-form harmonic propagator (beta = 0, lambda > 0, width-matched basis:
// b = sqrt(hbar/omega)). Throws WidthMismatchError otherwise.
Complex harmonic_closed_form(const PropagatorLabels& labels,
                             const ModelParams& params);

// Diagonalized model plus a converged-level count: the largest n whose
// eigenvalue moves by less than 1e-10 when the basis doubles.
class SpectralOracle {
 public:
  // check_convergence additionally diagonalizes at 2N to determine
  // converged_levels; otherwise all N levels are assumed usable.
  SpectralOracle(const ModelParams& params, std::size_t N,
                 bool check_convergence = true);

  const Eigensystem& eigensystem() const { return eig_; }
  std::size_t basis_size() const { return N_; }
  std::size_t converged_levels() const { return converged_levels_; }
  double energy(std::size_t n) const { return eig_.energies.at(n); }

  // K at the given labels; n_levels = 0 uses converged_levels().
  Overlap csp(const PropagatorLabels& labels, std::size_t n_levels = 0) const;

 private:
  ModelParams params_;
  std::size_t N_;
  Eigensystem eig_;
  std::size_t converged_levels_;
};

}  // namespace cstraj
