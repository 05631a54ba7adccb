#include "cstraj/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cstraj {

Matrix Matrix::identity(std::size_t n_) {
  Matrix m(n_);
  for (std::size_t i = 0; i < n_; ++i) m.at(i, i) = 1.0;
  return m;
}

namespace {

// q^2 and p^2 ladder elements for an oscillator of ground width b:
// <n|q^2|n> = b^2 (n + 1/2), <n|q^2|n+2> = (b^2/2) sqrt((n+1)(n+2)),
// <n|p^2|n> = c^2 (n + 1/2), <n|p^2|n+2> = -(c^2/2) sqrt((n+1)(n+2)).
Matrix q2_matrix(double b, std::size_t N) {
  Matrix m(N);
  const double b2 = b * b;
  for (std::size_t n = 0; n < N; ++n) {
    m.at(n, n) = b2 * (static_cast<double>(n) + 0.5);
    if (n + 2 < N) {
      const double v = 0.5 * b2 *
                       std::sqrt(static_cast<double>((n + 1) * (n + 2)));
      m.at(n, n + 2) = v;
      m.at(n + 2, n) = v;
    }
  }
  return m;
}

Matrix p2_matrix(double c, std::size_t N) {
  Matrix m(N);
  const double c2 = c * c;
  for (std::size_t n = 0; n < N; ++n) {
    m.at(n, n) = c2 * (static_cast<double>(n) + 0.5);
    if (n + 2 < N) {
      const double v = -0.5 * c2 *
                       std::sqrt(static_cast<double>((n + 1) * (n + 2)));
      m.at(n, n + 2) = v;
      m.at(n + 2, n) = v;
    }
  }
  return m;
}

Matrix multiply(const Matrix& x, const Matrix& y) {
  Matrix out(x.n);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t k = 0; k < x.n; ++k) {
      const double xik = x.at(i, k);
      if (xik == 0.0) continue;
      for (std::size_t j = 0; j < x.n; ++j) out.at(i, j) += xik * y.at(k, j);
    }
  return out;
}

Matrix crop(const Matrix& m, std::size_t N) {
  Matrix out(N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out.at(i, j) = m.at(i, j);
  return out;
}

}  // namespace

SpectralBasis::SpectralBasis(const ModelParams& params, std::size_t N_)
    : N(N_) {
  if (N < 2) throw InvalidArgumentError("SpectralBasis: N must be >= 2");
  q2 = q2_matrix(params.b, N);
  p2 = p2_matrix(params.c(), N);
  // q^4 as the square of q^2 in an enlarged basis, cropped: intermediate
  // states up to N+1 contribute to the top rows, so N+4 is exact.
  const Matrix q2_big = q2_matrix(params.b, N + 4);
  q4 = crop(multiply(q2_big, q2_big), N);
}

Matrix build_hamiltonian_matrix(const ModelParams& params, std::size_t N) {
  SpectralBasis basis(params, N);
  Matrix H(N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      H.at(i, j) = 0.5 * basis.p2.at(i, j) +
                   0.5 * params.lambda * basis.q2.at(i, j) +
                   params.beta * basis.q4.at(i, j);
  return H;
}

Eigensystem diagonalize(const Matrix& H) {
  const std::size_t n = H.n;
  if (n == 0) throw InvalidArgumentError("diagonalize: empty matrix");
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      scale = std::max(scale, std::abs(H.at(i, j)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(H.at(i, j) - H.at(j, i)) > 1e-12 * std::max(1.0, scale))
        throw InvalidArgumentError("diagonalize: matrix is not symmetric");

  Matrix a = H;
  Matrix v = Matrix::identity(n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a.at(i, j) * a.at(i, j);
    return std::sqrt(2.0 * s);
  };

  const double tol = 1e-14 * std::max(1.0, scale) * static_cast<double>(n);
  bool converged = false;
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_norm() <= tol) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (apq == 0.0) continue;
        const double app = a.at(p, p), aqq = a.at(q, q);
        if (std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq) + 1.0))
          continue;
        // Classical Jacobi rotation annihilating a(p,q).
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && off_norm() > tol)
    throw NoConvergenceError("diagonalize: Jacobi did not converge in 100 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a.at(i, i) < a.at(j, j);
  });

  Eigensystem out;
  out.energies.resize(n);
  out.vectors = Matrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.energies[j] = a.at(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i)
      out.vectors.at(i, j) = v.at(i, order[j]);
  }
  return out;
}

namespace {

// <z|m>_osc of all m < N by the stable recurrence
// term_{m+1} = term_m * z* / sqrt(m+1), term_0 = exp(-|z|^2/2).
std::vector<Complex> oscillator_overlaps(const CoherentLabel& z,
                                         const ModelParams& params,
                                         std::size_t N) {
  std::vector<Complex> t(N);
  const Complex zc = std::conj(z.z(params));
  t[0] = std::exp(-0.5 * std::norm(z.z(params)));
  for (std::size_t m = 1; m < N; ++m)
    t[m] = t[m - 1] * zc / std::sqrt(static_cast<double>(m));
  return t;
}

}  // namespace

// The basis can represent |z> only if the oscillator-overlap series has died
// out by m = N-1; an undecayed tail flags truncation.
bool truncated_tail(const std::vector<Complex>& osc) {
  double peak = 0.0;
  for (const Complex& t : osc) peak = std::max(peak, std::abs(t));
  return std::abs(osc.back()) > 1e-12 * peak;
}

Overlap husimi_overlap(const Eigensystem& eig, std::size_t n,
                       const CoherentLabel& z, const ModelParams& params) {
  const std::size_t N = eig.energies.size();
  if (n >= N) throw InvalidArgumentError("husimi_overlap: level out of range");
  const std::vector<Complex> osc = oscillator_overlaps(z, params, N);
  Complex sum = 0.0;
  for (std::size_t m = 0; m < N; ++m) sum += eig.vectors.at(m, n) * osc[m];
  return {sum, truncated_tail(osc)};
}

Overlap exact_csp(const Eigensystem& eig, const PropagatorLabels& labels,
                  const ModelParams& params, std::size_t n_levels) {
  const std::size_t N = eig.energies.size();
  if (n_levels < 1 || n_levels > N)
    throw InvalidArgumentError("exact_csp: n_levels must be in [1, N]");
  const std::vector<Complex> osc_f =
      oscillator_overlaps(labels.final, params, N);
  const std::vector<Complex> osc_i =
      oscillator_overlaps(labels.initial, params, N);

  Overlap out{Complex(0.0, 0.0),
              truncated_tail(osc_f) || truncated_tail(osc_i)};
  for (std::size_t nl = 0; nl < n_levels; ++nl) {
    Complex zf = 0.0, zi = 0.0;
    for (std::size_t m = 0; m < N; ++m) {
      const double vmn = eig.vectors.at(m, nl);
      zf += vmn * osc_f[m];
      zi += vmn * osc_i[m];
    }
    const Complex phase =
        std::exp(Complex(0.0, -eig.energies[nl] * labels.T / params.hbar));
    out.value += zf * std::conj(zi) * phase;
  }
  return out;
}

Complex harmonic_closed_form(const PropagatorLabels& labels,
                             const ModelParams& params) {
  if (params.beta != 0.0)
    throw InvalidArgumentError("harmonic_closed_form: requires beta = 0");
  if (!(params.lambda > 0.0))
    throw InvalidArgumentError("harmonic_closed_form: requires lambda > 0");
  const double omega = std::sqrt(params.lambda);
  const double b_match = std::sqrt(params.hbar / omega);
  if (std::abs(params.b - b_match) > 1e-12 * b_match)
    throw WidthMismatchError(
        "harmonic_closed_form: b must equal sqrt(hbar/omega) = " +
        std::to_string(b_match));
  const Complex zi = labels.initial.z(params);
  const Complex zf = labels.final.z(params);
  const Complex rot = std::exp(Complex(0.0, -omega * labels.T));
  return std::exp(-0.5 * std::norm(zi) - 0.5 * std::norm(zf) +
                  std::conj(zf) * zi * rot +
                  Complex(0.0, -0.5 * omega * labels.T));
}

SpectralOracle::SpectralOracle(const ModelParams& params, std::size_t N,
                               bool check_convergence)
    : params_(params), N_(N) {
  eig_ = diagonalize(build_hamiltonian_matrix(params, N));
  converged_levels_ = N;
  if (check_convergence) {
    const Eigensystem eig2 = diagonalize(build_hamiltonian_matrix(params, 2 * N));
    std::size_t n = 0;
    while (n < N && std::abs(eig_.energies[n] - eig2.energies[n]) < 1e-10)
      ++n;
    converged_levels_ = std::max<std::size_t>(n, 1);
  }
}

Overlap SpectralOracle::csp(const PropagatorLabels& labels,
                            std::size_t n_levels) const {
  const std::size_t nl = n_levels == 0 ? converged_levels_ : n_levels;
  return exact_csp(eig_, labels, params_, nl);
}

}  // namespace cstraj
