#pragma once

#include <cmath>
#include <complex>
#include <optional>

#include "cstraj/errors.hpp"

namespace cstraj {

using Complex = std::complex<double>;

// Physical parameters of H = p^2/2 + lambda q^2/2 + beta q^4 (unit mass).
// The momentum width c is always derived as hbar/b, so b*c = hbar holds by
// construction.
struct ModelParams {
  double hbar;
  double b;
  double lambda;
  double beta;

  ModelParams(double hbar_, double b_, double lambda_, double beta_)
      : hbar(hbar_), b(b_), lambda(lambda_), beta(beta_) {
    if (!(hbar > 0.0)) throw InvalidArgumentError("hbar must be > 0");
    if (!(b > 0.0)) throw InvalidArgumentError("b must be > 0");
    if (!(beta >= 0.0)) throw InvalidArgumentError("beta must be >= 0");
  }

  double c() const { return hbar / b; }
};

// Mean position/momentum of a minimum-uncertainty packet. The complex label
// z = (q/b + i p/c)/sqrt(2) is always recomputed from (q, p), never stored.
struct CoherentLabel {
  double q = 0.0;
  double p = 0.0;

  Complex z(const ModelParams& m) const {
    return Complex(q / m.b, p / m.c()) / std::sqrt(2.0);
  }
};

// Boundary data of one propagator element: initial label z', final label z''
// and the propagation time T.
struct PropagatorLabels {
  CoherentLabel initial;
  CoherentLabel final;
  double T = 0.0;

  PropagatorLabels() = default;
  PropagatorLabels(CoherentLabel initial_, CoherentLabel final_, double T_)
      : initial(initial_), final(final_), T(T_) {
    if (!(T >= 0.0)) throw InvalidArgumentError("T must be >= 0");
  }

  // u' = z' and v'' = conj(z''), the two fixed trajectory boundary values.
  Complex u_initial(const ModelParams& m) const { return initial.z(m); }
  Complex v_final(const ModelParams& m) const { return std::conj(final.z(m)); }
};

// One point of complex phase space, stored as four real coordinates with
// q = x1 + i p2 and p = p1 + i x2.
struct ComplexPhasePoint {
  double x1 = 0.0;
  double p1 = 0.0;
  double x2 = 0.0;
  double p2 = 0.0;

  Complex q() const { return Complex(x1, p2); }
  Complex p() const { return Complex(p1, x2); }

  static ComplexPhasePoint from_qp(Complex q, Complex p) {
    return {q.real(), p.real(), p.imag(), q.imag()};
  }

  bool finite() const {
    return std::isfinite(x1) && std::isfinite(p1) && std::isfinite(x2) &&
           std::isfinite(p2);
  }
};

// Time derivatives of the four real coordinates.
struct FlowDerivative {
  double x1_dot = 0.0;
  double p1_dot = 0.0;
  double x2_dot = 0.0;
  double p2_dot = 0.0;
};

// Expectation value <z|H|z> as a function of the (complexified) packet
// center: Htilde = p^2/2 + lambda_eff q^2/2 + beta q^4 + E0c with
// lambda_eff = lambda + 6 beta b^2 and E0c = (c^2 + lambda b^2 + 3 beta b^4)/4.
class SmoothedHamiltonian {
 public:
  explicit SmoothedHamiltonian(const ModelParams& params)
      : params_(params),
        lambda_eff_(params.lambda + 6.0 * params.beta * params.b * params.b),
        zero_point_((params.c() * params.c() +
                     params.lambda * params.b * params.b +
                     3.0 * params.beta * std::pow(params.b, 4)) /
                    4.0) {}

  const ModelParams& params() const { return params_; }
  double lambda_eff() const { return lambda_eff_; }
  double zero_point() const { return zero_point_; }

  // Effective packet frequency sqrt(lambda_eff); empty for lambda_eff <= 0.
  std::optional<double> omega_eff() const {
    if (lambda_eff_ > 0.0) return std::sqrt(lambda_eff_);
    return std::nullopt;
  }

  // Htilde at complex arguments. Real and imaginary parts are the H1, H2
  // components of the real 4-dimensional flow.
  Complex value(Complex q, Complex p) const {
    const Complex q2 = q * q;
    return 0.5 * p * p + 0.5 * lambda_eff_ * q2 + params_.beta * q2 * q2 +
           zero_point_;
  }

  Complex value(const ComplexPhasePoint& pt) const {
    return value(pt.q(), pt.p());
  }

  // Hamiltonian flow split into the four real coordinates. Htilde is analytic,
  // so the complex equations qdot = p, pdot = -lambda_eff q - 4 beta q^3 carry
  // the full real system (x1dot, p1dot, x2dot, p2dot) =
  // (Re qdot, Re pdot, Im pdot, Im qdot).
  FlowDerivative flow(const ComplexPhasePoint& pt) const {
    const double qr = pt.x1, qi = pt.p2;
    const double qr2 = qr * qr, qi2 = qi * qi;
    // q^3 expanded to avoid complex-multiplication overhead in the integrator.
    const double q3r = qr * (qr2 - 3.0 * qi2);
    const double q3i = qi * (3.0 * qr2 - qi2);
    const double fb = 4.0 * params_.beta;
    FlowDerivative d;
    d.x1_dot = pt.p1;
    d.p2_dot = pt.x2;
    d.p1_dot = -lambda_eff_ * qr - fb * q3r;
    d.x2_dot = -lambda_eff_ * qi - fb * q3i;
    return d;
  }

  // d2Htilde/du dv = (b^2/2) Hqq + (c^2/2) Hpp with Hqq = lambda_eff +
  // 12 beta q^2 and Hpp = 1. Independent of p.
  Complex mixed_second_derivative(const ComplexPhasePoint& pt) const {
    const Complex hqq = lambda_eff_ + 12.0 * params_.beta * pt.q() * pt.q();
    const double b2 = params_.b * params_.b;
    const double c2 = params_.c() * params_.c();
    return 0.5 * b2 * hqq + 0.5 * c2;
  }

  // u, v coordinates of a phase-space point: independent complexifications of
  // z and z*.
  Complex u_of(const ComplexPhasePoint& pt) const {
    return (pt.q() / params_.b + Complex(0, 1) * pt.p() / params_.c()) /
           std::sqrt(2.0);
  }
  Complex v_of(const ComplexPhasePoint& pt) const {
    return (pt.q() / params_.b - Complex(0, 1) * pt.p() / params_.c()) /
           std::sqrt(2.0);
  }

 private:
  ModelParams params_;
  double lambda_eff_;
  double zero_point_;
};

}  // namespace cstraj
