#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "cstraj/oracle.hpp"
#include "test_support.hpp"

using namespace cstraj;
namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("basis operator matrices") {
  ModelParams m(1.0, 1.3, 1.0, 0.0);
  SpectralBasis basis(m, 24);
  const double b2 = 1.3 * 1.3;

  SUBCASE("q2 and p2 patterns and values") {
    for (std::size_t i = 0; i < basis.N; ++i) {
      for (std::size_t j = 0; j < basis.N; ++j) {
        const std::size_t d = i > j ? i - j : j - i;
        if (d != 0 && d != 2) {
          CHECK(basis.q2.at(i, j) == 0.0);
          CHECK(basis.p2.at(i, j) == 0.0);
        }
      }
      CHECK(basis.q2.at(i, i) ==
            doctest::Approx(b2 * (i + 0.5)).epsilon(1e-14));
      CHECK(basis.p2.at(i, i) ==
            doctest::Approx((1.0 / b2) * (i + 0.5)).epsilon(1e-14));
    }
    CHECK(basis.q2.at(0, 2) ==
          doctest::Approx(0.5 * b2 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(basis.p2.at(0, 2) ==
          doctest::Approx(-0.5 / b2 * std::sqrt(2.0)).epsilon(1e-14));
  }

  SUBCASE("q4 equals the explicit ladder formula") {
    const double b4 = b2 * b2;
    for (std::size_t n = 0; n < basis.N; ++n) {
      const double nn = static_cast<double>(n);
      CHECK(basis.q4.at(n, n) ==
            doctest::Approx(0.25 * b4 * 3.0 * (2.0 * nn * nn + 2.0 * nn + 1.0))
                .epsilon(1e-12));
      if (n + 2 < basis.N) {
        const double v = 0.25 * b4 * (4.0 * nn + 6.0) *
                         std::sqrt((nn + 1.0) * (nn + 2.0));
        CHECK(basis.q4.at(n, n + 2) == doctest::Approx(v).epsilon(1e-12));
        CHECK(basis.q4.at(n + 2, n) == doctest::Approx(v).epsilon(1e-12));
      }
      if (n + 4 < basis.N) {
        const double v = 0.25 * b4 *
                         std::sqrt((nn + 1.0) * (nn + 2.0) * (nn + 3.0) *
                                   (nn + 4.0));
        CHECK(basis.q4.at(n, n + 4) == doctest::Approx(v).epsilon(1e-12));
      }
      for (std::size_t j = 0; j < basis.N; ++j) {
        const std::size_t d = n > j ? n - j : j - n;
        if (d != 0 && d != 2 && d != 4) CHECK(basis.q4.at(n, j) == 0.0);
      }
    }
    CHECK(basis.q4.at(0, 0) == doctest::Approx(0.75 * b4).epsilon(1e-14));
  }
}

TEST_CASE("Hamiltonian matrix blocks") {
  SUBCASE("matched harmonic basis diagonalizes its own Hamiltonian") {
    const Matrix H = build_hamiltonian_matrix(ModelParams(1, 1, 1, 0), 30);
    for (std::size_t i = 0; i < 30; ++i) {
      CHECK(H.at(i, i) == doctest::Approx(i + 0.5).epsilon(1e-14));
      for (std::size_t j = 0; j < 30; ++j)
        if (i != j) CHECK(std::abs(H.at(i, j)) < 1e-14);
    }
  }
  SUBCASE("free particle keeps only the kinetic block") {
    ModelParams m(1.0, 2.0, 0.0, 0.0);
    const Matrix H = build_hamiltonian_matrix(m, 8);
    CHECK(H.at(0, 0) == doctest::Approx(0.5 * m.c() * m.c() * 0.5));
  }
}

TEST_CASE("Jacobi diagonalization") {
  SUBCASE("diagonal input is returned unchanged with identity vectors") {
    Matrix d(5);
    for (std::size_t i = 0; i < 5; ++i) d.at(i, i) = 4.0 - double(i);
    const Eigensystem eig = diagonalize(d);
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(eig.energies[i] == doctest::Approx(double(i)).epsilon(1e-14));
  }
  SUBCASE("harmonic N = 200 energies are exact") {
    const Eigensystem eig =
        diagonalize(build_hamiltonian_matrix(ModelParams(1, 1, 1, 0), 200));
    for (std::size_t n = 0; n < 200; ++n)
      CHECK(std::abs(eig.energies[n] - (n + 0.5)) < 1e-12 * (n + 0.5));
  }
  SUBCASE("orthonormality and residual on a random symmetric matrix") {
    Matrix a(40);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < 40; ++i)
      for (std::size_t j = i; j < 40; ++j)
        a.at(i, j) = a.at(j, i) = u(testsup::rng());
    const Eigensystem eig = diagonalize(a);
    double max_e = 0.0;
    for (double e : eig.energies) max_e = std::max(max_e, std::abs(e));
    for (std::size_t i = 0; i < 40; ++i) {
      for (std::size_t j = 0; j < 40; ++j) {
        double dot = 0.0, resid_i = 0.0;
        for (std::size_t k = 0; k < 40; ++k)
          dot += eig.vectors.at(k, i) * eig.vectors.at(k, j);
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-10);
        (void)resid_i;
      }
      // residual ||H v - E v||
      double resid = 0.0;
      for (std::size_t r = 0; r < 40; ++r) {
        double hv = 0.0;
        for (std::size_t k = 0; k < 40; ++k)
          hv += a.at(r, k) * eig.vectors.at(k, i);
        const double d = hv - eig.energies[i] * eig.vectors.at(r, i);
        resid += d * d;
      }
      CHECK(std::sqrt(resid) <= 1e-8 * std::max(1.0, max_e));
    }
    for (std::size_t i = 1; i < 40; ++i)
      CHECK(eig.energies[i] >= eig.energies[i - 1]);
  }
  SUBCASE("asymmetric input is rejected") {
    Matrix a(3);
    a.at(0, 1) = 1.0;
    CHECK_THROWS_AS(diagonalize(a), InvalidArgumentError);
  }
}

TEST_CASE("pure quartic ground energy against the grid oracle") {
  const double grid_e0 = testsup::schrodinger_ground_energy(0.0, 1.0);
  CHECK(grid_e0 == doctest::Approx(0.667986).epsilon(2e-5));
  const Eigensystem eig =
      diagonalize(build_hamiltonian_matrix(ModelParams(1, 1, 0, 1), 200));
  CHECK(std::abs(eig.energies[0] - grid_e0) < 1e-5);
}

TEST_CASE("Husimi overlaps") {
  ModelParams m(1.0, 1.0, 1.0, 0.0);
  const Eigensystem eig = diagonalize(build_hamiltonian_matrix(m, 200));
  SUBCASE("ground state of the harmonic basis") {
    CoherentLabel z{0.7, -0.4};
    const Overlap o = husimi_overlap(eig, 0, z, m);
    CHECK(std::abs(o.value - std::exp(-0.5 * std::norm(z.z(m)))) < 1e-12);
    CHECK(!o.truncation_warning);
  }
  SUBCASE("z = 0 projects out the basis coefficient") {
    CoherentLabel z{0.0, 0.0};
    const Overlap o = husimi_overlap(eig, 3, z, m);
    CHECK(o.value == Complex(eig.vectors.at(0, 3), 0.0));
  }
  SUBCASE("completeness for |z| <= 3") {
    for (double q : {0.0, 2.0, 4.0}) {
      CoherentLabel z{q, 1.0};
      if (std::abs(z.z(m)) > 3.0) continue;
      double sum = 0.0;
      for (std::size_t n = 0; n < 200; ++n)
        sum += std::norm(husimi_overlap(eig, n, z, m).value);
      CHECK(std::abs(sum - 1.0) < 1e-10);
    }
  }
  SUBCASE("undecayed tails are flagged") {
    const Eigensystem small = diagonalize(build_hamiltonian_matrix(m, 10));
    CoherentLabel z{4.0, 0.0};  // |z|^2 = 8, needs far more than 10 levels
    CHECK(husimi_overlap(small, 0, z, m).truncation_warning);
  }
}

TEST_CASE("exact propagator") {
  ModelParams m(1.0, 1.0, 1.0, 0.0);
  const Eigensystem eig = diagonalize(build_hamiltonian_matrix(m, 200));
  SUBCASE("T = 0 is the overlap") {
    PropagatorLabels lab({0.5, 0.3}, {-0.2, 1.0}, 0.0);
    const Complex zi = lab.initial.z(m), zf = lab.final.z(m);
    const Complex overlap = std::exp(-0.5 * std::norm(zi) -
                                     0.5 * std::norm(zf) + std::conj(zf) * zi);
    CHECK(std::abs(exact_csp(eig, lab, m, 200).value - overlap) < 1e-12);
  }
  SUBCASE("harmonic T = pi equals -i/e") {
    PropagatorLabels lab({0.0, 1.0}, {0.0, 1.0}, kPi);
    CHECK(std::abs(exact_csp(eig, lab, m, 200).value -
                   Complex(0.0, -std::exp(-1.0))) < 1e-12);
  }
  SUBCASE("matches the closed form across T") {
    for (double T : {0.0, 0.7, 2.0, 6.4, 10.0}) {
      PropagatorLabels lab({1.2, -0.5}, {0.4, 0.9}, T);
      CHECK(std::abs(exact_csp(eig, lab, m, 200).value -
                     harmonic_closed_form(lab, m)) < 1e-10);
    }
  }
  SUBCASE("level bounds are validated") {
    PropagatorLabels lab({0.0, 1.0}, {0.0, 1.0}, 1.0);
    CHECK_THROWS_AS(exact_csp(eig, lab, m, 0), InvalidArgumentError);
    CHECK_THROWS_AS(exact_csp(eig, lab, m, 201), InvalidArgumentError);
  }
}

TEST_CASE("harmonic closed form") {
  ModelParams m(1.0, 1.0, 1.0, 0.0);
  SUBCASE("T = 0 diagonal is 1") {
    PropagatorLabels lab({0.3, -0.8}, {0.3, -0.8}, 0.0);
    CHECK(std::abs(harmonic_closed_form(lab, m) - 1.0) < 1e-15);
  }
  SUBCASE("a full period flips the sign of the overlap") {
    PropagatorLabels lab0({0.9, 0.2}, {-0.3, 0.6}, 0.0);
    PropagatorLabels lab1({0.9, 0.2}, {-0.3, 0.6}, 2.0 * kPi);
    CHECK(std::abs(harmonic_closed_form(lab1, m) +
                   harmonic_closed_form(lab0, m)) < 1e-13);
  }
  SUBCASE("width mismatch is rejected") {
    ModelParams wide(1.0, 1.4, 1.0, 0.0);
    PropagatorLabels lab({0.0, 1.0}, {0.0, 1.0}, 1.0);
    CHECK_THROWS_AS(harmonic_closed_form(lab, wide), WidthMismatchError);
    ModelParams quartic(1.0, 1.0, 1.0, 0.1);
    CHECK_THROWS_AS(harmonic_closed_form(lab, quartic), InvalidArgumentError);
  }
}

TEST_CASE("basis-size convergence of the propagator") {
  ModelParams m(1.0, 1.0, 0.0, 0.1);
  const Eigensystem e200 = diagonalize(build_hamiltonian_matrix(m, 200));
  const Eigensystem e400 = diagonalize(build_hamiltonian_matrix(m, 400));
  for (double T : {0.0, 1.1, 3.0}) {
    PropagatorLabels lab({0.0, 1.0}, {0.0, 1.0}, T);
    CHECK(std::abs(exact_csp(e200, lab, m, 100).value -
                   exact_csp(e400, lab, m, 100).value) < 1e-8);
  }
}

TEST_CASE("spectral oracle facade") {
  ModelParams m(1.0, 1.0, 0.0, 0.1);
  SpectralOracle oracle(m, 80, true);
  CHECK(oracle.basis_size() == 80);
  CHECK(oracle.converged_levels() >= 10);
  CHECK(oracle.converged_levels() <= 80);
  PropagatorLabels lab({0.0, 1.0}, {0.0, 1.0}, 0.0);
  // the auto level cutoff leaves a small completeness tail at T = 0
  CHECK(std::abs(oracle.csp(lab).value - 1.0) < 1e-8);
  CHECK(std::abs(oracle.csp(lab, 80).value - 1.0) < 1e-12);
  CHECK(oracle.energy(1) > oracle.energy(0));
}
