#include "cstraj/phase.hpp"

#include <cmath>
#include <numbers>

namespace cstraj {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// s of the four quadrant cases: phi = alpha + s * pi (case 4: + 2 pi).
constexpr int kCaseS[4] = {0, 1, 1, 2};
}  // namespace

QuadrantPhase quadrant_phase(double a, double b) {
  if (a == 0.0 && b == 0.0)
    throw DegenerateInputError("quadrant_phase: a = b = 0");
  QuadrantPhase out{};
  if (a == 0.0) {
    // Limit of case 1 (b > 0) or case 4 (b < 0).
    if (b > 0.0) {
      out.alpha = 0.5 * kPi;
      out.quadrant_case = 1;
      out.phi = 0.5 * kPi;
    } else {
      out.alpha = -0.5 * kPi;
      out.quadrant_case = 4;
      out.phi = 1.5 * kPi;
    }
    return out;
  }
  out.alpha = std::atan(b / a);
  if (a > 0.0 && b >= 0.0) {
    out.quadrant_case = 1;
    out.phi = out.alpha;
  } else if (a < 0.0 && b >= 0.0) {
    out.quadrant_case = 2;
    out.phi = out.alpha + kPi;
  } else if (a < 0.0) {
    out.quadrant_case = 3;
    out.phi = out.alpha + kPi;
  } else {
    out.quadrant_case = 4;
    out.phi = out.alpha + kTwoPi;
  }
  if (out.phi >= kTwoPi) out.phi -= kTwoPi;
  return out;
}

std::vector<double> unwrap_args(std::span<const Complex> values) {
  std::vector<double> args;
  args.reserve(values.size());
  if (values.empty()) return args;
  if (std::abs(values[0]) == 0.0)
    throw DegenerateInputError("unwrap_args: zero value at index 0");
  args.push_back(std::arg(values[0]));
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (std::abs(values[k]) == 0.0)
      throw DegenerateInputError("unwrap_args: zero value at index " +
                                 std::to_string(k));
    const double step = std::arg(values[k] / values[k - 1]);
    if (std::abs(step) > 0.5 * kPi)
      throw DiscontinuityError(
          "unwrap_args: phase jump " + std::to_string(step) + " at index " +
          std::to_string(k) + " exceeds pi/2 (grid too coarse)");
    args.push_back(args.back() + step);
  }
  return args;
}

std::vector<PhaseState> track_sigma(std::span<const PrefactorResult> sweep,
                                    std::optional<double> period_hint) {
  std::vector<PhaseState> out;
  out.reserve(sweep.size());
  if (sweep.empty()) return out;

  std::vector<Complex> z(sweep.size());
  for (std::size_t k = 0; k < sweep.size(); ++k) z[k] = sweep[k].d2S;

  // Route 1: continuous unwrapping, shifted so the first point carries its
  // quadrant phase in [0, 2pi).
  const std::vector<double> raw = unwrap_args(z);
  const QuadrantPhase first = quadrant_phase(z[0].real(), z[0].imag());
  const double shift = first.phi - raw[0];  // 0 or 2 pi

  // Route 2: per-point quadrant phase plus winding counter, wrap events
  // detected from jumps of the quadrant value. Both routes must agree.
  long r = 0;
  double prev_phi = first.phi;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const QuadrantPhase qp = quadrant_phase(z[k].real(), z[k].imag());
    if (k > 0) {
      if (qp.phi - prev_phi > kPi) --r;        // wrapped clockwise past 0
      else if (prev_phi - qp.phi > kPi) ++r;   // wrapped counterclockwise
      prev_phi = qp.phi;
    }
    PhaseState st;
    st.alpha = qp.alpha;
    st.quadrant_case = qp.quadrant_case;
    st.s = kCaseS[qp.quadrant_case - 1];
    st.r = r;
    st.sigma = 0.5 * (raw[k] + shift);
    st.tau = period_hint;

    const double sigma_quadrant = 0.5 * qp.phi + static_cast<double>(r) * kPi;
    if (std::abs(sigma_quadrant - st.sigma) > 1e-9)
      throw DiscontinuityError(
          "track_sigma: quadrant bookkeeping and continuous unwrapping "
          "disagree at index " +
          std::to_string(k));
    out.push_back(st);
  }
  return out;
}

}  // namespace cstraj
