#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cstraj/action.hpp"
#include "cstraj/model.hpp"

namespace cstraj {

// Quadrant classification of a complex number a + ib:
//   case 1 (a>0, b>=0): phi = alpha
//   case 2 (a<0, b>=0): phi = alpha + pi
//   case 3 (a<0, b<=0): phi = alpha + pi
//   case 4 (a>0, b<0):  phi = alpha + 2 pi
// with alpha = arctan(b/a) on the principal branch, so phi lands in [0, 2pi).
// a = 0 resolves by the sign of b (phi = pi/2 or 3pi/2); a = b = 0 is
// rejected.
struct QuadrantPhase {
  double alpha;
  int quadrant_case;  // 1..4
  double phi;
};

QuadrantPhase quadrant_phase(double a, double b);

// Phase bookkeeping of one sweep point. sigma is the continuous half-phase of
// the tracked number; r counts signed full windings relative to the per-point
// quadrant value (sigma = phi/2 + r*pi); s is the quadrant correction index
// {0, 1, 1, 2}.
struct PhaseState {
  double alpha = 0.0;
  int quadrant_case = 1;
  int s = 0;
  long r = 0;
  double sigma = 0.0;
  std::optional<double> tau;
};

// Continuously unwrapped arguments of a nonzero complex sequence: element 0
// is the principal argument of values[0], and each increment is the principal
// argument of the ratio of consecutive values. Throws DiscontinuityError when
// an increment exceeds pi/2 (grid too coarse / branch lost).
std::vector<double> unwrap_args(std::span<const Complex> values);

// True half-phase sigma(T) of d2S along an ascending-T sweep: per-point
// quadrant phase continued across branch cuts, seeded at the first point with
// the quadrant value in [0, 2pi). Implemented twice (quadrant bookkeeping and
// continuous unwrapping); the two must agree to roundoff or the sweep is
// rejected.
std::vector<PhaseState> track_sigma(std::span<const PrefactorResult> sweep,
                                    std::optional<double> period_hint = {});

}  // namespace cstraj
