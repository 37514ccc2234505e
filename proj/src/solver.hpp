#pragma once

#include <vector>

#include "energy.hpp"
#include "field.hpp"

namespace psfs {

enum class Scheme { full, simplified, alternating };

// Depth at the coarsest pyramid level: either pointwise from the data term
// or a fronto-parallel plane at a fixed depth.
struct InitialGuess {
  enum class Kind { data_term, constant };
  Kind kind = Kind::data_term;
  double depth = 1.0;

  static InitialGuess from_data() { return {Kind::data_term, 0.0}; }
  static InitialGuess constant(double z0) { return {Kind::constant, z0}; }
};

struct SolverConfig {
  double alpha = 7.5e-5;        // smoothness weight at the finest level
  double tau = 1e-2;            // time step of the simplified scheme
  long long iterations = 100000;  // per pyramid level
  double eta = 0.8;             // downsampling factor, in (0.5, 1)
  double lambda = 1e-3;         // charbonnier contrast
  Scheme scheme = Scheme::alternating;
  PenaliserKind penaliser = PenaliserKind::charbonnier;
  int min_level_size = 8;       // coarsest level keeps min(w,h) >= this
  InitialGuess init;
};

void validate(const SolverConfig& cfg);

// Smoothness weight at pyramid level k: eta^(-4k) * alpha, compensating the
// 1/h^4 scaling of the fourth-order terms.
double scaled_alpha(double alpha, double eta, int level);

// Positivity floor applied after every explicit step.
inline constexpr double kDepthFloor = 1e-6;

struct TraceSample {
  int level = 0;
  long long iteration = 0;
  double energy = 0.0;
};

struct ReconstructionResult {
  ScalarField depth;
  ScalarField reprojection;
  std::vector<TraceSample> trace;
  int levels = 0;
};

// Gradient of the discrete energy per unit cell area under the frozen upwind
// directions of `plan` (derived from z itself when omitted). The full variant
// carries the divergence of the data-term fluxes in z_x and z_y; the
// simplified variant drops them, treating the depth gradient as lagged.
ScalarField el_gradient_full(const ScalarField& z, const ScalarField& img,
                             const EnergySettings& s);
ScalarField el_gradient_full(const ScalarField& z, const ScalarField& img,
                             const EnergySettings& s, const UpwindPlan& plan);
ScalarField el_gradient_simplified(const ScalarField& z, const ScalarField& img,
                                   const EnergySettings& s);
ScalarField el_gradient_simplified(const ScalarField& z, const ScalarField& img,
                                   const EnergySettings& s, const UpwindPlan& plan);

// One forward-Euler step z - tau*gradient, floored at kDepthFloor.
ScalarField explicit_step(const ScalarField& z, const ScalarField& gradient, double tau);

// n iterations of the selected scheme at one resolution level. The upwind
// directions are re-derived from the previous iterate before every step.
// The full scheme (and the full phase of the alternating scheme) steps with
// tau * min(hx^2, hy^2).
ScalarField run_level(const ScalarField& z0, const ScalarField& img, const EnergySettings& s,
                      const SolverConfig& cfg, int level = 0,
                      std::vector<TraceSample>* trace = nullptr);

// Pointwise data-term solution for a flat surface element: z = sqrt(Q^3/I).
ScalarField initialise(const ScalarField& img, const CameraIntrinsics& k);

// Coarse-to-fine reconstruction from a positive irradiance image.
ReconstructionResult reconstruct(const ScalarField& img, const CameraIntrinsics& k,
                                 const ScalarField& confidence, const SolverConfig& cfg);
ReconstructionResult reconstruct(const ScalarField& img, const CameraIntrinsics& k,
                                 const SolverConfig& cfg);

}  // namespace psfs
