#pragma once

#include <cstdint>
#include <vector>

#include "psml/line_geometry.hpp"
#include "psml/pixel_grid.hpp"

namespace psml {

// One leaf's parallel-line approximation: bit g_i of the stream picks the
// gray class of line u_i (0 -> c1, 1 -> c2).
struct PsmlModel {
  int orientation = 0;
  std::vector<std::uint8_t> bits;  // G, length p
  double c1 = 0.0;
  double c2 = 0.0;
};

// Search state over G with class aggregates maintained incrementally.
struct FitState {
  std::vector<std::uint8_t> bits;
  std::int64_t class_sum[2] = {0, 0};    // SC_c
  std::int64_t class_count[2] = {0, 0};  // NC_c
  double sse = 0.0;
};

struct FitResult {
  PsmlModel model;
  double sse = 0.0;
  std::int64_t evaluations = 0;  // neighbor evaluations
  std::int64_t iterations = 0;   // accepted hill-climb moves
};

// Integer pixel moments of a patch.
struct PatchMoments {
  std::int64_t count = 0;
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
};

PatchMoments patch_moments(const PatchView& patch);

struct GrayFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double sse = 0.0;
};

// Class means and SSE via the second-moment identity
// SSE = sum(x^2) - NC_0*c1^2 - NC_1*c2^2. An empty class inherits the
// other class's gray.
GrayFit optimal_grays(const FitState& state, std::int64_t patch_sum_sq);

FitState make_state(const LinePartition& part, std::vector<std::uint8_t> bits,
                    std::int64_t patch_sum_sq);

// Toggle bit k; aggregates updated by +-S_k/+-N_k, no pixel or line scan.
FitState flip_line(const FitState& state, int k, const LinePartition& part,
                   std::int64_t patch_sum_sq);

// Bit i set iff line mean is strictly below the patch mean (exact integer
// comparison S_i * count < sum * N_i).
FitState initial_state(const LinePartition& part, std::int64_t patch_sum_sq);

// Steepest-descent over single-bit flips; ties on the best neighbor go to
// the smallest line index, equal-error neighbors are rejected.
FitResult hill_climb(const LinePartition& part, FitState start,
                     std::int64_t patch_sum_sq);

// Initial state + hill climb for every orientation, minimum SSE wins
// (ties: smallest orientation index). Requires m,n >= 4.
FitResult fit_patch_fast(const PatchView& patch);

// Global minimum over all orientations x all 2^p bit streams. Guarded by
// max_p; ties: smallest orientation, then lexicographically smallest G.
FitResult fit_patch_exhaustive(const PatchView& patch, int max_p);

// Paint the model over an m x n raster. With round_to_int the grays are
// rounded to the nearest integer (what the decoder produces).
std::vector<double> render(const LinePartition& part, const PsmlModel& model);
void render_into(PixelGrid& out, int row0, int col0, const LinePartition& part,
                 const PsmlModel& model);

}  // namespace psml
