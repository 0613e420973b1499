#pragma once

#include <cstdint>
#include <vector>

#include "psml/line_geometry.hpp"

namespace psml {

// An edge between two border pixels of a patch, unordered and canonicalized
// so v1 precedes v2 in border scan order.
struct Beamlet {
  Pixel v1;
  Pixel v2;
};

// Dictionary index M_W(S) denotes the constant atom; beamlet wedgelets use
// indices [0, M_W).
struct WedgeletFit {
  int index = 0;
  double ca = 0.0;  // gray of the cross >= 0 side
  double cb = 0.0;
  double sse = 0.0;
  std::int64_t side_sum[2] = {0, 0};
  std::int64_t side_count[2] = {0, 0};
};

// Border pixels of an m x n patch: top row left to right, right column top
// to bottom, bottom row right to left, left column bottom to top.
std::vector<Pixel> border_pixels(int m, int n);

// All border-pixel pairs whose segment crosses the patch interior (pairs on
// a single border line bound no interior and are excluded).
std::vector<Beamlet> enumerate_beamlets(int m, int n);

std::size_t dictionary_size(int m, int n);  // M_W, excluding constant atom

// Pixel side for a beamlet: cross = dr*(c - c1) - dc*(r - r1); side A holds
// cross >= 0 (on-line pixels included). Exact integer arithmetic.
bool on_side_a(const Beamlet& b, int r, int c);

// Best atom over {constant} + all beamlets; side grays are side means;
// beamlet ties go to the smallest index, the constant atom wins ties
// against beamlets.
WedgeletFit fit_wedgelet(const PatchView& patch);
WedgeletFit fit_wedgelet(const PatchView& patch,
                         const std::vector<Beamlet>& dict);

void render_wedgelet_into(PixelGrid& out, int row0, int col0, int m, int n,
                          const std::vector<Beamlet>& dict,
                          const WedgeletFit& fit);

}  // namespace psml
