#pragma once

#include <cstdint>
#include <vector>

#include "psml/pixel_grid.hpp"

namespace psml {

struct Pixel {
  int row = 0;
  int col = 0;
  bool operator==(const Pixel&) const = default;
};

// Quantized orientation candidates for an m x n patch: the direction from
// the fixed anchor C to a border pixel O.
struct OrientationSet {
  int m = 0;
  int n = 0;
  Pixel anchor;                   // C = (floor(m/2), ceil(n/2))
  std::vector<Pixel> candidates;  // D_O, border scan order, C removed
};

OrientationSet orientations(int m, int n);

// Assignment of patch pixels to unit-width parallel strips perpendicular
// to the C->O direction. line_index is row-major over the patch.
struct LinePartition {
  int m = 0;
  int n = 0;
  int orientation = 0;
  int p = 0;  // number of lines
  std::vector<std::uint16_t> line_index;
  std::vector<std::int64_t> pixel_count;  // N_i
  std::vector<std::int64_t> gray_sum;     // S_i

  int line_of(int r, int c) const { return line_index[std::size_t(r) * n + c]; }
};

// Geometry only (no pixel statistics); usable by the decoder, which has no
// source patch. The binning rule is part of the codestream format.
LinePartition partition_geometry(int m, int n, const OrientationSet& orient,
                                 int orientation_index);

LinePartition partition(const PatchView& patch, const OrientationSet& orient,
                        int orientation_index);

}  // namespace psml
