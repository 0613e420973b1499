#include "psml/line_geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace psml {

OrientationSet orientations(int m, int n) {
  if (m < 2 || n < 2) throw std::invalid_argument("orientations: patch too small");
  OrientationSet set;
  set.m = m;
  set.n = n;
  set.anchor = Pixel{m / 2, (n + 1) / 2};
  set.candidates.reserve(std::size_t(m + n - 1));
  // Top row left to right, then right column top to bottom; the shared
  // corner (0, n-1) appears once.
  for (int y = 0; y < n; ++y) {
    Pixel o{0, y};
    if (o != set.anchor) set.candidates.push_back(o);
  }
  for (int x = 1; x < m; ++x) {
    Pixel o{x, n - 1};
    if (o != set.anchor) set.candidates.push_back(o);
  }
  return set;
}

LinePartition partition_geometry(int m, int n, const OrientationSet& orient,
                                 int orientation_index) {
  if (orientation_index < 0 ||
      orientation_index >= int(orient.candidates.size()))
    throw std::invalid_argument("partition: bad orientation index");
  const Pixel c0 = orient.anchor;
  const Pixel o = orient.candidates[std::size_t(orientation_index)];
  const int dr = o.row - c0.row;
  const int dc = o.col - c0.col;
  const double norm = std::sqrt(double(dr) * dr + double(dc) * dc);

  LinePartition part;
  part.m = m;
  part.n = n;
  part.orientation = orientation_index;
  part.line_index.resize(std::size_t(m) * n);

  // Signed perpendicular distance from C, binned by floor; IEEE-754 double
  // throughout so the decoder reproduces the exact same strips.
  std::vector<int> raw(std::size_t(m) * n);
  int min_id = 0, max_id = 0;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) {
      double s = ((r - c0.row) * double(-dc) + (c - c0.col) * double(dr)) / norm;
      int id = int(std::floor(s));
      raw[std::size_t(r) * n + c] = id;
      if (r == 0 && c == 0) {
        min_id = max_id = id;
      } else {
        if (id < min_id) min_id = id;
        if (id > max_id) max_id = id;
      }
    }
  }
  part.p = max_id - min_id + 1;
  for (std::size_t i = 0; i < raw.size(); ++i)
    part.line_index[i] = std::uint16_t(raw[i] - min_id);
  part.pixel_count.assign(std::size_t(part.p), 0);
  part.gray_sum.assign(std::size_t(part.p), 0);
  return part;
}

LinePartition partition(const PatchView& patch, const OrientationSet& orient,
                        int orientation_index) {
  LinePartition part = partition_geometry(patch.m, patch.n, orient, orientation_index);
  for (int r = 0; r < patch.m; ++r) {
    for (int c = 0; c < patch.n; ++c) {
      int id = part.line_of(r, c);
      part.pixel_count[std::size_t(id)] += 1;
      part.gray_sum[std::size_t(id)] += patch.at(r, c);
    }
  }
  return part;
}

}  // namespace psml
