#include "psml/wedgelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace psml {

std::vector<Pixel> border_pixels(int m, int n) {
  if (m < 2 || n < 2) throw std::invalid_argument("border_pixels: patch too small");
  std::vector<Pixel> border;
  border.reserve(std::size_t(2 * (m + n) - 4));
  for (int c = 0; c < n; ++c) border.push_back({0, c});
  for (int r = 1; r < m; ++r) border.push_back({r, n - 1});
  for (int c = n - 2; c >= 0; --c) border.push_back({m - 1, c});
  for (int r = m - 2; r >= 1; --r) border.push_back({r, 0});
  return border;
}

namespace {

// Pairs on one border line leave the interior on a single side.
bool same_border_line(const Pixel& a, const Pixel& b, int m, int n) {
  if (a.row == b.row && (a.row == 0 || a.row == m - 1)) return true;
  if (a.col == b.col && (a.col == 0 || a.col == n - 1)) return true;
  return false;
}

}  // namespace

std::vector<Beamlet> enumerate_beamlets(int m, int n) {
  std::vector<Pixel> border = border_pixels(m, n);
  std::vector<Beamlet> dict;
  for (std::size_t i = 0; i < border.size(); ++i) {
    for (std::size_t j = i + 1; j < border.size(); ++j) {
      if (same_border_line(border[i], border[j], m, n)) continue;
      dict.push_back({border[i], border[j]});
    }
  }
  return dict;
}

std::size_t dictionary_size(int m, int n) { return enumerate_beamlets(m, n).size(); }

bool on_side_a(const Beamlet& b, int r, int c) {
  std::int64_t dr = b.v2.row - b.v1.row;
  std::int64_t dc = b.v2.col - b.v1.col;
  std::int64_t cross = dr * (c - b.v1.col) - dc * (r - b.v1.row);
  return cross >= 0;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  // b > 0
  std::int64_t q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  // b > 0
  std::int64_t q = a / b;
  if (a % b != 0 && a > 0) ++q;
  return q;
}

struct SideAccum {
  std::int64_t sum[2] = {0, 0};
  std::int64_t count[2] = {0, 0};
};

double two_mean_sse(std::int64_t sum_sq, const SideAccum& acc, double* ca, double* cb) {
  double mean[2] = {0.0, 0.0};
  for (int s = 0; s < 2; ++s)
    if (acc.count[s] > 0) mean[s] = double(acc.sum[s]) / double(acc.count[s]);
  if (acc.count[0] == 0) mean[0] = mean[1];
  if (acc.count[1] == 0) mean[1] = mean[0];
  if (ca) *ca = mean[0];
  if (cb) *cb = mean[1];
  double sse = double(sum_sq);
  for (int s = 0; s < 2; ++s)
    if (acc.count[s] > 0) sse -= double(acc.sum[s]) * double(acc.sum[s]) / double(acc.count[s]);
  return sse < 0.0 ? 0.0 : sse;
}

}  // namespace

WedgeletFit fit_wedgelet(const PatchView& patch) {
  return fit_wedgelet(patch, enumerate_beamlets(patch.m, patch.n));
}

WedgeletFit fit_wedgelet(const PatchView& patch, const std::vector<Beamlet>& dict) {
  const int m = patch.m, n = patch.n;
  if (m < 2 || n < 2) throw std::invalid_argument("fit_wedgelet: patch too small");

  // Row prefix sums: row_prefix[r][c] = sum of pixels (r, 0..c-1).
  std::vector<std::int64_t> row_prefix(std::size_t(m) * (n + 1), 0);
  std::int64_t total_sum = 0, total_sq = 0;
  for (int r = 0; r < m; ++r) {
    std::int64_t acc = 0;
    for (int c = 0; c < n; ++c) {
      std::int64_t v = patch.at(r, c);
      acc += v;
      row_prefix[std::size_t(r) * (n + 1) + c + 1] = acc;
      total_sum += v;
      total_sq += v * v;
    }
  }
  auto row_sum = [&](int r, int c_lo, int c_hi) {  // [c_lo, c_hi)
    return row_prefix[std::size_t(r) * (n + 1) + c_hi] -
           row_prefix[std::size_t(r) * (n + 1) + c_lo];
  };

  const std::int64_t count = std::int64_t(m) * n;
  WedgeletFit best;
  best.index = int(dict.size());  // constant atom
  best.ca = best.cb = double(total_sum) / double(count);
  best.side_sum[0] = total_sum;
  best.side_count[0] = count;
  best.sse = double(total_sq) - double(total_sum) * double(total_sum) / double(count);
  if (best.sse < 0.0) best.sse = 0.0;

  for (std::size_t bi = 0; bi < dict.size(); ++bi) {
    const Beamlet& b = dict[bi];
    const std::int64_t dr = b.v2.row - b.v1.row;
    const std::int64_t dc = b.v2.col - b.v1.col;
    SideAccum acc;
    for (int r = 0; r < m; ++r) {
      // side A: dr*c >= dr*c1 + dc*(r - r1)
      int a_lo, a_hi;  // side-A columns form [a_lo, a_hi)
      std::int64_t rhs = dr * b.v1.col + dc * (std::int64_t(r) - b.v1.row);
      if (dr > 0) {
        a_lo = int(std::min<std::int64_t>(n, std::max<std::int64_t>(0, ceil_div(rhs, dr))));
        a_hi = n;
      } else if (dr < 0) {
        a_lo = 0;
        a_hi = int(std::min<std::int64_t>(n, std::max<std::int64_t>(0, floor_div(-rhs, -dr) + 1)));
      } else {
        bool whole_row_a = -dc * (std::int64_t(r) - b.v1.row) >= 0;
        a_lo = 0;
        a_hi = whole_row_a ? n : 0;
      }
      std::int64_t sa = row_sum(r, a_lo, a_hi);
      std::int64_t na = a_hi - a_lo;
      acc.sum[0] += sa;
      acc.count[0] += na;
      acc.sum[1] += row_sum(r, 0, n) - sa;
      acc.count[1] += n - na;
    }
    double ca, cb;
    double sse = two_mean_sse(total_sq, acc, &ca, &cb);
    if (sse < best.sse) {
      best.index = int(bi);
      best.ca = ca;
      best.cb = cb;
      best.sse = sse;
      best.side_sum[0] = acc.sum[0];
      best.side_sum[1] = acc.sum[1];
      best.side_count[0] = acc.count[0];
      best.side_count[1] = acc.count[1];
    }
  }
  return best;
}

void render_wedgelet_into(PixelGrid& out, int row0, int col0, int m, int n,
                          const std::vector<Beamlet>& dict, const WedgeletFit& fit) {
  bool constant = fit.index == int(dict.size());
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) {
      double v = constant || on_side_a(dict[std::size_t(fit.index)], r, c) ? fit.ca : fit.cb;
      long iv = std::lround(v);
      out.at(row0 + r, col0 + c) = std::uint8_t(iv < 0 ? 0 : iv > 255 ? 255 : iv);
    }
  }
}

}  // namespace psml
