#include "psml/psml_fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace psml {

PatchMoments patch_moments(const PatchView& patch) {
  PatchMoments mom;
  mom.count = std::int64_t(patch.m) * patch.n;
  for (int r = 0; r < patch.m; ++r) {
    for (int c = 0; c < patch.n; ++c) {
      std::int64_t v = patch.at(r, c);
      mom.sum += v;
      mom.sum_sq += v * v;
    }
  }
  return mom;
}

namespace {

// SSE from class aggregates; empty classes contribute nothing.
double class_sse(std::int64_t sum_sq, const std::int64_t sc[2],
                 const std::int64_t nc[2]) {
  double sse = double(sum_sq);
  for (int c = 0; c < 2; ++c) {
    if (nc[c] > 0) sse -= double(sc[c]) * double(sc[c]) / double(nc[c]);
  }
  return sse < 0.0 ? 0.0 : sse;
}

}  // namespace

GrayFit optimal_grays(const FitState& state, std::int64_t patch_sum_sq) {
  GrayFit fit;
  double mean[2] = {0.0, 0.0};
  for (int c = 0; c < 2; ++c)
    if (state.class_count[c] > 0)
      mean[c] = double(state.class_sum[c]) / double(state.class_count[c]);
  if (state.class_count[0] == 0) mean[0] = mean[1];
  if (state.class_count[1] == 0) mean[1] = mean[0];
  fit.c1 = mean[0];
  fit.c2 = mean[1];
  fit.sse = class_sse(patch_sum_sq, state.class_sum, state.class_count);
  return fit;
}

FitState make_state(const LinePartition& part, std::vector<std::uint8_t> bits,
                    std::int64_t patch_sum_sq) {
  if (int(bits.size()) != part.p)
    throw std::invalid_argument("make_state: bit stream length != p");
  FitState st;
  st.bits = std::move(bits);
  for (int i = 0; i < part.p; ++i) {
    int cls = st.bits[std::size_t(i)] ? 1 : 0;
    st.class_sum[cls] += part.gray_sum[std::size_t(i)];
    st.class_count[cls] += part.pixel_count[std::size_t(i)];
  }
  st.sse = class_sse(patch_sum_sq, st.class_sum, st.class_count);
  return st;
}

FitState flip_line(const FitState& state, int k, const LinePartition& part,
                   std::int64_t patch_sum_sq) {
  if (k < 0 || k >= part.p) throw std::invalid_argument("flip_line: bad line index");
  FitState st = state;
  int from = st.bits[std::size_t(k)] ? 1 : 0;
  int to = 1 - from;
  st.bits[std::size_t(k)] = std::uint8_t(to);
  st.class_sum[from] -= part.gray_sum[std::size_t(k)];
  st.class_count[from] -= part.pixel_count[std::size_t(k)];
  st.class_sum[to] += part.gray_sum[std::size_t(k)];
  st.class_count[to] += part.pixel_count[std::size_t(k)];
  st.sse = class_sse(patch_sum_sq, st.class_sum, st.class_count);
  return st;
}

FitState initial_state(const LinePartition& part, std::int64_t patch_sum_sq) {
  std::int64_t total_sum = 0, total_count = 0;
  for (int i = 0; i < part.p; ++i) {
    total_sum += part.gray_sum[std::size_t(i)];
    total_count += part.pixel_count[std::size_t(i)];
  }
  std::vector<std::uint8_t> bits(std::size_t(part.p), 0);
  for (int i = 0; i < part.p; ++i) {
    // line mean < patch mean, compared exactly in integers
    if (part.gray_sum[std::size_t(i)] * total_count <
        total_sum * part.pixel_count[std::size_t(i)])
      bits[std::size_t(i)] = 1;
  }
  return make_state(part, std::move(bits), patch_sum_sq);
}

FitResult hill_climb(const LinePartition& part, FitState start,
                     std::int64_t patch_sum_sq) {
  FitState cur = std::move(start);
  std::int64_t evals = 0, moves = 0;
  for (;;) {
    int best_k = -1;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int k = 0; k < part.p; ++k) {
      int from = cur.bits[std::size_t(k)] ? 1 : 0;
      int to = 1 - from;
      std::int64_t sc[2] = {cur.class_sum[0], cur.class_sum[1]};
      std::int64_t nc[2] = {cur.class_count[0], cur.class_count[1]};
      sc[from] -= part.gray_sum[std::size_t(k)];
      nc[from] -= part.pixel_count[std::size_t(k)];
      sc[to] += part.gray_sum[std::size_t(k)];
      nc[to] += part.pixel_count[std::size_t(k)];
      double sse = class_sse(patch_sum_sq, sc, nc);
      ++evals;
      if (sse < best_sse) {
        best_sse = sse;
        best_k = k;
      }
    }
    if (best_k < 0 || best_sse >= cur.sse) break;
    cur = flip_line(cur, best_k, part, patch_sum_sq);
    ++moves;
  }
  GrayFit grays = optimal_grays(cur, patch_sum_sq);
  FitResult res;
  res.model.orientation = part.orientation;
  res.model.bits = std::move(cur.bits);
  res.model.c1 = grays.c1;
  res.model.c2 = grays.c2;
  res.sse = grays.sse;
  res.evaluations = evals;
  res.iterations = moves;
  return res;
}

FitResult fit_patch_fast(const PatchView& patch) {
  if (patch.m < 4 || patch.n < 4)
    throw std::invalid_argument("fit_patch_fast: patch too small");
  PatchMoments mom = patch_moments(patch);
  OrientationSet orient = orientations(patch.m, patch.n);
  FitResult best;
  best.sse = std::numeric_limits<double>::infinity();
  for (int oi = 0; oi < int(orient.candidates.size()); ++oi) {
    LinePartition part = partition(patch, orient, oi);
    FitResult res = hill_climb(part, initial_state(part, mom.sum_sq), mom.sum_sq);
    best.evaluations += res.evaluations;
    best.iterations += res.iterations;
    if (res.sse < best.sse) {
      best.sse = res.sse;
      best.model = std::move(res.model);
    }
  }
  return best;
}

FitResult fit_patch_exhaustive(const PatchView& patch, int max_p) {
  if (patch.m < 4 || patch.n < 4)
    throw std::invalid_argument("fit_patch_exhaustive: patch too small");
  PatchMoments mom = patch_moments(patch);
  OrientationSet orient = orientations(patch.m, patch.n);
  FitResult best;
  best.sse = std::numeric_limits<double>::infinity();
  for (int oi = 0; oi < int(orient.candidates.size()); ++oi) {
    LinePartition part = partition(patch, orient, oi);
    if (part.p > max_p)
      throw std::runtime_error("fit_patch_exhaustive: p exceeds oracle budget");
    const std::uint32_t states = 1u << part.p;
    // mask bit (p-1-i) holds g_i, so increasing mask is lexicographic in G
    // and keep-first-on-tie yields the lexicographically smallest stream.
    for (std::uint32_t mask = 0; mask < states; ++mask) {
      std::int64_t sc[2] = {0, 0}, nc[2] = {0, 0};
      for (int i = 0; i < part.p; ++i) {
        int cls = (mask >> (part.p - 1 - i)) & 1u;
        sc[cls] += part.gray_sum[std::size_t(i)];
        nc[cls] += part.pixel_count[std::size_t(i)];
      }
      double sse = class_sse(mom.sum_sq, sc, nc);
      ++best.evaluations;
      if (sse < best.sse) {
        best.sse = sse;
        best.model.orientation = oi;
        best.model.bits.assign(std::size_t(part.p), 0);
        for (int i = 0; i < part.p; ++i)
          best.model.bits[std::size_t(i)] = (mask >> (part.p - 1 - i)) & 1u;
        FitState st = make_state(part, best.model.bits, mom.sum_sq);
        GrayFit grays = optimal_grays(st, mom.sum_sq);
        best.model.c1 = grays.c1;
        best.model.c2 = grays.c2;
      }
    }
  }
  return best;
}

std::vector<double> render(const LinePartition& part, const PsmlModel& model) {
  if (int(model.bits.size()) != part.p)
    throw std::invalid_argument("render: bit stream length != p");
  std::vector<double> out(std::size_t(part.m) * part.n);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = model.bits[part.line_index[i]] ? model.c2 : model.c1;
  return out;
}

void render_into(PixelGrid& out, int row0, int col0, const LinePartition& part,
                 const PsmlModel& model) {
  if (int(model.bits.size()) != part.p)
    throw std::invalid_argument("render: bit stream length != p");
  for (int r = 0; r < part.m; ++r) {
    for (int c = 0; c < part.n; ++c) {
      double v = model.bits[std::size_t(part.line_of(r, c))] ? model.c2 : model.c1;
      long iv = std::lround(v);
      out.at(row0 + r, col0 + c) = std::uint8_t(iv < 0 ? 0 : iv > 255 ? 255 : iv);
    }
  }
}

}  // namespace psml
