#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "psml/psml_fit.hpp"
#include "psml/wedgelet.hpp"

using namespace psml;

namespace {

PixelGrid random_grid(int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> gray(0, 255);
  PixelGrid g(h, w);
  for (auto& s : g.samples) s = std::uint8_t(gray(rng));
  return g;
}

// Independent combinatorial recount of the dictionary size.
std::size_t recount_beamlets(int m, int n) {
  std::vector<Pixel> border;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c)
      if (r == 0 || r == m - 1 || c == 0 || c == n - 1) border.push_back({r, c});
  std::size_t count = 0;
  for (std::size_t i = 0; i < border.size(); ++i)
    for (std::size_t j = i + 1; j < border.size(); ++j) {
      const Pixel &a = border[i], &b = border[j];
      bool same_edge = (a.row == b.row && (a.row == 0 || a.row == m - 1)) ||
                       (a.col == b.col && (a.col == 0 || a.col == n - 1));
      if (!same_edge) ++count;
    }
  return count;
}

// Naive per-pixel wedgelet fit over the full dictionary (the definition).
double naive_best_sse(const PatchView& patch, const std::vector<Beamlet>& dict) {
  double total_sum = 0, total_sq = 0;
  for (int r = 0; r < patch.m; ++r)
    for (int c = 0; c < patch.n; ++c) {
      double v = patch.at(r, c);
      total_sum += v;
      total_sq += v * v;
    }
  double count = double(patch.m) * patch.n;
  double best = total_sq - total_sum * total_sum / count;  // constant atom
  for (const Beamlet& b : dict) {
    double sum[2] = {0, 0};
    double cnt[2] = {0, 0};
    for (int r = 0; r < patch.m; ++r)
      for (int c = 0; c < patch.n; ++c) {
        int s = on_side_a(b, r, c) ? 0 : 1;
        sum[s] += patch.at(r, c);
        cnt[s] += 1;
      }
    double sse = total_sq;
    for (int s = 0; s < 2; ++s)
      if (cnt[s] > 0) sse -= sum[s] * sum[s] / cnt[s];
    if (sse < best) best = sse;
  }
  return best < 0 ? 0 : best;
}

}  // namespace

TEST_CASE("enumerate_beamlets counts") {
  CHECK(enumerate_beamlets(2, 2).size() == recount_beamlets(2, 2));
  CHECK(enumerate_beamlets(2, 2).size() == 2);  // only the two diagonals
  CHECK(enumerate_beamlets(4, 4).size() == recount_beamlets(4, 4));
  CHECK(enumerate_beamlets(3, 5).size() == recount_beamlets(3, 5));
  CHECK(enumerate_beamlets(8, 8).size() == recount_beamlets(8, 8));
  CHECK_THROWS_AS(enumerate_beamlets(1, 5), std::invalid_argument);
}

TEST_CASE("beamlets are canonical border pairs crossing the interior") {
  auto border = border_pixels(4, 4);
  CHECK(border.size() == 12);
  auto dict = enumerate_beamlets(4, 4);
  for (const Beamlet& b : dict) {
    CHECK(!(b.v1 == b.v2));
    auto pos = [&](const Pixel& v) {
      for (std::size_t i = 0; i < border.size(); ++i)
        if (border[i] == v) return i;
      return border.size();
    };
    CHECK(pos(b.v1) < pos(b.v2));
  }
}

TEST_CASE("constant patch picks the constant atom") {
  PixelGrid flat(6, 6, 123);
  WedgeletFit fit = fit_wedgelet(PatchView(flat, 0, 0, 6, 6));
  CHECK(fit.index == int(dictionary_size(6, 6)));
  CHECK(fit.sse == doctest::Approx(0.0));
  CHECK(fit.ca == doctest::Approx(123.0));
}

TEST_CASE("exact half-plane step edge fits with zero error") {
  // columns 0..3 dark, 4..7 bright: vertical beamlet between them
  PixelGrid img(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) img.at(r, c) = c < 4 ? 20 : 220;
  WedgeletFit fit = fit_wedgelet(PatchView(img, 0, 0, 8, 8));
  CHECK(fit.index < int(dictionary_size(8, 8)));
  CHECK(fit.sse == doctest::Approx(0.0));
}

TEST_CASE("fit matches the naive dictionary scan") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    int m = 2 + int(rng() % 7), n = 2 + int(rng() % 7);
    PixelGrid img = random_grid(m, n, rng());
    PatchView patch(img, 0, 0, m, n);
    auto dict = enumerate_beamlets(m, n);
    WedgeletFit fit = fit_wedgelet(patch, dict);
    CHECK(fit.sse == doctest::Approx(naive_best_sse(patch, dict)).epsilon(1e-9));
  }
}

TEST_CASE("wedgelet SSE never exceeds the constant fit") {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 10; ++trial) {
    PixelGrid img = random_grid(7, 7, rng());
    PatchView patch(img, 0, 0, 7, 7);
    PatchMoments mom = patch_moments(patch);
    double const_sse =
        double(mom.sum_sq) - double(mom.sum) * double(mom.sum) / double(mom.count);
    CHECK(fit_wedgelet(patch).sse <= const_sse + 1e-9);
  }
}

TEST_CASE("side means are optimal against +-1 perturbation") {
  PixelGrid img = random_grid(8, 8, 79);
  PatchView patch(img, 0, 0, 8, 8);
  auto dict = enumerate_beamlets(8, 8);
  WedgeletFit fit = fit_wedgelet(patch, dict);
  REQUIRE(fit.index <= int(dict.size()));
  auto sse_with = [&](double ca, double cb) {
    double err = 0.0;
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        bool a = fit.index == int(dict.size()) ||
                 on_side_a(dict[std::size_t(fit.index)], r, c);
        double d = patch.at(r, c) - (a ? ca : cb);
        err += d * d;
      }
    return err;
  };
  double base = sse_with(fit.ca, fit.cb);
  CHECK(base == doctest::Approx(fit.sse).epsilon(1e-9));
  CHECK(sse_with(fit.ca + 1, fit.cb) >= base);
  CHECK(sse_with(fit.ca - 1, fit.cb) >= base);
  CHECK(sse_with(fit.ca, fit.cb + 1) >= base);
  CHECK(sse_with(fit.ca, fit.cb - 1) >= base);
}

TEST_CASE("multi-stroke parallel-line patches defeat wedgelets but not the PSML oracle") {
  // three alternating vertical strokes: a single half-plane split cannot be exact
  PixelGrid img(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) img.at(r, c) = (c / 2) % 2 ? 230 : 25;
  PatchView patch(img, 0, 0, 8, 8);
  WedgeletFit wfit = fit_wedgelet(patch);
  FitResult oracle = fit_patch_exhaustive(patch, 16);
  CHECK(oracle.sse == doctest::Approx(0.0));
  CHECK(wfit.sse > 0.0);
}
