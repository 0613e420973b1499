#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "psml/pixel_grid.hpp"

using namespace psml;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

PixelGrid random_grid(int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> gray(0, 255);
  PixelGrid g(h, w);
  for (auto& s : g.samples) s = std::uint8_t(gray(rng));
  return g;
}

}  // namespace

TEST_CASE("read_pgm P5 binary") {
  std::string head = "P5 2 2 255 ";
  std::vector<std::uint8_t> data = bytes_of(head);
  data.back() = '\n';
  for (int v : {0, 255, 10, 20}) data.push_back(std::uint8_t(v));
  PixelGrid g = read_pgm(data);
  CHECK(g.width == 2);
  CHECK(g.height == 2);
  CHECK(g.at(0, 0) == 0);
  CHECK(g.at(0, 1) == 255);
  CHECK(g.at(1, 0) == 10);
  CHECK(g.at(1, 1) == 20);
}

TEST_CASE("read_pgm P2 equals P5") {
  auto p2 = read_pgm(bytes_of("P2\n# comment\n2 2\n255\n0 255\n10 20\n"));
  std::vector<std::uint8_t> p5 = bytes_of("P5 2 2 255\n");
  for (int v : {0, 255, 10, 20}) p5.push_back(std::uint8_t(v));
  CHECK(p2 == read_pgm(p5));
}

TEST_CASE("read_pgm errors") {
  std::vector<std::uint8_t> trunc = bytes_of("P5 2 2 255\n");
  trunc.push_back(1);
  trunc.push_back(2);
  trunc.push_back(3);  // 3 of 4 bytes
  CHECK_THROWS_WITH_AS(read_pgm(trunc), doctest::Contains("truncated payload"),
                       std::runtime_error);
  CHECK_THROWS_AS(read_pgm(bytes_of("P5 2 2 65535\n")), std::runtime_error);
  CHECK_THROWS_AS(read_pgm(bytes_of("P6 2 2 255\n")), std::runtime_error);
  CHECK_THROWS_AS(read_pgm(bytes_of("P5 x 2 255\n")), std::runtime_error);
}

TEST_CASE("pgm round trips") {
  PixelGrid one(1, 1);
  one.at(0, 0) = 42;
  CHECK(read_pgm(write_pgm(one)) == one);

  PixelGrid g(2, 2);
  g.samples = {0, 255, 10, 20};
  CHECK(read_pgm(write_pgm(g)) == g);

  PixelGrid big = random_grid(374, 388, 7);
  CHECK(read_pgm(write_pgm(big)) == big);
}

TEST_CASE("psnr closed forms") {
  PixelGrid a(2, 2), b(2, 2);
  CHECK(std::isinf(psnr(a, a)));

  PixelGrid z(1, 1), f(1, 1);
  f.at(0, 0) = 255;
  CHECK(psnr(z, f) == doctest::Approx(0.0));

  b.at(0, 0) = 16;  // MSE = 256/4 = 64
  CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(65025.0 / 64.0)));

  PixelGrid wrong(3, 2);
  CHECK_THROWS_AS(psnr(a, wrong), std::invalid_argument);
}

TEST_CASE("psnr symmetry") {
  PixelGrid a = random_grid(9, 13, 1), b = random_grid(9, 13, 2);
  CHECK(psnr(a, b) == psnr(b, a));
}

TEST_CASE("synth_ridge degenerate and periodic") {
  PixelGrid flat = synth_ridge(8, 8, 4, 0.7, 0, 3);
  for (auto s : flat.samples) CHECK(s == flat.samples[0]);

  PixelGrid waves = synth_ridge(16, 16, 4, 0.0, 200, 5);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      CHECK(waves.at(r, c) == waves.at(0, c));  // columns constant
      if (c + 4 < 16) CHECK(waves.at(r, c) == waves.at(r, c + 4));
    }
  }

  CHECK(synth_ridge(64, 64, 8, 0.6, 200, 7) == synth_ridge(64, 64, 8, 0.6, 200, 7));
  CHECK_THROWS_AS(synth_ridge(8, 8, 1, 0.0, 100, 0), std::invalid_argument);
}
