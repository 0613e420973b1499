#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace psml {

// 8-bit grayscale raster, row-major.
struct PixelGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  PixelGrid() = default;
  PixelGrid(int h, int w, std::uint8_t fill = 0)
      : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {
    if (w < 1 || h < 1) throw std::invalid_argument("PixelGrid: empty dimensions");
  }

  std::uint8_t at(int r, int c) const {
    return samples[static_cast<std::size_t>(r) * width + c];
  }
  std::uint8_t& at(int r, int c) {
    return samples[static_cast<std::size_t>(r) * width + c];
  }

  bool operator==(const PixelGrid& o) const = default;
};

// Rectangular window into a PixelGrid. Does not own pixels.
struct PatchView {
  const PixelGrid* grid = nullptr;
  int row0 = 0;
  int col0 = 0;
  int m = 0;  // height
  int n = 0;  // width

  PatchView() = default;
  PatchView(const PixelGrid& g, int r0, int c0, int height, int width)
      : grid(&g), row0(r0), col0(c0), m(height), n(width) {
    if (r0 < 0 || c0 < 0 || height < 1 || width < 1 ||
        r0 + height > g.height || c0 + width > g.width)
      throw std::invalid_argument("PatchView: outside parent grid");
  }

  // Local coordinates (r in [0,m), c in [0,n)).
  std::uint8_t at(int r, int c) const { return grid->at(row0 + r, col0 + c); }
};

PixelGrid read_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_pgm(const PixelGrid& grid);

PixelGrid load_pgm(const std::string& path);
void save_pgm(const PixelGrid& grid, const std::string& path);

// 10*log10(255^2/MSE); +inf when the images are identical.
double psnr(const PixelGrid& a, const PixelGrid& b);

// Oriented sinusoidal ridge pattern around mid-gray. The seed picks a
// phase offset; contrast 0 gives a constant image.
PixelGrid synth_ridge(int height, int width, int period, double angle,
                      int contrast, std::uint64_t seed);

}  // namespace psml
