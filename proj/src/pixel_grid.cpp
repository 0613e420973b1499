#include "psml/pixel_grid.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace psml {

namespace {

struct ByteCursor {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  bool eof() const { return pos >= buf.size(); }
  int peek() const { return eof() ? -1 : buf[pos]; }
  int get() { return eof() ? -1 : buf[pos++]; }

  // Skips whitespace and '#' comment lines between header tokens.
  void skip_space_and_comments() {
    while (!eof()) {
      int ch = peek();
      if (std::isspace(ch)) {
        ++pos;
      } else if (ch == '#') {
        while (!eof() && get() != '\n') {
        }
      } else {
        break;
      }
    }
  }

  int read_uint(const char* what) {
    skip_space_and_comments();
    if (eof() || !std::isdigit(peek()))
      throw std::runtime_error(std::string("read_pgm: malformed header, expected ") + what);
    long v = 0;
    while (!eof() && std::isdigit(peek())) {
      v = v * 10 + (get() - '0');
      if (v > 1 << 30) throw std::runtime_error("read_pgm: header value out of range");
    }
    return static_cast<int>(v);
  }
};

}  // namespace

PixelGrid read_pgm(const std::vector<std::uint8_t>& bytes) {
  ByteCursor cur{bytes};
  if (cur.get() != 'P') throw std::runtime_error("read_pgm: not a PGM file");
  int kind = cur.get();
  if (kind != '2' && kind != '5') throw std::runtime_error("read_pgm: not a PGM file");

  int width = cur.read_uint("width");
  int height = cur.read_uint("height");
  int maxval = cur.read_uint("maxval");
  if (width < 1 || height < 1) throw std::runtime_error("read_pgm: malformed header");
  if (maxval < 1 || maxval > 255) throw std::runtime_error("read_pgm: maxval > 255 unsupported");

  PixelGrid grid(height, width);
  std::size_t count = grid.samples.size();
  if (kind == '5') {
    // exactly one whitespace byte after maxval
    if (cur.get() < 0) throw std::runtime_error("read_pgm: truncated payload");
    if (bytes.size() - cur.pos < count) throw std::runtime_error("read_pgm: truncated payload");
    for (std::size_t i = 0; i < count; ++i) grid.samples[i] = bytes[cur.pos + i];
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      cur.skip_space_and_comments();
      if (cur.eof()) throw std::runtime_error("read_pgm: truncated payload");
      int v = cur.read_uint("sample");
      if (v > maxval) throw std::runtime_error("read_pgm: sample exceeds maxval");
      grid.samples[i] = static_cast<std::uint8_t>(v);
    }
  }
  return grid;
}

std::vector<std::uint8_t> write_pgm(const PixelGrid& grid) {
  char header[64];
  int len = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", grid.width, grid.height);
  std::vector<std::uint8_t> out(header, header + len);
  out.insert(out.end(), grid.samples.begin(), grid.samples.end());
  return out;
}

PixelGrid load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_pgm(bytes);
}

void save_pgm(const PixelGrid& grid, const std::string& path) {
  auto bytes = write_pgm(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

double psnr(const PixelGrid& a, const PixelGrid& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("psnr: dimension mismatch");
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    int d = int(a.samples[i]) - int(b.samples[i]);
    sse += std::uint64_t(d) * d;
  }
  if (sse == 0) return std::numeric_limits<double>::infinity();
  double mse = double(sse) / double(a.samples.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace

PixelGrid synth_ridge(int height, int width, int period, double angle,
                      int contrast, std::uint64_t seed) {
  if (period < 2) throw std::invalid_argument("synth_ridge: period < 2");
  PixelGrid grid(height, width);
  // Seeded phase offset in [0, period).
  double phase = double(splitmix64(seed) >> 11) / double(1ull << 53) * period;
  double cs = std::cos(angle), sn = std::sin(angle);
  double amp = contrast / 2.0;
  const double two_pi = 6.283185307179586476925286766559;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      // Reduce the coordinate mod period first so the pattern repeats
      // bit-exactly along the wave direction.
      double t = std::fmod(c * cs + r * sn + phase, double(period));
      double v = amp == 0.0 ? 128.0 : 128.0 + amp * std::sin(two_pi * t / period);
      long iv = std::lround(v);
      grid.at(r, c) = std::uint8_t(iv < 0 ? 0 : iv > 255 ? 255 : iv);
    }
  }
  return grid;
}

}  // namespace psml
