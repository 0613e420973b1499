#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "psml/pixel_grid.hpp"
#include "psml/psml_fit.hpp"
#include "psml/wedgelet.hpp"

namespace psml {

enum class CodecId : std::uint8_t { kPsml = 0, kWedgelet = 1 };

struct EncoderConfig {
  CodecId codec = CodecId::kPsml;
  int max_depth = 7;
  int gray_bits = 0;        // 3..8, or 0 for auto
  double lambda = -1.0;     // exactly one of lambda / target_bpp is set
  double target_bpp = -1.0;
};

struct QuantizedGray {
  int code = 0;
  int value = 0;  // dequantized, in [0,255]
};

// code = round(c*(2^q-1)/255); value = round(code*255/(2^q-1)). Identity on
// integers at q=8, endpoints preserved at every q.
QuantizedGray quantize_gray(double c, int q);

enum class LeafKind : std::uint8_t { kConstant = 0, kModel = 1 };

struct QuadtreeNode {
  int row0 = 0, col0 = 0;
  int h = 0, w = 0;
  int depth = 0;
  bool splittable = false;
  std::array<std::unique_ptr<QuadtreeNode>, 4> child;  // TL, TR, BL, BR

  // patch moments
  std::int64_t count = 0, sum = 0, sum_sq = 0;

  // candidate leaf fits
  bool has_model = false;
  FitResult psml;  // PSML codec
  std::int64_t psml_class_sum[2] = {0, 0};
  std::int64_t psml_class_count[2] = {0, 0};
  int orient_bits = 0;
  WedgeletFit wedge;  // wedgelet codec
  int index_bits = 0;

  // pruning result (valid after prune)
  bool is_leaf = true;
  LeafKind leaf_kind = LeafKind::kConstant;
  double cost = 0.0;          // D + lambda^2 * K of the chosen branch
  std::int64_t dist = 0;      // subtree SSE at the chosen branch
  std::int64_t k_bits = 0;    // subtree bits (structure + nominal grays)
};

// Full quadtree with candidate fits at every node. Rectangles halve
// ceil/floor per dimension; a node splits while depth < max_depth and both
// dimensions are >= 4.
std::unique_ptr<QuadtreeNode> decompose(const PixelGrid& image,
                                        const EncoderConfig& config);

// Bottom-up Lagrangian pruning at the given lambda and gray depth;
// returns the root objective D + lambda^2 * K. Distortion is evaluated
// with q-bit quantize/dequantize grays. Equal costs keep the leaf.
double prune(QuadtreeNode& root, CodecId codec, double lambda, int q);

struct RateDistortionPoint {
  double lambda = 0.0;
  std::int64_t total_bits = 0;
  double bpp = 0.0;
  std::int64_t sse = 0;
  double psnr_db = 0.0;
  int q = 0;
};

struct BitAccounting {
  std::int64_t header_bits = 0;     // fixed header incl. q/depth/k fields
  std::int64_t structure_bits = 0;  // tree, type, orientation, G, index bits
  std::int64_t gray_bits = 0;       // entropy-coded payload incl. flag bits
  std::int64_t nominal_gray_bits = 0;  // q bits per leaf gray (the K model)
  std::int64_t padding_bits = 0;
  std::int64_t root_k = 0;  // structure_bits + nominal_gray_bits
};

struct EncodeOutput {
  std::vector<std::uint8_t> bytes;
  RateDistortionPoint point;
  PixelGrid reconstruction;
  BitAccounting accounting;
};

// Serializes the pruned tree at gray depth q (tree must have been pruned
// with the same codec and q).
EncodeOutput assemble(const PixelGrid& image, const QuadtreeNode& root,
                      CodecId codec, int max_depth, int q, double lambda);

// decompose + per-q prune/assemble (q fixed or swept over 3..8), picking
// the minimal D + lambda^2 * bits stream. With target_bpp, bisection on
// log(lambda) picks the achieved rate closest to the target from below.
EncodeOutput encode(const PixelGrid& image, const EncoderConfig& config);

PixelGrid decode(const std::vector<std::uint8_t>& bytes);

// Minimum achievable bpp for an image under the codec (single constant
// leaf stream).
double floor_bpp(const PixelGrid& image, const EncoderConfig& config);

}  // namespace psml
