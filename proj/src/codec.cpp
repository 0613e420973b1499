#include "psml/codec.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "psml/bitio.hpp"
#include "psml/entropy.hpp"

namespace psml {

namespace {

constexpr std::uint8_t kMagic[4] = {0x50, 0x53, 0x4D, 0x4C};  // "PSML"
constexpr std::uint8_t kVersion = 0x01;
constexpr int kHeaderBytes = 10;
constexpr int kHeaderBits = kHeaderBytes * 8 + 4 + 4 + 5 + 5;

int parallel_budget() {
  if (const char* env = std::getenv("PSML_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

bool model_eligible(CodecId codec, int h, int w) {
  if (codec == CodecId::kPsml) return h >= 4 && w >= 4;
  return h >= 2 && w >= 2;
}

int orientation_index_bits(int m, int n) {
  int count = int(orientations(m, n).candidates.size());
  return count <= 1 ? 0 : std::bit_width(unsigned(count - 1));
}

int wedgelet_index_bits(std::size_t dict_size) {
  // indices 0..M_W, constant atom = M_W
  return std::bit_width(unsigned(dict_size));
}

void fit_node(QuadtreeNode& nd, const PixelGrid& image, CodecId codec) {
  PatchView patch(image, nd.row0, nd.col0, nd.h, nd.w);
  PatchMoments mom = patch_moments(patch);
  nd.count = mom.count;
  nd.sum = mom.sum;
  nd.sum_sq = mom.sum_sq;
  nd.has_model = model_eligible(codec, nd.h, nd.w);
  if (!nd.has_model) return;
  if (codec == CodecId::kPsml) {
    nd.psml = fit_patch_fast(patch);
    nd.orient_bits = orientation_index_bits(nd.h, nd.w);
    OrientationSet orient = orientations(nd.h, nd.w);
    LinePartition part = partition(patch, orient, nd.psml.model.orientation);
    FitState st = make_state(part, nd.psml.model.bits, mom.sum_sq);
    nd.psml_class_sum[0] = st.class_sum[0];
    nd.psml_class_sum[1] = st.class_sum[1];
    nd.psml_class_count[0] = st.class_count[0];
    nd.psml_class_count[1] = st.class_count[1];
  } else {
    std::vector<Beamlet> dict = enumerate_beamlets(nd.h, nd.w);
    nd.wedge = fit_wedgelet(patch, dict);
    nd.index_bits = wedgelet_index_bits(dict.size());
  }
}

std::unique_ptr<QuadtreeNode> decompose_node(const PixelGrid& image,
                                             const EncoderConfig& config, int r0,
                                             int c0, int h, int w, int depth,
                                             int threads) {
  auto nd = std::make_unique<QuadtreeNode>();
  nd->row0 = r0;
  nd->col0 = c0;
  nd->h = h;
  nd->w = w;
  nd->depth = depth;
  nd->splittable = depth < config.max_depth && h >= 4 && w >= 4;
  fit_node(*nd, image, config.codec);
  if (nd->splittable) {
    int h1 = (h + 1) / 2, w1 = (w + 1) / 2;
    int h2 = h - h1, w2 = w - w1;
    struct Sub {
      int r, c, h, w;
    } subs[4] = {{r0, c0, h1, w1},
                 {r0, c0 + w1, h1, w2},
                 {r0 + h1, c0, h2, w1},
                 {r0 + h1, c0 + w1, h2, w2}};
    if (threads > 1 && depth < 2) {
      std::future<std::unique_ptr<QuadtreeNode>> fut[4];
      for (int i = 0; i < 4; ++i)
        fut[i] = std::async(std::launch::async, [&, i] {
          return decompose_node(image, config, subs[i].r, subs[i].c, subs[i].h,
                                subs[i].w, depth + 1, threads / 4);
        });
      for (int i = 0; i < 4; ++i) nd->child[std::size_t(i)] = fut[i].get();
    } else {
      for (int i = 0; i < 4; ++i)
        nd->child[std::size_t(i)] = decompose_node(image, config, subs[i].r, subs[i].c,
                                                   subs[i].h, subs[i].w, depth + 1, 1);
    }
  }
  return nd;
}

// Exact SSE of a two-class model with integer grays v0/v1:
// sum_sq - 2*(v0*S0 + v1*S1) + N0*v0^2 + N1*v1^2.
std::int64_t quantized_sse(std::int64_t sum_sq, const std::int64_t s[2],
                           const std::int64_t n[2], int v0, int v1) {
  return sum_sq - 2 * (std::int64_t(v0) * s[0] + std::int64_t(v1) * s[1]) +
         n[0] * std::int64_t(v0) * v0 + n[1] * std::int64_t(v1) * v1;
}

struct LeafChoice {
  LeafKind kind = LeafKind::kConstant;
  std::int64_t dist = 0;
  std::int64_t k = 0;
};

LeafChoice best_leaf(const QuadtreeNode& nd, CodecId codec, double l2, int q) {
  std::int64_t base = (nd.splittable ? 1 : 0) + (nd.has_model ? 1 : 0);
  LeafChoice best;
  int v = quantize_gray(double(nd.sum) / double(nd.count), q).value;
  best.dist = nd.sum_sq - 2 * std::int64_t(v) * nd.sum + nd.count * std::int64_t(v) * v;
  best.k = base + q;
  if (nd.has_model) {
    LeafChoice model;
    model.kind = LeafKind::kModel;
    if (codec == CodecId::kPsml) {
      int v1 = quantize_gray(nd.psml.model.c1, q).value;
      int v2 = quantize_gray(nd.psml.model.c2, q).value;
      model.dist = quantized_sse(nd.sum_sq, nd.psml_class_sum, nd.psml_class_count, v1, v2);
      model.k = base + nd.orient_bits + std::int64_t(nd.psml.model.bits.size()) + 2 * q;
    } else {
      int va = quantize_gray(nd.wedge.ca, q).value;
      int vb = quantize_gray(nd.wedge.cb, q).value;
      model.dist = quantized_sse(nd.sum_sq, nd.wedge.side_sum, nd.wedge.side_count, va, vb);
      model.k = base + nd.index_bits + 2 * q;
    }
    if (double(model.dist) + l2 * double(model.k) <
        double(best.dist) + l2 * double(best.k))
      best = model;
  }
  return best;
}

double prune_node(QuadtreeNode& nd, CodecId codec, double l2, int q) {
  LeafChoice leaf = best_leaf(nd, codec, l2, q);
  double leaf_cost = double(leaf.dist) + l2 * double(leaf.k);
  nd.is_leaf = true;
  nd.leaf_kind = leaf.kind;
  nd.dist = leaf.dist;
  nd.k_bits = leaf.k;
  nd.cost = leaf_cost;
  if (nd.splittable) {
    double split_cost = l2;  // this node's split bit
    std::int64_t split_dist = 0, split_k = 1;
    for (auto& ch : nd.child) {
      split_cost += prune_node(*ch, codec, l2, q);
      split_dist += ch->dist;
      split_k += ch->k_bits;
    }
    if (split_cost < leaf_cost) {
      nd.is_leaf = false;
      nd.dist = split_dist;
      nd.k_bits = split_k;
      nd.cost = split_cost;
    }
  }
  return nd.cost;
}

struct LeafCodes {
  std::vector<int> stream0;  // constant grays and class-0 grays, preorder
  std::vector<int> stream1;  // class-1 grays
};

void collect_codes(const QuadtreeNode& nd, CodecId codec, int q, LeafCodes& out) {
  if (!nd.is_leaf) {
    for (const auto& ch : nd.child) collect_codes(*ch, codec, q, out);
    return;
  }
  if (nd.leaf_kind == LeafKind::kConstant) {
    out.stream0.push_back(quantize_gray(double(nd.sum) / double(nd.count), q).code);
  } else if (codec == CodecId::kPsml) {
    out.stream0.push_back(quantize_gray(nd.psml.model.c1, q).code);
    out.stream1.push_back(quantize_gray(nd.psml.model.c2, q).code);
  } else {
    out.stream0.push_back(quantize_gray(nd.wedge.ca, q).code);
    out.stream1.push_back(quantize_gray(nd.wedge.cb, q).code);
  }
}

void write_structure(const QuadtreeNode& nd, CodecId codec, BitWriter& bw) {
  if (nd.splittable) bw.put_bit(nd.is_leaf ? 0 : 1);
  if (!nd.is_leaf) {
    for (const auto& ch : nd.child) write_structure(*ch, codec, bw);
    return;
  }
  if (nd.has_model) bw.put_bit(nd.leaf_kind == LeafKind::kModel ? 1 : 0);
  if (nd.leaf_kind == LeafKind::kModel) {
    if (codec == CodecId::kPsml) {
      bw.put_bits(std::uint64_t(nd.psml.model.orientation), nd.orient_bits);
      for (std::uint8_t b : nd.psml.model.bits) bw.put_bit(b);
    } else {
      bw.put_bits(std::uint64_t(nd.wedge.index), nd.index_bits);
    }
  }
}

void render_tree(const QuadtreeNode& nd, CodecId codec, int q, PixelGrid& out) {
  if (!nd.is_leaf) {
    for (const auto& ch : nd.child) render_tree(*ch, codec, q, out);
    return;
  }
  if (nd.leaf_kind == LeafKind::kConstant) {
    int v = quantize_gray(double(nd.sum) / double(nd.count), q).value;
    for (int r = 0; r < nd.h; ++r)
      for (int c = 0; c < nd.w; ++c)
        out.at(nd.row0 + r, nd.col0 + c) = std::uint8_t(v);
  } else if (codec == CodecId::kPsml) {
    OrientationSet orient = orientations(nd.h, nd.w);
    LinePartition part =
        partition_geometry(nd.h, nd.w, orient, nd.psml.model.orientation);
    PsmlModel quantized = nd.psml.model;
    quantized.c1 = quantize_gray(nd.psml.model.c1, q).value;
    quantized.c2 = quantize_gray(nd.psml.model.c2, q).value;
    render_into(out, nd.row0, nd.col0, part, quantized);
  } else {
    std::vector<Beamlet> dict = enumerate_beamlets(nd.h, nd.w);
    WedgeletFit quantized = nd.wedge;
    quantized.ca = quantize_gray(nd.wedge.ca, q).value;
    quantized.cb = quantize_gray(nd.wedge.cb, q).value;
    render_wedgelet_into(out, nd.row0, nd.col0, nd.h, nd.w, dict, quantized);
  }
}

std::int64_t nominal_gray_count(const QuadtreeNode& nd) {
  if (!nd.is_leaf) {
    std::int64_t total = 0;
    for (const auto& ch : nd.child) total += nominal_gray_count(*ch);
    return total;
  }
  return nd.leaf_kind == LeafKind::kConstant ? 1 : 2;
}

}  // namespace

QuantizedGray quantize_gray(double c, int q) {
  if (q < 3 || q > 8) throw std::invalid_argument("quantize_gray: q out of range");
  if (c < 0.0) c = 0.0;
  if (c > 255.0) c = 255.0;
  int levels = (1 << q) - 1;
  QuantizedGray g;
  g.code = int(std::lround(c * levels / 255.0));
  g.value = int(std::lround(double(g.code) * 255.0 / levels));
  return g;
}

std::unique_ptr<QuadtreeNode> decompose(const PixelGrid& image,
                                        const EncoderConfig& config) {
  int min_dim = config.codec == CodecId::kPsml ? 4 : 2;
  if (image.height < min_dim || image.width < min_dim)
    throw std::invalid_argument("decompose: image too small for codec");
  if (config.max_depth < 0) throw std::invalid_argument("decompose: bad max_depth");
  return decompose_node(image, config, 0, 0, image.height, image.width, 0,
                        parallel_budget());
}

double prune(QuadtreeNode& root, CodecId codec, double lambda, int q) {
  if (lambda < 0.0) throw std::invalid_argument("prune: negative lambda");
  return prune_node(root, codec, lambda * lambda, q);
}

namespace {

// Serialization without the reconstruction render; the bytes and rate
// figures are enough during the lambda/q search.
EncodeOutput assemble_bits(const PixelGrid& image, const QuadtreeNode& root,
                           CodecId codec, int max_depth, int q, double lambda) {
  LeafCodes codes;
  collect_codes(root, codec, q, codes);
  GrayStreamPlan plan0 = plan_gray_stream(codes.stream0, q);
  GrayStreamPlan plan1 = plan_gray_stream(codes.stream1, q);

  BitWriter bw;
  for (std::uint8_t b : kMagic) bw.put_bits(b, 8);
  bw.put_bits(kVersion, 8);
  bw.put_bits(std::uint64_t(codec), 8);
  bw.put_bits(std::uint64_t(image.width), 16);
  bw.put_bits(std::uint64_t(image.height), 16);
  bw.put_bits(std::uint64_t(q), 4);
  bw.put_bits(std::uint64_t(max_depth), 4);
  bw.put_bits(std::uint64_t(plan0.k), 5);
  bw.put_bits(std::uint64_t(plan1.k), 5);

  std::size_t mark = bw.bit_count();
  write_structure(root, codec, bw);
  std::size_t structure_bits = bw.bit_count() - mark;

  mark = bw.bit_count();
  write_gray_stream(bw, codes.stream0, q, plan0);
  write_gray_stream(bw, codes.stream1, q, plan1);
  std::size_t gray_bits = bw.bit_count() - mark;

  EncodeOutput out;
  out.accounting.header_bits = kHeaderBits;
  out.accounting.structure_bits = std::int64_t(structure_bits);
  out.accounting.gray_bits = std::int64_t(gray_bits);
  out.accounting.nominal_gray_bits = nominal_gray_count(root) * q;
  out.accounting.root_k = root.k_bits;
  out.accounting.padding_bits = std::int64_t((8 - bw.bit_count() % 8) % 8);
  out.bytes = bw.take();

  out.point.lambda = lambda;
  out.point.total_bits = std::int64_t(out.bytes.size()) * 8;
  out.point.bpp = double(out.point.total_bits) / double(image.samples.size());
  out.point.sse = root.dist;
  out.point.q = q;
  return out;
}

}  // namespace

EncodeOutput assemble(const PixelGrid& image, const QuadtreeNode& root,
                      CodecId codec, int max_depth, int q, double lambda) {
  EncodeOutput out = assemble_bits(image, root, codec, max_depth, q, lambda);
  out.reconstruction = PixelGrid(image.height, image.width);
  render_tree(root, codec, q, out.reconstruction);
  out.point.psnr_db = psnr(image, out.reconstruction);
  return out;
}

namespace {

// Best q at this lambda; rendering deferred to the caller.
EncodeOutput best_for_lambda(const PixelGrid& image, QuadtreeNode& root,
                             const EncoderConfig& config, double lambda) {
  int q_lo = config.gray_bits == 0 ? 3 : config.gray_bits;
  int q_hi = config.gray_bits == 0 ? 8 : config.gray_bits;
  EncodeOutput best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int q = q_lo; q <= q_hi; ++q) {
    prune(root, config.codec, lambda, q);
    EncodeOutput cand =
        assemble_bits(image, root, config.codec, config.max_depth, q, lambda);
    double obj = double(cand.point.sse) +
                 lambda * lambda * double(cand.point.total_bits);
    if (obj < best_obj) {
      best_obj = obj;
      best = std::move(cand);
    }
  }
  return best;
}

// Re-prunes at the winning (lambda, q) and produces the rendered output.
EncodeOutput finalize(const PixelGrid& image, QuadtreeNode& root,
                      const EncoderConfig& config, const EncodeOutput& picked) {
  prune(root, config.codec, picked.point.lambda, picked.point.q);
  return assemble(image, root, config.codec, config.max_depth, picked.point.q,
                  picked.point.lambda);
}

constexpr double kLogLambdaLo = -8.0;
constexpr double kLogLambdaHi = 16.0;
constexpr int kBisectIters = 40;

}  // namespace

double floor_bpp(const PixelGrid& image, const EncoderConfig& config) {
  auto root = decompose(image, config);
  EncoderConfig cfg = config;
  return best_for_lambda(image, *root, cfg, std::exp(kLogLambdaHi)).point.bpp;
}

EncodeOutput encode(const PixelGrid& image, const EncoderConfig& config) {
  bool have_lambda = config.lambda >= 0.0;
  bool have_target = config.target_bpp > 0.0;
  if (have_lambda == have_target)
    throw std::invalid_argument("encode: exactly one of lambda / target_bpp required");
  if (config.gray_bits != 0 && (config.gray_bits < 3 || config.gray_bits > 8))
    throw std::invalid_argument("encode: gray_bits must be 3..8 or auto");
  if (config.max_depth < 0 || config.max_depth > 15)
    throw std::invalid_argument("encode: max_depth must be 0..15");
  if (image.width > 0xffff || image.height > 0xffff)
    throw std::invalid_argument("encode: image too large for codestream header");

  auto root = decompose(image, config);
  if (have_lambda)
    return finalize(image, *root, config,
                    best_for_lambda(image, *root, config, config.lambda));

  EncodeOutput at_floor = best_for_lambda(image, *root, config, std::exp(kLogLambdaHi));
  if (at_floor.point.bpp > config.target_bpp)
    throw std::runtime_error("encode: target bpp " + std::to_string(config.target_bpp) +
                             " unreachable, header floor is " +
                             std::to_string(at_floor.point.bpp) + " bpp");

  // bpp is non-increasing in lambda: bisect on log(lambda), keeping the
  // achieved rate closest to the target from below.
  EncodeOutput best = std::move(at_floor);
  double lo = kLogLambdaLo, hi = kLogLambdaHi;
  for (int it = 0; it < kBisectIters; ++it) {
    double mid = (lo + hi) / 2.0;
    EncodeOutput cand = best_for_lambda(image, *root, config, std::exp(mid));
    if (cand.point.bpp <= config.target_bpp) {
      if (cand.point.bpp > best.point.bpp) best = std::move(cand);
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return finalize(image, *root, config, best);
}

PixelGrid decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes + 3)
    throw std::runtime_error("decode: truncated stream");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw std::runtime_error("decode: bad magic");
  if (bytes[4] != kVersion) throw std::runtime_error("decode: version mismatch");
  if (bytes[5] > 1) throw std::runtime_error("decode: unknown codec id");
  CodecId codec = CodecId(bytes[5]);
  int width = bytes[6] << 8 | bytes[7];
  int height = bytes[8] << 8 | bytes[9];
  if (width < 1 || height < 1) throw std::runtime_error("decode: bad dimensions");

  BitReader br(bytes, kHeaderBytes);
  int q = int(br.get_bits(4));
  int max_depth = int(br.get_bits(4));
  int k0 = int(br.get_bits(5));
  int k1 = int(br.get_bits(5));
  if (q < 3 || q > 8) throw std::runtime_error("decode: bad gray depth");

  struct Leaf {
    int row0, col0, h, w;
    LeafKind kind;
    int orientation = 0;  // psml
    std::vector<std::uint8_t> bits;
    int index = 0;  // wedgelet
  };
  std::vector<Leaf> leaves;

  // Mirrors the encoder's preorder structure walk.
  auto walk = [&](auto&& self, int r0, int c0, int h, int w, int depth) -> void {
    bool splittable = depth < max_depth && h >= 4 && w >= 4;
    if (splittable && br.get_bit()) {
      int h1 = (h + 1) / 2, w1 = (w + 1) / 2;
      self(self, r0, c0, h1, w1, depth + 1);
      self(self, r0, c0 + w1, h1, w - w1, depth + 1);
      self(self, r0 + h1, c0, h - h1, w1, depth + 1);
      self(self, r0 + h1, c0 + w1, h - h1, w - w1, depth + 1);
      return;
    }
    Leaf leaf{r0, c0, h, w, LeafKind::kConstant};
    if (model_eligible(codec, h, w) && br.get_bit()) {
      leaf.kind = LeafKind::kModel;
      if (codec == CodecId::kPsml) {
        OrientationSet orient = orientations(h, w);
        leaf.orientation = int(br.get_bits(orientation_index_bits(h, w)));
        if (leaf.orientation >= int(orient.candidates.size()))
          throw std::runtime_error("decode: orientation index out of range");
        LinePartition part = partition_geometry(h, w, orient, leaf.orientation);
        leaf.bits.resize(std::size_t(part.p));
        for (auto& b : leaf.bits) b = std::uint8_t(br.get_bit());
      } else {
        std::size_t dict_size = dictionary_size(h, w);
        leaf.index = int(br.get_bits(wedgelet_index_bits(dict_size)));
        if (leaf.index > int(dict_size))
          throw std::runtime_error("decode: wedgelet index out of range");
      }
    }
    leaves.push_back(std::move(leaf));
  };
  walk(walk, 0, 0, height, width, 0);

  std::size_t count0 = 0, count1 = 0;
  for (const Leaf& leaf : leaves) {
    ++count0;
    if (leaf.kind == LeafKind::kModel) ++count1;
  }
  std::vector<int> stream0 = read_gray_stream(br, count0, q, k0);
  std::vector<int> stream1 = read_gray_stream(br, count1, q, k1);

  auto dequant = [&](int code) {
    return double(std::lround(double(code) * 255.0 / ((1 << q) - 1)));
  };

  PixelGrid out(height, width);
  std::size_t i0 = 0, i1 = 0;
  for (const Leaf& leaf : leaves) {
    double g0 = dequant(stream0[i0++]);
    if (leaf.kind == LeafKind::kConstant) {
      for (int r = 0; r < leaf.h; ++r)
        for (int c = 0; c < leaf.w; ++c)
          out.at(leaf.row0 + r, leaf.col0 + c) = std::uint8_t(g0);
    } else if (codec == CodecId::kPsml) {
      double g1 = dequant(stream1[i1++]);
      OrientationSet orient = orientations(leaf.h, leaf.w);
      LinePartition part = partition_geometry(leaf.h, leaf.w, orient, leaf.orientation);
      PsmlModel model{leaf.orientation, leaf.bits, g0, g1};
      render_into(out, leaf.row0, leaf.col0, part, model);
    } else {
      double g1 = dequant(stream1[i1++]);
      std::vector<Beamlet> dict = enumerate_beamlets(leaf.h, leaf.w);
      WedgeletFit fit;
      fit.index = leaf.index;
      fit.ca = g0;
      fit.cb = g1;
      render_wedgelet_into(out, leaf.row0, leaf.col0, leaf.h, leaf.w, dict, fit);
    }
  }
  return out;
}

}  // namespace psml
