#include "psml/entropy.hpp"

#include <limits>
#include <stdexcept>

namespace psml {

int predict(const std::vector<int>& stream, std::size_t position, int q) {
  if (position == 0) return 1 << (q - 1);
  return stream[position - 1];
}

std::uint32_t zigzag(int e) {
  return e >= 0 ? std::uint32_t(2 * e) : std::uint32_t(-2 * e - 1);
}

int unzigzag(std::uint32_t u) {
  return (u & 1u) ? -int((u + 1) / 2) : int(u / 2);
}

void rice_encode(BitWriter& bw, std::uint32_t value, int k) {
  if (k < 0 || k > 31) throw std::invalid_argument("rice_encode: bad k");
  bw.put_unary(value >> k);
  bw.put_bits(value, k);
}

std::uint32_t rice_decode(BitReader& br, int k) {
  std::uint32_t quot = std::uint32_t(br.get_unary(1u << 16));
  return (quot << k) | std::uint32_t(br.get_bits(k));
}

std::size_t rice_bit_count(std::uint32_t value, int k) {
  return std::size_t(value >> k) + 1 + std::size_t(k);
}

int choose_k(const std::vector<std::uint32_t>& residuals, int q) {
  if (residuals.empty()) throw std::invalid_argument("choose_k: empty residual list");
  int best_k = 0;
  std::size_t best_bits = std::numeric_limits<std::size_t>::max();
  for (int k = 0; k <= q + 1; ++k) {
    std::size_t bits = 0;
    for (std::uint32_t v : residuals) bits += rice_bit_count(v, k);
    if (bits < best_bits) {
      best_bits = bits;
      best_k = k;
    }
  }
  return best_k;
}

GrayStreamPlan plan_gray_stream(const std::vector<int>& codes, int q) {
  GrayStreamPlan plan;
  if (codes.empty()) return plan;
  plan.residuals.reserve(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i)
    plan.residuals.push_back(zigzag(codes[i] - predict(codes, i, q)));
  plan.k = choose_k(plan.residuals, q);
  std::size_t rice_bits = 0;
  for (std::uint32_t v : plan.residuals) rice_bits += rice_bit_count(v, plan.k);
  std::size_t raw_bits = codes.size() * std::size_t(q);
  plan.raw = rice_bits > raw_bits;
  plan.payload_bits = plan.raw ? raw_bits : rice_bits;
  return plan;
}

void write_gray_stream(BitWriter& bw, const std::vector<int>& codes, int q,
                       const GrayStreamPlan& plan) {
  if (codes.empty()) return;
  bw.put_bit(plan.raw ? 1 : 0);
  if (plan.raw) {
    for (int code : codes) bw.put_bits(std::uint64_t(code), q);
  } else {
    for (std::uint32_t v : plan.residuals) rice_encode(bw, v, plan.k);
  }
}

std::vector<int> read_gray_stream(BitReader& br, std::size_t count, int q, int k) {
  std::vector<int> codes;
  if (count == 0) return codes;
  codes.reserve(count);
  bool raw = br.get_bit() != 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (raw) {
      codes.push_back(int(br.get_bits(q)));
    } else {
      int e = unzigzag(rice_decode(br, k));
      int code = predict(codes, i, q) + e;
      if (code < 0 || code >= (1 << q))
        throw std::runtime_error("gray stream: code out of range");
      codes.push_back(code);
    }
  }
  return codes;
}

}  // namespace psml
