#pragma once

#include <cstdint>
#include <vector>

#include "psml/bitio.hpp"

namespace psml {

// Previous-value prediction within one gray-code stream; the first element
// is predicted as mid-range 2^(q-1).
int predict(const std::vector<int>& stream, std::size_t position, int q);

// Signed residual -> nonnegative (2e for e >= 0, -2e-1 otherwise).
std::uint32_t zigzag(int e);
int unzigzag(std::uint32_t u);

void rice_encode(BitWriter& bw, std::uint32_t value, int k);
std::uint32_t rice_decode(BitReader& br, int k);

std::size_t rice_bit_count(std::uint32_t value, int k);

// Exhaustive minimization of total coded bits over k in [0, q+1];
// ties go to the smaller k.
int choose_k(const std::vector<std::uint32_t>& residuals, int q);

struct GrayStreamPlan {
  int k = 0;
  bool raw = false;                      // raw fallback: q bits per code
  std::vector<std::uint32_t> residuals;  // zigzagged prediction residuals
  std::size_t payload_bits = 0;          // excludes the 1 flag bit
};

// Decides Rice-vs-raw for a stream of q-bit codes. Raw wins when Rice
// coding would expand the data, so coded size <= raw size + 1 flag bit.
GrayStreamPlan plan_gray_stream(const std::vector<int>& codes, int q);

// Payload layout per stream: nothing when empty, else 1 flag bit
// (0 = Rice, 1 = raw) followed by the residuals or raw codes.
void write_gray_stream(BitWriter& bw, const std::vector<int>& codes, int q,
                       const GrayStreamPlan& plan);
std::vector<int> read_gray_stream(BitReader& br, std::size_t count, int q, int k);

}  // namespace psml
