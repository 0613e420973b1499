#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace psml {

// MSB-first bit writer over a growable byte buffer.
class BitWriter {
 public:
  void put_bit(int bit) {
    if (bit_pos_ == 0) buf_.push_back(0);
    if (bit) buf_.back() |= std::uint8_t(0x80u >> bit_pos_);
    bit_pos_ = (bit_pos_ + 1) & 7;
  }

  // Writes the low `width` bits of value, most significant first.
  void put_bits(std::uint64_t value, int width) {
    for (int i = width - 1; i >= 0; --i) put_bit(int((value >> i) & 1u));
  }

  void put_unary(std::uint64_t q) {
    for (std::uint64_t i = 0; i < q; ++i) put_bit(1);
    put_bit(0);
  }

  std::size_t bit_count() const {
    return buf_.empty() ? 0 : (buf_.size() - 1) * 8 + (bit_pos_ == 0 ? 8 : bit_pos_);
  }

  // Zero-padded to a byte boundary.
  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
  int bit_pos_ = 0;  // next bit slot within the last byte
};

class BitReader {
 public:
  explicit BitReader(const std::vector<std::uint8_t>& bytes, std::size_t start_byte = 0)
      : buf_(bytes), pos_(start_byte * 8) {}

  int get_bit() {
    std::size_t byte = pos_ >> 3;
    if (byte >= buf_.size()) throw std::runtime_error("bitstream: truncated stream");
    int bit = (buf_[byte] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return bit;
  }

  std::uint64_t get_bits(int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | std::uint64_t(get_bit());
    return v;
  }

  std::uint64_t get_unary(std::uint64_t limit = 1u << 20) {
    std::uint64_t q = 0;
    while (get_bit()) {
      if (++q > limit) throw std::runtime_error("bitstream: unary run too long");
    }
    return q;
  }

  std::size_t bit_pos() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& buf_;
  std::size_t pos_ = 0;
};

}  // namespace psml
