#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "psml/entropy.hpp"

using namespace psml;

TEST_CASE("bit writer/reader identity") {
  std::mt19937_64 rng(5);
  std::vector<int> bits(20000);
  for (auto& b : bits) b = int(rng() & 1);
  BitWriter bw;
  for (int b : bits) bw.put_bit(b);
  CHECK(bw.bit_count() == bits.size());
  BitReader br(bw.bytes());
  for (int b : bits) CHECK(br.get_bit() == b);

  BitWriter bw2;
  bw2.put_bits(0x1a5, 9);
  BitReader br2(bw2.bytes());
  CHECK(br2.get_bits(9) == 0x1a5);
}

TEST_CASE("bit reader overrun") {
  BitWriter bw;
  bw.put_bits(0xff, 8);
  BitReader br(bw.bytes());
  br.get_bits(8);
  CHECK_THROWS_AS(br.get_bit(), std::runtime_error);
}

TEST_CASE("rice code shapes") {
  BitWriter bw;
  rice_encode(bw, 5, 1);  // quotient 2 -> 110, remainder 1 -> 1
  CHECK(bw.bit_count() == 4);
  CHECK(bw.bytes()[0] == 0b11010000);

  BitWriter bw0;
  rice_encode(bw0, 0, 0);  // single 0 bit
  CHECK(bw0.bit_count() == 1);
  CHECK(bw0.bytes()[0] == 0);

  BitReader br(bw.bytes());
  CHECK(rice_decode(br, 1) == 5);
}

TEST_CASE("rice round trips") {
  std::mt19937_64 rng(6);
  for (int k = 0; k <= 9; ++k) {
    BitWriter bw;
    std::vector<std::uint32_t> values(200);
    for (auto& v : values) v = std::uint32_t(rng() % 511);
    for (auto v : values) rice_encode(bw, v, k);
    BitReader br(bw.bytes());
    for (auto v : values) CHECK(rice_decode(br, k) == v);
  }
}

TEST_CASE("zigzag is a bijection on residual range") {
  for (int e = -255; e <= 255; ++e) CHECK(unzigzag(zigzag(e)) == e);
  CHECK(zigzag(0) == 0);
  CHECK(zigzag(-1) == 1);
  CHECK(zigzag(1) == 2);
}

TEST_CASE("predict is previous value with mid-range start") {
  std::vector<int> stream = {100, 101, 99};
  CHECK(predict(stream, 0, 8) == 128);
  CHECK(predict(stream, 1, 8) == 100);
  CHECK(predict(stream, 2, 8) == 101);
  CHECK(predict(stream, 0, 4) == 8);
}

TEST_CASE("choose_k minimizes total bits") {
  std::vector<std::uint32_t> zeros(50, 0);
  CHECK(choose_k(zeros, 8) == 0);

  std::vector<std::uint32_t> big(50, 255);
  int kbig = choose_k(big, 8);
  std::size_t best = 0;
  for (auto v : big) best += rice_bit_count(v, kbig);
  for (int k = 0; k <= 9; ++k) {
    std::size_t bits = 0;
    for (auto v : big) bits += rice_bit_count(v, k);
    CHECK(best <= bits);
  }
  CHECK(kbig >= 6);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint32_t> vals(1 + rng() % 100);
    for (auto& v : vals) v = std::uint32_t(rng() % 511);
    int k = choose_k(vals, 8);
    std::size_t kbits = 0;
    for (auto v : vals) kbits += rice_bit_count(v, k);
    for (int other = 0; other <= 9; ++other) {
      std::size_t bits = 0;
      for (auto v : vals) bits += rice_bit_count(v, other);
      CHECK(kbits <= bits);
    }
  }
}

TEST_CASE("gray stream round trip across q") {
  std::mt19937_64 rng(9);
  for (int q = 3; q <= 8; ++q) {
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<int> codes(rng() % 200);
      for (auto& c : codes) c = int(rng() % (1u << q));
      GrayStreamPlan plan = plan_gray_stream(codes, q);
      BitWriter bw;
      write_gray_stream(bw, codes, q, plan);
      // coded size <= raw size + 1 flag bit
      if (!codes.empty())
        CHECK(bw.bit_count() <= codes.size() * std::size_t(q) + 1);
      BitReader br(bw.bytes());
      CHECK(read_gray_stream(br, codes.size(), q, plan.k) == codes);
    }
  }
}

TEST_CASE("smooth streams compress below raw") {
  std::vector<int> codes;
  for (int i = 0; i < 200; ++i) codes.push_back(128 + (i % 3) - 1);
  GrayStreamPlan plan = plan_gray_stream(codes, 8);
  CHECK(!plan.raw);
  CHECK(plan.payload_bits < codes.size() * 8);
}
