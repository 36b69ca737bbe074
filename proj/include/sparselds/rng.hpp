#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace sparselds {

// Philox4x32-10 counter-based generator. A (key, stream) pair selects an
// independent sequence; the low 64 counter bits index within it.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t key, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  // The raw bijection: ten rounds of Philox on one counter block.
  static Block encrypt(Block counter, Key key);

 private:
  Key key_;
  Block counter_;
  Block buffer_{};
  int next_ = 4;
};

// Folds a path of identifiers into a 64-bit stream id.
std::uint64_t stream_id(std::initializer_list<std::uint64_t> path);

inline Philox4x32 make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Philox4x32(seed, stream_id(path));
}

}  // namespace sparselds
