#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace copulacov::detail {

/// Static wavelet matrix over a sequence of 32-bit values. Answers
/// "how many of the first `end` values are < bound" in O(log sigma).
class WaveletMatrix {
 public:
  WaveletMatrix() = default;
  explicit WaveletMatrix(std::span<const std::uint32_t> values);

  std::size_t size() const noexcept { return size_; }
  std::size_t count_less(std::size_t end, std::uint64_t bound) const noexcept;

 private:
  struct Level {
    std::vector<std::uint64_t> words;
    std::vector<std::uint32_t> prefix;  // popcount of words[0..i)
    std::size_t zeros = 0;

    std::size_t rank1(std::size_t pos) const noexcept;
  };

  std::vector<Level> levels_;
  std::size_t size_ = 0;
  unsigned bits_ = 0;
};

}  // namespace copulacov::detail
