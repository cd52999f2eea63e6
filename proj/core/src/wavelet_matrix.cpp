#include "copulacov/detail/wavelet_matrix.hpp"

#include <algorithm>
#include <bit>

namespace copulacov::detail {

std::size_t WaveletMatrix::Level::rank1(std::size_t pos) const noexcept {
  const std::size_t word = pos / 64;
  const std::size_t offset = pos % 64;
  std::size_t r = prefix[word];
  if (offset != 0) r += static_cast<std::size_t>(std::popcount(words[word] & ((std::uint64_t{1} << offset) - 1)));
  return r;
}

WaveletMatrix::WaveletMatrix(std::span<const std::uint32_t> values) : size_(values.size()) {
  const std::uint32_t max_value = values.empty() ? 0 : *std::max_element(values.begin(), values.end());
  bits_ = std::max(1u, static_cast<unsigned>(std::bit_width(max_value)));
  levels_.resize(bits_);

  std::vector<std::uint32_t> current(values.begin(), values.end());
  std::vector<std::uint32_t> next(size_);
  for (unsigned level = 0; level < bits_; ++level) {
    const unsigned shift = bits_ - 1 - level;
    Level& lv = levels_[level];
    lv.words.assign(size_ / 64 + 1, 0);
    for (std::size_t i = 0; i < size_; ++i) {
      if ((current[i] >> shift) & 1u) lv.words[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    lv.prefix.assign(lv.words.size() + 1, 0);
    for (std::size_t w = 0; w < lv.words.size(); ++w) {
      lv.prefix[w + 1] = lv.prefix[w] + static_cast<std::uint32_t>(std::popcount(lv.words[w]));
    }
    std::size_t z = 0;
    for (std::size_t i = 0; i < size_; ++i) {
      if (!((current[i] >> shift) & 1u)) next[z++] = current[i];
    }
    lv.zeros = z;
    for (std::size_t i = 0; i < size_; ++i) {
      if ((current[i] >> shift) & 1u) next[z++] = current[i];
    }
    current.swap(next);
  }
}

std::size_t WaveletMatrix::count_less(std::size_t end, std::uint64_t bound) const noexcept {
  end = std::min(end, size_);
  if (bound >= (std::uint64_t{1} << bits_)) return end;
  std::size_t result = 0;
  std::size_t s = 0;
  std::size_t e = end;
  for (unsigned level = 0; level < bits_; ++level) {
    const unsigned shift = bits_ - 1 - level;
    const Level& lv = levels_[level];
    const std::size_t zeros_s = s - lv.rank1(s);
    const std::size_t zeros_e = e - lv.rank1(e);
    if ((bound >> shift) & 1u) {
      result += zeros_e - zeros_s;
      s = lv.zeros + (s - zeros_s);
      e = lv.zeros + (e - zeros_e);
    } else {
      s = zeros_s;
      e = zeros_e;
    }
  }
  return result;
}

}  // namespace copulacov::detail
