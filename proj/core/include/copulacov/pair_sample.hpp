#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace copulacov {

enum class MarginKind {
  Raw,      ///< arbitrary continuous margins
  Uniform,  ///< margins already on [0,1]: true (F(X), G(Y)) or rank-scaled
};

struct Pair {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Pair&, const Pair&) = default;
};

/// An ordered collection of bivariate observations.
class PairSample {
 public:
  PairSample() = default;
  /// Throws Error(DomainError) for non-finite values, or for Uniform samples
  /// with coordinates outside [0, 1].
  PairSample(std::vector<Pair> pairs, MarginKind kind);

  std::span<const Pair> pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  MarginKind kind() const noexcept { return kind_; }
  const Pair& operator[](std::size_t i) const { return pairs_[i]; }

  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }

  friend bool operator==(const PairSample&, const PairSample&) = default;

 private:
  std::vector<Pair> pairs_;
  MarginKind kind_ = MarginKind::Uniform;
};

/// Writes `u,v` header then one pair per row at 17 significant digits.
/// Each comment line is emitted first, prefixed with "# ".
void write_csv(std::ostream& out, const PairSample& sample,
               std::span<const std::string> comments = {});

/// Reads a two-column CSV. Lines starting with '#' are skipped; the first
/// remaining line is the header. Throws Error(ParseError) with a line number.
PairSample read_csv(std::istream& in, MarginKind kind);

}  // namespace copulacov
