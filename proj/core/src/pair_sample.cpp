#include "copulacov/pair_sample.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "copulacov/error.hpp"

namespace copulacov {

PairSample::PairSample(std::vector<Pair> pairs, MarginKind kind) : pairs_(std::move(pairs)), kind_(kind) {
  for (const auto& p : pairs_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::DomainError, "sample contains a non-finite value");
    }
    if (kind_ == MarginKind::Uniform && !(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw Error(ErrorCode::DomainError, "uniform-margin sample has a coordinate outside [0,1]");
    }
  }
}

void write_csv(std::ostream& out, const PairSample& sample, std::span<const std::string> comments) {
  for (const auto& line : comments) out << "# " << line << '\n';
  const auto flags = out.flags();
  const auto precision = out.precision(17);
  out << "u,v\n";
  for (const auto& p : sample) out << p.x << ',' << p.y << '\n';
  out.precision(precision);
  out.flags(flags);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

PairSample read_csv(std::istream& in, MarginKind kind) {
  std::vector<Pair> pairs;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected two columns");
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    pairs.push_back({parse_field(view.substr(0, comma), line_no), parse_field(view.substr(comma + 1), line_no)});
  }
  if (!header_seen) throw Error(ErrorCode::ParseError, "missing CSV header");
  return PairSample(std::move(pairs), kind);
}

}  // namespace copulacov
