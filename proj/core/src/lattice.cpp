#include "dfx/lattice.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "dfx/error.hpp"
#include "dfx/parallel.hpp"
#include "dfx/rng.hpp"

namespace dfx {

namespace {

constexpr std::uint64_t kSampleBlock = std::uint64_t{1} << 16;

std::uint64_t checked_power(int base, int exponent) {
  std::uint64_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(base)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result *= static_cast<std::uint64_t>(base);
  }
  return result;
}

BigInt big_power(std::int64_t base, int exponent) {
  BigInt r = 1;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

}  // namespace

LatticeSpace::LatticeSpace(int n, int p) : n_(n), p_(p), size_(0) {
  if (n < 1) throw Error(Errc::InvalidArgument, "lattice dimension n must be >= 1");
  if (p < 1 || p > 255) throw Error(Errc::InvalidArgument, "lattice cardinality p must be in [1, 255]");
  size_ = checked_power(p, n);
}

bool LatticeSpace::contains(std::span<const Coord> x) const noexcept {
  if (x.size() != static_cast<std::size_t>(n_)) return false;
  return std::all_of(x.begin(), x.end(), [this](Coord c) { return c >= 1 && c <= p_; });
}

std::uint64_t LatticeSpace::index_of(std::span<const Coord> x) const {
  if (!contains(x)) throw Error(Errc::OutOfBounds, "point outside [p]^n");
  std::uint64_t index = 0;
  for (Coord c : x) index = index * static_cast<std::uint64_t>(p_) + (c - 1u);
  return index;
}

Point LatticeSpace::point_at(std::uint64_t index) const {
  if (index >= size_) throw Error(Errc::OutOfBounds, "lattice index out of range");
  Point x(static_cast<std::size_t>(n_));
  for (int i = n_ - 1; i >= 0; --i) {
    x[static_cast<std::size_t>(i)] = static_cast<Coord>(index % static_cast<std::uint64_t>(p_) + 1);
    index /= static_cast<std::uint64_t>(p_);
  }
  return x;
}

void LatticeSpace::require_enumerable(std::uint64_t cap) const {
  if (size_ > cap) {
    throw Error(Errc::SpaceTooLarge, "p^n = " + (size_ == std::numeric_limits<std::uint64_t>::max()
                                                     ? std::string("overflow")
                                                     : std::to_string(size_)) +
                                         " exceeds cap " + std::to_string(cap));
  }
}

void for_each_point(const LatticeSpace& space, const std::function<void(const Point&)>& visit, std::uint64_t cap) {
  space.require_enumerable(cap);
  Point x(static_cast<std::size_t>(space.dim()), 1);
  const int p = space.cardinality();
  for (std::uint64_t k = 0; k < space.size(); ++k) {
    visit(x);
    for (int i = space.dim() - 1; i >= 0; --i) {
      auto& c = x[static_cast<std::size_t>(i)];
      if (c < p) {
        ++c;
        break;
      }
      c = 1;
    }
  }
}

std::vector<Point> enumerate_points(const LatticeSpace& space, std::uint64_t cap) {
  space.require_enumerable(cap);
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(space.size()));
  for_each_point(space, [&](const Point& x) { points.push_back(x); }, cap);
  return points;
}

std::vector<double> to_real(std::span<const Coord> x) { return {x.begin(), x.end()}; }

int parity_label(std::span<const Coord> x) noexcept {
  unsigned sum = 0;
  for (Coord c : x) sum += c;
  return (sum % 2 == 0) ? 1 : -1;
}

int parity_label(const LatticeSpace& space, std::span<const Coord> x) {
  if (!space.contains(x)) throw Error(Errc::OutOfBounds, "point outside [p]^n");
  return parity_label(x);
}

Concept Concept::parity() { return {Kind::Parity, 0, {}, 0}; }

Concept Concept::constant(int label) {
  if (label != 1 && label != -1) throw Error(Errc::LabelDomainError, "constant target label must be +1 or -1");
  return {Kind::Constant, label, {}, 0};
}

Concept Concept::tabulated(const LatticeSpace& space, std::vector<int> labels) {
  if (labels.size() != space.size()) throw Error(Errc::InvalidArgument, "label table must have p^n entries");
  for (int y : labels) {
    if (y != 1 && y != -1) throw Error(Errc::LabelDomainError, "tabulated labels must be +1 or -1");
  }
  return {Kind::Tabulated, 0, std::move(labels), space.size()};
}

int Concept::label(const LatticeSpace& space, std::span<const Coord> x) const {
  if (!space.contains(x)) throw Error(Errc::OutOfBounds, "point outside [p]^n");
  switch (kind_) {
    case Kind::Parity: return parity_label(x);
    case Kind::Constant: return constant_;
    case Kind::Tabulated:
      if (table_size_ != space.size()) throw Error(Errc::InvalidArgument, "target table built for another space");
      return table_[static_cast<std::size_t>(space.index_of(x))];
  }
  return 0;
}

std::string Concept::describe() const {
  switch (kind_) {
    case Kind::Parity: return "parity";
    case Kind::Constant: return constant_ > 0 ? "constant(+1)" : "constant(-1)";
    case Kind::Tabulated: return "tabulated";
  }
  return "?";
}

Rational Rational::parse(const std::string& text) {
  Rational r{0, 1};
  const auto slash = text.find('/');
  const auto dot = text.find('.');
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(Errc::InvalidArgument, "cannot parse rational '" + text + "'");
    }
    return v;
  };
  if (slash != std::string::npos) {
    r.num = parse_int(std::string_view(text).substr(0, slash));
    r.den = parse_int(std::string_view(text).substr(slash + 1));
  } else if (dot != std::string::npos) {
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    r.num = parse_int(digits);
    r.den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) r.den *= 10;
  } else {
    r.num = parse_int(text);
  }
  if (r.num <= 0 || r.den <= 0) throw Error(Errc::InvalidArgument, "rational must be positive: '" + text + "'");
  const std::int64_t g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

LatticeDistribution LatticeDistribution::uniform() { return {Kind::Uniform, Rational{1, 1}}; }

LatticeDistribution LatticeDistribution::product(Rational a) {
  if (a.num <= 0 || a.den <= 0) throw Error(Errc::InvalidArgument, "product parameter a must be positive");
  return {Kind::Product, a};
}

std::string LatticeDistribution::describe() const {
  return kind_ == Kind::Uniform ? std::string("uniform") : "product(a=" + a_.str() + ")";
}

void LatticeDistribution::check(const LatticeSpace& space) const {
  if (kind_ == Kind::Product && space.cardinality() != 4) {
    throw Error(Errc::UnsupportedCardinality, "product distribution is defined only for p = 4");
  }
}

std::vector<BigInt> LatticeDistribution::dimension_weights(const LatticeSpace& space, int dimension) const {
  check(space);
  if (dimension < 1 || dimension > space.dim()) throw Error(Errc::OutOfBounds, "dimension index out of range");
  if (kind_ == Kind::Uniform) return std::vector<BigInt>(static_cast<std::size_t>(space.cardinality()), BigInt(1));
  // With a = u/v, scaling (1, a, a^i, 1) by v^i keeps every entry integral.
  const BigInt vi = big_power(a_.den, dimension);
  const BigInt u_vi1 = BigInt(a_.num) * big_power(a_.den, dimension - 1);
  const BigInt ui = big_power(a_.num, dimension);
  return {vi, u_vi1, ui, vi};
}

std::vector<double> LatticeDistribution::dimension_masses(const LatticeSpace& space, int dimension) const {
  check(space);
  if (dimension < 1 || dimension > space.dim()) throw Error(Errc::OutOfBounds, "dimension index out of range");
  const auto p = static_cast<std::size_t>(space.cardinality());
  if (kind_ == Kind::Uniform) return std::vector<double>(p, 1.0 / static_cast<double>(p));
  const double a = a_.value();
  const double ai = std::pow(a, dimension);
  const double b = 2.0 + a + ai;
  return {1.0 / b, a / b, ai / b, 1.0 / b};
}

double LatticeDistribution::mass(const LatticeSpace& space, std::span<const Coord> x) const {
  check(space);
  if (!space.contains(x)) throw Error(Errc::OutOfBounds, "point outside [p]^n");
  if (kind_ == Kind::Uniform) return 1.0 / static_cast<double>(space.size());
  double m = 1.0;
  for (int i = 1; i <= space.dim(); ++i) {
    m *= dimension_masses(space, i)[x[static_cast<std::size_t>(i - 1)] - 1u];
  }
  return m;
}

BigInt LatticeDistribution::weight(const LatticeSpace& space, std::span<const Coord> x) const {
  if (!space.contains(x)) throw Error(Errc::OutOfBounds, "point outside [p]^n");
  if (kind_ == Kind::Uniform) return 1;
  BigInt w = 1;
  for (int i = 1; i <= space.dim(); ++i) {
    w *= dimension_weights(space, i)[x[static_cast<std::size_t>(i - 1)] - 1u];
  }
  return w;
}

BigInt LatticeDistribution::total_weight(const LatticeSpace& space) const {
  BigInt total = 1;
  for (int i = 1; i <= space.dim(); ++i) {
    BigInt s = 0;
    for (const auto& w : dimension_weights(space, i)) s += w;
    total *= s;
  }
  return total;
}

std::vector<Point> sample(const LatticeDistribution& dist, const LatticeSpace& space, std::uint64_t count,
                          std::uint64_t seed) {
  std::vector<std::vector<double>> cumulative;
  for (int i = 1; i <= space.dim(); ++i) {
    auto masses = dist.dimension_masses(space, i);
    std::partial_sum(masses.begin(), masses.end(), masses.begin());
    cumulative.push_back(std::move(masses));
  }
  std::vector<Point> out(static_cast<std::size_t>(count));
  const std::uint64_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  parallel_for(static_cast<std::size_t>(blocks), default_thread_count(), [&](std::size_t b) {
    Rng rng(derive_seed(seed, "lattice.sample", b));
    const std::uint64_t begin = b * kSampleBlock;
    const std::uint64_t end = std::min(count, begin + kSampleBlock);
    for (std::uint64_t k = begin; k < end; ++k) {
      Point x(static_cast<std::size_t>(space.dim()));
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = rng.uniform01();
        const auto& cdf = cumulative[i];
        std::size_t v = 0;
        while (v + 1 < cdf.size() && u >= cdf[v]) ++v;
        x[i] = static_cast<Coord>(v + 1);
      }
      out[static_cast<std::size_t>(k)] = std::move(x);
    }
  });
  return out;
}

}  // namespace dfx
