#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dfx {

using Coord = std::uint8_t;
/// A point of [p]^n; every coordinate lies in 1..p.
using Point = std::vector<Coord>;
using BigInt = boost::multiprecision::cpp_int;

/// Default refusal threshold for anything that materializes every point.
inline constexpr std::uint64_t kDefaultPointCap = std::uint64_t{1} << 24;

/// The discrete input space [p]^n.
class LatticeSpace {
 public:
  LatticeSpace(int n, int p);

  int dim() const noexcept { return n_; }
  int cardinality() const noexcept { return p_; }

  /// p^n, or UINT64_MAX when that overflows.
  std::uint64_t size() const noexcept { return size_; }

  bool contains(std::span<const Coord> x) const noexcept;

  /// Position of x in lexicographic order (last coordinate varies fastest).
  std::uint64_t index_of(std::span<const Coord> x) const;
  Point point_at(std::uint64_t index) const;

  /// Throws SpaceTooLarge when p^n exceeds cap.
  void require_enumerable(std::uint64_t cap) const;

  friend bool operator==(const LatticeSpace&, const LatticeSpace&) = default;

 private:
  int n_;
  int p_;
  std::uint64_t size_;
};

std::vector<Point> enumerate_points(const LatticeSpace& space, std::uint64_t cap = kDefaultPointCap);

/// Visits points in the same order as enumerate_points without storing them.
void for_each_point(const LatticeSpace& space, const std::function<void(const Point&)>& visit,
                    std::uint64_t cap = kDefaultPointCap);

std::vector<double> to_real(std::span<const Coord> x);

/// (-1)^{|x|_1}
int parity_label(std::span<const Coord> x) noexcept;
/// Same, with an OutOfBounds check against space.
int parity_label(const LatticeSpace& space, std::span<const Coord> x);

/// A total map from lattice points to {-1, +1}.
class Concept {
 public:
  enum class Kind { Parity, Constant, Tabulated };

  static Concept parity();
  static Concept constant(int label);
  /// labels[i] is the label of space.point_at(i).
  static Concept tabulated(const LatticeSpace& space, std::vector<int> labels);

  Kind kind() const noexcept { return kind_; }
  int label(const LatticeSpace& space, std::span<const Coord> x) const;
  std::string describe() const;

 private:
  Concept(Kind kind, int constant, std::vector<int> table, std::uint64_t table_space)
      : kind_(kind), constant_(constant), table_(std::move(table)), table_size_(table_space) {}

  Kind kind_;
  int constant_;
  std::vector<int> table_;
  std::uint64_t table_size_;
};

/// Exact positive rational used for the product distribution's parameter a.
struct Rational {
  std::int64_t num = 3;
  std::int64_t den = 1;

  static Rational parse(const std::string& text);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Uniform, or the product distribution p_n(x) = prod_i f_i(x_i) with
/// f_i = (1, a, a^i, 1) / (2 + a + a^i) over [4].
class LatticeDistribution {
 public:
  enum class Kind { Uniform, Product };

  static LatticeDistribution uniform();
  static LatticeDistribution product(Rational a = {});

  Kind kind() const noexcept { return kind_; }
  const Rational& a() const noexcept { return a_; }
  std::string describe() const;

  /// f_i over [p]; dimension is 1-based. Product requires p == 4.
  std::vector<double> dimension_masses(const LatticeSpace& space, int dimension) const;
  /// Integer weights proportional to f_i; their sum is the normalizer.
  std::vector<BigInt> dimension_weights(const LatticeSpace& space, int dimension) const;

  double mass(const LatticeSpace& space, std::span<const Coord> x) const;
  /// Product of per-dimension integer weights.
  BigInt weight(const LatticeSpace& space, std::span<const Coord> x) const;
  /// Sum of weight over the whole lattice.
  BigInt total_weight(const LatticeSpace& space) const;

 private:
  LatticeDistribution(Kind kind, Rational a) : kind_(kind), a_(a) {}
  void check(const LatticeSpace& space) const;

  Kind kind_;
  Rational a_;
};

/// count i.i.d. draws; identical for identical (dist, space, count, seed).
std::vector<Point> sample(const LatticeDistribution& dist, const LatticeSpace& space, std::uint64_t count,
                          std::uint64_t seed);

}  // namespace dfx
