#pragma once

// Elliptic curves in long Weierstrass form
//   y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
// over Q (exact rationals) and over prime fields F_p.

#include "mwlab/zmodule.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mwlab {

inline constexpr std::uint64_t kDefaultCountCap = 100'000;

using Rational = mpq_class;

struct RationalPoint {
    bool infinity = true;
    Rational x, y;

    static RationalPoint at_infinity() { return {}; }
    static RationalPoint affine(Rational x, Rational y) { return {false, std::move(x), std::move(y)}; }
    friend bool operator==(const RationalPoint& a, const RationalPoint& b) {
        if (a.infinity || b.infinity) return a.infinity == b.infinity;
        return a.x == b.x && a.y == b.y;
    }
    std::string to_string() const;
};

struct FpPoint {
    bool infinity = true;
    std::int64_t x = 0;
    std::int64_t y = 0;

    static FpPoint at_infinity() { return {}; }
    static FpPoint affine(std::int64_t x, std::int64_t y) { return {false, x, y}; }
    friend bool operator==(const FpPoint& a, const FpPoint& b) {
        if (a.infinity || b.infinity) return a.infinity == b.infinity;
        return a.x == b.x && a.y == b.y;
    }
    std::string to_string() const;
};

enum class PlaceStatus { good, bad, excluded };

struct Place {
    std::uint64_t p = 0;
    PlaceStatus status = PlaceStatus::excluded;
};

const char* to_string(PlaceStatus s);

class FpCurve;

// Curve over Q with integer coefficients.
class CurveQ {
  public:
    // Throws InputError when the discriminant vanishes.
    CurveQ(Integer a1, Integer a2, Integer a3, Integer a4, Integer a6);

    const Integer& a1() const { return a_[0]; }
    const Integer& a2() const { return a_[1]; }
    const Integer& a3() const { return a_[2]; }
    const Integer& a4() const { return a_[3]; }
    const Integer& a6() const { return a_[4]; }
    const Integer& discriminant() const { return disc_; }

    bool is_on(const RationalPoint& p) const;
    void require_on(const RationalPoint& p) const;
    RationalPoint neg(const RationalPoint& p) const;
    RationalPoint add(const RationalPoint& p, const RationalPoint& q) const;
    RationalPoint scalar_mul(const Integer& n, const RationalPoint& p) const;

    Place place(std::uint64_t p) const;
    FpCurve reduce(const Place& v) const;
    FpPoint reduce_point(const RationalPoint& pt, const Place& v) const;

    std::string to_string() const;

  private:
    RationalPoint add_unchecked(const RationalPoint& p, const RationalPoint& q) const;

    Integer a_[5];
    Integer disc_;
};

class FpCurve {
  public:
    // p must be a prime > 3 with nonvanishing discriminant mod p.
    FpCurve(std::int64_t p, std::int64_t a1, std::int64_t a2, std::int64_t a3, std::int64_t a4, std::int64_t a6);

    std::int64_t p() const { return p_; }
    std::int64_t a(int i) const;

    bool is_on(const FpPoint& pt) const;
    void require_on(const FpPoint& pt) const;
    FpPoint neg(const FpPoint& pt) const;
    FpPoint add(const FpPoint& a, const FpPoint& b) const;
    FpPoint scalar_mul(const Integer& n, const FpPoint& pt) const;
    FpPoint scalar_mul(std::int64_t n, const FpPoint& pt) const;

    // #E(F_p) including infinity, by enumerating x and solving the quadratic in y.
    std::uint64_t group_order(std::uint64_t cap = kDefaultCountCap) const;
    // Least n >= 1 with n*pt == O, scanning divisors of the group order ascending.
    std::uint64_t point_order(const FpPoint& pt, std::uint64_t cap = kDefaultCountCap) const;
    // Same, given any known multiple of the order (usually the group order).
    std::uint64_t point_order_dividing(const FpPoint& pt, std::uint64_t multiple) const;

    std::vector<FpPoint> all_points(std::uint64_t cap = kDefaultCountCap) const;
    FpPoint random_point(std::mt19937_64& rng) const;

    std::string to_string() const;

  private:
    std::int64_t mod(std::int64_t v) const {
        v %= p_;
        return v < 0 ? v + p_ : v;
    }
    std::int64_t mul(std::int64_t x, std::int64_t y) const;
    std::int64_t inv(std::int64_t x) const;
    // Roots y of y^2 + b y - c == 0.
    std::vector<std::int64_t> solve_y(std::int64_t x) const;

    std::int64_t p_;
    std::int64_t a_[5];
};

// Group operations on E(F_p) for presentation_from_points.
struct FpCurveOps {
    using value_type = FpPoint;
    FpCurve curve;

    FpPoint zero() const { return FpPoint::at_infinity(); }
    FpPoint add(const FpPoint& a, const FpPoint& b) const { return curve.add(a, b); }
    bool equal(const FpPoint& a, const FpPoint& b) const { return a == b; }
    std::size_t hash(const FpPoint& a) const {
        if (a.infinity) return 0x9e3779b97f4a7c15ull;
        return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(a.x) << 32) ^ static_cast<std::uint64_t>(a.y));
    }
};

struct TorsionClaim {
    std::string name;
    RationalPoint point;
    Integer order;
};

struct TorsionCheckResult {
    bool ok = true;
    std::string failure;  // names the first failing point
};

// Each claimed point must lie on E and have exactly the claimed order over Q.
TorsionCheckResult check_torsion_claims(const CurveQ& e, const std::vector<TorsionClaim>& claims);
bool torsion_fixture_check(const CurveQ& e, const std::vector<TorsionClaim>& claims);

bool is_prime(std::uint64_t n);
std::vector<std::uint64_t> primes_up_to(std::uint64_t n);
std::int64_t sqrt_mod(std::int64_t a, std::int64_t p);  // -1 when a is a non-residue

}  // namespace mwlab
