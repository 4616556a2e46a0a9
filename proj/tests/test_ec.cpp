#include "mwlab/ec.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mwlab;

namespace {

CurveQ rank3() { return CurveQ(0, 0, 1, -7, 6); }
CurveQ x3p1() { return CurveQ(0, 0, 0, 0, 1); }

RationalPoint pt(long x, long y) { return RationalPoint::affine(Rational(x), Rational(y)); }

// Counts solutions of the Weierstrass equation over all (x, y) in F_p^2, plus infinity.
std::uint64_t brute_count(const FpCurve& e) {
    std::uint64_t n = 1;
    for (std::int64_t x = 0; x < e.p(); ++x)
        for (std::int64_t y = 0; y < e.p(); ++y)
            if (e.is_on(FpPoint::affine(x, y))) ++n;
    return n;
}

}  // namespace

TEST_CASE("curve construction") {
    CHECK(rank3().discriminant() == 5077);
    CHECK(x3p1().discriminant() == -432);
    CHECK_THROWS_AS(CurveQ(0, 0, 0, 0, 0), InputError);
    CHECK(rank3().place(5).status == PlaceStatus::good);
    CHECK(rank3().place(3).status == PlaceStatus::excluded);
    CHECK(rank3().place(5077).status == PlaceStatus::bad);
    CHECK_THROWS_AS(rank3().place(9), InputError);
    CHECK_THROWS_AS(FpCurve(5, 0, 0, 0, 0, 0), InputError);
    CHECK_THROWS_AS(FpCurve(9, 0, 0, 1, 3, 1), InputError);
}

TEST_CASE("doubling on y^2 + y = x^3 + 3x + 1 over F_5") {
    const FpCurve e(5, 0, 0, 1, 3, 1);
    const FpPoint p = FpPoint::affine(1, 0);
    REQUIRE(e.is_on(p));
    CHECK(e.add(p, p) == FpPoint::affine(4, 1));
    CHECK(e.add(p, FpPoint::at_infinity()) == p);
    CHECK(e.add(p, e.neg(p)).infinity);
    CHECK(e.scalar_mul(2, p) == FpPoint::affine(4, 1));
    CHECK(e.scalar_mul(-2, p) == e.neg(FpPoint::affine(4, 1)));
    CHECK(e.scalar_mul(0, p).infinity);
}

TEST_CASE("rational group law") {
    const auto e = rank3();
    const auto p1 = pt(1, 0), p2 = pt(2, 0), p3 = pt(0, 2);
    CHECK(e.add(p1, RationalPoint::at_infinity()) == p1);
    CHECK(e.add(p1, e.neg(p1)).infinity);
    CHECK(e.neg(e.neg(p2)) == p2);
    CHECK(e.add(p1, p2) == e.add(p2, p1));
    CHECK(e.add(e.add(p1, p2), p3) == e.add(p1, e.add(p2, p3)));
    const auto q = e.scalar_mul(3, p1);
    CHECK(e.is_on(q));
    CHECK(q == e.add(p1, e.add(p1, p1)));
    CHECK(e.scalar_mul(-3, p1) == e.neg(q));
    CHECK_THROWS_AS(e.add(pt(1, 1), p1), InputError);
}

TEST_CASE("group law associativity on random triples") {
    std::mt19937_64 rng(42);
    for (const auto& [curve, p] : {std::pair{rank3(), 101L}, std::pair{x3p1(), 103L}, std::pair{rank3(), 7919L}}) {
        const FpCurve e = curve.reduce(curve.place(static_cast<std::uint64_t>(p)));
        for (int i = 0; i < 500; ++i) {
            const auto a = e.random_point(rng), b = e.random_point(rng), c = e.random_point(rng);
            CHECK(e.add(e.add(a, b), c) == e.add(a, e.add(b, c)));
            CHECK(e.add(a, b) == e.add(b, a));
            CHECK(e.neg(e.neg(a)) == a);
            CHECK(e.is_on(e.add(a, b)));
        }
    }
}

TEST_CASE("group order examples") {
    const auto e = rank3();
    const FpCurve e5 = e.reduce(e.place(5));
    CHECK(e5.group_order() == 10);
    CHECK(brute_count(e5) == 10);
    const FpCurve f5 = x3p1().reduce(x3p1().place(5));
    CHECK(f5.group_order() == 6);
    CHECK(brute_count(f5) == 6);
    CHECK_THROWS_AS(e.reduce(e.place(1009)).group_order(1000), ResourceError);
}

TEST_CASE("group order agrees with brute force and Hasse") {
    for (const auto& curve : {rank3(), x3p1()}) {
        for (std::uint64_t p : primes_up_to(1000)) {
            const Place v = curve.place(p);
            if (v.status != PlaceStatus::good) continue;
            const FpCurve e = curve.reduce(v);
            const auto n = static_cast<double>(e.group_order());
            CHECK(std::abs(n - static_cast<double>(p) - 1.0) <= 2.0 * std::sqrt(static_cast<double>(p)));
            if (p < 120) CHECK(e.group_order() == brute_count(e));
            if (p < 200) CHECK(e.all_points().size() == e.group_order());
        }
    }
}

TEST_CASE("point orders") {
    const auto e = rank3();
    const FpCurve e5 = e.reduce(e.place(5));
    const FpPoint p1 = e.reduce_point(pt(1, 0), e.place(5));
    CHECK(e5.point_order(p1) == 5);
    CHECK(e5.scalar_mul(4, p1) == e5.neg(p1));
    CHECK(e5.point_order(FpPoint::at_infinity()) == 1);

    std::mt19937_64 rng(3);
    const FpCurve e1009 = e.reduce(e.place(1009));
    const auto n = e1009.group_order();
    for (int i = 0; i < 100; ++i) {
        const auto q = e1009.random_point(rng);
        const auto ord = e1009.point_order(q);
        CHECK(n % ord == 0);
        CHECK(e1009.scalar_mul(static_cast<std::int64_t>(ord), q).infinity);
    }
}

TEST_CASE("reduction of points") {
    const auto e = rank3();
    const Place v11 = e.place(11);
    CHECK(e.reduce_point(pt(1, 0), v11) == FpPoint::affine(1, 0));
    CHECK(e.reduce_point(RationalPoint::at_infinity(), v11).infinity);
    CHECK_THROWS_AS(e.reduce_point(pt(1, 0), e.place(5077)), InputError);
    CHECK_THROWS_AS(e.reduce_point(pt(1, 0), e.place(3)), InputError);

    // Homomorphism on small combinations of the generators at p = 13.
    const Place v13 = e.place(13);
    const FpCurve e13 = e.reduce(v13);
    const RationalPoint gens[3] = {pt(1, 0), pt(2, 0), pt(0, 2)};
    std::mt19937_64 rng(8);
    for (int i = 0; i < 40; ++i) {
        RationalPoint a = RationalPoint::at_infinity(), b = RationalPoint::at_infinity();
        for (const auto& g : gens) {
            a = e.add(a, e.scalar_mul(static_cast<long>(rng() % 5) - 2, g));
            b = e.add(b, e.scalar_mul(static_cast<long>(rng() % 5) - 2, g));
        }
        CHECK(e.reduce_point(e.add(a, b), v13) == e13.add(e.reduce_point(a, v13), e.reduce_point(b, v13)));
    }
}

TEST_CASE("reduction with denominators divisible by p") {
    const auto e = rank3();
    // First small multiple of P1 with a nonintegral x; primes dividing its denominator send it to O.
    long k = 2;
    RationalPoint q = e.scalar_mul(k, pt(1, 0));
    while (q.x.get_den() == 1) q = e.scalar_mul(++k, pt(1, 0));
    const Integer den = q.x.get_den();
    bool hit_infinity = false;
    for (std::uint64_t p : primes_up_to(1000)) {
        const Place v = e.place(p);
        if (v.status != PlaceStatus::good) continue;
        const FpPoint r = e.reduce_point(q, v);
        if (den % Integer(static_cast<unsigned long>(p)) == 0) {
            CHECK(r.infinity);
            hit_infinity = true;
        } else {
            CHECK(r == e.reduce(v).scalar_mul(k, e.reduce_point(pt(1, 0), v)));
        }
    }
    CHECK(hit_infinity);
}

TEST_CASE("torsion fixture check") {
    const auto e = x3p1();
    CHECK(torsion_fixture_check(e, {{"T", pt(2, 3), 6}}));
    CHECK(torsion_fixture_check(e, {{"O", RationalPoint::at_infinity(), 1}}));
    CHECK_FALSE(torsion_fixture_check(e, {{"T", pt(2, 3), 5}}));
    CHECK_FALSE(torsion_fixture_check(e, {{"T", pt(2, 3), 3}}));
    CHECK_FALSE(torsion_fixture_check(e, {{"T", pt(2, 4), 6}}));
    const auto r = check_torsion_claims(e, {{"T", pt(0, 1), 3}, {"bad", pt(-1, 0), 3}});
    CHECK_FALSE(r.ok);
    CHECK(r.failure.find("bad") != std::string::npos);
}

TEST_CASE("primes and square roots") {
    CHECK(primes_up_to(30) == std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(is_prime(5077));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(49));
    for (std::int64_t p : {5, 13, 17, 97, 7919}) {
        for (std::int64_t a = 0; a < std::min<std::int64_t>(p, 200); ++a) {
            const auto s = sqrt_mod(a, p);
            bool residue = false;
            for (std::int64_t y = 0; y < p; ++y)
                if ((y * y) % p == a) residue = true;
            CHECK((s >= 0) == residue);
            if (s >= 0) CHECK((s * s) % p == a);
        }
    }
}
