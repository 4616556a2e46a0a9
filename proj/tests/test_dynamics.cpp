#include "mwlab/dynamics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace mwlab;
using mwlab::test::enumerate_subgroup;
using mwlab::test::iv;

namespace {

const std::string kFixtures = MWLAB_FIXTURE_DIR;

const GlobalModule& rank3() {
    static const GlobalModule b = GlobalModule::elliptic(load_curve_fixture(kFixtures + "/curves/rank3_5077a1.curve"));
    return b;
}

const GlobalModule& x3p1() {
    static const GlobalModule b = GlobalModule::elliptic(load_curve_fixture(kFixtures + "/curves/x3p1_36a1.curve"));
    return b;
}

std::vector<IntVector> coords(const std::vector<Element>& xs) {
    std::vector<IntVector> out;
    for (const auto& x : xs) out.push_back(x.coords);
    return out;
}

SyntheticPlace synthetic_place(std::uint64_t id, const IntVector& orders, const std::vector<IntVector>& gens,
                               const std::vector<IntVector>& tors = {}) {
    SyntheticPlace sp;
    sp.id = id;
    sp.group = FiniteAbelianGroup(orders);
    for (const auto& g : gens) sp.generator_images.push_back(sp.group.element(g));
    for (const auto& t : tors) sp.torsion_images.push_back(sp.group.element(t));
    return sp;
}

GlobalModule free_rank_one() {
    return GlobalModule::synthetic(1, FiniteAbelianGroup(IntVector{}),
                                   {synthetic_place(2, iv({2}), {iv({1})}), synthetic_place(3, iv({3}), {iv({1})}),
                                    synthetic_place(5, iv({5}), {iv({1})})});
}

}  // namespace

TEST_CASE("orbit of 1 under doubling in Z/5") {
    const FiniteAbelianGroup g(iv({5}));
    const OrbitModV o = orbit_in_group(LocalEndo::multiply(g, 2), g.element(iv({1})), {g.zero()});
    CHECK(o.preperiod == 0);
    CHECK(o.cycle == 4);
    CHECK(coords(o.visited) == std::vector<IntVector>{iv({1}), iv({2}), iv({4}), iv({3})});
    CHECK_FALSE(o.first_hit.has_value());
    CHECK(o.at(4) == g.element(iv({1})));
    CHECK(o.at(6) == g.element(iv({4})));
}

TEST_CASE("orbit of 1 under doubling in Z/8") {
    const FiniteAbelianGroup g(iv({8}));
    const OrbitModV o = orbit_in_group(LocalEndo::multiply(g, 2), g.element(iv({1})), {});
    CHECK(coords(o.visited) == std::vector<IntVector>{iv({1}), iv({2}), iv({4}), iv({0})});
    CHECK(o.preperiod == 3);
    CHECK(o.cycle == 1);
    REQUIRE(o.first_hit.has_value());
    CHECK(*o.first_hit == 3);
    CHECK(o.at(1000) == g.zero());
}

TEST_CASE("orbit hits at step 0 when Lambda is everything") {
    const FiniteAbelianGroup g(iv({2, 6}));
    const OrbitModV o = orbit_in_group(LocalEndo::multiply(g, 5), g.element(iv({1, 1})),
                                       {g.element(iv({1, 0})), g.element(iv({0, 1}))});
    REQUIRE(o.first_hit.has_value());
    CHECK(*o.first_hit == 0);
}

TEST_CASE("orbit structure on random groups and maps") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 400; ++trial) {
        const FiniteAbelianGroup g = mwlab::test::random_group(rng, 300);
        LocalEndo f = LocalEndo::multiply(g, 2);
        if (trial % 2 == 0) {
            f = LocalEndo::multiply(g, static_cast<long>(rng() % 13) - 6);
        } else {
            // A random endomorphism: basis vector k goes to an element killed by d_k.
            std::vector<Element> images;
            for (std::size_t k = 0; k < g.rank(); ++k) {
                Element y = mwlab::test::random_element(rng, g);
                while (!g.is_zero(g.scale(g.invariants()[k], y))) y = mwlab::test::random_element(rng, g);
                images.push_back(y);
            }
            f = LocalEndo::from_basis_images(g, images);
        }
        const Element x = mwlab::test::random_element(rng, g);
        std::vector<Element> lambda;
        for (int i = 0; i < static_cast<int>(rng() % 3); ++i) lambda.push_back(mwlab::test::random_element(rng, g));

        const OrbitModV o = orbit_in_group(f, x, lambda);
        CHECK(o.cycle >= 1);
        CHECK(Integer(static_cast<unsigned long>(o.preperiod + o.cycle)) <= g.order());
        CHECK(o.visited.size() == o.preperiod + o.cycle);
        CHECK(f.apply(o.visited.back()) == o.visited[o.preperiod]);

        // Brute force: walk |G| + 1 steps and check against at() and first_hit.
        const auto sub = enumerate_subgroup(g, lambda);
        std::optional<std::size_t> first;
        Element cur = x;
        for (std::size_t n = 0; n <= g.order().get_ui(); ++n) {
            CHECK(o.at(n) == cur);
            if (!first && sub.count(cur.coords)) first = n;
            cur = f.apply(cur);
        }
        CHECK(o.first_hit == first);
    }
}

TEST_CASE("local endomorphisms must respect orders") {
    const FiniteAbelianGroup g(iv({4}));
    CHECK_THROWS_AS(LocalEndo::from_basis_images(g, {g.element(iv({1})), g.zero()}), InputError);
    const FiniteAbelianGroup h(iv({2, 4}));
    CHECK_THROWS_AS(LocalEndo::from_basis_images(h, {h.element(iv({0, 1})), h.zero()}), InputError);
    CHECK_NOTHROW(LocalEndo::from_basis_images(h, {h.element(iv({1, 2})), h.zero()}));
}

TEST_CASE("endomorphism construction") {
    CHECK_THROWS_AS(EndoMap::multiply(1), InputError);
    CHECK_THROWS_AS(EndoMap::multiply(-1), InputError);
    CHECK_THROWS_AS(EndoMap::multiply(0), InputError);
    CHECK_NOTHROW(EndoMap::multiply(-2));
    CHECK_THROWS_AS(EndoMap::linear(IntMatrix(2, 3)), InputError);
    const GlobalModule& b = rank3();
    CHECK_THROWS_AS(EndoMap::linear(IntMatrix::identity(2)).apply(b, b.generator(0)), InputError);
    const GlobalPoint q = EndoMap::linear(IntMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 3}}).apply(b, b.make_point(iv({1, 2, 3})));
    CHECK(q.free_coords == iv({2, 1, 9}));
}

TEST_CASE("global orbit intersection on a free rank-one module") {
    const GlobalModule b = free_rank_one();
    const GlobalPoint gen = b.generator(0);
    const EndoMap two = EndoMap::multiply(2);

    const auto four = global_orbit_intersection(b, two, gen, {b.scale(4, gen)}, 50);
    REQUIRE(four.hit.has_value());
    CHECK(four.hit->n == 2);
    CHECK(four.hit->coefficients == iv({1}));

    const auto self = global_orbit_intersection(b, two, gen, {gen}, 50);
    REQUIRE(self.hit.has_value());
    CHECK(self.hit->n == 0);

    const auto three = global_orbit_intersection(b, two, gen, {b.scale(3, gen)}, 200);
    CHECK_FALSE(three.hit.has_value());
    CHECK(three.step_bound == 200);

    const auto empty = global_orbit_intersection(b, two, gen, {}, 10);
    CHECK_FALSE(empty.hit.has_value());
    const auto zero = global_orbit_intersection(b, two, b.zero(), {}, 10);
    REQUIRE(zero.hit.has_value());
    CHECK(zero.hit->n == 0);
}

TEST_CASE("global orbit intersection handles torsion exactly") {
    const GlobalModule& b = x3p1();
    const GlobalPoint t = b.torsion_generator(0);
    const GlobalPoint t2 = b.scale(2, t);  // order 3

    const auto doubled = global_orbit_intersection(b, EndoMap::multiply(2), t, {t2}, 20);
    REQUIRE(doubled.hit.has_value());
    CHECK(doubled.hit->n == 1);
    CHECK(b.scale(doubled.hit->coefficients[0], t2) == b.scale(2, t));

    // 3^n T has order 2 for n >= 1, never in the subgroup of order 3.
    CHECK_FALSE(global_orbit_intersection(b, EndoMap::multiply(3), t, {t2}, 20).hit.has_value());
    // 5^n T = +-T generates everything; Lambda = <T3> (order 2) never contains it.
    CHECK_FALSE(global_orbit_intersection(b, EndoMap::multiply(5), t, {b.scale(3, t)}, 20).hit.has_value());
}

TEST_CASE("reduction commutes with the orbit map") {
    const GlobalModule& b = rank3();
    const GlobalPoint p = b.make_point(iv({1, -2, 1}));
    for (const EndoMap& phi : {EndoMap::multiply(2), EndoMap::multiply(-3), EndoMap::linear(IntMatrix{{3, 0, 0}, {0, 3, 0}, {0, 0, 3}})}) {
        for (std::uint64_t v : b.places_up_to(200)) {
            const OrbitModV o = orbit_mod_v(b, phi, p, {b.generator(1)}, v);
            CHECK(o.place == v);
            GlobalPoint cur = p;
            for (std::uint64_t n = 0; n <= 20; ++n) {
                CHECK(reduce(b, cur, v) == o.at(n));
                cur = phi.apply(b, cur);
            }
        }
    }
    // Scalar matrices and scalar multiplication give identical orbits.
    for (std::uint64_t v : {5ULL, 101ULL, 499ULL}) {
        const OrbitModV a = orbit_mod_v(b, EndoMap::multiply(3), p, {}, v);
        const OrbitModV c = orbit_mod_v(b, EndoMap::linear(IntMatrix{{3, 0, 0}, {0, 3, 0}, {0, 0, 3}}), p, {}, v);
        CHECK(coords(a.visited) == coords(c.visited));
    }
    CHECK_THROWS_AS(orbit_mod_v(b, EndoMap::multiply(2), p, {}, 5077), InputError);
}

TEST_CASE("a non-scalar matrix descends only where relations allow") {
    const GlobalModule& b = rank3();
    const EndoMap swap = EndoMap::linear(IntMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}});
    const GlobalPoint p = b.make_point(iv({1, 0, 0}));
    const CurveQ& curve = b.fixture().curve;
    std::size_t descended = 0, refused = 0;
    for (std::uint64_t v : b.places_up_to(150)) {
        // Swapping P1 and P2 descends iff c1 Q1 + c2 Q2 + c3 Q3 = O always implies
        // c2 Q1 + c1 Q2 + c3 Q3 = O. For each (c1, c2) the relation fixes c3 mod ord Q3.
        const FpCurve e = curve.reduce(curve.place(v));
        const FpPoint q1 = b.reduce_on_curve(b.generator(0), v), q2 = b.reduce_on_curve(b.generator(1), v),
                      q3 = b.reduce_on_curve(b.generator(2), v);
        const std::uint64_t n1 = e.point_order(q1), n2 = e.point_order(q2), n3 = e.point_order(q3);
        std::vector<FpPoint> m3;
        for (std::uint64_t c = 0; c < n3; ++c) m3.push_back(e.scalar_mul(static_cast<std::int64_t>(c), q3));
        bool compatible = true;
        for (std::uint64_t c1 = 0; c1 < n1 && compatible; ++c1)
            for (std::uint64_t c2 = 0; c2 < n2 && compatible; ++c2) {
                const FpPoint s = e.neg(e.add(e.scalar_mul(static_cast<std::int64_t>(c1), q1),
                                              e.scalar_mul(static_cast<std::int64_t>(c2), q2)));
                const auto it = std::find(m3.begin(), m3.end(), s);
                if (it == m3.end()) continue;
                const FpPoint swapped = e.add(e.add(e.scalar_mul(static_cast<std::int64_t>(c2), q1),
                                                    e.scalar_mul(static_cast<std::int64_t>(c1), q2)),
                                              *it);
                compatible = swapped.infinity;
            }
        if (compatible) {
            ++descended;
            const OrbitModV o = orbit_mod_v(b, swap, p, {}, v);
            GlobalPoint cur = p;
            for (std::uint64_t n = 0; n <= 6; ++n) {
                CHECK(reduce(b, cur, v) == o.at(n));
                cur = swap.apply(b, cur);
            }
        } else {
            ++refused;
            CHECK_THROWS_AS(orbit_mod_v(b, swap, p, {}, v), InputError);
        }
    }
    CHECK(descended > 0);
    CHECK(refused > 0);
}

TEST_CASE("harness fixture (a): phi = [2], P = P1, Lambda = <2 P1>") {
    const GlobalModule& b = rank3();
    DynamicsExperiment x;
    x.p = b.generator(0);
    x.lambda_gens = {b.scale(2, b.generator(0))};
    x.place_bound = 2000;
    x.step_bound = 64;
    const DynamicsReport r = dynamical_lgp_experiment(b, x, {Exec::parallel, 4});
    CHECK(r.verdict == Verdict::consistent);
    CHECK_FALSE(r.inconclusive);
    REQUIRE(r.global.hit.has_value());
    CHECK(r.global.hit->n == 1);
    CHECK(r.global.hit->coefficients == iv({1}));
    CHECK(r.places.size() == b.places_up_to(2000).size());
    CHECK(r.missing_places.empty());
    for (const auto& po : r.places) {
        CHECK(po.first_hit.has_value());
        CHECK(po.hit_at_global_step == std::optional<bool>(true));
    }
}

TEST_CASE("harness fixture (b): phi = [2], P = P1, Lambda = <P2>") {
    const GlobalModule& b = rank3();
    DynamicsExperiment x;
    x.p = b.generator(0);
    x.lambda_gens = {b.generator(1)};
    x.place_bound = 2000;
    x.step_bound = 64;
    const DynamicsReport r = dynamical_lgp_experiment(b, x, {Exec::parallel, 4});
    CHECK(r.verdict == Verdict::consistent);
    CHECK_FALSE(r.inconclusive);
    CHECK_FALSE(r.global.hit.has_value());
    REQUIRE_FALSE(r.missing_places.empty());
    CHECK(r.missing_places.front() == 19);

    // Independent check at 19 on the curve: no 2^n P1 is a multiple of P2.
    const CurveQ& curve = b.fixture().curve;
    const Place v = curve.place(19);
    const FpCurve e = curve.reduce(v);
    const FpPoint q1 = b.reduce_on_curve(b.generator(0), 19), q2 = b.reduce_on_curve(b.generator(1), 19);
    std::vector<FpPoint> multiples;
    FpPoint acc = FpPoint::at_infinity();
    do {
        multiples.push_back(acc);
        acc = e.add(acc, q2);
    } while (!acc.infinity);
    FpPoint cur = q1;
    for (int n = 0; n < 60; ++n, cur = e.scalar_mul(std::int64_t{2}, cur))
        CHECK(std::find(multiples.begin(), multiples.end(), cur) == multiples.end());
    // Every earlier good place does meet <P2> mod v.
    for (const auto& po : r.places)
        if (po.place < 19) CHECK(po.first_hit.has_value());

    const DynamicsReport serial = dynamical_lgp_experiment(b, x, {Exec::serial, 1});
    CHECK(serial.missing_places == r.missing_places);
}

TEST_CASE("harness verdict when every place hits but the search misses") {
    const GlobalModule b = free_rank_one();
    DynamicsExperiment x;
    x.p = b.generator(0);
    x.lambda_gens = {b.scale(3, b.generator(0))};
    x.place_bound = 2;
    x.step_bound = 30;
    const DynamicsReport r = dynamical_lgp_experiment(b, x);
    CHECK(r.verdict == Verdict::consistent);
    CHECK(r.inconclusive);
    CHECK_FALSE(r.global.hit.has_value());

    x.place_bound = 10;  // place 3 separates: 2^n never vanishes mod 3
    const DynamicsReport r2 = dynamical_lgp_experiment(b, x);
    CHECK(r2.verdict == Verdict::consistent);
    CHECK_FALSE(r2.inconclusive);
    CHECK(r2.missing_places == std::vector<std::uint64_t>{3});
}

TEST_CASE("harness refuses a verdict when torsion does not inject") {
    const FiniteAbelianGroup tors(iv({2}));
    const GlobalModule b = GlobalModule::synthetic(
        1, tors, {synthetic_place(1, iv({2, 4}), {iv({0, 1})}, {iv({1, 0})}), synthetic_place(2, iv({4}), {iv({1})}, {iv({0})})});
    DynamicsExperiment x;
    x.p = b.generator(0);
    x.lambda_gens = {b.scale(2, b.generator(0))};
    x.place_bound = 10;
    const DynamicsReport r = dynamical_lgp_experiment(b, x);
    CHECK(r.verdict == Verdict::precondition_violated);
    CHECK(r.injectivity_failures == std::vector<std::uint64_t>{2});
    CHECK(r.places.empty());
    CHECK(std::string(to_string(r.verdict)) == "PRECONDITION_VIOLATED");
}
