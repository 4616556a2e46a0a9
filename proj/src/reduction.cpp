#include "mwlab/reduction.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace mwlab {

Element LocalImage::reduce(const GlobalPoint& p) const {
    if (p.free_coords.size() != generators.size())
        throw InputError("reduce: point has " + std::to_string(p.free_coords.size()) + " free coordinates, module has " +
                         std::to_string(generators.size()) + " generators");
    Element out = group.combine(p.free_coords, generators);
    if (!torsion.empty()) out = group.add(out, group.combine(p.torsion_part.coords, torsion));
    return out;
}

// --- construction -------------------------------------------------------------

GlobalModule GlobalModule::elliptic(CurveFixture fixture, ModuleLimits limits) {
    GlobalModule b;
    b.name_ = fixture.name;
    b.rank_ = fixture.generators.size();
    b.limits_ = limits;
    b.dimension_ = 2;

    if (auto check = check_torsion_claims(fixture.curve, fixture.torsion); !check.ok)
        throw FixtureError("torsion claim failed: " + check.failure);
    IntVector orders;
    for (const auto& t : fixture.torsion) orders.push_back(t.order);
    try {
        b.torsion_ = FiniteAbelianGroup(orders);
    } catch (const InputError&) {
        throw FixtureError("torsion generators of " + fixture.name +
                           " must be listed in invariant-factor order (orders >= 2, each dividing the next)");
    }
    b.fixture_ = std::move(fixture);

    // The torsion generators must span a direct product of the claimed orders.
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& t : b.torsion_.enumerate()) {
        const RationalPoint q = b.realize(GlobalPoint{IntVector(b.rank_, Integer(0)), t});
        const auto key = q.infinity ? std::pair<std::string, std::string>{"O", ""}
                                    : std::pair{q.x.get_str(), q.y.get_str()};
        if (!seen.insert(key).second)
            throw FixtureError("torsion generators of " + b.name_ + " do not span a direct product: " + to_string(t) +
                               " collides with another combination");
    }

    if (b.rank_ > 0 && limits.independence_box > 0) {
        std::vector<GlobalPoint> gens;
        for (std::size_t i = 0; i < b.rank_; ++i) gens.push_back(b.generator(i));
        if (auto rel = b.find_small_relation(gens, limits.independence_box))
            throw FixtureError("declared generators of " + b.name_ + " are dependent: relation " + to_string(*rel));
    }
    return b;
}

GlobalModule GlobalModule::synthetic(std::size_t rank, FiniteAbelianGroup torsion, std::vector<SyntheticPlace> places,
                                     int dimension, ModuleLimits limits) {
    GlobalModule b;
    b.name_ = "synthetic";
    b.rank_ = rank;
    b.torsion_ = std::move(torsion);
    b.dimension_ = dimension;
    b.limits_ = limits;
    for (auto& sp : places) {
        if (sp.generator_images.size() != rank)
            throw InputError("synthetic place " + std::to_string(sp.id) + ": expected " + std::to_string(rank) +
                             " generator images");
        if (sp.torsion_images.size() != b.torsion_.rank())
            throw InputError("synthetic place " + std::to_string(sp.id) + ": expected " +
                             std::to_string(b.torsion_.rank()) + " torsion images");
        for (const auto& x : sp.generator_images) sp.group.validate(x);
        for (std::size_t j = 0; j < sp.torsion_images.size(); ++j) {
            sp.group.validate(sp.torsion_images[j]);
            if (b.torsion_.invariants()[j] % element_order(sp.group, sp.torsion_images[j]) != 0)
                throw InputError("synthetic place " + std::to_string(sp.id) + ": torsion image " +
                                 to_string(sp.torsion_images[j]) + " is not a homomorphic image");
        }
        const auto id = sp.id;
        if (!b.synthetic_.emplace(id, std::move(sp)).second)
            throw InputError("synthetic place " + std::to_string(id) + " listed twice");
    }
    return b;
}

const CurveFixture& GlobalModule::fixture() const {
    if (!fixture_) throw InputError("module " + name_ + " has no elliptic-curve realization");
    return *fixture_;
}

// --- point arithmetic ---------------------------------------------------------

GlobalPoint GlobalModule::zero() const { return GlobalPoint{IntVector(rank_, Integer(0)), torsion_.zero()}; }

GlobalPoint GlobalModule::generator(std::size_t i) const {
    if (i >= rank_) throw InputError("generator index " + std::to_string(i) + " out of range");
    GlobalPoint p = zero();
    p.free_coords[i] = 1;
    return p;
}

GlobalPoint GlobalModule::torsion_generator(std::size_t j) const {
    if (j >= torsion_.rank()) throw InputError("torsion generator index " + std::to_string(j) + " out of range");
    GlobalPoint p = zero();
    p.torsion_part.coords[j] = 1;
    return p;
}

GlobalPoint GlobalModule::make_point(const IntVector& free_coords, const IntVector& torsion_coords) const {
    if (free_coords.size() != rank_)
        throw InputError("point needs " + std::to_string(rank_) + " free coordinates, got " +
                         std::to_string(free_coords.size()));
    IntVector t = torsion_coords.empty() ? IntVector(torsion_.rank(), Integer(0)) : torsion_coords;
    return GlobalPoint{free_coords, torsion_.element(t)};
}

GlobalPoint GlobalModule::add(const GlobalPoint& a, const GlobalPoint& b) const {
    validate(a);
    validate(b);
    GlobalPoint out = a;
    for (std::size_t i = 0; i < rank_; ++i) out.free_coords[i] += b.free_coords[i];
    out.torsion_part = torsion_.add(a.torsion_part, b.torsion_part);
    return out;
}

GlobalPoint GlobalModule::neg(const GlobalPoint& a) const {
    validate(a);
    GlobalPoint out = a;
    for (auto& c : out.free_coords) c = -c;
    out.torsion_part = torsion_.neg(a.torsion_part);
    return out;
}

GlobalPoint GlobalModule::scale(const Integer& k, const GlobalPoint& a) const {
    validate(a);
    GlobalPoint out = a;
    for (auto& c : out.free_coords) c *= k;
    out.torsion_part = torsion_.scale(k, a.torsion_part);
    return out;
}

void GlobalModule::validate(const GlobalPoint& p) const {
    if (p.free_coords.size() != rank_)
        throw InputError("point has " + std::to_string(p.free_coords.size()) + " free coordinates, module rank is " +
                         std::to_string(rank_));
    torsion_.validate(p.torsion_part);
}

// --- places -------------------------------------------------------------------

bool GlobalModule::is_good(std::uint64_t place) const {
    if (fixture_) return is_prime(place) && fixture_->curve.place(place).status == PlaceStatus::good;
    return synthetic_.count(place) == 1;
}

void GlobalModule::require_good(std::uint64_t place) const {
    if (is_good(place)) return;
    if (fixture_) {
        const std::string why =
            is_prime(place) ? std::string(to_string(fixture_->curve.place(place).status)) : std::string("not prime");
        throw InputError("place " + std::to_string(place) + " is not a good place of " + name_ + " (" + why + ")");
    }
    throw InputError("place " + std::to_string(place) + " is not in the synthetic table");
}

std::vector<std::uint64_t> GlobalModule::places_up_to(std::uint64_t bound) const {
    std::vector<std::uint64_t> out;
    if (fixture_) {
        for (std::uint64_t p : primes_up_to(bound))
            if (fixture_->curve.place(p).status == PlaceStatus::good) out.push_back(p);
    } else {
        for (const auto& [id, sp] : synthetic_)
            if (id <= bound) out.push_back(id);
    }
    return out;
}

LocalImage GlobalModule::local_image(std::uint64_t place) const {
    require_good(place);
    LocalImage img;
    img.place = place;
    if (!fixture_) {
        const SyntheticPlace& sp = synthetic_.at(place);
        img.group = sp.group;
        img.generators = sp.generator_images;
        img.torsion = sp.torsion_images;
        img.ambient_order = sp.group.order();
        return img;
    }
    const CurveQ& curve = fixture_->curve;
    const Place v = curve.place(place);
    FpCurve e = curve.reduce(v);
    img.ambient_order = Integer(static_cast<unsigned long>(e.group_order(limits_.count_cap)));
    std::vector<FpPoint> pts;
    for (const auto& g : fixture_->generators) pts.push_back(curve.reduce_point(g.point, v));
    for (const auto& t : fixture_->torsion) pts.push_back(curve.reduce_point(t.point, v));
    auto sub = std::make_shared<const PresentedSubgroup<FpCurveOps>>(FpCurveOps{e}, std::move(pts), limits_.subgroup_cap);
    const Presentation& pres = sub->presentation();
    img.group = pres.group;
    img.generators.assign(pres.point_coords.begin(), pres.point_coords.begin() + static_cast<std::ptrdiff_t>(rank_));
    img.torsion.assign(pres.point_coords.begin() + static_cast<std::ptrdiff_t>(rank_), pres.point_coords.end());
    img.subgroup = std::move(sub);
    return img;
}

RationalPoint GlobalModule::realize(const GlobalPoint& p) const {
    const CurveFixture& fx = fixture();
    validate(p);
    RationalPoint acc = RationalPoint::at_infinity();
    for (std::size_t i = 0; i < rank_; ++i)
        if (p.free_coords[i] != 0) acc = fx.curve.add(acc, fx.curve.scalar_mul(p.free_coords[i], fx.generators[i].point));
    for (std::size_t j = 0; j < torsion_.rank(); ++j)
        if (p.torsion_part.coords[j] != 0)
            acc = fx.curve.add(acc, fx.curve.scalar_mul(p.torsion_part.coords[j], fx.torsion[j].point));
    return acc;
}

FpPoint GlobalModule::reduce_on_curve(const GlobalPoint& p, std::uint64_t place) const {
    const CurveFixture& fx = fixture();
    require_good(place);
    validate(p);
    const Place v = fx.curve.place(place);
    const FpCurve e = fx.curve.reduce(v);
    FpPoint acc = FpPoint::at_infinity();
    for (std::size_t i = 0; i < rank_; ++i)
        acc = e.add(acc, e.scalar_mul(p.free_coords[i], fx.curve.reduce_point(fx.generators[i].point, v)));
    for (std::size_t j = 0; j < torsion_.rank(); ++j)
        acc = e.add(acc, e.scalar_mul(p.torsion_part.coords[j], fx.curve.reduce_point(fx.torsion[j].point, v)));
    return acc;
}

// --- independence -------------------------------------------------------------

namespace {

// Calls fn on every c in [-box, box]^n whose first nonzero entry is positive.
template <class Fn>
void for_each_box_vector(std::size_t n, long box, Fn fn) {
    std::vector<long> c(n, -box);
    for (;;) {
        std::size_t first = 0;
        while (first < n && c[first] == 0) ++first;
        if (first < n && c[first] > 0) fn(c);
        std::size_t i = 0;
        while (i < n && c[i] == box) c[i++] = -box;
        if (i == n) return;
        ++c[i];
    }
}

// Smaller sup-norm first, then lexicographic; picks the primitive relation
// among its multiples.
bool smaller_relation(const std::vector<long>& a, const std::vector<long>& b) {
    auto norm = [](const std::vector<long>& c) {
        long m = 0;
        for (long x : c) m = std::max(m, std::labs(x));
        return m;
    };
    const long na = norm(a), nb = norm(b);
    return na != nb ? na < nb : a < b;
}

IntVector to_int_vector(const std::vector<long>& c) {
    IntVector out;
    for (long x : c) out.emplace_back(x);
    return out;
}

}  // namespace

std::optional<IntVector> GlobalModule::find_small_relation(const std::vector<GlobalPoint>& points, long box) const {
    for (const auto& p : points) validate(p);
    const std::size_t n = points.size();
    if (n == 0 || box <= 0) return std::nullopt;

    auto combination = [&](const IntVector& c) {
        GlobalPoint acc = zero();
        for (std::size_t j = 0; j < n; ++j) acc = add(acc, scale(c[j], points[j]));
        return acc;
    };

    if (!fixture_) {
        // Synthetic generators are formally free: torsion iff the free part vanishes.
        std::optional<std::vector<long>> found;
        for_each_box_vector(n, box, [&](const std::vector<long>& c) {
            if (found && !smaller_relation(c, *found)) return;
            const GlobalPoint q = combination(to_int_vector(c));
            if (std::all_of(q.free_coords.begin(), q.free_coords.end(), [](const Integer& x) { return x == 0; }))
                found = c;
        });
        if (!found) return std::nullopt;
        return to_int_vector(*found);
    }

    // A relation over Q survives reduction at every good place, so filtering by
    // reductions never discards one; survivors are then decided over Q.
    std::vector<std::vector<long>> survivors;
    bool first_pass = true;
    std::size_t filters = 0;
    for (std::uint64_t p : places_up_to(std::min<std::uint64_t>(limits_.count_cap, 20000))) {
        if (p < 101) continue;
        if (filters == 8 || (!first_pass && survivors.empty())) break;
        const LocalImage img = local_image(p);
        std::vector<Element> xs;
        for (const auto& pt : points) xs.push_back(img.reduce(pt));
        std::set<IntVector> torsion_image;
        for (const auto& t : torsion_.enumerate())
            torsion_image.insert(img.group.combine(t.coords, img.torsion).coords);
        auto passes = [&](const std::vector<long>& c) {
            return torsion_image.count(img.group.combine(to_int_vector(c), xs).coords) == 1;
        };
        if (first_pass) {
            for_each_box_vector(n, box, [&](const std::vector<long>& c) {
                if (passes(c)) survivors.push_back(c);
            });
            first_pass = false;
        } else {
            std::erase_if(survivors, [&](const std::vector<long>& c) { return !passes(c); });
        }
        ++filters;
    }
    if (first_pass) throw InputError("find_small_relation: no good place available to filter candidates");
    std::sort(survivors.begin(), survivors.end(), smaller_relation);

    std::set<std::pair<std::string, std::string>> torsion_points;
    for (const auto& t : torsion_.enumerate()) {
        const RationalPoint q = realize(GlobalPoint{IntVector(rank_, Integer(0)), t});
        torsion_points.insert(q.infinity ? std::pair<std::string, std::string>{"O", ""}
                                         : std::pair{q.x.get_str(), q.y.get_str()});
    }
    for (const auto& c : survivors) {
        const IntVector cv = to_int_vector(c);
        const RationalPoint q = realize(combination(cv));
        const auto key = q.infinity ? std::pair<std::string, std::string>{"O", ""}
                                    : std::pair{q.x.get_str(), q.y.get_str()};
        if (torsion_points.count(key)) return cv;
    }
    return std::nullopt;
}

bool free_parts_independent(const std::vector<GlobalPoint>& points) {
    if (points.empty()) return true;
    std::vector<IntVector> rows;
    for (const auto& p : points) rows.push_back(p.free_coords);
    return hermite_normal_form(rows, rows[0].size()).rows() == points.size();
}

// --- orders and scans ---------------------------------------------------------

Element reduce(const GlobalModule& b, const GlobalPoint& p, std::uint64_t place) {
    b.validate(p);
    return b.local_image(place).reduce(p);
}

Integer ord_v(const GlobalModule& b, const GlobalPoint& p, std::uint64_t place) {
    const LocalImage img = b.local_image(place);
    return element_order(img.group, img.reduce(p));
}

unsigned l_valuation(const Integer& n, const Integer& l) {
    if (n <= 0) throw InputError("l_valuation: n must be positive");
    if (l < 2) throw InputError("l_valuation: l must be at least 2");
    unsigned k = 0;
    Integer m = n;
    while (m % l == 0) {
        m /= l;
        ++k;
    }
    return k;
}

namespace {

void check_scan_inputs(const GlobalModule& b, const std::vector<GlobalPoint>& points, const Integer& l,
                       const std::vector<unsigned>& pattern) {
    if (l < 2 || mpz_probab_prime_p(l.get_mpz_t(), 30) == 0) throw InputError("l = " + l.get_str() + " is not prime");
    if (pattern.size() != points.size())
        throw InputError("pattern has " + std::to_string(pattern.size()) + " entries for " +
                         std::to_string(points.size()) + " points");
    for (const auto& p : points) b.validate(p);
}

bool matches_pattern(const std::vector<Integer>& orders, const Integer& l, const std::vector<unsigned>& pattern) {
    for (std::size_t i = 0; i < orders.size(); ++i)
        if (l_valuation(orders[i], l) != pattern[i]) return false;
    return true;
}

}  // namespace

DivisibilityScan scan_divisibility(const GlobalModule& b, const std::vector<GlobalPoint>& points, const Integer& l,
                                   const std::vector<unsigned>& pattern, std::uint64_t bound, const ScanOptions& opt) {
    check_scan_inputs(b, points, l, pattern);
    if (!free_parts_independent(points)) throw InputError("scan_divisibility: points are not linearly independent");
    DivisibilityScan out{l, pattern, bound, 0, {}};
    const auto places = b.places_up_to(bound);
    out.places_scanned = places.size();
    const auto flags = map_places(
        places,
        [&](std::uint64_t p) {
            const LocalImage img = b.local_image(p);
            std::vector<Integer> orders;
            for (const auto& pt : points) orders.push_back(element_order(img.group, img.reduce(pt)));
            return static_cast<char>(matches_pattern(orders, l, pattern));
        },
        opt);
    for (std::size_t i = 0; i < places.size(); ++i)
        if (flags[i]) out.hits.push_back(places[i]);
    return out;
}

bool verify_divisibility(const GlobalModule& b, const std::vector<GlobalPoint>& points, const Integer& l,
                         const std::vector<unsigned>& pattern, std::uint64_t place) {
    check_scan_inputs(b, points, l, pattern);
    b.require_good(place);
    std::vector<Integer> orders;
    if (b.is_elliptic()) {
        const CurveQ& curve = b.fixture().curve;
        const FpCurve e = curve.reduce(curve.place(place));
        for (const auto& pt : points)
            orders.emplace_back(static_cast<unsigned long>(e.point_order(b.reduce_on_curve(pt, place), b.limits().count_cap)));
    } else {
        const LocalImage img = b.local_image(place);
        for (const auto& pt : points) {
            const Element x = img.reduce(pt);
            Integer n = 1;
            for (Element acc = x; !img.group.is_zero(acc); acc = img.group.add(acc, x)) ++n;
            orders.push_back(n);
        }
    }
    return matches_pattern(orders, l, pattern);
}

bool torsion_injectivity_check(const GlobalModule& b, std::uint64_t place) {
    const LocalImage img = b.local_image(place);
    return subgroup_order(img.group, img.torsion) == b.torsion_group().order();
}

InjectivityScan scan_torsion_injectivity(const GlobalModule& b, std::uint64_t bound, const ScanOptions& opt) {
    InjectivityScan out;
    out.bound = bound;
    const auto places = b.places_up_to(bound);
    out.places_scanned = places.size();
    const auto ok =
        map_places(places, [&](std::uint64_t p) { return static_cast<char>(torsion_injectivity_check(b, p)); }, opt);
    for (std::size_t i = 0; i < places.size(); ++i)
        if (!ok[i]) out.failures.push_back(places[i]);
    return out;
}

}  // namespace mwlab
