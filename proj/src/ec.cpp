#include "mwlab/ec.hpp"

#include <cmath>
#include <sstream>

namespace mwlab {

namespace {

Integer weierstrass_discriminant(const Integer a[5]) {
    const Integer& a1 = a[0];
    const Integer& a2 = a[1];
    const Integer& a3 = a[2];
    const Integer& a4 = a[3];
    const Integer& a6 = a[4];
    const Integer b2 = a1 * a1 + 4 * a2;
    const Integer b4 = 2 * a4 + a1 * a3;
    const Integer b6 = a3 * a3 + 4 * a6;
    const Integer b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

std::int64_t to_residue(const Integer& v, std::int64_t p) {
    return mod_floor(v, Integer(static_cast<long>(p))).get_si();
}

}  // namespace

const char* to_string(PlaceStatus s) {
    switch (s) {
        case PlaceStatus::good: return "good";
        case PlaceStatus::bad: return "bad";
        case PlaceStatus::excluded: return "excluded";
    }
    return "?";
}

std::string RationalPoint::to_string() const {
    if (infinity) return "O";
    return "(" + x.get_str() + ", " + y.get_str() + ")";
}

std::string FpPoint::to_string() const {
    if (infinity) return "O";
    return "(" + std::to_string(x) + ", " + std::to_string(y) + ")";
}

// --- CurveQ -----------------------------------------------------------------

CurveQ::CurveQ(Integer a1, Integer a2, Integer a3, Integer a4, Integer a6)
    : a_{std::move(a1), std::move(a2), std::move(a3), std::move(a4), std::move(a6)} {
    disc_ = weierstrass_discriminant(a_);
    if (disc_ == 0) throw InputError("curve " + to_string() + " is singular (discriminant 0)");
}

std::string CurveQ::to_string() const {
    std::ostringstream os;
    os << "[" << a_[0].get_str() << ", " << a_[1].get_str() << ", " << a_[2].get_str() << ", " << a_[3].get_str()
       << ", " << a_[4].get_str() << "]";
    return os.str();
}

bool CurveQ::is_on(const RationalPoint& p) const {
    if (p.infinity) return true;
    const Rational& x = p.x;
    const Rational& y = p.y;
    Rational lhs = y * y + Rational(a1()) * x * y + Rational(a3()) * y;
    Rational rhs = x * x * x + Rational(a2()) * x * x + Rational(a4()) * x + Rational(a6());
    return lhs == rhs;
}

void CurveQ::require_on(const RationalPoint& p) const {
    if (!is_on(p)) throw InputError("point " + p.to_string() + " is not on " + to_string());
}

RationalPoint CurveQ::neg(const RationalPoint& p) const {
    require_on(p);
    if (p.infinity) return p;
    return RationalPoint::affine(p.x, -p.y - Rational(a1()) * p.x - Rational(a3()));
}

RationalPoint CurveQ::add(const RationalPoint& p, const RationalPoint& q) const {
    require_on(p);
    require_on(q);
    return add_unchecked(p, q);
}

RationalPoint CurveQ::add_unchecked(const RationalPoint& p, const RationalPoint& q) const {
    if (p.infinity) return q;
    if (q.infinity) return p;
    const Rational A1(a1()), A2(a2()), A3(a3()), A4(a4()), A6(a6());
    Rational lambda, nu;
    if (p.x == q.x) {
        if (p.y + q.y + A1 * q.x + A3 == 0) return RationalPoint::at_infinity();
        const Rational den = 2 * p.y + A1 * p.x + A3;
        lambda = (3 * p.x * p.x + 2 * A2 * p.x + A4 - A1 * p.y) / den;
        nu = (-p.x * p.x * p.x + A4 * p.x + 2 * A6 - A3 * p.y) / den;
    } else {
        const Rational den = q.x - p.x;
        lambda = (q.y - p.y) / den;
        nu = (p.y * q.x - q.y * p.x) / den;
    }
    Rational x3 = lambda * lambda + A1 * lambda - A2 - p.x - q.x;
    Rational y3 = -(lambda + A1) * x3 - nu - A3;
    return RationalPoint::affine(std::move(x3), std::move(y3));
}

RationalPoint CurveQ::scalar_mul(const Integer& n, const RationalPoint& p) const {
    require_on(p);
    RationalPoint base = n < 0 ? neg(p) : p;
    Integer k = abs(n);
    RationalPoint acc = RationalPoint::at_infinity();
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) acc = add_unchecked(acc, base);
        k >>= 1;
        if (k > 0) base = add_unchecked(base, base);
    }
    return acc;
}

Place CurveQ::place(std::uint64_t p) const {
    if (!is_prime(p)) throw InputError(std::to_string(p) + " is not prime");
    if (p <= 3) return {p, PlaceStatus::excluded};
    if (disc_ % Integer(static_cast<unsigned long>(p)) == 0) return {p, PlaceStatus::bad};
    return {p, PlaceStatus::good};
}

FpCurve CurveQ::reduce(const Place& v) const {
    if (v.status != PlaceStatus::good)
        throw InputError("place " + std::to_string(v.p) + " is " + mwlab::to_string(v.status) + " for " + to_string());
    const auto p = static_cast<std::int64_t>(v.p);
    return FpCurve(p, to_residue(a_[0], p), to_residue(a_[1], p), to_residue(a_[2], p), to_residue(a_[3], p),
                   to_residue(a_[4], p));
}

FpPoint CurveQ::reduce_point(const RationalPoint& pt, const Place& v) const {
    FpCurve ep = reduce(v);
    require_on(pt);
    if (pt.infinity) return FpPoint::at_infinity();
    // Projective (X : Y : Z) scaled to coprime integers.
    const Integer L = lcm(pt.x.get_den(), pt.y.get_den());
    Integer X = pt.x.get_num() * (L / pt.x.get_den());
    Integer Y = pt.y.get_num() * (L / pt.y.get_den());
    Integer Z = L;
    Integer g;
    mpz_gcd(g.get_mpz_t(), X.get_mpz_t(), Y.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), Z.get_mpz_t());
    X /= g;
    Y /= g;
    Z /= g;
    const auto p = static_cast<std::int64_t>(v.p);
    const std::int64_t z = to_residue(Z, p);
    if (z == 0) return FpPoint::at_infinity();
    Integer zi;
    Integer pz(static_cast<long>(p));
    Integer zz(static_cast<long>(z));
    mpz_invert(zi.get_mpz_t(), zz.get_mpz_t(), pz.get_mpz_t());
    FpPoint out = FpPoint::affine(to_residue(X * zi, p), to_residue(Y * zi, p));
    ep.require_on(out);
    return out;
}

// --- FpCurve ----------------------------------------------------------------

FpCurve::FpCurve(std::int64_t p, std::int64_t a1, std::int64_t a2, std::int64_t a3, std::int64_t a4, std::int64_t a6)
    : p_(p), a_{0, 0, 0, 0, 0} {
    if (p <= 3 || !is_prime(static_cast<std::uint64_t>(p)))
        throw InputError("FpCurve: modulus " + std::to_string(p) + " must be a prime above 3");
    a_[0] = mod(a1);
    a_[1] = mod(a2);
    a_[2] = mod(a3);
    a_[3] = mod(a4);
    a_[4] = mod(a6);
    Integer coeffs[5] = {Integer(static_cast<long>(a_[0])), Integer(static_cast<long>(a_[1])),
                         Integer(static_cast<long>(a_[2])), Integer(static_cast<long>(a_[3])),
                         Integer(static_cast<long>(a_[4]))};
    if (mod_floor(weierstrass_discriminant(coeffs), Integer(static_cast<long>(p))) == 0)
        throw InputError("FpCurve: curve " + to_string() + " is singular");
}

std::int64_t FpCurve::a(int i) const {
    switch (i) {
        case 1: return a_[0];
        case 2: return a_[1];
        case 3: return a_[2];
        case 4: return a_[3];
        case 6: return a_[4];
        default: throw InputError("FpCurve::a: index must be one of 1,2,3,4,6");
    }
}

std::string FpCurve::to_string() const {
    std::ostringstream os;
    os << "[" << a_[0] << ", " << a_[1] << ", " << a_[2] << ", " << a_[3] << ", " << a_[4] << "] mod " << p_;
    return os.str();
}

std::int64_t FpCurve::mul(std::int64_t x, std::int64_t y) const {
    return static_cast<std::int64_t>((static_cast<__int128>(x) * y) % p_);
}

std::int64_t FpCurve::inv(std::int64_t x) const {
    std::int64_t a = mod(x), b = p_, u = 1, v = 0;
    while (b != 0) {
        std::int64_t q = a / b;
        a -= q * b;
        std::swap(a, b);
        u -= q * v;
        std::swap(u, v);
    }
    return mod(u);
}

bool FpCurve::is_on(const FpPoint& pt) const {
    if (pt.infinity) return true;
    if (pt.x < 0 || pt.x >= p_ || pt.y < 0 || pt.y >= p_) return false;
    const std::int64_t x = pt.x, y = pt.y;
    std::int64_t lhs = mod(mul(y, y) + mul(mul(a_[0], x), y) + mul(a_[2], y));
    std::int64_t rhs = mod(mul(mul(x, x), x) + mul(a_[1], mul(x, x)) + mul(a_[3], x) + a_[4]);
    return lhs == rhs;
}

void FpCurve::require_on(const FpPoint& pt) const {
    if (!is_on(pt)) throw InputError("point " + pt.to_string() + " is not on " + to_string());
}

FpPoint FpCurve::neg(const FpPoint& pt) const {
    if (pt.infinity) return pt;
    return FpPoint::affine(pt.x, mod(-pt.y - mul(a_[0], pt.x) - a_[2]));
}

FpPoint FpCurve::add(const FpPoint& a, const FpPoint& b) const {
    if (a.infinity) return b;
    if (b.infinity) return a;
    std::int64_t lambda, nu;
    if (a.x == b.x) {
        if (mod(a.y + b.y + mul(a_[0], b.x) + a_[2]) == 0) return FpPoint::at_infinity();
        const std::int64_t den = inv(mod(2 * a.y + mul(a_[0], a.x) + a_[2]));
        const std::int64_t xx = mul(a.x, a.x);
        lambda = mul(mod(3 * xx + 2 * mul(a_[1], a.x) + a_[3] - mul(a_[0], a.y)), den);
        nu = mul(mod(-mul(xx, a.x) + mul(a_[3], a.x) + 2 * a_[4] - mul(a_[2], a.y)), den);
    } else {
        const std::int64_t den = inv(mod(b.x - a.x));
        lambda = mul(mod(b.y - a.y), den);
        nu = mul(mod(mul(a.y, b.x) - mul(b.y, a.x)), den);
    }
    const std::int64_t x3 = mod(mul(lambda, lambda) + mul(a_[0], lambda) - a_[1] - a.x - b.x);
    const std::int64_t y3 = mod(-mul(mod(lambda + a_[0]), x3) - nu - a_[2]);
    return FpPoint::affine(x3, y3);
}

FpPoint FpCurve::scalar_mul(std::int64_t n, const FpPoint& pt) const {
    FpPoint base = n < 0 ? neg(pt) : pt;
    std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    FpPoint acc = FpPoint::at_infinity();
    while (k > 0) {
        if (k & 1) acc = add(acc, base);
        k >>= 1;
        if (k > 0) base = add(base, base);
    }
    return acc;
}

FpPoint FpCurve::scalar_mul(const Integer& n, const FpPoint& pt) const {
    if (n.fits_slong_p()) return scalar_mul(static_cast<std::int64_t>(n.get_si()), pt);
    FpPoint base = n < 0 ? neg(pt) : pt;
    Integer k = abs(n);
    FpPoint acc = FpPoint::at_infinity();
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) acc = add(acc, base);
        k >>= 1;
        if (k > 0) base = add(base, base);
    }
    return acc;
}

std::vector<std::int64_t> FpCurve::solve_y(std::int64_t x) const {
    // y^2 + b y - c = 0 with b = a1 x + a3, c = x^3 + a2 x^2 + a4 x + a6.
    const std::int64_t b = mod(mul(a_[0], x) + a_[2]);
    const std::int64_t xx = mul(x, x);
    const std::int64_t c = mod(mul(xx, x) + mul(a_[1], xx) + mul(a_[3], x) + a_[4]);
    const std::int64_t disc = mod(mul(b, b) + 4 * c);
    const std::int64_t s = sqrt_mod(disc, p_);
    if (s < 0) return {};
    const std::int64_t half = inv(2);
    const std::int64_t y1 = mul(mod(-b + s), half);
    if (s == 0) return {y1};
    return {y1, mul(mod(-b - s), half)};
}

std::uint64_t FpCurve::group_order(std::uint64_t cap) const {
    if (static_cast<std::uint64_t>(p_) > cap)
        throw ResourceError("point counting over F_" + std::to_string(p_) + " exceeds the cap p <= " +
                            std::to_string(cap));
    // Quadratic residue table instead of per-x square roots.
    std::vector<char> square(static_cast<std::size_t>(p_), 0);
    for (std::int64_t y = 0; y < p_; ++y) square[static_cast<std::size_t>(mul(y, y))] = 1;
    std::uint64_t n = 1;
    for (std::int64_t x = 0; x < p_; ++x) {
        const std::int64_t b = mod(mul(a_[0], x) + a_[2]);
        const std::int64_t xx = mul(x, x);
        const std::int64_t c = mod(mul(xx, x) + mul(a_[1], xx) + mul(a_[3], x) + a_[4]);
        const std::int64_t disc = mod(mul(b, b) + 4 * c);
        if (disc == 0)
            n += 1;
        else if (square[static_cast<std::size_t>(disc)])
            n += 2;
    }
    return n;
}

std::uint64_t FpCurve::point_order_dividing(const FpPoint& pt, std::uint64_t multiple) const {
    require_on(pt);
    for (const auto& d : sorted_divisors(Integer(static_cast<unsigned long>(multiple))))
        if (scalar_mul(d, pt).infinity) return d.get_ui();
    throw InputError("point " + pt.to_string() + " has order not dividing " + std::to_string(multiple));
}

std::uint64_t FpCurve::point_order(const FpPoint& pt, std::uint64_t cap) const {
    return point_order_dividing(pt, group_order(cap));
}

std::vector<FpPoint> FpCurve::all_points(std::uint64_t cap) const {
    if (static_cast<std::uint64_t>(p_) > cap)
        throw ResourceError("point enumeration over F_" + std::to_string(p_) + " exceeds the cap");
    std::vector<FpPoint> out{FpPoint::at_infinity()};
    for (std::int64_t x = 0; x < p_; ++x)
        for (std::int64_t y : solve_y(x)) out.push_back(FpPoint::affine(x, y));
    return out;
}

FpPoint FpCurve::random_point(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::int64_t> dist(0, p_ - 1);
    for (;;) {
        const std::int64_t x = dist(rng);
        auto ys = solve_y(x);
        if (ys.empty()) continue;
        return FpPoint::affine(x, ys[static_cast<std::size_t>(rng() % ys.size())]);
    }
}

// --- torsion ----------------------------------------------------------------

TorsionCheckResult check_torsion_claims(const CurveQ& e, const std::vector<TorsionClaim>& claims) {
    for (const auto& c : claims) {
        if (!e.is_on(c.point)) return {false, c.name + " = " + c.point.to_string() + " is not on the curve"};
        if (c.order < 1) return {false, c.name + " has nonpositive claimed order"};
        if (!e.scalar_mul(c.order, c.point).infinity)
            return {false, c.name + " = " + c.point.to_string() + " does not have order dividing " + c.order.get_str()};
        for (const auto& d : sorted_divisors(c.order)) {
            if (d == c.order) break;
            if (e.scalar_mul(d, c.point).infinity)
                return {false, c.name + " = " + c.point.to_string() + " has order " + d.get_str() + ", not " +
                                   c.order.get_str()};
        }
    }
    return {};
}

bool torsion_fixture_check(const CurveQ& e, const std::vector<TorsionClaim>& claims) {
    return check_torsion_claims(e, claims).ok;
}

// --- primes -----------------------------------------------------------------

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d : {2ull, 3ull, 5ull, 7ull})
        if (n % d == 0) return n == d;
    for (std::uint64_t d = 11; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    if (n < 2) return out;
    std::vector<char> composite(n + 1, 0);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = 1;
    }
    return out;
}

std::int64_t sqrt_mod(std::int64_t a, std::int64_t p) {
    auto mulm = [p](std::int64_t x, std::int64_t y) {
        return static_cast<std::int64_t>((static_cast<__int128>(x) * y) % p);
    };
    auto powm = [&](std::int64_t b, std::int64_t e) {
        std::int64_t r = 1;
        b %= p;
        while (e > 0) {
            if (e & 1) r = mulm(r, b);
            b = mulm(b, b);
            e >>= 1;
        }
        return r;
    };
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    if (p == 2) return a;
    if (powm(a, (p - 1) / 2) != 1) return -1;
    // Tonelli-Shanks
    std::int64_t q = p - 1, s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    std::int64_t z = 2;
    while (powm(z, (p - 1) / 2) != p - 1) ++z;
    std::int64_t m = s, c = powm(z, q), t = powm(a, q), r = powm(a, (q + 1) / 2);
    while (t != 1) {
        std::int64_t i = 0, tt = t;
        while (tt != 1) {
            tt = mulm(tt, tt);
            ++i;
        }
        std::int64_t b = c;
        for (std::int64_t j = 0; j < m - i - 1; ++j) b = mulm(b, b);
        m = i;
        c = mulm(b, b);
        t = mulm(t, c);
        r = mulm(r, b);
    }
    return r;
}

}  // namespace mwlab
