#include "mwlab/local_global.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mwlab {

TraceZeroLattice build_counterexample(const GlobalModule& b, std::vector<GlobalPoint> points) {
    if (points.size() < 2)
        throw InputError("a trace-zero lattice needs at least 2 points, got " + std::to_string(points.size()));
    for (const auto& p : points) b.validate(p);
    TraceZeroLattice l;
    l.dimension = b.dimension();
    l.tagged = static_cast<long>(points.size()) == b.dimension() + 1;
    l.independence_box = b.limits().independence_box;
    l.dependence = b.find_small_relation(points, l.independence_box);
    l.points = std::move(points);
    return l;
}

GlobalMembership global_membership(const TraceZeroLattice& lattice) {
    const std::size_t e = lattice.e();
    GlobalMembership out;
    if (e == 0) {
        out.member = true;
        out.witness = IntMatrix(0, 0);
        out.reason = "empty vector";
        return out;
    }
    const std::size_t rho = lattice.points[0].free_coords.size();
    // Unknown M(i, j) sits at column i*e + j.
    IntMatrix a(e * rho + 1, e * e);
    IntVector rhs(e * rho + 1, Integer(0));
    for (std::size_t i = 0; i < e; ++i)
        for (std::size_t k = 0; k < rho; ++k) {
            const std::size_t row = i * rho + k;
            for (std::size_t j = 0; j < e; ++j) a(row, i * e + j) = lattice.points[j].free_coords[k];
            rhs[row] = lattice.points[i].free_coords[k];
        }
    for (std::size_t i = 0; i < e; ++i) a(e * rho, i * e + i) = 1;
    const IntVector moduli(e * rho + 1, Integer(0));

    const auto sol = solve_mod(a, rhs, moduli);
    if (!sol) {
        out.member = false;
        out.reason = free_parts_independent(lattice.points)
                         ? "independence forces identity: M P = P implies M = I, and tr I = " + std::to_string(e) +
                               " != 0"
                         : "no integer trace-zero matrix fixes P";
        return out;
    }
    IntMatrix m(e, e);
    for (std::size_t i = 0; i < e; ++i)
        for (std::size_t j = 0; j < e; ++j) m(i, j) = (*sol)[i * e + j];
    out.member = true;
    out.witness = std::move(m);
    out.reason = "trace-zero witness found";
    return out;
}

FixingOutcome find_fixing_matrix(const FiniteAbelianGroup& g, const std::vector<Element>& reduced,
                                 std::uint64_t place) {
    const std::size_t e = reduced.size();
    if (e == 0) throw InputError("find_fixing_matrix: empty point vector");
    for (const auto& x : reduced) g.validate(x);

    IntVector alphas(e);
    IntMatrix relations(e, e);
    for (std::size_t i = 0; i < e; ++i) {
        std::vector<Element> others;
        for (std::size_t j = 0; j < e; ++j)
            if (j != i) others.push_back(reduced[j]);
        const MinimalMultiple mm = minimal_multiple_in_subgroup(g, reduced[i], others);
        alphas[i] = mm.alpha;
        for (std::size_t j = 0, slot = 0; j < e; ++j) relations(i, j) = (j == i) ? mm.alpha : mm.relation[slot++];
    }

    const BezoutResult bz = ext_gcd(alphas);
    if (bz.g != 1) return MethodFailure{place, g, reduced, std::move(alphas), std::move(relations), bz.g};

    // a = (1, ..., 1) + (e - sum alpha) * c with c . alpha = 1, so sum a_i alpha_i = e
    // and the diagonal 1 - a_i alpha_i sums to zero.
    Integer shift = Integer(static_cast<unsigned long>(e));
    for (const auto& al : alphas) shift -= al;
    IntVector a(e);
    for (std::size_t i = 0; i < e; ++i) a[i] = 1 + shift * bz.coeffs[i];
    IntMatrix m(e, e);
    for (std::size_t i = 0; i < e; ++i)
        for (std::size_t j = 0; j < e; ++j) m(i, j) = (i == j) ? Integer(1 - a[i] * alphas[i]) : Integer(-a[i] * relations(i, j));

    FixingMatrixCertificate cert{place, g, reduced, std::move(alphas), std::move(relations), std::move(a), std::move(m)};
    if (const auto check = validate_certificate(cert); !check.ok()) {
        std::string what = "constructed certificate failed validation at place " + std::to_string(place) + ":";
        for (const auto& line : check.lines)
            if (!line.ok) what += " " + line.name + " (" + line.detail + ")";
        throw std::logic_error(what);
    }
    return cert;
}

FixingOutcome find_fixing_matrix(const GlobalModule& b, const TraceZeroLattice& lattice, std::uint64_t place) {
    const LocalImage img = b.local_image(place);
    std::vector<Element> reduced;
    for (const auto& p : lattice.points) reduced.push_back(img.reduce(p));
    return find_fixing_matrix(img.group, reduced, place);
}

bool CertificateCheck::ok() const {
    return !lines.empty() && std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.ok; });
}

namespace {

std::set<IntVector> subgroup_closure(const FiniteAbelianGroup& g, const std::vector<Element>& gens) {
    std::set<IntVector> seen{g.zero().coords};
    std::vector<Element> frontier{g.zero()};
    while (!frontier.empty()) {
        std::vector<Element> next;
        for (const auto& x : frontier)
            for (const auto& y : gens) {
                Element z = g.add(x, y);
                if (seen.insert(z.coords).second) next.push_back(std::move(z));
            }
        frontier = std::move(next);
    }
    return seen;
}

Element matrix_row_apply(const FiniteAbelianGroup& g, const IntMatrix& m, std::size_t row,
                         const std::vector<Element>& xs) {
    return g.combine(m.row(row), xs);
}

}  // namespace

CertificateCheck validate_certificate(const FixingMatrixCertificate& c) {
    CertificateCheck out;
    const std::size_t e = c.reduced.size();
    const FiniteAbelianGroup& g = c.group;

    auto shape_ok = c.alphas.size() == e && c.bezout.size() == e && c.relations.rows() == e &&
                    c.relations.cols() == e && c.matrix.rows() == e && c.matrix.cols() == e &&
                    std::all_of(c.reduced.begin(), c.reduced.end(), [&](const Element& x) { return g.contains(x); });
    out.lines.push_back({"shape", shape_ok, shape_ok ? "" : "dimensions or element coordinates inconsistent"});
    if (!shape_ok) return out;

    {
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < e; ++i) {
            if (c.relations(i, i) != c.alphas[i]) {
                ok = false;
                detail = "row " + std::to_string(i) + " diagonal differs from alpha";
                break;
            }
            if (!g.is_zero(matrix_row_apply(g, c.relations, i, c.reduced))) {
                ok = false;
                detail = "row " + std::to_string(i) + " does not vanish";
                break;
            }
        }
        out.lines.push_back({"relations_vanish", ok, detail});
    }
    {
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < e && ok; ++i) {
            if (c.alphas[i] < 1) {
                ok = false;
                detail = "alpha_" + std::to_string(i) + " < 1";
                break;
            }
            if (c.alphas[i] > g.exponent()) {
                ok = false;
                detail = "alpha_" + std::to_string(i) + " exceeds the group exponent";
                break;
            }
            std::vector<Element> others;
            for (std::size_t j = 0; j < e; ++j)
                if (j != i) others.push_back(c.reduced[j]);
            const auto sub = subgroup_closure(g, others);
            for (Integer k = 1; k < c.alphas[i]; ++k)
                if (sub.count(g.scale(k, c.reduced[i]).coords)) {
                    ok = false;
                    detail = "row " + std::to_string(i) + ": " + k.get_str() + " * P_" + std::to_string(i) +
                             " already lies in the span of the others";
                    break;
                }
        }
        out.lines.push_back({"alphas_minimal", ok, detail});
    }
    {
        Integer gc = 0, dot = 0;
        for (std::size_t i = 0; i < e; ++i) {
            mpz_gcd(gc.get_mpz_t(), gc.get_mpz_t(), c.alphas[i].get_mpz_t());
            dot += c.bezout[i] * c.alphas[i];
        }
        const bool ok = gc == 1 && dot == Integer(static_cast<unsigned long>(e));
        out.lines.push_back({"gcd_and_bezout", ok, "gcd = " + gc.get_str() + ", sum a_i alpha_i = " + dot.get_str()});
    }
    {
        bool ok = true;
        for (std::size_t i = 0; i < e && ok; ++i)
            for (std::size_t j = 0; j < e; ++j) {
                const Integer expect = (i == j) ? Integer(1 - c.bezout[i] * c.alphas[i])
                                                : Integer(-c.bezout[i] * c.relations(i, j));
                if (c.matrix(i, j) != expect) {
                    ok = false;
                    break;
                }
            }
        out.lines.push_back({"matrix_from_relations", ok, ok ? "" : "M differs from the diagonal completion"});
    }
    {
        bool fixes = true;
        for (std::size_t i = 0; i < e; ++i)
            if (!(matrix_row_apply(g, c.matrix, i, c.reduced) == c.reduced[i])) fixes = false;
        const Integer tr = c.matrix.trace();
        out.lines.push_back({"trace_zero", tr == 0, "tr M = " + tr.get_str()});
        out.lines.push_back({"fixes_reduction", fixes, fixes ? "" : "M P != P in the reduction"});
    }
    return out;
}

LocalMembership decide_local_membership_exact(const FiniteAbelianGroup& g, const std::vector<Element>& reduced,
                                              std::uint64_t cap) {
    const std::size_t e = reduced.size();
    for (const auto& x : reduced) g.validate(x);
    if (subgroup_order(g, reduced) > Integer(static_cast<unsigned long>(cap)))
        throw ResourceError("decide_local_membership_exact: generated subgroup exceeds the cap of " +
                            std::to_string(cap));
    const std::size_t r = g.rank();
    IntMatrix a(e * r + 1, e * e);
    IntVector rhs(e * r + 1, Integer(0)), moduli(e * r + 1, Integer(0));
    for (std::size_t i = 0; i < e; ++i)
        for (std::size_t k = 0; k < r; ++k) {
            const std::size_t row = i * r + k;
            for (std::size_t j = 0; j < e; ++j) a(row, i * e + j) = reduced[j].coords[k];
            rhs[row] = reduced[i].coords[k];
            moduli[row] = g.invariants()[k];
        }
    for (std::size_t i = 0; i < e; ++i) a(e * r, i * e + i) = 1;

    LocalMembership out;
    const auto sol = solve_mod(a, rhs, moduli);
    if (!sol) return out;
    IntMatrix m(e, e);
    for (std::size_t i = 0; i < e; ++i)
        for (std::size_t j = 0; j < e; ++j) m(i, j) = (*sol)[i * e + j];
    out.member = true;
    out.witness = std::move(m);
    return out;
}

LocalMembership decide_local_membership_exact(const GlobalModule& b, const TraceZeroLattice& lattice,
                                              std::uint64_t place) {
    const LocalImage img = b.local_image(place);
    std::vector<Element> reduced;
    for (const auto& p : lattice.points) reduced.push_back(img.reduce(p));
    return decide_local_membership_exact(img.group, reduced, b.limits().subgroup_cap);
}

ObstructionSearch find_local_obstruction(const GlobalModule& b, const GlobalPoint& p,
                                         const std::vector<GlobalPoint>& lambda_gens, std::uint64_t bound,
                                         const ScanOptions& opt) {
    b.validate(p);
    for (const auto& q : lambda_gens) b.validate(q);
    ObstructionSearch out;
    out.bound = bound;
    const auto places = b.places_up_to(bound);
    const std::size_t idx = find_first_place(
        places,
        [&](std::uint64_t v) {
            const LocalImage img = b.local_image(v);
            std::vector<Element> gens;
            for (const auto& q : lambda_gens) gens.push_back(img.reduce(q));
            return !subgroup_membership(img.group, img.reduce(p), gens).has_value();
        },
        opt);
    if (idx < places.size()) {
        out.witness = places[idx];
        out.places_scanned = idx + 1;
    } else {
        out.places_scanned = places.size();
    }
    return out;
}

std::vector<PlaceFixing> scan_fixing_matrices(const GlobalModule& b, const TraceZeroLattice& lattice,
                                              std::uint64_t bound, const ScanOptions& opt) {
    return map_places(
        b.places_up_to(bound),
        [&](std::uint64_t v) {
            PlaceFixing pf{v, find_fixing_matrix(b, lattice, v), {}};
            if (const auto* cert = std::get_if<FixingMatrixCertificate>(&pf.outcome)) pf.check = validate_certificate(*cert);
            return pf;
        },
        opt);
}

}  // namespace mwlab
