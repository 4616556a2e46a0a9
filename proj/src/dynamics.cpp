#include "mwlab/dynamics.hpp"

#include <algorithm>
#include <unordered_map>

namespace mwlab {

// --- EndoMap -------------------------------------------------------------------

EndoMap EndoMap::multiply(Integer m) {
    if (abs(m) < 2) throw InputError("multiplication map needs |m| >= 2, got " + m.get_str());
    EndoMap f;
    f.kind_ = Kind::multiply;
    f.m_ = std::move(m);
    return f;
}

EndoMap EndoMap::linear(IntMatrix a, Integer torsion_multiplier) {
    if (a.rows() != a.cols())
        throw InputError("endomorphism matrix must be square, got " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
    EndoMap f;
    f.kind_ = Kind::matrix;
    f.a_ = std::move(a);
    f.t_ = std::move(torsion_multiplier);
    return f;
}

GlobalPoint EndoMap::apply(const GlobalModule& b, const GlobalPoint& p) const {
    b.validate(p);
    if (kind_ == Kind::multiply) return b.scale(m_, p);
    if (a_.rows() != b.rank())
        throw InputError("endomorphism matrix is " + std::to_string(a_.rows()) + "x" + std::to_string(a_.cols()) +
                         " but the module has rank " + std::to_string(b.rank()));
    return GlobalPoint{a_ * p.free_coords, b.torsion_group().scale(t_, p.torsion_part)};
}

std::string EndoMap::to_string() const {
    if (kind_ == Kind::multiply) return "[" + m_.get_str() + "]";
    return "matrix " + a_.to_string() + ", torsion x" + t_.get_str();
}

// --- local maps ------------------------------------------------------------------

LocalEndo LocalEndo::multiply(FiniteAbelianGroup g, Integer m) {
    LocalEndo f;
    f.group_ = std::move(g);
    f.m_ = std::move(m);
    return f;
}

LocalEndo LocalEndo::from_basis_images(FiniteAbelianGroup g, std::vector<Element> basis_images) {
    if (basis_images.size() != g.rank())
        throw InputError("expected " + std::to_string(g.rank()) + " basis images, got " +
                         std::to_string(basis_images.size()));
    for (const auto& x : basis_images) g.validate(x);
    // Well defined only if d_k * e_k goes to zero.
    for (std::size_t k = 0; k < g.rank(); ++k)
        if (!g.is_zero(g.scale(g.invariants()[k], basis_images[k])))
            throw InputError("basis image " + std::to_string(k) + " does not respect the order " +
                             g.invariants()[k].get_str());
    LocalEndo f;
    f.group_ = std::move(g);
    f.images_ = std::move(basis_images);
    return f;
}

Element LocalEndo::apply(const Element& x) const {
    if (m_) return group_.scale(*m_, x);
    return group_.combine(x.coords, images_);
}

LocalEndo induced_endomorphism(const GlobalModule& b, const EndoMap& phi, const LocalImage& img) {
    if (phi.kind() == EndoMap::Kind::multiply) return LocalEndo::multiply(img.group, phi.multiplier());

    const FiniteAbelianGroup& g = img.group;
    std::vector<Element> gens = img.generators;
    gens.insert(gens.end(), img.torsion.begin(), img.torsion.end());
    std::vector<Element> images;
    for (std::size_t i = 0; i < b.rank(); ++i) images.push_back(img.reduce(phi.apply(b, b.generator(i))));
    for (std::size_t j = 0; j < b.torsion_group().rank(); ++j)
        images.push_back(img.reduce(phi.apply(b, b.torsion_generator(j))));

    IntMatrix a(g.rank(), gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j)
        for (std::size_t i = 0; i < g.rank(); ++i) a(i, j) = gens[j].coords[i];
    for (const auto& z : kernel_mod(a, g.invariants()))
        if (!g.is_zero(g.combine(z, images)))
            throw InputError("endomorphism " + phi.to_string() + " does not descend to place " +
                             std::to_string(img.place) + ": relation " + to_string(z) + " is not preserved");

    std::vector<Element> basis_images;
    for (std::size_t k = 0; k < g.rank(); ++k) {
        IntVector raw(g.rank(), Integer(0));
        raw[k] = 1;
        const auto lift = subgroup_membership(g, g.element(raw), gens);
        if (!lift)
            throw InputError("matrix endomorphisms need the reduced generators to generate B_v at place " +
                             std::to_string(img.place));
        basis_images.push_back(g.combine(*lift, images));
    }
    return LocalEndo::from_basis_images(g, std::move(basis_images));
}

// --- orbits ----------------------------------------------------------------------

const Element& OrbitModV::at(std::uint64_t n) const {
    if (n < visited.size()) return visited[n];
    return visited[preperiod + (n - preperiod) % cycle];
}

namespace {

std::uint64_t element_key(const FiniteAbelianGroup& g, const Element& x) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < g.rank(); ++i) key = key * g.invariants()[i].get_ui() + x.coords[i].get_ui();
    return key;
}

}  // namespace

OrbitModV orbit_in_group(const LocalEndo& f, const Element& x, const std::vector<Element>& lambda, std::uint64_t cap) {
    const FiniteAbelianGroup& g = f.group();
    g.validate(x);
    if (g.order() > Integer(1UL << 62)) throw ResourceError("orbit_in_group: group too large to index");
    const QuotientProjection in_lambda(g, lambda);

    OrbitModV out;
    std::unordered_map<std::uint64_t, std::size_t> seen;
    Element cur = x;
    for (;;) {
        const auto [it, fresh] = seen.emplace(element_key(g, cur), out.visited.size());
        if (!fresh) {
            out.preperiod = it->second;
            out.cycle = out.visited.size() - it->second;
            break;
        }
        if (out.visited.size() >= cap)
            throw ResourceError("orbit exceeds the cap of " + std::to_string(cap) + " steps");
        out.visited.push_back(cur);
        cur = f.apply(cur);
    }
    for (std::size_t i = 0; i < out.visited.size(); ++i)
        if (in_lambda.contains(out.visited[i])) {
            out.first_hit = i;
            break;
        }
    return out;
}

namespace {

struct LocalSetup {
    LocalImage img;
    LocalEndo f;
    Element x;
    std::vector<Element> lambda;
};

LocalSetup local_setup(const GlobalModule& b, const EndoMap& phi, const GlobalPoint& p,
                       const std::vector<GlobalPoint>& lambda_gens, std::uint64_t place) {
    LocalImage img = b.local_image(place);
    LocalEndo f = induced_endomorphism(b, phi, img);
    Element x = img.reduce(p);
    std::vector<Element> lambda;
    for (const auto& q : lambda_gens) lambda.push_back(img.reduce(q));
    return {std::move(img), std::move(f), std::move(x), std::move(lambda)};
}

}  // namespace

OrbitModV orbit_mod_v(const GlobalModule& b, const EndoMap& phi, const GlobalPoint& p,
                      const std::vector<GlobalPoint>& lambda_gens, std::uint64_t place) {
    b.validate(p);
    for (const auto& q : lambda_gens) b.validate(q);
    const LocalSetup s = local_setup(b, phi, p, lambda_gens, place);
    OrbitModV out = orbit_in_group(s.f, s.x, s.lambda, b.limits().subgroup_cap);
    out.place = place;
    return out;
}

GlobalOrbitSearch global_orbit_intersection(const GlobalModule& b, const EndoMap& phi, const GlobalPoint& p,
                                            const std::vector<GlobalPoint>& lambda_gens, std::uint64_t step_bound) {
    b.validate(p);
    for (const auto& q : lambda_gens) b.validate(q);
    const std::size_t rho = b.rank(), rt = b.torsion_group().rank(), k = lambda_gens.size();

    // Free rows over Z, torsion rows modulo the invariant factors.
    IntMatrix a(rho + rt, k);
    IntVector moduli(rho + rt, Integer(0));
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < rho; ++i) a(i, j) = lambda_gens[j].free_coords[i];
        for (std::size_t i = 0; i < rt; ++i) a(rho + i, j) = lambda_gens[j].torsion_part.coords[i];
    }
    for (std::size_t i = 0; i < rt; ++i) moduli[rho + i] = b.torsion_group().invariants()[i];

    GlobalOrbitSearch out;
    out.step_bound = step_bound;
    GlobalPoint cur = p;
    for (std::uint64_t n = 0; n <= step_bound; ++n) {
        IntVector rhs = cur.free_coords;
        rhs.insert(rhs.end(), cur.torsion_part.coords.begin(), cur.torsion_part.coords.end());
        if (auto sol = solve_mod(a, rhs, moduli)) {
            out.hit = GlobalOrbitHit{n, std::move(*sol)};
            return out;
        }
        if (n < step_bound) cur = phi.apply(b, cur);
    }
    return out;
}

// --- experiment ------------------------------------------------------------------

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::consistent: return "CONSISTENT";
        case Verdict::inconsistent_anomaly: return "INCONSISTENT_ANOMALY";
        case Verdict::precondition_violated: return "PRECONDITION_VIOLATED";
    }
    return "?";
}

DynamicsReport dynamical_lgp_experiment(const GlobalModule& b, const DynamicsExperiment& x, const ScanOptions& opt) {
    b.validate(x.p);
    for (const auto& q : x.lambda_gens) b.validate(q);

    DynamicsReport r;
    r.place_bound = x.place_bound;
    r.global.step_bound = x.step_bound;

    r.injectivity_failures = scan_torsion_injectivity(b, x.place_bound, opt).failures;
    if (!r.injectivity_failures.empty()) {
        r.verdict = Verdict::precondition_violated;
        r.notes.push_back("torsion does not inject at " + std::to_string(r.injectivity_failures.size()) +
                          " place(s), first " + std::to_string(r.injectivity_failures.front()) +
                          "; no verdict is drawn");
        return r;
    }

    r.global = global_orbit_intersection(b, x.phi, x.p, x.lambda_gens, x.step_bound);
    const std::optional<std::uint64_t> n = r.global.hit ? std::optional(r.global.hit->n) : std::nullopt;

    r.places = map_places(
        b.places_up_to(x.place_bound),
        [&](std::uint64_t v) {
            const LocalSetup s = local_setup(b, x.phi, x.p, x.lambda_gens, v);
            const OrbitModV orbit = orbit_in_group(s.f, s.x, s.lambda, b.limits().subgroup_cap);
            PlaceOrbit po{v, orbit.preperiod, orbit.cycle, orbit.first_hit, std::nullopt};
            if (n) po.hit_at_global_step = QuotientProjection(s.img.group, s.lambda).contains(orbit.at(*n));
            return po;
        },
        opt);

    for (const auto& po : r.places)
        if (!po.first_hit) r.missing_places.push_back(po.place);

    if (n) {
        std::size_t bad = 0;
        for (const auto& po : r.places)
            if (!po.first_hit || !po.hit_at_global_step.value_or(false)) {
                if (bad++ == 0)
                    r.notes.push_back("global hit at n = " + std::to_string(*n) + " but place " +
                                      std::to_string(po.place) + " does not contain phi^n(P) mod v in Lambda mod v");
            }
        r.verdict = bad ? Verdict::inconsistent_anomaly : Verdict::consistent;
        if (!bad)
            r.notes.push_back("global hit at n = " + std::to_string(*n) + "; all " + std::to_string(r.places.size()) +
                              " scanned places hit at that step");
    } else if (!r.missing_places.empty()) {
        r.verdict = Verdict::consistent;
        r.notes.push_back("no global hit for n <= " + std::to_string(x.step_bound) + "; place " +
                          std::to_string(r.missing_places.front()) + " has an orbit disjoint from Lambda mod v");
    } else {
        r.verdict = Verdict::consistent;
        r.inconclusive = true;
        r.notes.push_back("every scanned place hits but no global hit for n <= " + std::to_string(x.step_bound) +
                          "; inconclusive at these bounds");
    }
    return r;
}

}  // namespace mwlab
