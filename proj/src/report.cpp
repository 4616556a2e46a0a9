#include "mwlab/report.hpp"

#include <chrono>
#include <fstream>
#include <filesystem>
#include <random>
#include <sstream>

#include <omp.h>

namespace mwlab {

using nlohmann::json;

// --- serialization ----------------------------------------------------------------

json to_json(const IntVector& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(integer_json(x));
    return out;
}

json to_json(const IntMatrix& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(to_json(m.row(i)));
    return out;
}

json to_json(const FiniteAbelianGroup& g) { return to_json(g.invariants()); }

json to_json(const CertificateCheck& c) {
    json out = json::array();
    for (const auto& l : c.lines) out.push_back({{"name", l.name}, {"ok", l.ok}, {"detail", l.detail}});
    return out;
}

namespace {

json elements_json(const std::vector<Element>& xs) {
    json out = json::array();
    for (const auto& x : xs) out.push_back(to_json(x.coords));
    return out;
}

IntVector int_vector(const json& j, const std::string& what) {
    if (!j.is_array()) throw InputError(what + ": expected an array");
    IntVector out;
    for (const auto& x : j) out.push_back(json_integer(x, what));
    return out;
}

IntMatrix int_matrix(const json& j, std::size_t cols, const std::string& what) {
    if (!j.is_array()) throw InputError(what + ": expected an array of rows");
    std::vector<IntVector> rows;
    for (const auto& r : j) {
        rows.push_back(int_vector(r, what));
        if (rows.back().size() != cols) throw InputError(what + ": row length mismatch");
    }
    return IntMatrix::from_rows(rows, cols);
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing \"" + key + "\"");
    return j.at(key);
}

}  // namespace

json to_json(const PlaceFixing& pf) {
    json out;
    out["place"] = pf.place;
    if (const auto* c = std::get_if<FixingMatrixCertificate>(&pf.outcome)) {
        out["status"] = "certificate";
        out["group"] = to_json(c->group);
        out["reduced"] = elements_json(c->reduced);
        out["alphas"] = to_json(c->alphas);
        out["relations"] = to_json(c->relations);
        out["bezout"] = to_json(c->bezout);
        out["matrix"] = to_json(c->matrix);
        out["checks"] = to_json(pf.check);
    } else {
        const auto& f = std::get<MethodFailure>(pf.outcome);
        out["status"] = "method_failure";
        out["group"] = to_json(f.group);
        out["reduced"] = elements_json(f.reduced);
        out["alphas"] = to_json(f.alphas);
        out["relations"] = to_json(f.relations);
        out["gcd"] = integer_json(f.gcd);
    }
    return out;
}

FixingMatrixCertificate certificate_from_json(const json& j) {
    const std::string where = "certificate";
    FixingMatrixCertificate c;
    c.place = field(j, "place", where).get<std::uint64_t>();
    c.group = FiniteAbelianGroup(int_vector(field(j, "group", where), "group"));
    for (const auto& x : field(j, "reduced", where)) {
        Element e{int_vector(x, "reduced")};
        c.reduced.push_back(std::move(e));
    }
    const std::size_t e = c.reduced.size();
    c.alphas = int_vector(field(j, "alphas", where), "alphas");
    c.relations = int_matrix(field(j, "relations", where), e, "relations");
    c.bezout = int_vector(field(j, "bezout", where), "bezout");
    c.matrix = int_matrix(field(j, "matrix", where), e, "matrix");
    return c;
}

json strip_timing(json report) {
    report.erase("timing");
    return report;
}

// --- shared plumbing ----------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

ScanOptions scan_options(const RunConfig& cfg) { return ScanOptions{Exec::parallel, cfg.jobs}; }

json point_json(const std::string& expr, const GlobalPoint& p) {
    return {{"expr", expr}, {"free", to_json(p.free_coords)}, {"torsion", to_json(p.torsion_part.coords)}};
}

json module_json(const RunDescription& d) {
    const GlobalModule& b = *d.module;
    json m;
    m["name"] = b.name();
    m["realization"] = b.is_elliptic() ? "elliptic" : "synthetic";
    m["rank"] = b.rank();
    m["torsion"] = to_json(b.torsion_group());
    m["dimension"] = b.dimension();
    if (b.is_elliptic()) {
        const CurveFixture& fx = b.fixture();
        const CurveQ& c = fx.curve;
        m["coefficients"] = to_json(IntVector{c.a1(), c.a2(), c.a3(), c.a4(), c.a6()});
        m["discriminant"] = integer_json(c.discriminant());
        json gens = json::array(), tors = json::array();
        for (const auto& g : fx.generators) gens.push_back({{"name", g.name}, {"point", g.point.to_string()}});
        for (const auto& t : fx.torsion)
            tors.push_back({{"name", t.name}, {"point", t.point.to_string()}, {"order", integer_json(t.order)}});
        m["generators"] = gens;
        m["torsion_generators"] = tors;
    }
    json names = json::array();
    for (const auto& n : d.point_names) names.push_back(n);
    m["names"] = names;
    return m;
}

json config_json(const RunConfig& cfg, const std::optional<std::uint64_t>& place_bound,
                 const std::optional<std::uint64_t>& step_bound) {
    json c;
    c["fixture"] = cfg.fixture;
    c["place_bound"] = place_bound ? json(*place_bound) : json(nullptr);
    c["step_bound"] = step_bound ? json(*step_bound) : json(nullptr);
    c["l"] = cfg.l ? json(*cfg.l) : json(nullptr);
    c["pattern"] = cfg.pattern ? json(*cfg.pattern) : json(nullptr);
    c["seed"] = cfg.seed;
    return c;
}

json envelope(const std::string& command) {
    json r;
    r["schema"] = kReportSchema;
    r["tool"] = {{"name", "mwlab"}, {"version", MWLAB_VERSION}};
    r["command"] = command;
    return r;
}

void finish(RunOutcome& out, const std::string& status, int code, Clock::time_point start, const RunConfig& cfg) {
    out.exit_code = code;
    json summary = json::array();
    for (const auto& s : out.summary) summary.push_back(s);
    out.report["verdict"] = {{"status", status}, {"exit_code", code}, {"summary", summary}};
    out.report["timing"] = {
        {"wall_seconds", std::chrono::duration<double>(Clock::now() - start).count()},
        {"jobs", cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads()}};
}

std::vector<std::string> generator_names(const RunDescription& d) {
    std::vector<std::string> out;
    const GlobalModule& b = *d.module;
    for (std::size_t i = 0; i < b.rank(); ++i) out.push_back(d.point_names.at(i));
    return out;
}

std::uint64_t resolve(const std::optional<std::uint64_t>& flag, const std::optional<std::uint64_t>& file,
                      std::uint64_t fallback) {
    if (flag) return *flag;
    if (file) return *file;
    return fallback;
}

std::string group_string(const FiniteAbelianGroup& g) { return g.rank() == 0 ? "trivial" : g.to_string(); }

}  // namespace

// --- counterexample -------------------------------------------------------------------

RunOutcome run_counterexample(const RunConfig& cfg) {
    const auto start = Clock::now();
    const RunDescription d = load_run_description(cfg.fixture);
    const GlobalModule& b = *d.module;
    const std::uint64_t bound = resolve(cfg.place_bound, d.place_bound, 1000);
    const std::vector<std::string> names = d.counterexample ? *d.counterexample : generator_names(d);
    if (names.size() < 2)
        throw InputError("counterexample needs at least 2 points; " + cfg.fixture + " provides " +
                         std::to_string(names.size()));

    const TraceZeroLattice lattice = build_counterexample(b, d.points_of(names));
    const GlobalMembership global = global_membership(lattice);
    const auto places = scan_fixing_matrices(b, lattice, bound, scan_options(cfg));

    std::size_t valid = 0, failures = 0, invalid = 0;
    json place_records = json::array();
    for (const auto& pf : places) {
        if (std::holds_alternative<MethodFailure>(pf.outcome)) ++failures;
        else if (pf.check.ok()) ++valid;
        else ++invalid;
        json rec = to_json(pf);
        if (const auto* f = std::get_if<MethodFailure>(&pf.outcome)) {
            // Record what the exact decision says where the construction gives up.
            try {
                const LocalMembership lm = decide_local_membership_exact(f->group, f->reduced);
                rec["exact_oracle"] = {{"member", lm.member}, {"witness", lm.witness ? to_json(*lm.witness) : json(nullptr)}};
            } catch (const ResourceError& e) {
                rec["exact_oracle"] = {{"member", nullptr}, {"skipped", e.what()}};
            }
        }
        place_records.push_back(rec);
    }

    RunOutcome out;
    out.report = envelope("counterexample");
    out.report["config"] = config_json(cfg, bound, std::nullopt);
    out.report["module"] = module_json(d);
    json pts = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) pts.push_back(point_json(names[i], lattice.points[i]));
    json result;
    result["points"] = pts;
    result["e"] = lattice.e();
    result["d"] = lattice.dimension;
    result["tagged"] = lattice.tagged;
    result["independence"] = {{"box", lattice.independence_box},
                              {"relation", lattice.dependence ? to_json(*lattice.dependence) : json(nullptr)}};
    result["global_membership"] = {{"member", global.member},
                                   {"reason", global.reason},
                                   {"witness", global.witness ? to_json(*global.witness) : json(nullptr)}};
    result["places_scanned"] = places.size();
    result["certificates_valid"] = valid;
    result["method_failures"] = failures;
    result["certificates_invalid"] = invalid;
    result["places"] = place_records;
    out.report["result"] = result;

    out.summary.push_back("local membership at " + std::to_string(valid) + "/" + std::to_string(places.size()) +
                          " places, global non-membership: " + (global.member ? "REFUTED" : "CONFIRMED"));
    std::string status;
    int code = kExitOk;
    if (lattice.is_candidate()) {
        if (failures || invalid || global.member) {
            status = "ANOMALY";
            code = kExitAnomaly;
            if (failures) out.summary.push_back(std::to_string(failures) + " method failure(s) on a tagged candidate");
        } else {
            status = "CONFIRMED";
        }
    } else {
        status = "INFORMATIONAL";
        out.summary.push_back(lattice.tagged ? "points are dependent (relation " + to_string(*lattice.dependence) +
                                                   "); hypotheses unmet"
                                             : "hypothesis e = d + 1 unmet (e = " + std::to_string(lattice.e()) +
                                                   ", d = " + std::to_string(lattice.dimension) + ")");
        if (invalid) {
            status = "ANOMALY";
            code = kExitAnomaly;
        }
    }
    if (invalid) out.summary.push_back(std::to_string(invalid) + " certificate(s) failed validation");
    finish(out, status, code, start, cfg);
    return out;
}

// --- dynamics ---------------------------------------------------------------------------

RunOutcome run_dynamics(const RunConfig& cfg) {
    const auto start = Clock::now();
    const RunDescription d = load_run_description(cfg.fixture);
    if (!d.dynamics) throw InputError(cfg.fixture + " has no \"dynamics\" section");
    const GlobalModule& b = *d.module;

    DynamicsExperiment x;
    x.phi = parse_endomorphism(d.dynamics->phi);
    x.p = d.point(d.dynamics->point);
    x.lambda_gens = d.points_of(d.dynamics->lambda);
    x.place_bound = resolve(cfg.place_bound, d.place_bound, 1000);
    x.step_bound = resolve(cfg.step_bound, d.step_bound, 64);
    const DynamicsReport r = dynamical_lgp_experiment(b, x, scan_options(cfg));

    // Seeded spot checks of reduce(phi^n P) against the local orbit, computed on the curve when possible.
    std::size_t samples = 0;
    json spot_failures = json::array();
    if (!r.places.empty()) {
        std::mt19937_64 rng(cfg.seed);
        const std::size_t k = std::min<std::size_t>(16, r.places.size());
        for (std::size_t s = 0; s < k; ++s) {
            const std::uint64_t v = r.places[rng() % r.places.size()].place;
            const std::uint64_t n = rng() % (std::min<std::uint64_t>(x.step_bound, 40) + 1);
            GlobalPoint cur = x.p;
            for (std::uint64_t i = 0; i < n; ++i) cur = x.phi.apply(b, cur);
            const OrbitModV orbit = orbit_mod_v(b, x.phi, x.p, x.lambda_gens, v);
            bool ok;
            if (b.is_elliptic()) {
                const LocalImage img = b.local_image(v);
                ok = img.subgroup->locate(b.reduce_on_curve(cur, v)) == std::optional<Element>(orbit.at(n));
            } else {
                ok = reduce(b, cur, v) == orbit.at(n);
            }
            ++samples;
            if (!ok) spot_failures.push_back({{"place", v}, {"n", n}});
        }
    }

    RunOutcome out;
    out.report = envelope("dynamics");
    out.report["config"] = config_json(cfg, x.place_bound, x.step_bound);
    out.report["module"] = module_json(d);
    json result;
    result["phi"] = d.dynamics->phi;
    result["phi_text"] = x.phi.to_string();
    result["point"] = point_json(d.dynamics->point, x.p);
    json lam = json::array();
    for (std::size_t i = 0; i < x.lambda_gens.size(); ++i) lam.push_back(point_json(d.dynamics->lambda[i], x.lambda_gens[i]));
    result["lambda"] = lam;
    result["injectivity_failures"] = r.injectivity_failures;
    result["global"] = {{"step_bound", r.global.step_bound},
                        {"hit", r.global.hit ? json{{"n", r.global.hit->n}, {"coefficients", to_json(r.global.hit->coefficients)}}
                                             : json(nullptr)}};
    json places = json::array();
    for (const auto& po : r.places) {
        json p{{"place", po.place}, {"preperiod", po.preperiod}, {"cycle", po.cycle}};
        p["first_hit"] = po.first_hit ? json(*po.first_hit) : json(nullptr);
        p["hit_at_global_step"] = po.hit_at_global_step ? json(*po.hit_at_global_step) : json(nullptr);
        places.push_back(p);
    }
    result["places_scanned"] = r.places.size();
    result["places"] = places;
    result["missing_places"] = r.missing_places;
    result["inconclusive"] = r.inconclusive;
    result["notes"] = r.notes;
    result["spot_checks"] = {{"seed", cfg.seed}, {"samples", samples}, {"failures", spot_failures}};
    out.report["result"] = result;

    std::string status = to_string(r.verdict);
    int code = r.verdict == Verdict::consistent ? kExitOk : kExitAnomaly;
    if (!spot_failures.empty()) {
        status = "INCONSISTENT_ANOMALY";
        code = kExitAnomaly;
        out.summary.push_back(std::to_string(spot_failures.size()) + " reduction/orbit spot check(s) failed");
    }
    if (r.global.hit)
        out.summary.push_back("global hit at n = " + std::to_string(r.global.hit->n) + "; " +
                              std::to_string(r.places.size() - r.missing_places.size()) + "/" +
                              std::to_string(r.places.size()) + " places hit");
    else if (r.verdict != Verdict::precondition_violated)
        out.summary.push_back("no global hit for n <= " + std::to_string(x.step_bound) + "; " +
                              std::to_string(r.missing_places.size()) + " place(s) miss" +
                              (r.missing_places.empty() ? "" : ", first " + std::to_string(r.missing_places.front())));
    if (r.verdict == Verdict::precondition_violated)
        for (const auto& n : r.notes) out.summary.push_back(n);
    out.summary.push_back(std::string("verdict: ") + status + (r.inconclusive ? " (inconclusive at these bounds)" : ""));
    finish(out, status, code, start, cfg);
    return out;
}

// --- scan-orders -------------------------------------------------------------------------

RunOutcome run_scan(const RunConfig& cfg) {
    const auto start = Clock::now();
    const RunDescription d = load_run_description(cfg.fixture);
    const GlobalModule& b = *d.module;
    const std::vector<std::string> names = d.scan ? d.scan->points : generator_names(d);
    std::optional<long> l = cfg.l;
    if (!l && d.scan) l = d.scan->l;
    if (!l) throw InputError("scan-orders needs --l");
    std::optional<std::vector<unsigned>> pattern = cfg.pattern;
    if (!pattern && d.scan) pattern = d.scan->pattern;
    if (!pattern) throw InputError("scan-orders needs --pattern");
    const std::uint64_t bound = resolve(cfg.place_bound, d.place_bound, 10000);

    RunConfig echo = cfg;
    echo.l = l;
    echo.pattern = pattern;
    const std::vector<GlobalPoint> pts = d.points_of(names);
    const DivisibilityScan scan = scan_divisibility(b, pts, Integer(*l), *pattern, bound, scan_options(cfg));

    json hits = json::array();
    std::size_t unverified = 0;
    for (std::uint64_t v : scan.hits) {
        json orders = json::array();
        for (const auto& p : pts) orders.push_back(integer_json(ord_v(b, p, v)));
        const bool ok = verify_divisibility(b, pts, Integer(*l), *pattern, v);
        if (!ok) ++unverified;
        hits.push_back({{"place", v}, {"orders", orders}, {"verified", ok}});
    }

    RunOutcome out;
    out.report = envelope("scan-orders");
    out.report["config"] = config_json(echo, bound, std::nullopt);
    out.report["module"] = module_json(d);
    json pj = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) pj.push_back(point_json(names[i], pts[i]));
    out.report["result"] = {{"points", pj},
                            {"l", *l},
                            {"pattern", *pattern},
                            {"bound", bound},
                            {"places_scanned", scan.places_scanned},
                            {"hit_count", scan.hits.size()},
                            {"hits", hits}};
    out.summary.push_back(std::to_string(scan.hits.size()) + " place(s) <= " + std::to_string(bound) +
                          " match the pattern among " + std::to_string(scan.places_scanned) + " good places" +
                          (scan.hits.empty() ? "" : ", first " + std::to_string(scan.hits.front())));
    if (unverified) out.summary.push_back(std::to_string(unverified) + " hit(s) failed independent re-verification");
    else out.summary.push_back("every hit re-verified independently");
    finish(out, unverified ? "ANOMALY" : "CONSISTENT", unverified ? kExitAnomaly : kExitOk, start, echo);
    return out;
}

// --- axioms --------------------------------------------------------------------------------

RunOutcome run_axioms(const RunConfig& cfg) {
    const auto start = Clock::now();
    const RunDescription d = load_run_description(cfg.fixture);
    const GlobalModule& b = *d.module;
    const std::uint64_t bound = resolve(cfg.place_bound, d.place_bound, 10000);
    const InjectivityScan inj = scan_torsion_injectivity(b, bound, scan_options(cfg));

    // Seeded homomorphism spot checks: r_v(x + y) = r_v(x) + r_v(y).
    const auto places = b.places_up_to(bound);
    std::mt19937_64 rng(cfg.seed);
    std::size_t samples = 0;
    json failures = json::array();
    auto random_point = [&] {
        IntVector free, tors;
        for (std::size_t i = 0; i < b.rank(); ++i) free.emplace_back(static_cast<long>(rng() % 41) - 20);
        for (const auto& dk : b.torsion_group().invariants()) tors.emplace_back(static_cast<unsigned long>(rng() % dk.get_ui()));
        return b.make_point(free, tors);
    };
    for (std::size_t s = 0; s < 32 && !places.empty(); ++s) {
        const std::uint64_t v = places[rng() % std::min<std::size_t>(places.size(), 200)];
        const GlobalPoint x = random_point(), y = random_point();
        bool ok;
        if (b.is_elliptic()) {
            const CurveQ& c = b.fixture().curve;
            const FpCurve e = c.reduce(c.place(v));
            ok = b.reduce_on_curve(b.add(x, y), v) == e.add(b.reduce_on_curve(x, v), b.reduce_on_curve(y, v));
            const LocalImage img = b.local_image(v);
            ok = ok && img.subgroup->locate(b.reduce_on_curve(x, v)) == std::optional<Element>(img.reduce(x));
        } else {
            const LocalImage img = b.local_image(v);
            ok = img.reduce(b.add(x, y)) == img.group.add(img.reduce(x), img.reduce(y));
        }
        ++samples;
        if (!ok) failures.push_back({{"place", v}, {"x", to_json(x.free_coords)}, {"y", to_json(y.free_coords)}});
    }

    RunOutcome out;
    out.report = envelope("axioms");
    out.report["config"] = config_json(cfg, bound, std::nullopt);
    out.report["module"] = module_json(d);
    out.report["result"] = {
        {"torsion_injectivity", {{"bound", bound}, {"places_scanned", inj.places_scanned}, {"failures", inj.failures}}},
        {"homomorphism_spot_checks", {{"seed", cfg.seed}, {"samples", samples}, {"failures", failures}}}};
    out.summary.push_back("torsion " + group_string(b.torsion_group()) + " injects at " +
                          std::to_string(inj.places_scanned - inj.failures.size()) + "/" +
                          std::to_string(inj.places_scanned) + " good places <= " + std::to_string(bound));
    if (!inj.failures.empty()) out.summary.push_back("first failure at " + std::to_string(inj.failures.front()));
    out.summary.push_back(std::to_string(samples - failures.size()) + "/" + std::to_string(samples) +
                          " homomorphism spot checks passed (seed " + std::to_string(cfg.seed) + ")");
    const bool bad = !inj.failures.empty() || !failures.empty();
    finish(out, bad ? "VIOLATED" : "CONSISTENT", bad ? kExitAnomaly : kExitOk, start, cfg);
    return out;
}

// --- verify-report -------------------------------------------------------------------------

namespace {

struct Verification {
    std::vector<std::string> problems;
    std::size_t checked = 0;
    void fail(std::string s) { problems.push_back(std::move(s)); }
};

void verify_counterexample(const json& r, Verification& v) {
    const json& res = field(r, "result", "report");
    std::size_t valid = 0, failures = 0, invalid = 0;
    for (const auto& p : field(res, "places", "result")) {
        const std::string status = field(p, "status", "place").get<std::string>();
        const std::uint64_t place = field(p, "place", "place").get<std::uint64_t>();
        ++v.checked;
        if (status == "certificate") {
            const FixingMatrixCertificate c = certificate_from_json(p);
            const CertificateCheck chk = validate_certificate(c);
            bool recorded_ok = true;
            for (const auto& line : field(p, "checks", "place")) recorded_ok = recorded_ok && line.value("ok", false);
            if (chk.ok() != recorded_ok)
                v.fail("place " + std::to_string(place) + ": recorded checks disagree with re-validation");
            if (chk.ok()) ++valid;
            else {
                ++invalid;
                for (const auto& line : chk.lines)
                    if (!line.ok) v.fail("place " + std::to_string(place) + ": " + line.name + " fails " + line.detail);
            }
        } else if (status == "method_failure") {
            ++failures;
            const FiniteAbelianGroup g(int_vector(field(p, "group", "place"), "group"));
            std::vector<Element> xs;
            for (const auto& x : field(p, "reduced", "place")) xs.push_back(Element{int_vector(x, "reduced")});
            const IntVector alphas = int_vector(field(p, "alphas", "place"), "alphas");
            const IntMatrix rel = int_matrix(field(p, "relations", "place"), xs.size(), "relations");
            Integer gc = 0;
            for (const auto& a : alphas) mpz_gcd(gc.get_mpz_t(), gc.get_mpz_t(), a.get_mpz_t());
            if (gc != json_integer(field(p, "gcd", "place"), "gcd") || gc <= 1)
                v.fail("place " + std::to_string(place) + ": recorded gcd does not match the alphas");
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (!g.contains(xs[i]) || rel.rows() != xs.size()) {
                    v.fail("place " + std::to_string(place) + ": malformed method-failure record");
                    break;
                }
                if (!g.is_zero(g.combine(rel.row(i), xs)) || rel(i, i) != alphas[i])
                    v.fail("place " + std::to_string(place) + ": relation row " + std::to_string(i) + " does not vanish");
            }
            const json ex = p.value("exact_oracle", json::object());
            if (ex.value("member", false) && ex.contains("witness")) {
                const IntMatrix m = int_matrix(ex["witness"], xs.size(), "exact_oracle.witness");
                bool ok = m.rows() == xs.size() && m.trace() == 0;
                for (std::size_t i = 0; ok && i < xs.size(); ++i) ok = g.combine(m.row(i), xs) == g.element(xs[i].coords);
                if (!ok) v.fail("place " + std::to_string(place) + ": exact-oracle witness does not fix the reduction");
            }
        } else {
            throw InputError("place record with unknown status '" + status + "'");
        }
    }
    if (valid != res.value("certificates_valid", 0u) || failures != res.value("method_failures", 0u) ||
        invalid != res.value("certificates_invalid", 0u))
        v.fail("place counts differ from the recorded summary");

    // Global membership from the recorded free coordinates.
    std::vector<GlobalPoint> pts;
    for (const auto& p : field(res, "points", "result")) pts.push_back(GlobalPoint{int_vector(field(p, "free", "point"), "free"), {}});
    const json& gm = field(res, "global_membership", "result");
    const bool member = field(gm, "member", "global_membership").get<bool>();
    if (member) {
        const json& w = field(gm, "witness", "global_membership");
        if (w.is_null()) v.fail("global membership claimed without a witness");
        else {
            const IntMatrix m = int_matrix(w, pts.size(), "witness");
            bool ok = m.rows() == pts.size() && m.trace() == 0;
            for (std::size_t i = 0; ok && i < pts.size(); ++i)
                for (std::size_t k = 0; ok && k < pts[i].free_coords.size(); ++k) {
                    Integer acc = 0;
                    for (std::size_t j = 0; j < pts.size(); ++j) acc += m(i, j) * pts[j].free_coords[k];
                    ok = acc == pts[i].free_coords[k];
                }
            if (!ok) v.fail("global witness does not fix P with trace 0");
        }
    } else if (!free_parts_independent(pts) && gm.value("reason", "").rfind("independence", 0) == 0) {
        v.fail("global non-membership cites independence but the recorded points are dependent");
    }
    ++v.checked;
}

IntVector endo_power_apply(const json& phi, const IntVector& free, const IntVector& tors, const IntVector& invariants,
                           std::uint64_t n, IntVector& tors_out) {
    const EndoMap f = parse_endomorphism(phi);
    IntVector c = free;
    tors_out = tors;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (f.kind() == EndoMap::Kind::multiply) {
            for (auto& x : c) x *= f.multiplier();
            for (auto& x : tors_out) x *= f.multiplier();
        } else {
            c = f.matrix() * c;
            for (auto& x : tors_out) x *= f.torsion_multiplier();
        }
        for (std::size_t k = 0; k < tors_out.size(); ++k) tors_out[k] = mod_floor(tors_out[k], invariants[k]);
    }
    return c;
}

void verify_dynamics(const json& r, Verification& v) {
    const json& res = field(r, "result", "report");
    const IntVector invariants = int_vector(field(field(r, "module", "report"), "torsion", "module"), "torsion");
    const json& hit = field(field(res, "global", "result"), "hit", "global");
    if (!hit.is_null()) {
        const std::uint64_t n = field(hit, "n", "hit").get<std::uint64_t>();
        const IntVector coeffs = int_vector(field(hit, "coefficients", "hit"), "coefficients");
        const json& p = field(res, "point", "result");
        IntVector tors;
        const IntVector free = endo_power_apply(field(res, "phi", "result"), int_vector(field(p, "free", "point"), "free"),
                                                int_vector(field(p, "torsion", "point"), "torsion"), invariants, n, tors);
        const json& lam = field(res, "lambda", "result");
        if (coeffs.size() != lam.size()) v.fail("global witness has the wrong number of coefficients");
        else {
            IntVector sf(free.size(), Integer(0)), st(tors.size(), Integer(0));
            for (std::size_t i = 0; i < lam.size(); ++i) {
                const IntVector lf = int_vector(field(lam[i], "free", "lambda"), "free");
                const IntVector lt = int_vector(field(lam[i], "torsion", "lambda"), "torsion");
                for (std::size_t k = 0; k < sf.size() && k < lf.size(); ++k) sf[k] += coeffs[i] * lf[k];
                for (std::size_t k = 0; k < st.size() && k < lt.size(); ++k) st[k] += coeffs[i] * lt[k];
            }
            bool ok = sf == free;
            for (std::size_t k = 0; k < st.size(); ++k) ok = ok && mod_floor(st[k] - tors[k], invariants[k]) == 0;
            if (!ok) v.fail("global witness: phi^n(P) differs from the recorded combination of Lambda");
        }
        ++v.checked;
    }
    // The verdict must follow from the per-place records.
    const std::string status = field(field(r, "verdict", "report"), "status", "verdict").get<std::string>();
    const bool precondition = !field(res, "injectivity_failures", "result").empty();
    bool all_hit_at_n = true;
    std::size_t missing = 0;
    for (const auto& p : field(res, "places", "result")) {
        ++v.checked;
        if (p.at("first_hit").is_null()) ++missing;
        if (!hit.is_null() && !(p.at("hit_at_global_step").is_boolean() && p.at("hit_at_global_step").get<bool>()))
            all_hit_at_n = false;
    }
    if (missing != field(res, "missing_places", "result").size()) v.fail("missing-place list disagrees with the records");
    std::string expect = "CONSISTENT";
    if (precondition) expect = "PRECONDITION_VIOLATED";
    else if (!hit.is_null() && !all_hit_at_n) expect = "INCONSISTENT_ANOMALY";
    if (!field(field(res, "spot_checks", "result"), "failures", "spot_checks").empty() && !precondition)
        expect = "INCONSISTENT_ANOMALY";
    if (status != expect) v.fail("recorded verdict " + status + " but the records imply " + expect);
}

void verify_scan(const json& r, Verification& v) {
    const json& cfg = field(r, "config", "report");
    const json& res = field(r, "result", "report");
    const RunDescription d = load_run_description(field(cfg, "fixture", "config").get<std::string>());
    const GlobalModule& b = *d.module;
    std::vector<GlobalPoint> pts;
    for (const auto& p : field(res, "points", "result"))
        pts.push_back(b.make_point(int_vector(field(p, "free", "point"), "free"), int_vector(field(p, "torsion", "point"), "torsion")));
    const long l = field(res, "l", "result").get<long>();
    const auto pattern = field(res, "pattern", "result").get<std::vector<unsigned>>();
    for (const auto& h : field(res, "hits", "result")) {
        const std::uint64_t place = field(h, "place", "hit").get<std::uint64_t>();
        const IntVector orders = int_vector(field(h, "orders", "hit"), "orders");
        bool ok = orders.size() == pattern.size();
        for (std::size_t i = 0; ok && i < orders.size(); ++i) ok = orders[i] > 0 && l_valuation(orders[i], l) == pattern[i];
        if (!ok) v.fail("place " + std::to_string(place) + ": recorded orders do not match the pattern");
        else if (!verify_divisibility(b, pts, l, pattern, place))
            v.fail("place " + std::to_string(place) + ": divisibility does not hold");
        ++v.checked;
    }
    if (field(res, "hits", "result").size() != field(res, "hit_count", "result").get<std::size_t>())
        v.fail("hit count disagrees with the hit list");
}

void verify_axioms(const json& r, Verification& v) {
    const json& res = field(r, "result", "report");
    const bool bad = !field(field(res, "torsion_injectivity", "result"), "failures", "torsion_injectivity").empty() ||
                     !field(field(res, "homomorphism_spot_checks", "result"), "failures", "spot_checks").empty();
    const std::string status = field(field(r, "verdict", "report"), "status", "verdict").get<std::string>();
    if (status != (bad ? "VIOLATED" : "CONSISTENT")) v.fail("recorded verdict does not follow from the failure lists");
    ++v.checked;
}

}  // namespace

RunOutcome verify_report(const json& report) {
    const auto start = Clock::now();
    if (!report.is_object() || report.value("schema", "") != kReportSchema)
        throw InputError("not an mwlab report (expected schema " + std::string(kReportSchema) + ")");
    const std::string command = field(report, "command", "report").get<std::string>();
    const json& verdict = field(report, "verdict", "report");
    const int recorded = field(verdict, "exit_code", "verdict").get<int>();

    Verification v;
    try {
        if (command == "counterexample") verify_counterexample(report, v);
        else if (command == "dynamics") verify_dynamics(report, v);
        else if (command == "scan-orders") verify_scan(report, v);
        else if (command == "axioms") verify_axioms(report, v);
        else throw InputError("cannot verify reports of command '" + command + "'");
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }

    RunOutcome out;
    out.report = envelope("verify-report");
    out.report["config"] = {{"report_command", command}, {"recorded_status", verdict.value("status", "")}};
    out.report["result"] = {{"records_checked", v.checked}, {"problems", v.problems}};
    out.summary.push_back("re-validated " + std::to_string(v.checked) + " record(s) from the " + command + " report: " +
                          (v.problems.empty() ? "all consistent" : std::to_string(v.problems.size()) + " problem(s)"));
    for (const auto& p : v.problems) out.summary.push_back("  " + p);
    out.summary.push_back("recorded verdict: " + verdict.value("status", std::string("?")));
    const int code = v.problems.empty() ? (recorded == kExitOk ? kExitOk : kExitAnomaly) : kExitAnomaly;
    RunConfig cfg;
    finish(out, v.problems.empty() ? "VERIFIED" : "INVALID", code, start, cfg);
    return out;
}

// --- dispatch ----------------------------------------------------------------------------

RunOutcome run(const RunConfig& cfg) {
    const auto start = Clock::now();
    auto error = [&](const std::string& kind, const std::string& msg, int code) {
        RunOutcome out;
        out.report = envelope(cfg.subcommand);
        out.report["error"] = {{"kind", kind}, {"message", msg}};
        out.summary.push_back(kind + ": " + msg);
        finish(out, "ERROR", code, start, cfg);
        return out;
    };
    try {
        if (cfg.subcommand == "counterexample") return run_counterexample(cfg);
        if (cfg.subcommand == "dynamics") return run_dynamics(cfg);
        if (cfg.subcommand == "scan-orders") return run_scan(cfg);
        if (cfg.subcommand == "axioms") return run_axioms(cfg);
        if (cfg.subcommand == "verify-report") {
            if (!std::filesystem::exists(cfg.fixture)) throw InputError("report file not found: " + cfg.fixture);
            std::ifstream in(cfg.fixture);
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::exception& e) {
                throw InputError(cfg.fixture + ": invalid JSON: " + e.what());
            }
            return verify_report(doc);
        }
        throw InputError("unknown subcommand '" + cfg.subcommand + "'");
    } catch (const InputError& e) {
        return error("input error", e.what(), kExitUsage);
    } catch (const ResourceError& e) {
        return error("resource limit", e.what(), kExitUsage);
    } catch (const std::logic_error& e) {
        return error("internal check failed", e.what(), kExitAnomaly);
    }
}

}  // namespace mwlab
