#pragma once

// Forward orbits {phi^n(P) : n >= 0} of a Z-linear endomorphism, globally and
// after reduction, and the harness comparing the two.

#include "mwlab/reduction.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mwlab {

class EndoMap {
  public:
    enum class Kind { multiply, matrix };

    // P -> m P, |m| >= 2.
    static EndoMap multiply(Integer m);
    // Free coordinates c -> A c (A square), torsion part t -> torsion_multiplier * t.
    static EndoMap linear(IntMatrix a, Integer torsion_multiplier = 1);

    Kind kind() const { return kind_; }
    const Integer& multiplier() const { return m_; }
    const IntMatrix& matrix() const { return a_; }
    const Integer& torsion_multiplier() const { return t_; }

    GlobalPoint apply(const GlobalModule& b, const GlobalPoint& p) const;
    std::string to_string() const;

  private:
    Kind kind_ = Kind::multiply;
    Integer m_ = 2;
    IntMatrix a_;
    Integer t_ = 1;
};

// phi acting on a finite group: scaling, or given images of a basis.
class LocalEndo {
  public:
    static LocalEndo multiply(FiniteAbelianGroup g, Integer m);
    // basis_images[k] is the image of the k-th invariant-factor basis vector.
    static LocalEndo from_basis_images(FiniteAbelianGroup g, std::vector<Element> basis_images);

    const FiniteAbelianGroup& group() const { return group_; }
    Element apply(const Element& x) const;

  private:
    FiniteAbelianGroup group_;
    std::optional<Integer> m_;
    std::vector<Element> images_;
};

// The map induced on the local image at one place. Throws InputError when phi
// does not descend (some relation among the reduced generators is not respected).
LocalEndo induced_endomorphism(const GlobalModule& b, const EndoMap& phi, const LocalImage& img);

struct OrbitModV {
    std::uint64_t place = 0;
    std::vector<Element> visited;  // steps 0 .. preperiod + cycle - 1
    std::size_t preperiod = 0;
    std::size_t cycle = 0;
    std::optional<std::size_t> first_hit;

    // phi^n(P) mod v for any n >= 0.
    const Element& at(std::uint64_t n) const;
};

// Orbit of x under f with cycle detection; first_hit over tail plus one cycle.
OrbitModV orbit_in_group(const LocalEndo& f, const Element& x, const std::vector<Element>& lambda,
                         std::uint64_t cap = kDefaultSubgroupCap);
OrbitModV orbit_mod_v(const GlobalModule& b, const EndoMap& phi, const GlobalPoint& p,
                      const std::vector<GlobalPoint>& lambda_gens, std::uint64_t place);

struct GlobalOrbitHit {
    std::uint64_t n = 0;
    IntVector coefficients;  // phi^n(P) = sum coefficients[i] * lambda_gens[i]
};

struct GlobalOrbitSearch {
    std::uint64_t step_bound = 0;
    std::optional<GlobalOrbitHit> hit;
};

// Least n <= step_bound with phi^n(P) in <lambda_gens>, exactly in B.
GlobalOrbitSearch global_orbit_intersection(const GlobalModule& b, const EndoMap& phi, const GlobalPoint& p,
                                            const std::vector<GlobalPoint>& lambda_gens, std::uint64_t step_bound);

enum class Verdict { consistent, inconsistent_anomaly, precondition_violated };
const char* to_string(Verdict v);

struct PlaceOrbit {
    std::uint64_t place = 0;
    std::size_t preperiod = 0;
    std::size_t cycle = 0;
    std::optional<std::size_t> first_hit;
    // Whether phi^n(P) mod v lies in Lambda mod v for the global hit step n.
    std::optional<bool> hit_at_global_step;
};

struct DynamicsExperiment {
    EndoMap phi = EndoMap::multiply(2);
    GlobalPoint p;
    std::vector<GlobalPoint> lambda_gens;
    std::uint64_t place_bound = 1000;
    std::uint64_t step_bound = 64;
};

struct DynamicsReport {
    std::uint64_t place_bound = 0;
    GlobalOrbitSearch global;
    std::vector<PlaceOrbit> places;
    std::vector<std::uint64_t> injectivity_failures;
    std::vector<std::uint64_t> missing_places;  // places whose orbit never meets Lambda mod v
    Verdict verdict = Verdict::consistent;
    bool inconclusive = false;  // every place hits but no global hit within the step bound
    std::vector<std::string> notes;
};

DynamicsReport dynamical_lgp_experiment(const GlobalModule& b, const DynamicsExperiment& x,
                                        const ScanOptions& opt = {});

}  // namespace mwlab
