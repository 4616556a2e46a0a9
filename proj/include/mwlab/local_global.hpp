#pragma once

// Trace-zero lattices Lambda = { M P : M integer e x e, tr M = 0 } built from a
// vector of points P = (P_1, ..., P_e), and per-place certificates that the
// reduction of P lies in the reduction of Lambda.

#include "mwlab/reduction.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mwlab {

struct TraceZeroLattice {
    std::vector<GlobalPoint> points;
    int dimension = 2;                    // d of the realization
    bool tagged = false;                  // e == d + 1
    long independence_box = 0;
    std::optional<IntVector> dependence;  // small relation among the points, if one was found

    std::size_t e() const { return points.size(); }
    // Tagged and independent: the setting in which the local certificates must all exist.
    bool is_candidate() const { return tagged && !dependence; }
};

TraceZeroLattice build_counterexample(const GlobalModule& b, std::vector<GlobalPoint> points);

struct GlobalMembership {
    bool member = false;
    std::optional<IntMatrix> witness;  // trace-zero M with M P == P (mod torsion)
    std::string reason;
};

// Decides P in Lambda + B_tors^e by solving M C == C, tr M == 0 over Z, where C
// holds the free coordinates of the points.
GlobalMembership global_membership(const TraceZeroLattice& lattice);

struct FixingMatrixCertificate {
    std::uint64_t place = 0;
    FiniteAbelianGroup group;
    std::vector<Element> reduced;  // the reductions of P_1..P_e
    IntVector alphas;
    IntMatrix relations;           // row i: alpha_i on the diagonal, m_ij elsewhere
    IntVector bezout;              // sum a_i alpha_i == e
    IntMatrix matrix;              // M
};

struct MethodFailure {
    std::uint64_t place = 0;
    FiniteAbelianGroup group;
    std::vector<Element> reduced;
    IntVector alphas;
    IntMatrix relations;
    Integer gcd;  // > 1
};

using FixingOutcome = std::variant<FixingMatrixCertificate, MethodFailure>;

// Builds the certificate from minimal relations and a Bezout vector for the alphas.
FixingOutcome find_fixing_matrix(const FiniteAbelianGroup& g, const std::vector<Element>& reduced,
                                 std::uint64_t place = 0);
FixingOutcome find_fixing_matrix(const GlobalModule& b, const TraceZeroLattice& lattice, std::uint64_t place);

struct CheckLine {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct CertificateCheck {
    std::vector<CheckLine> lines;
    bool ok() const;
};

// Recomputes every certificate condition from the recorded data alone.
CertificateCheck validate_certificate(const FixingMatrixCertificate& cert);

struct LocalMembership {
    bool member = false;
    std::optional<IntMatrix> witness;
};

// Exact decision of "some trace-zero M fixes the reduced vector" as one linear
// system in the e^2 entries of M.
LocalMembership decide_local_membership_exact(const FiniteAbelianGroup& g, const std::vector<Element>& reduced,
                                              std::uint64_t cap = kDefaultSubgroupCap);
LocalMembership decide_local_membership_exact(const GlobalModule& b, const TraceZeroLattice& lattice,
                                              std::uint64_t place);

struct ObstructionSearch {
    std::optional<std::uint64_t> witness;
    std::uint64_t bound = 0;
    std::uint64_t places_scanned = 0;
};

// Smallest good place v <= bound with red_v(P) outside red_v(<lambda_gens>).
ObstructionSearch find_local_obstruction(const GlobalModule& b, const GlobalPoint& p,
                                         const std::vector<GlobalPoint>& lambda_gens, std::uint64_t bound,
                                         const ScanOptions& opt = {});

struct PlaceFixing {
    std::uint64_t place = 0;
    FixingOutcome outcome;
    CertificateCheck check;  // empty on MethodFailure
};

// find_fixing_matrix at every good place <= bound, ascending.
std::vector<PlaceFixing> scan_fixing_matrices(const GlobalModule& b, const TraceZeroLattice& lattice,
                                              std::uint64_t bound, const ScanOptions& opt = {});

}  // namespace mwlab
