#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kobst/abgroup.hpp"
#include "kobst/exactlin.hpp"
#include "kobst/groupcat.hpp"

// (Co)homology with admissible coefficients, induced and connecting
// maps, Kunneth/UCT structure, the degree-3 Wang sequence for N x| Z,
// and cochain-level cocycle calculus.
//
// Computation runs per coefficient atom on two tiers:
//   - lattice tier (Z, Z/m, Z[S]): explicit cochain complexes over Z
//     or the localization, classes are explicit cochain vectors,
//     (co)kernels by Smith normal form;
//   - divisible tier (Q, Pr(P), Q/Z, Q/Z[S]): H^k(G, D) = Hom(H_k(G), D)
//     naturally, with classes given by their values on homology
//     generators.
// Every map is pushed through explicit cochains, so no choice of a
// universal-coefficient splitting ever enters a computed map.

namespace kobst {

struct OperationCanceled : std::runtime_error {
    OperationCanceled() : std::runtime_error("operation canceled") {}
};

// Shared scratch state: resolution reuse plus a cooperative
// cancellation token for long grids.
struct CohomContext {
    const std::atomic<bool>* cancel = nullptr;

    const FreeResolution& resolution(const GroupDescriptor& g, int maxDeg);
    void checkCancel() const {
        if (cancel && cancel->load()) throw OperationCanceled();
    }

private:
    std::map<std::string, FreeResolution> cache_;
};

// ---------------------------------------------------------------------------
// computed cohomology groups

// Per-atom data: how classes convert between coordinates and explicit
// cochain vectors (one rational per resolution generator in degree k).
struct AtomCohomology {
    Atom atom;
    bool latticeTier = false;
    int rankK = 0;  // resolution rank in degree k

    std::vector<Atom> valueAtoms;      // contribution to the value module
    std::vector<Int> generatorOrders;  // 0 = free coordinate, else the torsion order
    std::vector<int> keptCanonical;    // canonical presentation index per value generator

    // lattice tier: cocycle lattice and canonical presentation
    IntMatrix cycleBasis;   // basis of the (co)cycle lattice (cochain side)
    IntMatrix uMatrix;      // cycle coords -> canonical coords
    IntMatrix genCochains;  // one column per value generator

    // divisible tier: homology presentation of H_k(G) on the chain side
    IntMatrix hVInvT;       // transpose-inverse of the kernel-splitting V
    int hKernelOffset = 0;  // first kernel column inside V

    // class coords -> explicit degree-k cochain vector (unreduced ok)
    std::vector<Rat> toCochain(const std::vector<Rat>& coords) const;
    // explicit cocycle vector -> class coords; `reduce` selects the
    // canonical path (atom reduction at the end) or the plain rational
    // one used for map extraction
    std::vector<Rat> classify(const std::vector<Rat>& cocycle, bool reduce = true) const;
};

struct CohomologyGroup {
    GroupDescriptor group;
    AdmissibleModule module;
    int degree = 0;
    std::vector<AtomCohomology> perAtom;
    AdmissibleModule rawValue;  // atom-major concatenation
    AdmissibleModule value;     // canonical form

    bool operator==(const CohomologyGroup& o) const {
        return group == o.group && module == o.module && degree == o.degree && rawValue == o.rawValue;
    }
    // one text line per raw generator: provenance for classBasis output
    std::vector<std::string> generatorDescriptions() const;
};

// Classes are ModuleElements over rawValue.
using CohomClass = ModuleElement;

FgAbelianGroup integralHomology(const GroupDescriptor& g, int k, CohomContext* ctx = nullptr);
CohomologyGroup cohomologyGroup(const GroupDescriptor& g, const AdmissibleModule& m, int k,
                                CohomContext* ctx = nullptr);

// ---------------------------------------------------------------------------
// cochains as explicit vectors (per atom, per generator)

struct CochainVec {
    std::vector<std::vector<Rat>> values;  // [atom][generator]
};

CochainVec classToCochain(const CohomologyGroup& h, const CohomClass& c);
CohomClass cochainToClass(const CohomologyGroup& h, const CochainVec& v, bool reduce = true);

// ---------------------------------------------------------------------------
// maps between computed groups

struct CohomologyMap {
    CohomologyGroup source, target;
    ModuleMap map;  // over the raw value modules

    CohomClass apply(const CohomClass& x) const { return map.apply(x); }
    bool isZero() const { return map.isZeroMap(); }
};

CohomologyMap composeCohomologyMaps(const CohomologyMap& g, const CohomologyMap& f);

// H^k(target f, M) -> H^k(source f, M).
CohomologyMap inducedMapGroupHom(const GroupHom& f, const AdmissibleModule& m, int k,
                                 CohomContext* ctx = nullptr);
// H^k(G, source phi) -> H^k(G, target phi).
CohomologyMap inducedMapCoefficient(const ModuleMap& phi, const GroupDescriptor& g, int k,
                                    CohomContext* ctx = nullptr);

// A short exact sequence 0 -> A -> B -> C -> 0 of admissible modules
// with single-atom A and C.  Exactness is certified at construction:
// composite zero, kernel/image identities by rational-subgroup
// arithmetic, and for a multi-atom middle a rational factorization
// certificate with lattice conditions.
struct CoefficientSES {
    AdmissibleModule a, b, c;
    ModuleMap inj, surj;
    std::vector<std::vector<Rat>> section;  // b.size() x 1, surj . section = id rationally
    std::vector<std::vector<Rat>> retract;  // 1 x b.size(), retract . inj = id rationally
    std::string name;
};

CoefficientSES makeSES(const ModuleMap& inj, const ModuleMap& surj, const std::string& name = "");
CoefficientSES sesZTR();  // 0 -> Z -> Q -> Q/Z -> 0

// Connecting map H^k(G, C) -> H^{k+1}(G, A).
CohomologyMap connectingMap(const CoefficientSES& ses, const GroupDescriptor& g, int k,
                            CohomContext* ctx = nullptr);

// ---------------------------------------------------------------------------
// Kunneth and universal coefficients

struct KunnethSummand {
    std::vector<int> degrees;       // one per factor
    std::vector<int> torPositions;  // factor indices where a Tor correction entered
    FgAbelianGroup group;

    bool isTor() const { return !torPositions.empty(); }
};

struct KunnethDecomposition {
    std::vector<KunnethSummand> summands;
    FgAbelianGroup total;
};

KunnethDecomposition kunnethDecomposition(const std::vector<GroupDescriptor>& factors, int k,
                                          CohomContext* ctx = nullptr);

struct UctDecomposition {
    AdmissibleModule homPart, extPart;
    AdmissibleModule sum;         // canonical form of hom (+) ext
    bool isomorphicToDirect = false;  // compared against cohomologyGroup
};

UctDecomposition uctDecompose(const GroupDescriptor& g, const AdmissibleModule& m, int k,
                              CohomContext* ctx = nullptr);

// ---------------------------------------------------------------------------
// function cochains and cocycle calculus

struct CochainWindow {
    GroupDescriptor group;
    AdmissibleModule module;
    int degree = 0;
    std::map<std::vector<GroupElem>, ModuleElement> table;
    std::function<ModuleElement(const std::vector<GroupElem>&)> evaluator;  // optional

    // normalized: any identity argument evaluates to zero
    ModuleElement eval(const std::vector<GroupElem>& args) const;
};

struct CocycleReport {
    bool ok = true;
    long checkedInstances = 0;
    std::vector<std::vector<GroupElem>> violations;  // first few
};

// Verifies the degree-d cocycle identity for all argument tuples drawn
// from the element list.
CocycleReport cocycleVerify(const CochainWindow& c, const std::vector<GroupElem>& args);

// Exact primitive search for degree-3 cochains on finite abelian G.
std::optional<CochainWindow> coboundaryReduce(const CochainWindow& c, CohomContext* ctx = nullptr);

// The degree-3 cocycle on G = N x| Z built from a 2-cocycle rho1 on N:
//   omega(n1 xi^l1, n2 xi^l2, n3 xi^l3) = -rho_{l1}(phi^{l1} n2, phi^{l1+l2} n3)
// with rho_l extended from rho_1 by the crossed-homomorphism rule.
CochainWindow iotaCocycleEvaluate(const CochainWindow& rho1, const GroupDescriptor& g,
                                  const std::vector<std::vector<GroupElem>>& window);

// Class coordinates of a 3-cocycle function on Z^n in
// H^3(Z^n, M) = M^(n choose 3), via the bar comparison map.
CohomClass classOfZnCocycle(const CochainWindow& c, CohomContext* ctx = nullptr);
// Same mechanism for finite abelian groups, against the bar resolution.
CohomClass classOfFiniteCocycle(const CochainWindow& c, const CohomologyGroup& h,
                                CohomContext* ctx = nullptr);
// Degree-k variant on Z^n used to express Wang-sequence data.
CohomClass classOfZnCocycleDeg(const CochainWindow& c, int degree, CohomContext* ctx = nullptr);

// ---------------------------------------------------------------------------
// Wang sequence for G = N x| Z (free abelian N)

struct WangSequence {
    CohomologyGroup h2N, h3G, h3N;
    AdmissibleModule term1, term3;   // coker(1 - xi*) on H^2(N,M), ker(1 - xi*) on H^3(N,M)
    std::vector<CohomClass> term1Gens;  // H^2(N,M) classes generating the cokernel
    std::vector<CohomClass> iotaImages; // their images in H^3(G,M)
    bool exact = false;
    std::string certificate;  // human-readable account of the checks
};

WangSequence wangSequence(const GroupDescriptor& g, const AdmissibleModule& m,
                          CohomContext* ctx = nullptr);

// ---------------------------------------------------------------------------
// subgroups of computed groups

// A subgroup of a finite abelian presentation (+) Z/orders_i.
struct SubgroupFin {
    std::vector<Int> orders;
    IntMatrix gens;  // columns in the presentation coordinates

    bool contains(const std::vector<Int>& v) const;
    bool sameAs(const SubgroupFin& o) const;
    FgAbelianGroup structure() const;
    bool isZero() const;
};

// Image of a cohomology map whose target has finite raw value.
SubgroupFin imageSubgroupFinite(const CohomologyMap& f);
// n . H (all generators scaled), finite raw value.
SubgroupFin scaledSubgroupFinite(const CohomologyGroup& h, const Int& n);
// the P-primary part
SubgroupFin primaryPartSubgroup(const CohomologyGroup& h, const std::vector<long>& primes);

bool rawValueFinite(const CohomologyGroup& h);
std::vector<Int> rawOrders(const CohomologyGroup& h);

}  // namespace kobst
