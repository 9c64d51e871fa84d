#pragma once

#include <map>
#include <string>
#include <vector>

#include "kobst/abgroup.hpp"
#include "kobst/exactlin.hpp"

// Group descriptors and small free resolutions over integral group
// rings: Koszul complexes for Z^n, 2-periodic resolutions for Z/m,
// tensor products, truncated normalized bar resolutions, and mapping
// cones for N x| Z, together with chain-map lifting along group
// homomorphisms.

namespace kobst {

// Exponent-vector group elements.  Abelian: one coordinate per cyclic
// factor.  Semidirect N x| <xi>: the N coordinates followed by the xi
// exponent; multiplication is (n1,l1)(n2,l2) = (n1 + phi^l1(n2), l1+l2).
using GroupElem = std::vector<long>;

struct GroupDescriptor {
    enum class Kind { Abelian, SemidirectZ };
    Kind kind = Kind::Abelian;
    std::vector<Int> factors;  // Abelian: cyclic orders, 0 = Z factor
    // SemidirectZ data: N is abelian (all-free or all-finite), phi an
    // automorphism given on the factor generators.
    std::vector<Int> nFactors;
    IntMatrix phi, phiInv;

    static GroupDescriptor trivial() { return abelian({}); }
    static GroupDescriptor abelian(std::vector<Int> factors);
    static GroupDescriptor freeAbelian(int n);
    static GroupDescriptor finiteAbelian(std::vector<long> moduli);
    static GroupDescriptor semidirectZ(std::vector<Int> nFactors, IntMatrix phi);

    bool operator==(const GroupDescriptor& o) const;

    int elemLen() const;
    bool finite() const;
    Int order() const;     // 0 when infinite
    int hirschLength() const;  // free factor count (+1 across the xi layer)
    bool abelianKind() const { return kind == Kind::Abelian; }

    GroupDescriptor nSubgroup() const;  // the N of a semidirect product

    GroupElem identity() const;
    GroupElem reduceElem(GroupElem e) const;
    GroupElem mul(const GroupElem& a, const GroupElem& b) const;
    GroupElem inverse(const GroupElem& a) const;
    GroupElem power(const GroupElem& a, long k) const;
    bool isIdentity(const GroupElem& e) const;
    std::vector<GroupElem> allElements() const;  // finite groups only

    // phi^l applied to N coordinates (semidirect only).
    std::vector<long> phiPower(const std::vector<long>& n, long l) const;

    std::string str() const;
};

// ---------------------------------------------------------------------------
// group rings

struct RingElem {
    std::map<GroupElem, Int> terms;  // no zero coefficients

    static RingElem zero() { return {}; }
    static RingElem unit(const GroupDescriptor& g) { return ofElem(g.identity()); }
    static RingElem ofElem(GroupElem e, Int coeff = 1);

    bool isZero() const { return terms.empty(); }
    void addTerm(const GroupElem& e, const Int& c);
    bool operator==(const RingElem& o) const = default;
};

RingElem ringAdd(const RingElem& a, const RingElem& b);
RingElem ringScale(const Int& c, const RingElem& a);
RingElem ringMul(const GroupDescriptor& g, const RingElem& a, const RingElem& b);
Int augmentation(const RingElem& a);

struct RingMatrix {
    int rows = 0, cols = 0;
    std::vector<RingElem> e;

    RingMatrix() = default;
    RingMatrix(int r, int c) : rows(r), cols(c), e(size_t(r) * c) {}
    RingElem& operator()(int i, int j) { return e[size_t(i) * cols + j]; }
    const RingElem& operator()(int i, int j) const { return e[size_t(i) * cols + j]; }
    bool isZero() const;
};

// Composite of module maps between free left modules, outer after
// inner; matrix entries of the inner map multiply from the left, which
// matters over the noncommutative ring of a semidirect product.
RingMatrix composeModuleMatrices(const GroupDescriptor& g, const RingMatrix& outer,
                                 const RingMatrix& inner);
IntMatrix augmentationMatrix(const RingMatrix& a);

// ---------------------------------------------------------------------------
// homomorphisms of groups (abelian source)

struct GroupHom {
    GroupDescriptor source, target;
    std::vector<GroupElem> images;  // one per source factor generator

    static GroupHom identity(const GroupDescriptor& g);
    // Canonical quotient Z^n -> prod Z/m_i (or any abelian-to-abelian
    // coordinatewise reduction with matching factor counts).
    static GroupHom canonicalQuotient(const GroupDescriptor& src, const GroupDescriptor& dst);
    static GroupHom fromMatrix(const GroupDescriptor& src, const GroupDescriptor& dst, const IntMatrix& m);
    // Inclusion N -> N x| Z.
    static GroupHom inclusionIntoSemidirect(const GroupDescriptor& g);

    GroupElem apply(const GroupElem& e) const;
    RingElem applyRing(const RingElem& a) const;
    void validate() const;  // torsion compatibility
};

// ---------------------------------------------------------------------------
// resolutions

struct FreeResolution {
    GroupDescriptor group;
    int maxDegree = 0;
    std::vector<int> ranks;          // [0..maxDegree]
    std::vector<RingMatrix> diffs;   // diffs[k]: F_k -> F_{k-1}, 1 <= k <= maxDegree

    const RingMatrix& diff(int k) const { return diffs[k]; }
    IntMatrix coinvariantsDiff(int k) const;  // augmentation of diffs[k]
};

inline constexpr int kMaxResolutionDegree = 6;

// Koszul for free factors, 2-periodic for finite cyclic factors,
// tensor products across factors; d o d = 0 is verified.
FreeResolution freeResolution(const GroupDescriptor& g, int maxDeg);

// Mapping cone over the induced resolution of N for G = N x| Z.
FreeResolution mappingConeResolution(const GroupDescriptor& g, int maxDeg);

// Resolution for any descriptor: dispatches on the kind.
FreeResolution resolutionFor(const GroupDescriptor& g, int maxDeg);

// Normalized bar resolution truncation, rank_k = (|G|-1)^k.
FreeResolution barTruncation(const GroupDescriptor& g, int maxDeg);

// Generator order of the degree-k bar module: k-tuples of non-identity
// elements, lexicographic in the element enumeration.
std::vector<std::vector<GroupElem>> barTupleBasis(const GroupDescriptor& g, int k);

// ---------------------------------------------------------------------------
// chain maps

struct ChainMap {
    GroupHom along;
    std::vector<RingMatrix> components;  // [0..deg], over the target ring
};

// Lifts f degree by degree via Diophantine solving on finitely
// supported group-ring windows.  Always solvable by freeness of the
// source and exactness of the target; failure to find a solution in
// the search window is an internal error.
ChainMap comparisonChainMap(const FreeResolution& p, const FreeResolution& q, const GroupHom& f,
                            int maxDeg = -1);

// A chain map from the resolution into the normalized bar resolution,
// built with the standard contracting homotopy.  Degree-k component of
// generator j is a Z-combination of (g0; g1,...,gk) simplices.
struct BarChain {
    std::map<std::vector<GroupElem>, Int> terms;  // key = [g0, g1, .., gk]
};
std::vector<std::vector<BarChain>> barComparison(const FreeResolution& c, int maxDeg);

// Exactness of the augmented complex, checked by flattening over the
// whole (finite) group; infinite groups verify d o d = 0 only.
bool resolutionExact(const FreeResolution& r);

}  // namespace kobst
