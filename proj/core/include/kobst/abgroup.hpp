#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kobst/exactlin.hpp"

// Finitely generated abelian groups and the admissible coefficient
// modules: finite direct sums of the atoms
//
//   Z, Z/m, Z[S] (S a finite set of inverted primes), Q,
//   Pr(P) = Z[P]/Z (Pruefer sums), Q/Z, Q/Z[S].
//
// R is modeled by Q and T by Q/Z; only the Q-vector-space and
// divisible-torsion structure of R and T is visible to the
// computations built on top, and reports state ranks over Q.

namespace kobst {

// ---------------------------------------------------------------------------
// prime utilities

// Trial-division factorization; values here are small (moduli and
// invariant factors of desk-scale matrices).
std::vector<std::pair<Int, int>> factorize(const Int& n);

// The part of |n| supported on the given primes, and its complement.
Int primePart(const Int& n, const std::vector<long>& primes);
Int primeToPart(const Int& n, const std::vector<long>& primes);  // prime-to-S part

// Splits x = y + z with den(y) supported in `primes` and den(z)
// coprime to them (partial fractions).  Returns {y, z}.
std::pair<Rat, Rat> splitDenominator(const Rat& x, const std::vector<long>& primes);

// A finite or cofinite set of primes.
struct PrimeSet {
    std::vector<long> ps;  // sorted, distinct
    bool complemented = false;

    static PrimeSet none() { return {}; }
    static PrimeSet all() { return {{}, true}; }
    static PrimeSet of(std::vector<long> v);
    static PrimeSet allExcept(std::vector<long> v);

    bool contains(const Int& p) const;
    bool subsetOf(const PrimeSet& o) const;
    PrimeSet unionWith(const PrimeSet& o) const;
    PrimeSet intersect(const PrimeSet& o) const;
    bool operator==(const PrimeSet& o) const = default;
};

// A subgroup of Q of the form c * Z[S] (c > 0 rational, S a set of
// inverted primes), or 0, with S possibly cofinite.  Membership is a
// valuation condition: x in G iff v_p(x) >= v_p(c) for all p not in S.
struct RatSubgroup {
    bool zero = true;
    Rat c;  // positive; v_p(c) normalized to 0 on inverted primes
    PrimeSet inv;

    static RatSubgroup zeroGroup() { return {}; }
    static RatSubgroup integers() { return frac(Rat(1), PrimeSet::none()); }
    static RatSubgroup rationals() { return frac(Rat(1), PrimeSet::all()); }
    static RatSubgroup frac(const Rat& c, PrimeSet inv);

    bool isFull() const { return !zero && inv == PrimeSet::all(); }
    bool containsElement(const Rat& x) const;
    bool containsGroup(const RatSubgroup& h) const;
    RatSubgroup scaled(const Rat& lambda) const;
    RatSubgroup sum(const RatSubgroup& o) const;
    RatSubgroup intersect(const RatSubgroup& o) const;
    bool operator==(const RatSubgroup& o) const;
};

// ---------------------------------------------------------------------------
// atoms

enum class AtomKind { Z, ZMod, Loc, Q, Pruefer, QmodZ, QmodLoc };

struct Atom {
    AtomKind kind = AtomKind::Z;
    Int modulus;              // ZMod
    std::vector<long> primes; // Loc / Pruefer / QmodLoc, sorted distinct

    static Atom z() { return {AtomKind::Z, 0, {}}; }
    static Atom zMod(Int m);
    static Atom loc(std::vector<long> s);       // Loc({}) canonicalizes to Z
    static Atom q() { return {AtomKind::Q, 0, {}}; }
    static std::optional<Atom> pruefer(std::vector<long> p);  // Pr({}) is the zero module
    static Atom qModZ() { return {AtomKind::QmodZ, 0, {}}; }
    static Atom qModLoc(std::vector<long> s);   // Q/Z[{}] canonicalizes to Q/Z

    bool operator==(const Atom& o) const = default;
    bool operator<(const Atom& o) const;  // canonical ordering

    bool divisible() const { return kind == AtomKind::Q || kind == AtomKind::Pruefer || kind == AtomKind::QmodZ || kind == AtomKind::QmodLoc; }
    bool torsion() const { return kind == AtomKind::ZMod || kind == AtomKind::Pruefer || kind == AtomKind::QmodZ || kind == AtomKind::QmodLoc; }
    bool latticeKind() const { return kind == AtomKind::Z || kind == AtomKind::ZMod || kind == AtomKind::Loc; }

    // Presentation U/L used for maps *out of* the atom.
    RatSubgroup outCover() const;
    RatSubgroup outLattice() const;
    // Presentation used for maps *into* the atom.  ZMod(m) accepts
    // denominators coprime to m (reduced by modular inverse).
    RatSubgroup inCover() const;
    RatSubgroup inLattice() const;

    // Canonical coordinate representative; throws if x is not a valid
    // coordinate for this atom.
    Rat reduce(const Rat& x) const;
    bool validCoord(const Rat& x) const;

    std::string str() const;
};

// ---------------------------------------------------------------------------
// finitely generated abelian groups in canonical form

struct FgAbelianGroup {
    int rank = 0;
    std::vector<Int> torsion;  // d1 | d2 | ..., each >= 2

    static FgAbelianGroup free(int rank) { return {rank, {}}; }
    static FgAbelianGroup zero() { return {0, {}}; }
    // Canonicalizes an arbitrary list of cyclic orders (0 = Z factor).
    static FgAbelianGroup fromCyclicFactors(const std::vector<Int>& orders);

    bool isZero() const { return rank == 0 && torsion.empty(); }
    bool operator==(const FgAbelianGroup& o) const = default;
    Int order() const;  // 0 if infinite
    std::string str() const;
};

// ---------------------------------------------------------------------------
// admissible modules and their elements

struct AdmissibleModule {
    std::vector<Atom> atoms;

    static AdmissibleModule zero() { return {}; }
    static AdmissibleModule single(const Atom& a) { return {{a}}; }
    static AdmissibleModule direct(std::vector<Atom> as) { return {std::move(as)}; }

    bool isZero() const { return atoms.empty(); }
    int size() const { return int(atoms.size()); }
    bool operator==(const AdmissibleModule& o) const = default;

    // Canonical form: ZMod atoms merged into a divisibility chain,
    // Pruefer atoms merged layer-wise, fixed atom ordering.
    AdmissibleModule canonical() const;
    bool isCanonical() const { return *this == canonical(); }

    std::string str() const;
};

// Abstract-isomorphism test (finite part, free types, divisible
// torsion profile); used where a verified but non-canonical
// identification is all that is claimed.
bool isomorphic(const AdmissibleModule& a, const AdmissibleModule& b);

struct ModuleElement {
    std::vector<Rat> coords;  // one per atom, reduced

    bool operator==(const ModuleElement& o) const = default;
};

ModuleElement makeElement(const AdmissibleModule& m, std::vector<Rat> coords);
ModuleElement zeroElement(const AdmissibleModule& m);
bool isZeroElement(const ModuleElement& e);
ModuleElement addElements(const AdmissibleModule& m, const ModuleElement& a, const ModuleElement& b);
ModuleElement negateElement(const AdmissibleModule& m, const ModuleElement& a);
ModuleElement scaleElement(const AdmissibleModule& m, const Int& k, const ModuleElement& a);

// ---------------------------------------------------------------------------
// module maps: atom-to-atom rational multipliers

// True when x -> lambda*x is a well-defined homomorphism src -> dst.
bool validMultiplier(const Rat& lambda, const Atom& src, const Atom& dst);

struct ModuleMap {
    AdmissibleModule source, target;
    // blocks[t][s]: multiplier from source atom s into target atom t
    std::vector<std::vector<Rat>> blocks;

    static ModuleMap zero(const AdmissibleModule& src, const AdmissibleModule& dst);
    static ModuleMap identity(const AdmissibleModule& m);
    // Single-block constructors validate multipliers.
    static ModuleMap fromBlocks(const AdmissibleModule& src, const AdmissibleModule& dst,
                                std::vector<std::vector<Rat>> blocks);

    ModuleElement apply(const ModuleElement& x) const;
    bool isZeroMap() const;
    bool operator==(const ModuleMap& o) const = default;
};

ModuleMap composeMaps(const ModuleMap& g, const ModuleMap& f);  // g after f

// ---------------------------------------------------------------------------
// the closed-form calculus

// Hom(F, M): Hom(Z, M) = M, Hom(Z/m, M) = M[m], atomwise.
AdmissibleModule homInto(const FgAbelianGroup& f, const AdmissibleModule& m);
// Ext(F, M): Ext(Z, M) = 0, Ext(Z/m, M) = M/mM, atomwise.
AdmissibleModule extInto(const FgAbelianGroup& f, const AdmissibleModule& m);

// m-torsion of a single atom (nullopt = zero), with the coordinate
// convention used by homValue below.
std::optional<Atom> torsionAtom(const Int& m, const Atom& a);
std::optional<Atom> quotientAtom(const Int& m, const Atom& a);  // a / m*a

// Kernel and cokernel of multiplication by d on an atom.
std::pair<std::optional<Atom>, std::optional<Atom>> multKernelCokernel(const Int& d, const Atom& a);

// Value in `a` of the homomorphism Z/c -> a (c = 0 means Z -> a)
// encoded by `coord` in the torsion atom from torsionAtom(c, a):
// the image of the source generator.
Rat homValue(const Int& c, const Atom& a, const Rat& coord);
// Inverse: coordinate from the image of the generator.
Rat homCoordFromValue(const Int& c, const Atom& a, const Rat& value);

// Tensor product and Tor of finitely generated abelian groups.
std::pair<FgAbelianGroup, FgAbelianGroup> tensorAndTor(const FgAbelianGroup& f, const FgAbelianGroup& g);

}  // namespace kobst
