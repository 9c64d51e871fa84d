#include "kobst/abgroup.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kobst {

// ---------------------------------------------------------------------------
// prime utilities

std::vector<std::pair<Int, int>> factorize(const Int& n0) {
    Int n = abs(n0);
    std::vector<std::pair<Int, int>> fs;
    if (n <= 1) return fs;
    for (Int p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        fs.emplace_back(p, e);
    }
    if (n > 1) fs.emplace_back(n, 1);
    return fs;
}

Int primePart(const Int& n, const std::vector<long>& primes) {
    Int m = abs(n), part = 1;
    for (long p : primes)
        while (m % p == 0) {
            m /= p;
            part *= p;
        }
    return part;
}

Int primeToPart(const Int& n, const std::vector<long>& primes) {
    Int m = abs(n);
    for (long p : primes)
        while (m % p == 0) m /= p;
    return m;
}

std::pair<Rat, Rat> splitDenominator(const Rat& x, const std::vector<long>& primes) {
    Int den = x.get_den();
    Int b1 = primePart(den, primes);  // supported part
    Int b2 = den / b1;
    if (b1 == 1) return {Rat(0), x};
    if (b2 == 1) return {x, Rat(0)};
    // a/(b1 b2) = y/b1 + z/b2 with y*b2 + z*b1 = a
    Int a = x.get_num(), g, u, v;
    mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), b2.get_mpz_t(), b1.get_mpz_t());
    // u*b2 + v*b1 = 1
    Rat y(a * u, b1), z(a * v, b2);
    y.canonicalize();
    z.canonicalize();
    return {y, z};
}

namespace {

int valuation(const Int& n, const Int& p) {
    if (n == 0) throw std::invalid_argument("valuation of 0");
    Int m = abs(n);
    int v = 0;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

int valuation(const Rat& x, const Int& p) {
    return valuation(x.get_num(), p) - valuation(x.get_den(), p);
}

std::vector<Int> mentionedPrimes(const Rat& c) {
    std::vector<Int> ps;
    for (auto& [p, e] : factorize(c.get_num())) ps.push_back(p);
    for (auto& [p, e] : factorize(c.get_den())) ps.push_back(p);
    return ps;
}

Int powInt(const Int& p, int e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), e);
    return r;
}

Rat powRat(const Int& p, int e) {
    if (e >= 0) return Rat(powInt(p, e));
    return Rat(1, powInt(p, -e));
}

}  // namespace

// ---------------------------------------------------------------------------
// PrimeSet

PrimeSet PrimeSet::of(std::vector<long> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return {std::move(v), false};
}

PrimeSet PrimeSet::allExcept(std::vector<long> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return {std::move(v), true};
}

bool PrimeSet::contains(const Int& p) const {
    bool in = false;
    if (p.fits_slong_p()) in = std::binary_search(ps.begin(), ps.end(), p.get_si());
    return complemented ? !in : in;
}

bool PrimeSet::subsetOf(const PrimeSet& o) const {
    if (!complemented && !o.complemented)
        return std::includes(o.ps.begin(), o.ps.end(), ps.begin(), ps.end());
    if (!complemented && o.complemented) {
        for (long p : ps)
            if (std::binary_search(o.ps.begin(), o.ps.end(), p)) return false;
        return true;
    }
    if (complemented && !o.complemented) return false;  // cofinite never inside finite
    // both complemented: complement(o) subset of complement(this)
    return std::includes(ps.begin(), ps.end(), o.ps.begin(), o.ps.end());
}

PrimeSet PrimeSet::unionWith(const PrimeSet& o) const {
    std::vector<long> r;
    if (!complemented && !o.complemented) {
        std::set_union(ps.begin(), ps.end(), o.ps.begin(), o.ps.end(), std::back_inserter(r));
        return {r, false};
    }
    if (complemented && o.complemented) {
        std::set_intersection(ps.begin(), ps.end(), o.ps.begin(), o.ps.end(), std::back_inserter(r));
        return {r, true};
    }
    const PrimeSet& fin = complemented ? o : *this;
    const PrimeSet& cof = complemented ? *this : o;
    std::set_difference(cof.ps.begin(), cof.ps.end(), fin.ps.begin(), fin.ps.end(), std::back_inserter(r));
    return {r, true};
}

PrimeSet PrimeSet::intersect(const PrimeSet& o) const {
    std::vector<long> r;
    if (!complemented && !o.complemented) {
        std::set_intersection(ps.begin(), ps.end(), o.ps.begin(), o.ps.end(), std::back_inserter(r));
        return {r, false};
    }
    if (complemented && o.complemented) {
        std::set_union(ps.begin(), ps.end(), o.ps.begin(), o.ps.end(), std::back_inserter(r));
        return {r, true};
    }
    const PrimeSet& fin = complemented ? o : *this;
    const PrimeSet& cof = complemented ? *this : o;
    std::set_difference(fin.ps.begin(), fin.ps.end(), cof.ps.begin(), cof.ps.end(), std::back_inserter(r));
    return {r, false};
}

// ---------------------------------------------------------------------------
// RatSubgroup

RatSubgroup RatSubgroup::frac(const Rat& c0, PrimeSet inv) {
    if (c0 == 0) throw std::invalid_argument("RatSubgroup::frac: zero scale");
    Rat c = abs(c0);
    // strip inverted primes out of c
    for (const Int& p : mentionedPrimes(c)) {
        if (!inv.contains(p)) continue;
        c *= powRat(p, -valuation(c, p));
        c.canonicalize();
    }
    RatSubgroup g;
    g.zero = false;
    g.c = c;
    g.inv = std::move(inv);
    return g;
}

bool RatSubgroup::containsElement(const Rat& x) const {
    if (x == 0) return true;
    if (zero) return false;
    std::vector<Int> ps = mentionedPrimes(x);
    for (const Int& p : mentionedPrimes(c)) ps.push_back(p);
    for (const Int& p : ps) {
        if (inv.contains(p)) continue;
        if (valuation(x, p) < valuation(c, p)) return false;
    }
    return true;
}

bool RatSubgroup::containsGroup(const RatSubgroup& h) const {
    if (h.zero) return true;
    if (zero) return false;
    if (!h.inv.subsetOf(inv)) return false;
    std::vector<Int> ps = mentionedPrimes(c);
    for (const Int& p : mentionedPrimes(h.c)) ps.push_back(p);
    for (const Int& p : ps) {
        if (inv.contains(p)) continue;
        if (valuation(h.c, p) < valuation(c, p)) return false;
    }
    return true;
}

RatSubgroup RatSubgroup::scaled(const Rat& lambda) const {
    if (zero || lambda == 0) return zeroGroup();
    return frac(c * abs(lambda), inv);
}

RatSubgroup RatSubgroup::sum(const RatSubgroup& o) const {
    if (zero) return o;
    if (o.zero) return *this;
    PrimeSet u = inv.unionWith(o.inv);
    std::vector<Int> ps = mentionedPrimes(c);
    for (const Int& p : mentionedPrimes(o.c)) ps.push_back(p);
    Rat cr(1);
    for (const Int& p : std::set<Int>(ps.begin(), ps.end())) {
        if (u.contains(p)) continue;
        cr *= powRat(p, std::min(valuation(c, p), valuation(o.c, p)));
        cr.canonicalize();
    }
    return frac(cr, u);
}

RatSubgroup RatSubgroup::intersect(const RatSubgroup& o) const {
    if (zero || o.zero) return zeroGroup();
    PrimeSet u = inv.intersect(o.inv);
    std::vector<Int> ps = mentionedPrimes(c);
    for (const Int& p : mentionedPrimes(o.c)) ps.push_back(p);
    for (long p : inv.ps) ps.push_back(p);
    for (long p : o.inv.ps) ps.push_back(p);
    Rat cr(1);
    for (const Int& p : std::set<Int>(ps.begin(), ps.end())) {
        if (u.contains(p)) continue;
        bool c1 = !inv.contains(p), c2 = !o.inv.contains(p);
        int v;
        if (c1 && c2)
            v = std::max(valuation(c, p), valuation(o.c, p));
        else if (c1)
            v = valuation(c, p);
        else
            v = valuation(o.c, p);
        cr *= powRat(p, v);
        cr.canonicalize();
    }
    return frac(cr, u);
}

bool RatSubgroup::operator==(const RatSubgroup& o) const {
    return containsGroup(o) && o.containsGroup(*this);
}

// ---------------------------------------------------------------------------
// Atom

Atom Atom::zMod(Int m) {
    m = abs(m);
    if (m < 2) throw std::invalid_argument("ZMod modulus must be >= 2");
    return {AtomKind::ZMod, m, {}};
}

Atom Atom::loc(std::vector<long> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty()) return z();
    return {AtomKind::Loc, 0, std::move(s)};
}

std::optional<Atom> Atom::pruefer(std::vector<long> p) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.empty()) return std::nullopt;
    return Atom{AtomKind::Pruefer, 0, std::move(p)};
}

Atom Atom::qModLoc(std::vector<long> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty()) return qModZ();
    return {AtomKind::QmodLoc, 0, std::move(s)};
}

bool Atom::operator<(const Atom& o) const {
    auto rank = [](const Atom& a) {
        switch (a.kind) {
            case AtomKind::Z: return 0;
            case AtomKind::Loc: return 1;
            case AtomKind::Q: return 2;
            case AtomKind::ZMod: return 3;
            case AtomKind::Pruefer: return 4;
            case AtomKind::QmodLoc: return 5;
            case AtomKind::QmodZ: return 6;
        }
        return 7;
    };
    if (rank(*this) != rank(o)) return rank(*this) < rank(o);
    if (kind == AtomKind::ZMod) return modulus < o.modulus;
    return primes < o.primes;
}

RatSubgroup Atom::outCover() const {
    switch (kind) {
        case AtomKind::Z:
        case AtomKind::ZMod: return RatSubgroup::integers();
        case AtomKind::Loc:
        case AtomKind::Pruefer: return RatSubgroup::frac(Rat(1), PrimeSet::of(primes));
        case AtomKind::Q:
        case AtomKind::QmodZ:
        case AtomKind::QmodLoc: return RatSubgroup::rationals();
    }
    throw std::logic_error("outCover");
}

RatSubgroup Atom::outLattice() const {
    switch (kind) {
        case AtomKind::Z:
        case AtomKind::Loc:
        case AtomKind::Q: return RatSubgroup::zeroGroup();
        case AtomKind::ZMod: return RatSubgroup::frac(Rat(modulus), PrimeSet::none());
        case AtomKind::Pruefer:
        case AtomKind::QmodZ: return RatSubgroup::integers();
        case AtomKind::QmodLoc: return RatSubgroup::frac(Rat(1), PrimeSet::of(primes));
    }
    throw std::logic_error("outLattice");
}

RatSubgroup Atom::inCover() const {
    if (kind == AtomKind::ZMod) {
        std::vector<long> ms;
        for (auto& [p, e] : factorize(modulus)) ms.push_back(long(p.get_si()));
        return RatSubgroup::frac(Rat(1), PrimeSet::allExcept(ms));
    }
    return outCover();
}

RatSubgroup Atom::inLattice() const {
    if (kind == AtomKind::ZMod) {
        std::vector<long> ms;
        for (auto& [p, e] : factorize(modulus)) ms.push_back(long(p.get_si()));
        return RatSubgroup::frac(Rat(modulus), PrimeSet::allExcept(ms));
    }
    return outLattice();
}

namespace {

Rat modOne(const Rat& x) {
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    Rat r = x - Rat(fl);
    r.canonicalize();
    return r;
}

}  // namespace

Rat Atom::reduce(const Rat& x) const {
    switch (kind) {
        case AtomKind::Z:
            if (x.get_den() != 1) throw std::invalid_argument("Z coordinate must be an integer");
            return x;
        case AtomKind::ZMod: {
            Int den = x.get_den(), g;
            mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), modulus.get_mpz_t());
            if (g != 1) throw std::invalid_argument("Z/m coordinate has denominator sharing a factor with m");
            Int inv;
            if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), modulus.get_mpz_t()) == 0)
                throw std::invalid_argument("Z/m coordinate not reducible");
            Int r = (x.get_num() * inv) % modulus;
            if (r < 0) r += modulus;
            return Rat(r);
        }
        case AtomKind::Loc: {
            if (primeToPart(x.get_den(), primes) != 1)
                throw std::invalid_argument("Z[S] coordinate has denominator outside S");
            return x;
        }
        case AtomKind::Q: return x;
        case AtomKind::Pruefer: {
            if (primeToPart(x.get_den(), primes) != 1)
                throw std::invalid_argument("Pr(P) coordinate has denominator outside P");
            return modOne(x);
        }
        case AtomKind::QmodZ: return modOne(x);
        case AtomKind::QmodLoc: {
            auto [y, z] = splitDenominator(x, primes);
            (void)y;  // the S-supported part lies in Z[S]
            return modOne(z);
        }
    }
    throw std::logic_error("reduce");
}

bool Atom::validCoord(const Rat& x) const {
    try {
        reduce(x);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

std::string Atom::str() const {
    std::ostringstream os;
    auto list = [&](char open, char close) {
        os << open;
        for (size_t i = 0; i < primes.size(); ++i) os << (i ? "," : "") << primes[i];
        os << close;
    };
    switch (kind) {
        case AtomKind::Z: os << "Z"; break;
        case AtomKind::ZMod: os << "Z/" << modulus.get_str(); break;
        case AtomKind::Loc:
            os << "Z";
            list('[', ']');
            break;
        case AtomKind::Q: os << "Q"; break;
        case AtomKind::Pruefer:
            os << "Pr";
            list('{', '}');
            break;
        case AtomKind::QmodZ: os << "Q/Z"; break;
        case AtomKind::QmodLoc:
            os << "Q/Z";
            list('[', ']');
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// FgAbelianGroup

FgAbelianGroup FgAbelianGroup::fromCyclicFactors(const std::vector<Int>& orders) {
    FgAbelianGroup g;
    std::vector<Int> tor;
    for (const Int& d : orders) {
        Int a = abs(d);
        if (a == 0)
            ++g.rank;
        else if (a > 1)
            tor.push_back(a);
    }
    if (!tor.empty()) {
        IntMatrix D(int(tor.size()), int(tor.size()));
        for (size_t i = 0; i < tor.size(); ++i) D(int(i), int(i)) = tor[i];
        auto s = smithNormalForm(D);
        for (const Int& f : s.invariantFactors)
            if (f > 1) g.torsion.push_back(f);
    }
    return g;
}

Int FgAbelianGroup::order() const {
    if (rank > 0) return 0;
    Int n = 1;
    for (const Int& d : torsion) n *= d;
    return n;
}

std::string FgAbelianGroup::str() const {
    if (isZero()) return "0";
    std::ostringstream os;
    bool first = true;
    if (rank == 1) {
        os << "Z";
        first = false;
    } else if (rank > 1) {
        os << "Z^" << rank;
        first = false;
    }
    for (const Int& d : torsion) {
        os << (first ? "" : " + ") << "Z/" << d.get_str();
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// AdmissibleModule

AdmissibleModule AdmissibleModule::canonical() const {
    std::vector<Atom> out;
    std::vector<Int> zmods;
    std::map<long, int> prueferMult;
    for (const Atom& a : atoms) {
        if (a.kind == AtomKind::ZMod) {
            zmods.push_back(a.modulus);
        } else if (a.kind == AtomKind::Pruefer) {
            for (long p : a.primes) prueferMult[p] += 1;
        } else {
            out.push_back(a);
        }
    }
    FgAbelianGroup chain = FgAbelianGroup::fromCyclicFactors(zmods);
    for (const Int& d : chain.torsion) out.push_back(Atom::zMod(d));
    // Pruefer layers: layer k holds the primes of multiplicity >= k.
    int maxMult = 0;
    for (auto& [p, k] : prueferMult) maxMult = std::max(maxMult, k);
    for (int k = 1; k <= maxMult; ++k) {
        std::vector<long> layer;
        for (auto& [p, mult] : prueferMult)
            if (mult >= k) layer.push_back(p);
        out.push_back(*Atom::pruefer(layer));
    }
    std::sort(out.begin(), out.end());
    return {out};
}

std::string AdmissibleModule::str() const {
    if (atoms.empty()) return "0";
    std::ostringstream os;
    for (size_t i = 0; i < atoms.size(); ++i) os << (i ? " + " : "") << atoms[i].str();
    return os.str();
}

bool isomorphic(const AdmissibleModule& a, const AdmissibleModule& b) {
    auto profile = [](const AdmissibleModule& m) {
        int zc = 0, qc = 0, qmzc = 0;
        std::multiset<std::vector<long>> locs, qmlocs;
        std::map<Int, std::multiset<int>> finite;  // prime -> exponents
        std::set<long> mentioned;
        std::vector<const Atom*> divisorial;
        for (const Atom& at : m.atoms) {
            switch (at.kind) {
                case AtomKind::Z: ++zc; break;
                case AtomKind::Q: ++qc; break;
                case AtomKind::QmodZ: ++qmzc; break;
                case AtomKind::Loc: locs.insert(at.primes); break;
                case AtomKind::QmodLoc:
                    qmlocs.insert(at.primes);
                    for (long p : at.primes) mentioned.insert(p);
                    break;
                case AtomKind::Pruefer:
                    for (long p : at.primes) mentioned.insert(p);
                    break;
                case AtomKind::ZMod:
                    for (auto& [p, e] : factorize(at.modulus)) finite[p].insert(e);
                    break;
            }
        }
        return std::tuple(zc, qc, qmzc, locs, qmlocs, finite, mentioned);
    };
    auto [za, qa, qza, la, qla, fa, ma] = profile(a);
    auto [zb, qb, qzb, lb, qlb, fb, mb] = profile(b);
    if (za != zb || qa != qb || la != lb || fa != fb) return false;
    // divisible torsion profile: for each relevant prime, the number of
    // Pr{p} summands, plus the count at a generic prime
    std::set<long> primes = ma;
    primes.insert(mb.begin(), mb.end());
    auto divCount = [](const AdmissibleModule& m, long p) {
        int c = 0;
        for (const Atom& at : m.atoms) {
            if (at.kind == AtomKind::QmodZ) ++c;
            if (at.kind == AtomKind::Pruefer &&
                std::binary_search(at.primes.begin(), at.primes.end(), p))
                ++c;
            if (at.kind == AtomKind::QmodLoc &&
                !std::binary_search(at.primes.begin(), at.primes.end(), p))
                ++c;
        }
        return c;
    };
    for (long p : primes)
        if (divCount(a, p) != divCount(b, p)) return false;
    int genericA = qza + int(qla.size());
    int genericB = qzb + int(qlb.size());
    return genericA == genericB;
}

// ---------------------------------------------------------------------------
// elements

ModuleElement makeElement(const AdmissibleModule& m, std::vector<Rat> coords) {
    if (coords.size() != m.atoms.size()) throw std::invalid_argument("makeElement: coordinate count");
    ModuleElement e;
    e.coords.reserve(coords.size());
    for (size_t i = 0; i < coords.size(); ++i) e.coords.push_back(m.atoms[i].reduce(coords[i]));
    return e;
}

ModuleElement zeroElement(const AdmissibleModule& m) {
    ModuleElement e;
    e.coords.assign(m.atoms.size(), Rat(0));
    return e;
}

bool isZeroElement(const ModuleElement& e) {
    for (const Rat& c : e.coords)
        if (c != 0) return false;
    return true;
}

ModuleElement addElements(const AdmissibleModule& m, const ModuleElement& a, const ModuleElement& b) {
    std::vector<Rat> c(a.coords.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = a.coords[i] + b.coords[i];
    return makeElement(m, std::move(c));
}

ModuleElement negateElement(const AdmissibleModule& m, const ModuleElement& a) {
    std::vector<Rat> c(a.coords.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = -a.coords[i];
    return makeElement(m, std::move(c));
}

ModuleElement scaleElement(const AdmissibleModule& m, const Int& k, const ModuleElement& a) {
    std::vector<Rat> c(a.coords.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = Rat(k) * a.coords[i];
    return makeElement(m, std::move(c));
}

// ---------------------------------------------------------------------------
// maps

bool validMultiplier(const Rat& lambda, const Atom& src, const Atom& dst) {
    if (lambda == 0) return true;
    return dst.inCover().containsGroup(src.outCover().scaled(lambda)) &&
           dst.inLattice().containsGroup(src.outLattice().scaled(lambda));
}

ModuleMap ModuleMap::zero(const AdmissibleModule& src, const AdmissibleModule& dst) {
    ModuleMap f;
    f.source = src;
    f.target = dst;
    f.blocks.assign(dst.atoms.size(), std::vector<Rat>(src.atoms.size(), Rat(0)));
    return f;
}

ModuleMap ModuleMap::identity(const AdmissibleModule& m) {
    ModuleMap f = zero(m, m);
    for (size_t i = 0; i < m.atoms.size(); ++i) f.blocks[i][i] = 1;
    return f;
}

ModuleMap ModuleMap::fromBlocks(const AdmissibleModule& src, const AdmissibleModule& dst,
                                std::vector<std::vector<Rat>> blocks) {
    if (blocks.size() != dst.atoms.size())
        throw std::invalid_argument("ModuleMap: block row count");
    for (size_t t = 0; t < blocks.size(); ++t) {
        if (blocks[t].size() != src.atoms.size())
            throw std::invalid_argument("ModuleMap: block column count");
        for (size_t s = 0; s < blocks[t].size(); ++s)
            if (!validMultiplier(blocks[t][s], src.atoms[s], dst.atoms[t]))
                throw std::invalid_argument("ModuleMap: multiplier " + blocks[t][s].get_str() +
                                            " is not a homomorphism " + src.atoms[s].str() + " -> " +
                                            dst.atoms[t].str());
    }
    ModuleMap f;
    f.source = src;
    f.target = dst;
    f.blocks = std::move(blocks);
    return f;
}

ModuleElement ModuleMap::apply(const ModuleElement& x) const {
    std::vector<Rat> out(target.atoms.size(), Rat(0));
    for (size_t t = 0; t < target.atoms.size(); ++t)
        for (size_t s = 0; s < source.atoms.size(); ++s)
            if (blocks[t][s] != 0 && x.coords[s] != 0) out[t] += blocks[t][s] * x.coords[s];
    return makeElement(target, std::move(out));
}

bool ModuleMap::isZeroMap() const {
    for (auto& row : blocks)
        for (auto& b : row)
            if (b != 0) return false;
    return true;
}

ModuleMap composeMaps(const ModuleMap& g, const ModuleMap& f) {
    if (!(f.target == g.source)) throw std::invalid_argument("composeMaps: middle module mismatch");
    std::vector<std::vector<Rat>> b(g.target.atoms.size(), std::vector<Rat>(f.source.atoms.size(), Rat(0)));
    for (size_t t = 0; t < g.target.atoms.size(); ++t)
        for (size_t s = 0; s < f.source.atoms.size(); ++s)
            for (size_t k = 0; k < f.target.atoms.size(); ++k) b[t][s] += g.blocks[t][k] * f.blocks[k][s];
    return ModuleMap::fromBlocks(f.source, g.target, std::move(b));
}

// ---------------------------------------------------------------------------
// closed forms

std::optional<Atom> torsionAtom(const Int& m, const Atom& a) {
    if (m < 2) throw std::invalid_argument("torsionAtom: m >= 2 required");
    switch (a.kind) {
        case AtomKind::Z:
        case AtomKind::Loc:
        case AtomKind::Q: return std::nullopt;
        case AtomKind::ZMod: {
            Int g;
            mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), a.modulus.get_mpz_t());
            if (g < 2) return std::nullopt;
            return Atom::zMod(g);
        }
        case AtomKind::Pruefer: {
            Int mp = primePart(m, a.primes);
            if (mp < 2) return std::nullopt;
            return Atom::zMod(mp);
        }
        case AtomKind::QmodZ: return Atom::zMod(m);
        case AtomKind::QmodLoc: {
            Int ms = primeToPart(m, a.primes);
            if (ms < 2) return std::nullopt;
            return Atom::zMod(ms);
        }
    }
    throw std::logic_error("torsionAtom");
}

std::optional<Atom> quotientAtom(const Int& m, const Atom& a) {
    if (m < 2) throw std::invalid_argument("quotientAtom: m >= 2 required");
    switch (a.kind) {
        case AtomKind::Z: return Atom::zMod(m);
        case AtomKind::ZMod: {
            Int g;
            mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), a.modulus.get_mpz_t());
            if (g < 2) return std::nullopt;
            return Atom::zMod(g);
        }
        case AtomKind::Loc: {
            Int ms = primeToPart(m, a.primes);
            if (ms < 2) return std::nullopt;
            return Atom::zMod(ms);
        }
        case AtomKind::Q:
        case AtomKind::Pruefer:
        case AtomKind::QmodZ:
        case AtomKind::QmodLoc: return std::nullopt;
    }
    throw std::logic_error("quotientAtom");
}

std::pair<std::optional<Atom>, std::optional<Atom>> multKernelCokernel(const Int& d, const Atom& a) {
    if (d == 0) throw std::invalid_argument("multKernelCokernel: d must be nonzero");
    Int ad = abs(d);
    std::optional<Atom> ker, coker;
    if (ad >= 2) {
        ker = torsionAtom(ad, a);
        coker = quotientAtom(ad, a);
    }
    return {ker, coker};
}

AdmissibleModule homInto(const FgAbelianGroup& f, const AdmissibleModule& m) {
    std::vector<Atom> out;
    for (int i = 0; i < f.rank; ++i)
        for (const Atom& a : m.atoms) out.push_back(a);
    for (const Int& d : f.torsion)
        for (const Atom& a : m.atoms)
            if (auto t = torsionAtom(d, a)) out.push_back(*t);
    return AdmissibleModule{out}.canonical();
}

AdmissibleModule extInto(const FgAbelianGroup& f, const AdmissibleModule& m) {
    std::vector<Atom> out;
    for (const Int& d : f.torsion)
        for (const Atom& a : m.atoms)
            if (auto q = quotientAtom(d, a)) out.push_back(*q);
    return AdmissibleModule{out}.canonical();
}

Rat homValue(const Int& c, const Atom& a, const Rat& coord) {
    if (c == 0) return a.reduce(coord);
    switch (a.kind) {
        case AtomKind::ZMod: {
            Int g;
            mpz_gcd(g.get_mpz_t(), c.get_mpz_t(), a.modulus.get_mpz_t());
            return a.reduce(coord * Rat(a.modulus / g));
        }
        case AtomKind::Pruefer: return a.reduce(coord / Rat(primePart(c, a.primes)));
        case AtomKind::QmodZ: return a.reduce(coord / Rat(c));
        case AtomKind::QmodLoc: return a.reduce(coord / Rat(primeToPart(c, a.primes)));
        default:
            if (coord != 0) throw std::invalid_argument("homValue: torsion-free atom has no c-torsion");
            return Rat(0);
    }
}

Rat homCoordFromValue(const Int& c, const Atom& a, const Rat& value) {
    if (c == 0) return a.reduce(value);
    switch (a.kind) {
        case AtomKind::ZMod: {
            Int g;
            mpz_gcd(g.get_mpz_t(), c.get_mpz_t(), a.modulus.get_mpz_t());
            Rat v = a.reduce(value);
            Int step = a.modulus / g;
            if (v.get_num() % step != 0)
                throw std::invalid_argument("homCoordFromValue: value is not c-torsion");
            Int x = v.get_num() / step;
            return Atom::zMod(g).reduce(Rat(x));
        }
        case AtomKind::Pruefer: {
            Int mp = primePart(c, a.primes);
            if (mp < 2) {
                if (a.reduce(value) != 0) throw std::invalid_argument("homCoordFromValue: not torsion");
                return Rat(0);
            }
            return Atom::zMod(mp).reduce(a.reduce(value) * Rat(mp));
        }
        case AtomKind::QmodZ: return Atom::zMod(c).reduce(a.reduce(value) * Rat(c));
        case AtomKind::QmodLoc: {
            Int ms = primeToPart(c, a.primes);
            if (ms < 2) {
                if (a.reduce(value) != 0) throw std::invalid_argument("homCoordFromValue: not torsion");
                return Rat(0);
            }
            return Atom::zMod(ms).reduce(a.reduce(value) * Rat(ms));
        }
        default:
            if (a.reduce(value) != 0) throw std::invalid_argument("homCoordFromValue: not torsion");
            return Rat(0);
    }
}

std::pair<FgAbelianGroup, FgAbelianGroup> tensorAndTor(const FgAbelianGroup& f, const FgAbelianGroup& g) {
    std::vector<Int> tensorOrders, torOrders;
    for (int i = 0; i < f.rank * g.rank; ++i) tensorOrders.push_back(0);
    for (const Int& m : f.torsion)
        for (int i = 0; i < g.rank; ++i) tensorOrders.push_back(m);
    for (const Int& n : g.torsion)
        for (int i = 0; i < f.rank; ++i) tensorOrders.push_back(n);
    for (const Int& m : f.torsion)
        for (const Int& n : g.torsion) {
            Int d;
            mpz_gcd(d.get_mpz_t(), m.get_mpz_t(), n.get_mpz_t());
            tensorOrders.push_back(d);
            torOrders.push_back(d);
        }
    return {FgAbelianGroup::fromCyclicFactors(tensorOrders), FgAbelianGroup::fromCyclicFactors(torOrders)};
}

}  // namespace kobst
