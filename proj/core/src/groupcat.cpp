#include "kobst/groupcat.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kobst {

// ---------------------------------------------------------------------------
// GroupDescriptor

GroupDescriptor GroupDescriptor::abelian(std::vector<Int> factors) {
    for (Int& f : factors) {
        f = abs(f);
        if (f == 1) throw std::invalid_argument("group factor Z/1 is trivial; drop it");
    }
    GroupDescriptor g;
    g.kind = Kind::Abelian;
    g.factors = std::move(factors);
    return g;
}

GroupDescriptor GroupDescriptor::freeAbelian(int n) {
    return abelian(std::vector<Int>(n, Int(0)));
}

GroupDescriptor GroupDescriptor::finiteAbelian(std::vector<long> moduli) {
    std::vector<Int> fs(moduli.begin(), moduli.end());
    for (const Int& f : fs)
        if (f == 0) throw std::invalid_argument("finiteAbelian: zero modulus");
    return abelian(fs);
}

GroupDescriptor GroupDescriptor::semidirectZ(std::vector<Int> nFactors, IntMatrix phi) {
    const int k = int(nFactors.size());
    if (phi.rows() != k || phi.cols() != k)
        throw std::invalid_argument("semidirectZ: phi must be k x k for k = rank of N");
    bool anyFree = false, anyTor = false;
    for (Int& f : nFactors) {
        f = abs(f);
        if (f == 0) anyFree = true;
        else if (f == 1) throw std::invalid_argument("semidirectZ: Z/1 factor");
        else anyTor = true;
    }
    if (anyFree && anyTor)
        throw std::invalid_argument("semidirectZ: N must be free abelian or finite abelian");

    GroupDescriptor g;
    g.kind = Kind::SemidirectZ;
    g.nFactors = std::move(nFactors);
    g.phi = std::move(phi);

    if (anyTor) {
        // invertibility of the induced endomorphism of the finite group:
        // [phi | diag(m)] must have trivial cokernel, and the inverse is
        // solved column by column
        IntMatrix D(k, k);
        for (int i = 0; i < k; ++i) D(i, i) = g.nFactors[i];
        DiophantineSolver solver(IntMatrix::hcat(g.phi, D));
        auto s = smithNormalForm(IntMatrix::hcat(g.phi, D));
        for (const Int& f : s.invariantFactors)
            if (f != 1) throw std::invalid_argument("semidirectZ: phi is not an automorphism of N");
        g.phiInv = IntMatrix(k, k);
        for (int j = 0; j < k; ++j) {
            std::vector<Int> e(k);
            e[j] = 1;
            auto x = solver.solve(e);
            if (!x) throw std::invalid_argument("semidirectZ: phi is not invertible");
            for (int i = 0; i < k; ++i) g.phiInv(i, j) = (*x)[i];
        }
    } else {
        g.phiInv = unimodularInverse(g.phi);  // throws unless |det| = 1
    }
    return g;
}

bool GroupDescriptor::operator==(const GroupDescriptor& o) const {
    return kind == o.kind && factors == o.factors && nFactors == o.nFactors &&
           (kind != Kind::SemidirectZ || phi == o.phi);
}

int GroupDescriptor::elemLen() const {
    return kind == Kind::Abelian ? int(factors.size()) : int(nFactors.size()) + 1;
}

bool GroupDescriptor::finite() const {
    if (kind == Kind::SemidirectZ) return false;
    for (const Int& f : factors)
        if (f == 0) return false;
    return true;
}

Int GroupDescriptor::order() const {
    if (!finite()) return 0;
    Int n = 1;
    for (const Int& f : factors) n *= f;
    return n;
}

int GroupDescriptor::hirschLength() const {
    if (kind == Kind::Abelian) {
        int h = 0;
        for (const Int& f : factors)
            if (f == 0) ++h;
        return h;
    }
    int h = 1;
    for (const Int& f : nFactors)
        if (f == 0) ++h;
    return h;
}

GroupDescriptor GroupDescriptor::nSubgroup() const {
    if (kind != Kind::SemidirectZ) throw std::invalid_argument("nSubgroup: not a semidirect product");
    return abelian(nFactors);
}

GroupElem GroupDescriptor::identity() const { return GroupElem(elemLen(), 0); }

GroupElem GroupDescriptor::reduceElem(GroupElem e) const {
    const std::vector<Int>& fs = kind == Kind::Abelian ? factors : nFactors;
    for (size_t i = 0; i < fs.size(); ++i) {
        if (fs[i] == 0) continue;
        long m = long(fs[i].get_si());
        e[i] %= m;
        if (e[i] < 0) e[i] += m;
    }
    return e;
}

std::vector<long> GroupDescriptor::phiPower(const std::vector<long>& n, long l) const {
    const IntMatrix& m = l >= 0 ? phi : phiInv;
    std::vector<long> v = n;
    for (long step = 0; step < std::abs(l); ++step) {
        std::vector<long> w(v.size(), 0);
        for (size_t i = 0; i < v.size(); ++i)
            for (size_t j = 0; j < v.size(); ++j) w[i] += long(m(int(i), int(j)).get_si()) * v[j];
        for (size_t i = 0; i < v.size(); ++i) {
            if (nFactors[i] == 0) continue;
            long mod = long(nFactors[i].get_si());
            w[i] %= mod;
            if (w[i] < 0) w[i] += mod;
        }
        v = std::move(w);
    }
    return v;
}

GroupElem GroupDescriptor::mul(const GroupElem& a, const GroupElem& b) const {
    if (kind == Kind::Abelian) {
        GroupElem c(a.size());
        for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
        return reduceElem(std::move(c));
    }
    const size_t k = nFactors.size();
    std::vector<long> nb(b.begin(), b.begin() + k);
    std::vector<long> shifted = phiPower(nb, a[k]);
    GroupElem c(k + 1);
    for (size_t i = 0; i < k; ++i) c[i] = a[i] + shifted[i];
    c[k] = a[k] + b[k];
    return reduceElem(std::move(c));
}

GroupElem GroupDescriptor::inverse(const GroupElem& a) const {
    if (kind == Kind::Abelian) {
        GroupElem c(a.size());
        for (size_t i = 0; i < a.size(); ++i) c[i] = -a[i];
        return reduceElem(std::move(c));
    }
    // (n, l)^-1 = (-phi^{-l}(n), -l)
    const size_t k = nFactors.size();
    std::vector<long> n(a.begin(), a.begin() + k);
    std::vector<long> ninv = phiPower(n, -a[k]);
    GroupElem c(k + 1);
    for (size_t i = 0; i < k; ++i) c[i] = -ninv[i];
    c[k] = -a[k];
    return reduceElem(std::move(c));
}

GroupElem GroupDescriptor::power(const GroupElem& a, long k) const {
    GroupElem r = identity();
    GroupElem base = k >= 0 ? a : inverse(a);
    for (long i = 0; i < std::abs(k); ++i) r = mul(r, base);
    return r;
}

bool GroupDescriptor::isIdentity(const GroupElem& e) const {
    for (long x : e)
        if (x != 0) return false;
    return true;
}

std::vector<GroupElem> GroupDescriptor::allElements() const {
    if (!finite()) throw std::invalid_argument("allElements: group is infinite");
    std::vector<GroupElem> out;
    GroupElem cur(factors.size(), 0);
    while (true) {
        out.push_back(cur);
        size_t i = 0;
        while (i < factors.size()) {
            if (++cur[i] < factors[i].get_si()) break;
            cur[i] = 0;
            ++i;
        }
        if (i == factors.size()) break;
    }
    return out;
}

std::string GroupDescriptor::str() const {
    std::ostringstream os;
    auto abelianStr = [](const std::vector<Int>& fs) {
        if (fs.empty()) return std::string("1");
        bool allFree = std::all_of(fs.begin(), fs.end(), [](const Int& f) { return f == 0; });
        std::ostringstream s;
        if (allFree && fs.size() > 1) {
            s << "Z^" << fs.size();
            return s.str();
        }
        for (size_t i = 0; i < fs.size(); ++i) {
            if (i) s << " x ";
            if (fs[i] == 0)
                s << "Z";
            else
                s << "Z/" << fs[i].get_str();
        }
        return s.str();
    };
    if (kind == Kind::Abelian) return abelianStr(factors);
    os << "sd(" << abelianStr(nFactors) << "," << phi.toString() << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// ring elements

RingElem RingElem::ofElem(GroupElem e, Int coeff) {
    RingElem r;
    if (coeff != 0) r.terms[std::move(e)] = std::move(coeff);
    return r;
}

void RingElem::addTerm(const GroupElem& e, const Int& c) {
    if (c == 0) return;
    auto it = terms.find(e);
    if (it == terms.end()) {
        terms[e] = c;
    } else {
        it->second += c;
        if (it->second == 0) terms.erase(it);
    }
}

RingElem ringAdd(const RingElem& a, const RingElem& b) {
    RingElem r = a;
    for (auto& [e, c] : b.terms) r.addTerm(e, c);
    return r;
}

RingElem ringScale(const Int& c, const RingElem& a) {
    RingElem r;
    if (c == 0) return r;
    for (auto& [e, x] : a.terms) r.terms[e] = c * x;
    return r;
}

RingElem ringMul(const GroupDescriptor& g, const RingElem& a, const RingElem& b) {
    RingElem r;
    for (auto& [ea, ca] : a.terms)
        for (auto& [eb, cb] : b.terms) r.addTerm(g.mul(ea, eb), ca * cb);
    return r;
}

Int augmentation(const RingElem& a) {
    Int s = 0;
    for (auto& [e, c] : a.terms) s += c;
    return s;
}

bool RingMatrix::isZero() const {
    for (const RingElem& x : e)
        if (!x.isZero()) return false;
    return true;
}

RingMatrix composeModuleMatrices(const GroupDescriptor& g, const RingMatrix& outer,
                                 const RingMatrix& inner) {
    if (outer.cols != inner.rows) throw std::invalid_argument("composeModuleMatrices: dim mismatch");
    RingMatrix m(outer.rows, inner.cols);
    for (int i = 0; i < outer.rows; ++i)
        for (int k = 0; k < outer.cols; ++k) {
            if (outer(i, k).isZero()) continue;
            for (int j = 0; j < inner.cols; ++j) {
                if (inner(k, j).isZero()) continue;
                // (T o S)(b_j) = sum_k S_kj . T(b_k): inner entry left
                m(i, j) = ringAdd(m(i, j), ringMul(g, inner(k, j), outer(i, k)));
            }
        }
    return m;
}

IntMatrix augmentationMatrix(const RingMatrix& a) {
    IntMatrix m(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) m(i, j) = augmentation(a(i, j));
    return m;
}

// ---------------------------------------------------------------------------
// homomorphisms

GroupHom GroupHom::identity(const GroupDescriptor& g) {
    if (g.kind != GroupDescriptor::Kind::Abelian)
        throw std::invalid_argument("GroupHom: abelian source required");
    GroupHom h{g, g, {}};
    for (size_t i = 0; i < g.factors.size(); ++i) {
        GroupElem e = g.identity();
        e[i] = 1;
        h.images.push_back(e);
    }
    return h;
}

GroupHom GroupHom::canonicalQuotient(const GroupDescriptor& src, const GroupDescriptor& dst) {
    if (src.factors.size() != dst.factors.size())
        throw std::invalid_argument("canonicalQuotient: factor counts differ");
    GroupHom h{src, dst, {}};
    for (size_t i = 0; i < src.factors.size(); ++i) {
        GroupElem e = dst.identity();
        e[i] = 1;
        h.images.push_back(dst.reduceElem(e));
    }
    h.validate();
    return h;
}

GroupHom GroupHom::fromMatrix(const GroupDescriptor& src, const GroupDescriptor& dst, const IntMatrix& m) {
    if (m.cols() != int(src.factors.size()) || m.rows() != dst.elemLen())
        throw std::invalid_argument("GroupHom::fromMatrix: shape mismatch");
    GroupHom h{src, dst, {}};
    for (int j = 0; j < m.cols(); ++j) {
        GroupElem e(dst.elemLen());
        for (int i = 0; i < m.rows(); ++i) e[i] = long(m(i, j).get_si());
        h.images.push_back(dst.reduceElem(e));
    }
    h.validate();
    return h;
}

GroupHom GroupHom::inclusionIntoSemidirect(const GroupDescriptor& g) {
    if (g.kind != GroupDescriptor::Kind::SemidirectZ)
        throw std::invalid_argument("inclusionIntoSemidirect: not a semidirect product");
    GroupHom h{g.nSubgroup(), g, {}};
    for (size_t i = 0; i < g.nFactors.size(); ++i) {
        GroupElem e = g.identity();
        e[i] = 1;
        h.images.push_back(e);
    }
    return h;
}

GroupElem GroupHom::apply(const GroupElem& e) const {
    GroupElem r = target.identity();
    for (size_t i = 0; i < images.size(); ++i) {
        if (e[i] == 0) continue;
        r = target.mul(r, target.power(images[i], e[i]));
    }
    return r;
}

RingElem GroupHom::applyRing(const RingElem& a) const {
    RingElem r;
    for (auto& [e, c] : a.terms) r.addTerm(apply(e), c);
    return r;
}

void GroupHom::validate() const {
    if (source.kind != GroupDescriptor::Kind::Abelian)
        throw std::invalid_argument("GroupHom: abelian source required");
    if (images.size() != source.factors.size())
        throw std::invalid_argument("GroupHom: one image per source generator required");
    for (size_t i = 0; i < images.size(); ++i) {
        if (source.factors[i] == 0) continue;
        GroupElem p = target.power(images[i], long(source.factors[i].get_si()));
        if (!target.isIdentity(p))
            throw std::invalid_argument("GroupHom: image order incompatible with source torsion");
    }
}

// ---------------------------------------------------------------------------
// resolutions

namespace {

FreeResolution trivialGroupResolution(const GroupDescriptor& g, int maxDeg) {
    FreeResolution r;
    r.group = g;
    r.maxDegree = maxDeg;
    r.ranks.assign(maxDeg + 1, 0);
    r.ranks[0] = 1;
    r.diffs.resize(maxDeg + 1);
    for (int k = 1; k <= maxDeg; ++k) r.diffs[k] = RingMatrix(r.ranks[k - 1], r.ranks[k]);
    return r;
}

// Rank-(1,1,...) complex for a single factor of g at coordinate pos:
// free factor: 0 -> ZG --(t-1)--> ZG; finite factor of order m:
// 2-periodic with alternating (t-1) and the norm 1 + t + ... + t^{m-1}.
FreeResolution factorResolution(const GroupDescriptor& g, size_t pos, int maxDeg) {
    FreeResolution r;
    r.group = g;
    r.maxDegree = maxDeg;
    bool isFree = g.factors[pos] == 0;
    r.ranks.assign(maxDeg + 1, 1);
    if (isFree)
        for (int k = 2; k <= maxDeg; ++k) r.ranks[k] = 0;
    r.diffs.resize(maxDeg + 1);

    GroupElem t = g.identity();
    t[pos] = 1;
    RingElem tMinus1 = ringAdd(RingElem::ofElem(t), RingElem::ofElem(g.identity(), -1));
    RingElem norm;
    if (!isFree) {
        long m = long(g.factors[pos].get_si());
        for (long i = 0; i < m; ++i) {
            GroupElem ti = g.identity();
            ti[pos] = i;
            norm = ringAdd(norm, RingElem::ofElem(g.reduceElem(ti)));
        }
    }
    for (int k = 1; k <= maxDeg; ++k) {
        RingMatrix d(r.ranks[k - 1], r.ranks[k]);
        if (r.ranks[k] == 1) d(0, 0) = (k % 2 == 1) ? tMinus1 : norm;
        r.diffs[k] = d;
    }
    return r;
}

FreeResolution tensorResolutions(const GroupDescriptor& g, const FreeResolution& a, const FreeResolution& b) {
    // Both inputs already live over the ring of g; generators of the
    // tensor at degree k are pairs (i-degree piece of a, (k-i)-degree
    // piece of b) ordered by ascending i then generator indices.
    FreeResolution r;
    r.group = g;
    r.maxDegree = std::min(a.maxDegree, b.maxDegree);
    int n = r.maxDegree;
    // index maps per degree
    std::vector<std::vector<std::tuple<int, int, int>>> basis(n + 1);  // (i, ai, bi)
    for (int k = 0; k <= n; ++k) {
        for (int i = 0; i <= k; ++i) {
            int j = k - i;
            if (i > a.maxDegree || j > b.maxDegree) continue;
            for (int ai = 0; ai < a.ranks[i]; ++ai)
                for (int bi = 0; bi < b.ranks[j]; ++bi) basis[k].emplace_back(i, ai, bi);
        }
        r.ranks.push_back(int(basis[k].size()));
    }
    auto indexOf = [&](int k, int i, int ai, int bi) {
        auto& v = basis[k];
        auto it = std::lower_bound(v.begin(), v.end(), std::tuple(i, ai, bi));
        return int(it - v.begin());
    };
    r.diffs.resize(n + 1);
    for (int k = 1; k <= n; ++k) {
        RingMatrix d(r.ranks[k - 1], r.ranks[k]);
        for (int col = 0; col < r.ranks[k]; ++col) {
            auto [i, ai, bi] = basis[k][col];
            int j = k - i;
            // d(x (x) y) = dx (x) y + (-1)^i x (x) dy
            if (i >= 1) {
                const RingMatrix& da = a.diffs[i];
                for (int ai2 = 0; ai2 < a.ranks[i - 1]; ++ai2) {
                    const RingElem& c = da(ai2, ai);
                    if (c.isZero()) continue;
                    int row = indexOf(k - 1, i - 1, ai2, bi);
                    d(row, col) = ringAdd(d(row, col), c);
                }
            }
            if (j >= 1) {
                const RingMatrix& db = b.diffs[j];
                Int sign = (i % 2 == 0) ? 1 : -1;
                for (int bi2 = 0; bi2 < b.ranks[j - 1]; ++bi2) {
                    const RingElem& c = db(bi2, bi);
                    if (c.isZero()) continue;
                    int row = indexOf(k - 1, i, ai, bi2);
                    d(row, col) = ringAdd(d(row, col), ringScale(sign, c));
                }
            }
        }
        r.diffs[k] = d;
    }
    return r;
}

void checkComplex(const FreeResolution& r) {
    for (int k = 2; k <= r.maxDegree; ++k) {
        if (r.ranks[k] == 0 || r.ranks[k - 2] == 0) continue;
        if (!composeModuleMatrices(r.group, r.diffs[k - 1], r.diffs[k]).isZero())
            throw std::logic_error("resolution differential does not square to zero");
    }
}

}  // namespace

FreeResolution freeResolution(const GroupDescriptor& g, int maxDeg) {
    if (g.kind != GroupDescriptor::Kind::Abelian)
        throw std::invalid_argument("freeResolution: use mappingConeResolution for semidirect products");
    if (maxDeg < 0 || maxDeg > kMaxResolutionDegree)
        throw std::invalid_argument("freeResolution: degree out of range (max 6)");
    if (g.factors.empty()) return trivialGroupResolution(g, maxDeg);
    FreeResolution acc = factorResolution(g, 0, maxDeg);
    for (size_t pos = 1; pos < g.factors.size(); ++pos)
        acc = tensorResolutions(g, acc, factorResolution(g, pos, maxDeg));
    checkComplex(acc);
    return acc;
}

FreeResolution barTruncation(const GroupDescriptor& g, int maxDeg) {
    if (!g.finite()) throw std::invalid_argument("barTruncation: finite groups only");
    if (g.order() > 64) throw std::invalid_argument("barTruncation: group order above the desk-scale cap 64");
    if (maxDeg < 0 || maxDeg > 4) throw std::invalid_argument("barTruncation: degree cap is 4");

    std::vector<GroupElem> nonId;
    for (const GroupElem& e : g.allElements())
        if (!g.isIdentity(e)) nonId.push_back(e);
    const int q = int(nonId.size());

    // tuple enumeration, lexicographic in the nonId order
    std::vector<std::vector<std::vector<int>>> tuples(maxDeg + 1);
    tuples[0] = {{}};
    for (int k = 1; k <= maxDeg; ++k)
        for (auto& t : tuples[k - 1])
            for (int i = 0; i < q; ++i) {
                auto t2 = t;
                t2.push_back(i);
                tuples[k].push_back(t2);
            }
    std::map<std::vector<int>, int> index[5];
    for (int k = 0; k <= maxDeg; ++k)
        for (size_t i = 0; i < tuples[k].size(); ++i) index[k][tuples[k][i]] = int(i);

    FreeResolution r;
    r.group = g;
    r.maxDegree = maxDeg;
    for (int k = 0; k <= maxDeg; ++k) r.ranks.push_back(int(tuples[k].size()));
    r.diffs.resize(maxDeg + 1);

    std::map<GroupElem, int> elemIdx;
    for (int i = 0; i < q; ++i) elemIdx[nonId[i]] = i;

    for (int k = 1; k <= maxDeg; ++k) {
        RingMatrix d(r.ranks[k - 1], r.ranks[k]);
        for (int col = 0; col < r.ranks[k]; ++col) {
            const auto& t = tuples[k][col];
            // g1 . [g2|...|gk]
            {
                std::vector<int> rest(t.begin() + 1, t.end());
                d(index[k - 1][rest], col) =
                    ringAdd(d(index[k - 1][rest], col), RingElem::ofElem(nonId[t[0]]));
            }
            // interior merges, dropped when the product is the identity
            for (int i = 1; i < k; ++i) {
                GroupElem prod = g.mul(nonId[t[i - 1]], nonId[t[i]]);
                if (g.isIdentity(prod)) continue;
                std::vector<int> merged;
                for (int s = 0; s < k; ++s) {
                    if (s == i - 1) merged.push_back(elemIdx.at(prod));
                    else if (s != i) merged.push_back(t[s]);
                }
                Int sign = (i % 2 == 0) ? 1 : -1;
                d(index[k - 1][merged], col) =
                    ringAdd(d(index[k - 1][merged], col), RingElem::ofElem(g.identity(), sign));
            }
            // drop gk
            {
                std::vector<int> head(t.begin(), t.end() - 1);
                Int sign = (k % 2 == 0) ? 1 : -1;
                d(index[k - 1][head], col) =
                    ringAdd(d(index[k - 1][head], col), RingElem::ofElem(g.identity(), sign));
            }
        }
        r.diffs[k] = d;
    }
    checkComplex(r);
    return r;
}

std::vector<std::vector<GroupElem>> barTupleBasis(const GroupDescriptor& g, int k) {
    std::vector<GroupElem> nonId;
    for (const GroupElem& e : g.allElements())
        if (!g.isIdentity(e)) nonId.push_back(e);
    std::vector<std::vector<GroupElem>> tuples{{}};
    for (int d = 1; d <= k; ++d) {
        std::vector<std::vector<GroupElem>> next;
        for (auto& t : tuples)
            for (const GroupElem& e : nonId) {
                auto t2 = t;
                t2.push_back(e);
                next.push_back(std::move(t2));
            }
        tuples = std::move(next);
    }
    return tuples;
}

// ---------------------------------------------------------------------------
// chain lifting through finitely supported windows

namespace {

struct Window {
    const GroupDescriptor* g;
    std::vector<GroupElem> elems;
    std::map<GroupElem, int> idx;

    int size() const { return int(elems.size()); }
    int find(const GroupElem& e) const {
        auto it = idx.find(e);
        return it == idx.end() ? -1 : it->second;
    }
};

std::vector<size_t> freeCoords(const GroupDescriptor& g) {
    std::vector<size_t> fc;
    const std::vector<Int>& fs = g.kind == GroupDescriptor::Kind::Abelian ? g.factors : g.nFactors;
    for (size_t i = 0; i < fs.size(); ++i)
        if (fs[i] == 0) fc.push_back(i);
    if (g.kind == GroupDescriptor::Kind::SemidirectZ) fc.push_back(g.nFactors.size());
    return fc;
}

Window windowFromBox(const GroupDescriptor& g, const std::vector<long>& lo, const std::vector<long>& hi) {
    const std::vector<Int>& fs = g.kind == GroupDescriptor::Kind::Abelian ? g.factors : g.nFactors;
    const int len = g.elemLen();
    std::vector<long> lo2(len, 0), hi2(len, 0);
    std::vector<size_t> fc = freeCoords(g);
    for (size_t t = 0; t < fc.size(); ++t) {
        lo2[fc[t]] = lo[t];
        hi2[fc[t]] = hi[t];
    }
    for (int i = 0; i < len; ++i) {
        if (size_t(i) < fs.size() && fs[i] != 0) {
            lo2[i] = 0;
            hi2[i] = long(fs[i].get_si()) - 1;
        }
    }
    Window w;
    w.g = &g;
    GroupElem cur(lo2.begin(), lo2.end());
    while (true) {
        w.elems.push_back(cur);
        int i = 0;
        while (i < len) {
            if (++cur[i] <= hi2[i]) break;
            cur[i] = lo2[i];
            ++i;
        }
        if (i == len) break;
    }
    for (size_t i = 0; i < w.elems.size(); ++i) w.idx[w.elems[i]] = int(i);
    return w;
}

std::vector<GroupElem> supportOf(const RingMatrix& m) {
    std::set<GroupElem> s;
    for (const RingElem& x : m.e)
        for (auto& [e, c] : x.terms) s.insert(e);
    return {s.begin(), s.end()};
}

// bounding box of the free coordinates of a set of elements
void boxOf(const GroupDescriptor& g, const std::vector<GroupElem>& es, std::vector<long>& lo,
           std::vector<long>& hi) {
    std::vector<size_t> fc = freeCoords(g);
    lo.assign(fc.size(), 0);
    hi.assign(fc.size(), 0);
    for (const GroupElem& e : es)
        for (size_t t = 0; t < fc.size(); ++t) {
            lo[t] = std::min(lo[t], e[fc[t]]);
            hi[t] = std::max(hi[t], e[fc[t]]);
        }
}

// Flattens d x = c over a window: unknowns (gen, colWindow element),
// equations (gen, rowWindow element).
IntMatrix flattenOperator(const GroupDescriptor& g, const RingMatrix& d, const Window& colW,
                          const Window& rowW) {
    IntMatrix m(d.rows * rowW.size(), d.cols * colW.size());
    for (int j = 0; j < d.cols; ++j)
        for (int i = 0; i < d.rows; ++i) {
            const RingElem& entry = d(i, j);
            for (auto& [ge, coeff] : entry.terms)
                for (int w = 0; w < colW.size(); ++w) {
                    GroupElem u = g.mul(colW.elems[w], ge);
                    int r = rowW.find(u);
                    if (r < 0) throw std::logic_error("flattenOperator: row window does not cover image");
                    m(i * rowW.size() + r, j * colW.size() + w) += coeff;
                }
        }
    return m;
}

std::vector<Int> flattenChains(const RingMatrix& c, int col, const Window& rowW) {
    std::vector<Int> v(size_t(c.rows) * rowW.size());
    for (int i = 0; i < c.rows; ++i)
        for (auto& [ge, coeff] : c(i, col).terms) {
            int r = rowW.find(ge);
            if (r < 0) throw std::logic_error("flattenChains: window does not cover chain support");
            v[size_t(i) * rowW.size() + r] = coeff;
        }
    return v;
}

}  // namespace

ChainMap comparisonChainMap(const FreeResolution& p, const FreeResolution& q, const GroupHom& f,
                            int maxDeg) {
    if (!(f.source == p.group) || !(f.target == q.group))
        throw std::invalid_argument("comparisonChainMap: hom endpoints do not match the resolutions");
    if (maxDeg < 0) maxDeg = std::min(p.maxDegree, q.maxDegree);
    const GroupDescriptor& h = q.group;

    std::vector<RingMatrix> comps(maxDeg + 1);
    comps[0] = RingMatrix(q.ranks[0], p.ranks[0]);
    for (int j = 0; j < p.ranks[0]; ++j) comps[0](0, j) = RingElem::unit(h);

    for (int k = 1; k <= maxDeg; ++k) {
        // right-hand sides: Phi_{k-1} o f(d_k)
        RingMatrix fd(p.ranks[k - 1], p.ranks[k]);
        for (int i = 0; i < p.ranks[k - 1]; ++i)
            for (int j = 0; j < p.ranks[k]; ++j) fd(i, j) = f.applyRing(p.diffs[k](i, j));
        RingMatrix rhs = composeModuleMatrices(h, comps[k - 1], fd);

        if (q.ranks[k] == 0) {
            if (!rhs.isZero())
                throw std::logic_error("comparisonChainMap: nothing to lift into at degree " +
                                       std::to_string(k));
            comps[k] = RingMatrix(0, p.ranks[k]);
            continue;
        }

        std::vector<GroupElem> suppC = supportOf(rhs), suppD = supportOf(q.diffs[k]);
        if (suppC.empty()) suppC.push_back(h.identity());
        if (suppD.empty()) suppD.push_back(h.identity());
        // candidate unknown supports: u g^{-1} over entry elements g, rhs elements u
        std::vector<GroupElem> cand;
        for (const GroupElem& ge : suppD)
            for (const GroupElem& u : suppC) cand.push_back(h.mul(u, h.inverse(ge)));

        RingMatrix comp(q.ranks[k], p.ranks[k]);
        for (int margin = 1; margin <= 4; ++margin) {
            std::vector<long> lo, hi;
            boxOf(h, cand, lo, hi);
            for (size_t t = 0; t < lo.size(); ++t) {
                lo[t] -= margin;
                hi[t] += margin;
            }
            Window colW = windowFromBox(h, lo, hi);
            // rows must cover supp(d)*colW and supp(rhs)
            std::vector<GroupElem> rowEls;
            for (const GroupElem& ge : suppD)
                for (const GroupElem& w : colW.elems) rowEls.push_back(h.mul(w, ge));
            for (const GroupElem& u : suppC) rowEls.push_back(u);
            std::vector<long> rlo, rhi;
            boxOf(h, rowEls, rlo, rhi);
            Window rowW = windowFromBox(h, rlo, rhi);

            DiophantineSolver solver(flattenOperator(h, q.diffs[k], colW, rowW));
            bool ok = true;
            for (int j = 0; j < p.ranks[k] && ok; ++j) {
                auto x = solver.solve(flattenChains(rhs, j, rowW));
                if (!x) {
                    ok = false;
                    break;
                }
                for (int i = 0; i < q.ranks[k]; ++i) {
                    RingElem entry;
                    for (int w = 0; w < colW.size(); ++w)
                        entry.addTerm(colW.elems[w], (*x)[size_t(i) * colW.size() + w]);
                    comp(i, j) = entry;
                }
            }
            if (ok) {
                comps[k] = comp;
                break;
            }
            if (margin == 4)
                throw std::runtime_error(
                    "comparisonChainMap: lifting window exhausted; this indicates a bug since the "
                    "lifting problem is solvable by freeness");
        }
    }
    return ChainMap{f, std::move(comps)};
}

FreeResolution mappingConeResolution(const GroupDescriptor& g, int maxDeg) {
    if (g.kind != GroupDescriptor::Kind::SemidirectZ)
        throw std::invalid_argument("mappingConeResolution: SemidirectZ descriptor required");
    if (maxDeg < 0 || maxDeg > kMaxResolutionDegree)
        throw std::invalid_argument("mappingConeResolution: degree out of range (max 6)");

    GroupDescriptor n = g.nSubgroup();
    FreeResolution p = freeResolution(n, maxDeg);

    // phi^{-1}-semilinear chain self map of the N-resolution
    GroupHom phiInvHom = GroupHom::fromMatrix(n, n, g.phiInv);
    ChainMap psi = comparisonChainMap(p, p, phiInvHom, maxDeg);

    // induced complex over ZG, with R(xi^l (x) p) = xi^{l+1} (x) psi(p):
    // the matrix entry is phi(psi_entry) * xi
    const size_t nf = g.nFactors.size();
    auto liftToG = [&](const RingElem& x, bool twist) {
        RingElem r;
        for (auto& [e, c] : x.terms) {
            GroupElem ge(nf + 1, 0);
            std::vector<long> nPart(e.begin(), e.end());
            if (twist) nPart = g.phiPower(nPart, 1);
            for (size_t i = 0; i < nf; ++i) ge[i] = nPart[i];
            ge[nf] = twist ? 1 : 0;
            r.addTerm(g.reduceElem(ge), c);
        }
        return r;
    };

    FreeResolution r;
    r.group = g;
    r.maxDegree = maxDeg;
    r.ranks.resize(maxDeg + 1);
    for (int k = 0; k <= maxDeg; ++k)
        r.ranks[k] = p.ranks[k] + (k >= 1 ? p.ranks[k - 1] : 0);
    r.diffs.resize(maxDeg + 1);
    for (int k = 1; k <= maxDeg; ++k) {
        RingMatrix d(r.ranks[k - 1], r.ranks[k]);
        // top-left block: induced d_P
        for (int i = 0; i < p.ranks[k - 1]; ++i)
            for (int j = 0; j < p.ranks[k]; ++j) d(i, j) = liftToG(p.diffs[k](i, j), false);
        // top-right block: S_{k-1} = R_{k-1} - 1
        for (int i = 0; i < p.ranks[k - 1]; ++i)
            for (int j2 = 0; j2 < p.ranks[k - 1]; ++j2) {
                RingElem s = liftToG(psi.components[k - 1](i, j2), true);
                if (i == j2) s = ringAdd(s, RingElem::ofElem(g.identity(), -1));
                d(i, p.ranks[k] + j2) = s;
            }
        // bottom-right block: -d_{P,k-1}
        if (k >= 2)
            for (int i = 0; i < p.ranks[k - 2]; ++i)
                for (int j2 = 0; j2 < p.ranks[k - 1]; ++j2)
                    d(p.ranks[k - 1] + i, p.ranks[k] + j2) =
                        ringScale(Int(-1), liftToG(p.diffs[k - 1](i, j2), false));
        r.diffs[k] = d;
    }
    checkComplex(r);
    return r;
}

FreeResolution resolutionFor(const GroupDescriptor& g, int maxDeg) {
    return g.kind == GroupDescriptor::Kind::Abelian ? freeResolution(g, maxDeg)
                                                    : mappingConeResolution(g, maxDeg);
}

// ---------------------------------------------------------------------------
// bar comparison via the contracting homotopy

std::vector<std::vector<BarChain>> barComparison(const FreeResolution& c, int maxDeg) {
    const GroupDescriptor& g = c.group;
    std::vector<std::vector<BarChain>> phi(maxDeg + 1);

    phi[0].resize(c.ranks[0]);
    for (int j = 0; j < c.ranks[0]; ++j)
        phi[0][j].terms[{g.identity()}] = 1;  // key [g0] with empty tuple part

    for (int k = 1; k <= maxDeg; ++k) {
        phi[k].resize(c.ranks[k]);
        for (int j = 0; j < c.ranks[k]; ++j) {
            BarChain out;
            // s(Phi_{k-1}(d e_j)); s(g0 [g1|..]) = [g0|g1|..], zero if g0 = e
            for (int i = 0; i < c.ranks[k - 1]; ++i) {
                const RingElem& entry = c.diffs[k](i, j);
                for (auto& [ge, coeff] : entry.terms)
                    for (auto& [key, c2] : phi[k - 1][i].terms) {
                        GroupElem g0 = g.mul(ge, key[0]);
                        if (g.isIdentity(g0)) continue;
                        std::vector<GroupElem> nkey;
                        nkey.push_back(g.identity());
                        nkey.push_back(g0);
                        for (size_t t = 1; t < key.size(); ++t) nkey.push_back(key[t]);
                        Int add = coeff * c2;
                        auto it = out.terms.find(nkey);
                        if (it == out.terms.end())
                            out.terms[nkey] = add;
                        else {
                            it->second += add;
                            if (it->second == 0) out.terms.erase(it);
                        }
                    }
            }
            phi[k][j] = std::move(out);
        }
    }
    return phi;
}

// ---------------------------------------------------------------------------
// exactness

bool resolutionExact(const FreeResolution& r) {
    for (int k = 2; k <= r.maxDegree; ++k)
        if (!composeModuleMatrices(r.group, r.diffs[k - 1], r.diffs[k]).isZero()) return false;

    if (!r.group.finite()) {
        // augmented coinvariants: H_0(G, Z) must be Z
        if (r.maxDegree >= 1) {
            auto s = smithNormalForm(r.coinvariantsDiff(1));
            for (const Int& f : s.invariantFactors)
                if (f != 0 && abs(f) != 1) return false;
        }
        return true;
    }

    Window full = windowFromBox(r.group, {}, {});
    // degree 0: ker(augmentation) = im(d_1)
    std::vector<IntMatrix> flat(r.maxDegree + 1);
    for (int k = 1; k <= r.maxDegree; ++k) flat[k] = flattenOperator(r.group, r.diffs[k], full, full);
    {
        IntMatrix aug(1, full.size());
        for (int w = 0; w < full.size(); ++w) aug(0, w) = 1;
        DiophantineSolver d1(flat[1]);
        for (auto& kvec : integerKernelBasis(aug))
            if (!d1.solve(kvec)) return false;
    }
    for (int k = 1; k < r.maxDegree; ++k) {
        DiophantineSolver next(flat[k + 1]);
        for (auto& kvec : integerKernelBasis(flat[k]))
            if (!next.solve(kvec)) return false;
    }
    return true;
}

IntMatrix FreeResolution::coinvariantsDiff(int k) const { return augmentationMatrix(diffs[k]); }

}  // namespace kobst
