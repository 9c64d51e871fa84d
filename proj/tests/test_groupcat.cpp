#include "kobst/groupcat.hpp"

#include <random>

#include "doctest.h"

using namespace kobst;

namespace {

// Abelianization oracle for N x| Z: G^ab = N/(phi - 1)N (+) Z,
// computed by SNF of (phi - 1) stacked over the torsion relations.
FgAbelianGroup abelianizationOracle(const GroupDescriptor& g) {
    REQUIRE(g.kind == GroupDescriptor::Kind::SemidirectZ);
    int k = int(g.nFactors.size());
    IntMatrix rel = g.phi - IntMatrix::identity(k);
    IntMatrix tor(k, k);
    for (int i = 0; i < k; ++i) tor(i, i) = g.nFactors[i];
    auto s = smithNormalForm(IntMatrix::hcat(rel, tor));
    std::vector<Int> orders(s.invariantFactors);
    while (int(orders.size()) < k) orders.push_back(0);
    orders.push_back(0);  // the Z layer
    return FgAbelianGroup::fromCyclicFactors(orders);
}

// H_1 = ker(eps d1) / im(eps d2) from a resolution, canonical form.
FgAbelianGroup homologyDegree1(const FreeResolution& r) {
    IntMatrix d1 = r.coinvariantsDiff(1), d2 = r.coinvariantsDiff(2);
    auto kernel = integerKernelBasis(d1);
    IntMatrix K(d1.cols(), int(kernel.size()));
    for (size_t j = 0; j < kernel.size(); ++j) K.setColumn(int(j), kernel[j]);
    DiophantineSolver ks(K);
    IntMatrix rel(int(kernel.size()), d2.cols());
    for (int j = 0; j < d2.cols(); ++j) {
        auto x = ks.solve(d2.column(j));
        REQUIRE(x.has_value());
        rel.setColumn(j, *x);
    }
    auto s = smithNormalForm(rel);
    std::vector<Int> orders(s.invariantFactors);
    while (int(orders.size()) < int(kernel.size())) orders.push_back(0);
    return FgAbelianGroup::fromCyclicFactors(orders);
}

}  // namespace

TEST_CASE("group element arithmetic in semidirect products") {
    // Klein bottle group Z x|_{-1} Z
    auto kb = GroupDescriptor::semidirectZ({0}, IntMatrix::fromRows({{-1}}));
    GroupElem a{1, 0}, t{0, 1};
    CHECK(kb.mul(t, a) == GroupElem{-1, 1});  // t a = a^{-1} t
    CHECK(kb.mul(a, t) == GroupElem{1, 1});
    CHECK(kb.isIdentity(kb.mul(kb.mul(t, a), kb.inverse(kb.mul(t, a)))));

    auto heis = GroupDescriptor::semidirectZ({0, 0}, IntMatrix::fromRows({{1, 1}, {0, 1}}));
    GroupElem x{1, 0, 0}, y{0, 1, 0}, xi{0, 0, 1};
    // xi y xi^{-1} = phi(y) = (1,1)
    GroupElem conj = heis.mul(heis.mul(xi, y), heis.inverse(xi));
    CHECK(conj == GroupElem{1, 1, 0});
    CHECK(heis.mul(x, y) == heis.mul(y, x));
    CHECK(heis.hirschLength() == 3);
}

TEST_CASE("semidirectZ validates automorphisms") {
    CHECK_THROWS(GroupDescriptor::semidirectZ({0, 0}, IntMatrix::fromRows({{2, 0}, {0, 1}})));
    // x -> 2x is invertible mod 5
    auto g = GroupDescriptor::semidirectZ({5}, IntMatrix::fromRows({{2}}));
    CHECK(g.phiPower({1}, 1) == std::vector<long>{2});
    CHECK(g.phiPower({2}, -1) == std::vector<long>{1});
    CHECK_THROWS(GroupDescriptor::semidirectZ({4}, IntMatrix::fromRows({{2}})));
}

TEST_CASE("freeResolution ranks") {
    auto z2free = freeResolution(GroupDescriptor::freeAbelian(2), 2);
    CHECK(z2free.ranks == std::vector<int>{1, 2, 1});

    auto zm = freeResolution(GroupDescriptor::finiteAbelian({4}), 3);
    CHECK(zm.ranks == std::vector<int>{1, 1, 1, 1});
    // alternating t - 1 and the norm element
    CHECK(augmentation(zm.diffs[1](0, 0)) == 0);
    CHECK(augmentation(zm.diffs[2](0, 0)) == 4);
    CHECK(augmentation(zm.diffs[3](0, 0)) == 0);

    auto prod = freeResolution(GroupDescriptor::abelian({Int(2), Int(0)}), 3);
    CHECK(prod.ranks[2] == 2);  // convolution of (1,1,1,1) and (1,1)

    auto z4free = freeResolution(GroupDescriptor::freeAbelian(4), 4);
    CHECK(z4free.ranks == std::vector<int>{1, 4, 6, 4, 1});

    CHECK_THROWS(freeResolution(GroupDescriptor::freeAbelian(2), 7));
}

TEST_CASE("resolution exactness for small finite groups") {
    CHECK(resolutionExact(freeResolution(GroupDescriptor::finiteAbelian({4}), 4)));
    CHECK(resolutionExact(freeResolution(GroupDescriptor::finiteAbelian({2, 2}), 3)));
    CHECK(resolutionExact(barTruncation(GroupDescriptor::finiteAbelian({3}), 3)));
    CHECK(resolutionExact(freeResolution(GroupDescriptor::freeAbelian(2), 3)));
}

TEST_CASE("barTruncation ranks and guards") {
    auto b2 = barTruncation(GroupDescriptor::finiteAbelian({2}), 4);
    CHECK(b2.ranks == std::vector<int>{1, 1, 1, 1, 1});
    auto b3 = barTruncation(GroupDescriptor::finiteAbelian({3}), 4);
    CHECK(b3.ranks == std::vector<int>{1, 2, 4, 8, 16});
    CHECK_THROWS(barTruncation(GroupDescriptor::freeAbelian(1), 2));
    CHECK_THROWS(barTruncation(GroupDescriptor::finiteAbelian({5, 5, 3}), 2));
}

TEST_CASE("mappingConeResolution ranks and homology") {
    // Z x|_id Z = Z^2: compare with the Koszul resolution's homology
    auto z2 = GroupDescriptor::semidirectZ({0}, IntMatrix::fromRows({{1}}));
    auto cone = mappingConeResolution(z2, 2);
    CHECK(cone.ranks == std::vector<int>{1, 2, 1});
    CHECK(homologyDegree1(cone) == FgAbelianGroup::free(2));

    // Klein bottle: H_1 = Z (+) Z/2 (abelianization oracle)
    auto kb = GroupDescriptor::semidirectZ({0}, IntMatrix::fromRows({{-1}}));
    auto kbCone = mappingConeResolution(kb, 3);
    CHECK(abelianizationOracle(kb) == FgAbelianGroup{1, {2}});
    CHECK(homologyDegree1(kbCone) == FgAbelianGroup{1, {2}});

    // discrete Heisenberg: H_1 = Z^2
    auto heis = GroupDescriptor::semidirectZ({0, 0}, IntMatrix::fromRows({{1, 1}, {0, 1}}));
    auto hc = mappingConeResolution(heis, 3);
    CHECK(hc.ranks == std::vector<int>{1, 3, 3, 1});
    CHECK(abelianizationOracle(heis) == FgAbelianGroup::free(2));
    CHECK(homologyDegree1(hc) == FgAbelianGroup::free(2));

    // finite N with a nontrivial twist
    auto g53 = GroupDescriptor::semidirectZ({5}, IntMatrix::fromRows({{2}}));
    auto g53cone = mappingConeResolution(g53, 3);
    CHECK(homologyDegree1(g53cone) == abelianizationOracle(g53));
}

TEST_CASE("comparisonChainMap identity and quotient") {
    auto z = GroupDescriptor::freeAbelian(1);
    auto zres = freeResolution(z, 2);
    auto idMap = comparisonChainMap(zres, zres, GroupHom::identity(z));
    CHECK(augmentationMatrix(idMap.components[1]) == IntMatrix::identity(1));

    // f: Z -> Z/m quotient; degree-1 component sends generator to generator
    auto zm = GroupDescriptor::finiteAbelian({4});
    auto zmres = freeResolution(zm, 2);
    auto q = comparisonChainMap(zres, zmres, GroupHom::canonicalQuotient(z, zm));
    CHECK(abs(augmentationMatrix(q.components[1])(0, 0)) == 1);
}

TEST_CASE("chain map commutes with differentials") {
    auto z3 = GroupDescriptor::freeAbelian(3);
    auto c3 = GroupDescriptor::finiteAbelian({2, 2, 2});
    auto p = freeResolution(z3, 3);
    auto q = freeResolution(c3, 3);
    GroupHom f = GroupHom::canonicalQuotient(z3, c3);
    auto cm = comparisonChainMap(p, q, f, 3);
    for (int k = 1; k <= 3; ++k) {
        RingMatrix lhs = composeModuleMatrices(c3, q.diffs[k], cm.components[k]);
        RingMatrix fd(p.ranks[k - 1], p.ranks[k]);
        for (int i = 0; i < p.ranks[k - 1]; ++i)
            for (int j = 0; j < p.ranks[k]; ++j) fd(i, j) = f.applyRing(p.diffs[k](i, j));
        RingMatrix rhs = composeModuleMatrices(c3, cm.components[k - 1], fd);
        for (int i = 0; i < lhs.rows; ++i)
            for (int j = 0; j < lhs.cols; ++j) CHECK(lhs(i, j) == rhs(i, j));
    }
}

TEST_CASE("induced map on top homology of Z^2 is multiplication by det") {
    std::mt19937 rng(17);
    auto z2 = GroupDescriptor::freeAbelian(2);
    auto res = freeResolution(z2, 2);
    for (int iter = 0; iter < 5; ++iter) {
        // random unimodular 2x2 via elementary products
        IntMatrix m = IntMatrix::identity(2);
        for (int s = 0; s < 6; ++s) {
            long c = long(rng() % 5) - 2;
            if (rng() % 2) {
                m(0, 0) += c * m(1, 0);
                m(0, 1) += c * m(1, 1);
            } else {
                m(1, 0) += c * m(0, 0);
                m(1, 1) += c * m(0, 1);
            }
            if (rng() % 3 == 0) {
                std::swap(m(0, 0), m(1, 0));
                std::swap(m(0, 1), m(1, 1));
            }
        }
        Int det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        REQUIRE(abs(det) == 1);
        GroupHom f = GroupHom::fromMatrix(z2, z2, m);
        auto cm = comparisonChainMap(res, res, f, 2);
        // H_2(Z^2) = Z on the single degree-2 generator; the induced map
        // on coinvariants is multiplication by det(f)
        IntMatrix top = augmentationMatrix(cm.components[2]);
        CHECK(top(0, 0) == det);
    }
}

TEST_CASE("barComparison gives a chain map into the bar resolution") {
    auto g = GroupDescriptor::finiteAbelian({2, 2});
    auto res = freeResolution(g, 3);
    auto phi = barComparison(res, 3);
    // check d_bar(phi_k(e_j)) = phi_{k-1}(d_res e_j) for k = 1..3 by
    // expanding the bar differential on each simplex
    auto barBoundary = [&](const BarChain& ch, int k) {
        BarChain out;
        auto add = [&](std::vector<GroupElem> key, Int c) {
            if (c == 0) return;
            // normalized: drop simplices with an identity entry
            for (size_t t = 1; t < key.size(); ++t)
                if (g.isIdentity(key[t])) return;
            auto it = out.terms.find(key);
            if (it == out.terms.end())
                out.terms[key] = c;
            else {
                it->second += c;
                if (it->second == 0) out.terms.erase(it);
            }
        };
        for (auto& [key, c] : ch.terms) {
            // key = [g0, g1, ..., gk]
            {
                std::vector<GroupElem> k0;
                k0.push_back(g.mul(key[0], key[1]));
                for (int t = 2; t <= k; ++t) k0.push_back(key[t]);
                add(k0, c);
            }
            for (int i = 1; i < k; ++i) {
                std::vector<GroupElem> ki;
                ki.push_back(key[0]);
                for (int t = 1; t <= k; ++t) {
                    if (t == i) {
                        ki.push_back(g.mul(key[t], key[t + 1]));
                        ++t;
                    } else
                        ki.push_back(key[t]);
                }
                add(ki, (i % 2 == 0) ? c : -c);
            }
            {
                std::vector<GroupElem> kk(key.begin(), key.end() - 1);
                add(kk, (k % 2 == 0) ? c : -c);
            }
        }
        return out;
    };
    for (int k = 1; k <= 3; ++k)
        for (int j = 0; j < res.ranks[k]; ++j) {
            BarChain lhs = barBoundary(phi[k][j], k);
            // rhs: phi_{k-1} applied to the resolution differential column
            BarChain rhs;
            for (int i = 0; i < res.ranks[k - 1]; ++i)
                for (auto& [ge, c] : res.diffs[k](i, j).terms)
                    for (auto& [key, c2] : phi[k - 1][i].terms) {
                        std::vector<GroupElem> nk = key;
                        nk[0] = g.mul(ge, nk[0]);
                        auto it = rhs.terms.find(nk);
                        Int add = c * c2;
                        if (it == rhs.terms.end())
                            rhs.terms[nk] = add;
                        else {
                            it->second += add;
                            if (it->second == 0) rhs.terms.erase(it);
                        }
                    }
            CHECK(lhs.terms == rhs.terms);
        }
}
