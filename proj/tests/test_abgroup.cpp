#include "kobst/abgroup.hpp"

#include <random>

#include "doctest.h"

using namespace kobst;

namespace {

// Oracle for cyclic tensor products: Z/a (x) Z/b is generated by 1(x)1
// with relations a.x = 0 and b.x = 0, so it is the cokernel of [[a],[b]].
Int cyclicTensorOrderOracle(long a, long b) {
    auto s = smithNormalForm(IntMatrix::fromRows({{a}, {b}}));
    return s.invariantFactors.empty() ? Int(0) : s.invariantFactors[0];
}

const Atom PR2 = *Atom::pruefer({2});
const Atom PR23 = *Atom::pruefer({2, 3});

}  // namespace

TEST_CASE("RatSubgroup valuation arithmetic") {
    auto Z = RatSubgroup::integers();
    auto Q = RatSubgroup::rationals();
    auto Z2 = RatSubgroup::frac(Rat(1), PrimeSet::of({2}));   // Z[1/2]
    auto halfZ = RatSubgroup::frac(Rat(1, 2), PrimeSet::none());

    CHECK(Q.containsGroup(Z));
    CHECK(!Z.containsGroup(Q));
    CHECK(Z2.containsGroup(Z));
    CHECK(Z2.containsElement(Rat(3, 8)));
    CHECK(!Z2.containsElement(Rat(1, 3)));
    CHECK((Z2.intersect(halfZ) == halfZ));
    CHECK((Z.sum(Z2) == Z2));
    CHECK((halfZ.scaled(Rat(2)) == Z));

    auto Zat2 = RatSubgroup::frac(Rat(1), PrimeSet::allExcept({2}));  // Z_(2)
    CHECK(Zat2.containsElement(Rat(5, 3)));
    CHECK(!Zat2.containsElement(Rat(1, 2)));
    CHECK(Zat2.containsGroup(RatSubgroup::frac(Rat(1), PrimeSet::of({3, 5}))));
}

TEST_CASE("atom coordinate reduction") {
    CHECK(Atom::zMod(6).reduce(Rat(-1)) == Rat(5));
    CHECK(Atom::zMod(5).reduce(Rat(1, 2)) == Rat(3));  // 2^{-1} = 3 mod 5
    CHECK_THROWS(Atom::zMod(4).reduce(Rat(1, 2)));
    CHECK(Atom::qModZ().reduce(Rat(7, 3)) == Rat(1, 3));
    CHECK(PR2.reduce(Rat(9, 8)) == Rat(1, 8));
    CHECK_THROWS(PR2.reduce(Rat(1, 3)));
    // Q/Z[2]: the 2-part of the denominator is already in Z[2]
    CHECK(Atom::qModLoc({2}).reduce(Rat(1, 2)) == Rat(0));
    CHECK(Atom::qModLoc({2}).reduce(Rat(1, 6)) == Rat(2, 3));
}

TEST_CASE("homInto closed forms") {
    FgAbelianGroup z6{0, {6}};
    CHECK(homInto(z6, AdmissibleModule::single(Atom::qModZ())) ==
          AdmissibleModule::single(Atom::zMod(6)));
    // independent check: the 6-torsion of Q/Z is {k/6}
    for (int k = 0; k < 6; ++k) CHECK(Atom::qModZ().reduce(Rat(6 * k, 6)) == 0);

    CHECK(homInto(FgAbelianGroup::free(1), AdmissibleModule::single(Atom::q())) ==
          AdmissibleModule::single(Atom::q()));
    FgAbelianGroup z4{0, {4}};
    CHECK(homInto(z4, AdmissibleModule::single(PR2)) == AdmissibleModule::single(Atom::zMod(4)));
    CHECK(homInto(z4, AdmissibleModule::single(*Atom::pruefer({3}))).isZero());
}

TEST_CASE("extInto closed forms") {
    FgAbelianGroup z4{0, {4}}, z6{0, {6}};
    CHECK(extInto(z4, AdmissibleModule::single(Atom::z())) == AdmissibleModule::single(Atom::zMod(4)));
    CHECK(extInto(FgAbelianGroup::free(3), AdmissibleModule::single(Atom::qModZ())).isZero());
    CHECK(extInto(z6, AdmissibleModule::single(PR2)).isZero());
    CHECK(extInto(z6, AdmissibleModule::single(Atom::loc({2}))) ==
          AdmissibleModule::single(Atom::zMod(3)));
}

TEST_CASE("multKernelCokernel table") {
    auto [k1, c1] = multKernelCokernel(4, Atom::qModZ());
    CHECK(k1 == Atom::zMod(4));
    CHECK(!c1.has_value());
    auto [k2, c2] = multKernelCokernel(5, Atom::z());
    CHECK(!k2.has_value());
    CHECK(c2 == Atom::zMod(5));
    auto [k3, c3] = multKernelCokernel(6, Atom::loc({2}));
    CHECK(!k3.has_value());
    CHECK(c3 == Atom::zMod(3));
    CHECK_THROWS_AS(multKernelCokernel(0, Atom::z()), std::invalid_argument);
}

TEST_CASE("multKernelCokernel composition consistency on ZMod atoms") {
    for (long m = 2; m <= 24; ++m)
        for (long d = 1; d <= 12; ++d)
            for (long e = 1; e <= 12; ++e) {
                Atom a = Atom::zMod(m);
                auto [kde, cde] = multKernelCokernel(Int(d) * e, a);
                auto [kd, cd] = multKernelCokernel(d, a);
                // ker(de) contains ker(d)
                Int ode = kde ? kde->modulus : 1, od = kd ? kd->modulus : 1;
                CHECK(ode % od == 0);
                // |ker| = |coker| = gcd on Z/m, and gcd(de, m) divides gcd(d,m)*gcd(e,m)
                Int gd, ge, gde;
                mpz_gcd(gd.get_mpz_t(), Int(d).get_mpz_t(), Int(m).get_mpz_t());
                mpz_gcd(ge.get_mpz_t(), Int(e).get_mpz_t(), Int(m).get_mpz_t());
                mpz_gcd(gde.get_mpz_t(), Int(d * e).get_mpz_t(), Int(m).get_mpz_t());
                CHECK(ode == gde);
                CHECK((cde ? cde->modulus : 1) == gde);
                CHECK((gd * ge) % gde == 0);
            }
}

TEST_CASE("divisible atoms kill Ext") {
    std::vector<Atom> divs{Atom::q(), Atom::qModZ(), PR23, Atom::qModLoc({5})};
    for (const Atom& a : divs)
        for (long m = 2; m <= 9; ++m)
            CHECK(extInto(FgAbelianGroup{1, {Int(m)}}, AdmissibleModule::single(a)).isZero());
}

TEST_CASE("hom/ext additive over direct sums") {
    std::mt19937 rng(5);
    std::vector<Atom> pool{Atom::z(), Atom::zMod(4), Atom::zMod(6), Atom::loc({2}),
                           Atom::q(), PR2, Atom::qModZ(), Atom::qModLoc({3})};
    for (int iter = 0; iter < 40; ++iter) {
        AdmissibleModule m1 = AdmissibleModule::single(pool[rng() % pool.size()]);
        AdmissibleModule m2 = AdmissibleModule::single(pool[rng() % pool.size()]);
        AdmissibleModule m12 = AdmissibleModule::direct({m1.atoms[0], m2.atoms[0]});
        FgAbelianGroup f{int(rng() % 2), {Int(2 + rng() % 7)}};
        auto sum = [](AdmissibleModule a, const AdmissibleModule& b) {
            for (auto& at : b.atoms) a.atoms.push_back(at);
            return a.canonical();
        };
        CHECK(homInto(f, m12) == sum(homInto(f, m1), homInto(f, m2)));
        CHECK(extInto(f, m12) == sum(extInto(f, m1), extInto(f, m2)));
    }
}

TEST_CASE("tensorAndTor") {
    FgAbelianGroup z4{0, {4}}, z6{0, {6}};
    auto [t, tor] = tensorAndTor(z4, z6);
    CHECK(t == FgAbelianGroup{0, {2}});
    CHECK(tor == FgAbelianGroup{0, {2}});
    CHECK(cyclicTensorOrderOracle(4, 6) == 2);
    for (long a = 2; a <= 6; ++a)
        for (long b = 2; b <= 4 && a * b <= 24; ++b) {
            auto [tt, _] = tensorAndTor(FgAbelianGroup{0, {Int(a)}}, FgAbelianGroup{0, {Int(b)}});
            CHECK(tt.order() == cyclicTensorOrderOracle(a, b));
        }

    auto [free, tor2] = tensorAndTor(FgAbelianGroup::free(2), FgAbelianGroup::free(3));
    CHECK(free == FgAbelianGroup::free(6));
    CHECK(tor2.isZero());
    auto [t3, tor3] = tensorAndTor(FgAbelianGroup::free(1), FgAbelianGroup{1, {2, 4}});
    CHECK(tor3.isZero());
    CHECK(t3 == FgAbelianGroup{1, {2, 4}});
}

TEST_CASE("canonical module form") {
    AdmissibleModule m = AdmissibleModule::direct(
        {Atom::zMod(4), Atom::qModZ(), Atom::zMod(3), Atom::z(), *Atom::pruefer({3}), PR2});
    AdmissibleModule c = m.canonical();
    CHECK(c == AdmissibleModule::direct({Atom::z(), Atom::zMod(12), PR23, Atom::qModZ()}));
    CHECK(c.canonical() == c);
    CHECK(c.str() == "Z + Z/12 + Pr{2,3} + Q/Z");
}

TEST_CASE("abstract isomorphism testing") {
    AdmissibleModule qz = AdmissibleModule::single(Atom::qModZ());
    AdmissibleModule split = AdmissibleModule::direct({PR2, Atom::qModLoc({2})});
    CHECK(isomorphic(qz, split));
    CHECK(!isomorphic(qz, AdmissibleModule::single(PR2)));
    CHECK(isomorphic(AdmissibleModule::direct({Atom::zMod(4), Atom::zMod(3)}),
                     AdmissibleModule::single(Atom::zMod(12))));
    CHECK(!isomorphic(AdmissibleModule::direct({Atom::loc({2}), Atom::loc({3})}),
                      AdmissibleModule::direct({Atom::loc({2, 3}), Atom::z()})));
}

TEST_CASE("module maps validate multipliers") {
    auto single = [](const Atom& a) { return AdmissibleModule::single(a); };
    // j: Z/n -> Q/Z by 1/n
    CHECK(validMultiplier(Rat(1, 3), Atom::zMod(3), Atom::qModZ()));
    // reduction Z[1/3] -> Z/2 exists (3 is invertible mod 2)
    CHECK(validMultiplier(Rat(1), Atom::loc({3}), Atom::zMod(2)));
    // but Z[1/2] -> Z/2 does not
    CHECK(!validMultiplier(Rat(1), Atom::loc({2}), Atom::zMod(2)));
    // no nonzero map Q -> Pr{2}
    CHECK(!validMultiplier(Rat(1), Atom::q(), PR2));
    CHECK_THROWS(ModuleMap::fromBlocks(single(Atom::q()), single(PR2), {{Rat(1)}}));

    ModuleMap ev1 = ModuleMap::fromBlocks(single(Atom::qModZ()), single(Atom::qModZ()), {{Rat(3)}});
    ModuleElement x = makeElement(single(Atom::qModZ()), {Rat(1, 6)});
    CHECK(ev1.apply(x).coords[0] == Rat(1, 2));

    // Pr{2} (+) Q --(-1 | 1)--> Q/Z, the ev1 of the UHF model
    ModuleMap f = ModuleMap::fromBlocks(AdmissibleModule::direct({PR2, Atom::q()}), single(Atom::qModZ()),
                                        {{Rat(-1), Rat(1)}});
    ModuleElement v = makeElement(AdmissibleModule::direct({PR2, Atom::q()}), {Rat(1, 4), Rat(3, 4)});
    CHECK(f.apply(v).coords[0] == Rat(1, 2));
}
