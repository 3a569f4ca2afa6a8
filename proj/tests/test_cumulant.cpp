#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tvar/cumulant.hpp"

using namespace tvar;
using namespace tvar::cum;

namespace {

IndexTuple it(std::vector<int> e) { return IndexTuple{std::move(e)}; }

ZVec zv(std::vector<long> v) {
    ZVec out;
    for (long x : v) out.emplace_back(x);
    return out;
}

QVec qv(std::vector<long> v) {
    QVec out;
    for (long x : v) out.emplace_back(x);
    return out;
}

Rat rnd(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 7);
    return rat(num(rng), den(rng));
}

SecPoint random_point(const SVSpec& spec, std::mt19937& rng) {
    SecPoint p;
    p.t = rnd(rng);
    for (int d : spec.dims) {
        QVec a, b;
        for (int k = 0; k < d; ++k) {
            a.push_back(rnd(rng));
            b.push_back(rnd(rng));
        }
        p.v.push_back(a);
        p.w.push_back(b);
    }
    return p;
}

}  // namespace

TEST_CASE("index tuples") {
    SVSpec line3{{1}, {3}};
    CHECK(line3.total_slots() == 3);
    CHECK(line3.dim_x() == 1);
    CHECK(line3.factor_of_slot(2) == 0);

    SVSpec mixed{{2, 1}, {1, 2}};
    CHECK(mixed.total_slots() == 3);
    CHECK(mixed.dim_x() == 3);
    CHECK(mixed.slot_offset(1) == 1);
    CHECK(mixed.factor_of_slot(0) == 0);
    CHECK(mixed.factor_of_slot(1) == 1);

    CHECK(degree(it({1, 0, 5})) == 2);
    CHECK(leq(it({1, 0, 5}), it({1, 3, 5})));
    CHECK_FALSE(leq(it({1, 3, 5}), it({1, 0, 5})));
    CHECK(restrict_tuple(it({1, 3, 5}), {0}) == it({1, 0, 0}));
    CHECK(support(it({0, 2, 0, 1})) == std::vector<int>{1, 3});

    auto small = index_set(SVSpec{{1}, {2}});
    REQUIRE(small.size() == 3);
    CHECK(small[0] == it({0, 1}));
    CHECK(small[1] == it({1, 0}));
    CHECK(small[2] == it({1, 1}));

    CHECK(index_set(SVSpec{{1, 1}, {1, 1}}).size() == 3);
    CHECK(index_set(SVSpec{{2}, {2}}).size() == 8);
    CHECK(index_set(SVSpec{{1}, {4}}).size() == 15);

    CHECK_THROWS(index_set(SVSpec{{0}, {2}}));
    CHECK_THROWS(index_set(SVSpec{{1, 1}, {1}}));
}

TEST_CASE("interval partitions") {
    CHECK_THROWS(interval_partitions(it({1, 0})));

    auto p2 = interval_partitions(it({1, 1}));
    REQUIRE(p2.size() == 1);
    CHECK(p2[0] == std::vector<std::pair<int, int>>{{0, 2}});

    CHECK(interval_partitions(it({1, 1, 1})).size() == 1);
    CHECK(interval_partitions(it({2, 0, 3})).size() == 1);

    auto p4 = interval_partitions(it({1, 1, 1, 1}));
    REQUIRE(p4.size() == 2);
    CHECK(p4[0] == std::vector<std::pair<int, int>>{{0, 4}});
    CHECK(p4[1] == std::vector<std::pair<int, int>>{{0, 2}, {2, 4}});

    // The interior zero belongs to the first block; moving the cut across it
    // must not create a second copy of the same split.
    auto p5 = interval_partitions(it({1, 1, 0, 1, 1}));
    REQUIRE(p5.size() == 2);
    CHECK(p5[1] == std::vector<std::pair<int, int>>{{0, 3}, {3, 5}});
}

TEST_CASE("cumulant polynomials") {
    SVSpec spec{{1, 1}, {1, 1}};
    Ring r(spec);

    poly::Poly y11 = y_poly(r, it({1, 1}));
    poly::Poly expect = r.x(it({1, 1})) - r.x(it({1, 0})) * r.x(it({0, 1}));
    CHECK(y11 == expect);
    CHECK(z_poly(r, it({1, 1})) == expect);
    CHECK(z_poly(r, it({1, 0})) == r.x(it({1, 0})));

    CHECK(r.var_name(r.xvar(it({1, 0}))) == "x(1,0)");
    CHECK(r.var_name(r.zvar(it({1, 0}))) == "z(1,0)");

    // deg-4 cumulant on the line picks up the split partition.
    SVSpec line4{{1}, {4}};
    Ring r4(line4);
    IndexTuple full = it({1, 1, 1, 1});
    poly::Poly z4 = z_poly(r4, full);
    poly::Poly y12 = y_poly(r4, it({1, 1, 0, 0}));
    poly::Poly y34 = y_poly(r4, it({0, 0, 1, 1}));
    CHECK(z4 == y_poly(r4, full) - y12 * y34);
}

TEST_CASE("coordinate changes invert") {
    for (SVSpec spec : {SVSpec{{1}, {2}}, SVSpec{{1, 1}, {1, 1}}, SVSpec{{1}, {3}}, SVSpec{{2}, {2}}}) {
        Ring r(spec);
        auto zx = z_from_x(r);
        auto xz = x_from_z(r);
        for (const IndexTuple& c : r.tuples()) {
            CHECK(zx.at(r.zvar(c)).substitute(xz) == r.z(c));
            CHECK(xz.at(r.xvar(c)).substitute(zx) == r.x(c));
        }
    }

    std::mt19937 rng(20240613);
    SVSpec spec{{2}, {2}};
    Ring r(spec);
    for (int trial = 0; trial < 5; ++trial) {
        std::map<IndexTuple, Rat> xs;
        for (const IndexTuple& c : r.tuples()) xs[c] = rnd(rng);
        auto back = z_to_x_values(r, x_to_z_values(r, xs));
        CHECK(back == xs);
    }
}

TEST_CASE("secant pullback identity") {
    for (SVSpec spec : {SVSpec{{1, 1}, {1, 1}}, SVSpec{{1}, {3}}, SVSpec{{2}, {2}}}) {
        Ring r(spec);
        SecSymbols s = sec_symbols(spec);
        std::map<uint32_t, poly::Poly> images;
        for (const IndexTuple& c : r.tuples()) images[r.xvar(c)] = sec_image_x(spec, s, c);
        for (const IndexTuple& c : r.tuples())
            CHECK(z_poly(r, c).substitute(images) == sec_formula_poly(spec, s, c));
    }
}

TEST_CASE("tangential pullback identity") {
    for (SVSpec spec : {SVSpec{{1, 1}, {1, 1}}, SVSpec{{1}, {3}}, SVSpec{{1}, {4}}, SVSpec{{2}, {2}}}) {
        Ring r(spec);
        SecSymbols s = sec_symbols(spec);
        std::map<uint32_t, poly::Poly> images;
        for (const IndexTuple& c : r.tuples()) images[r.xvar(c)] = tan_image_x(spec, s, c);
        for (const IndexTuple& c : r.tuples()) {
            poly::Poly expect;
            if (degree(c) == 1) {
                int pos = support(c)[0];
                size_t i = spec.factor_of_slot(pos);
                expect = poly::Poly::var(s.v[i][c.e[pos] - 1]) - poly::Poly::var(s.w[i][c.e[pos] - 1]);
            } else {
                expect = poly::Poly(rat(-1, 4));
                for (int pos : support(c)) {
                    size_t i = spec.factor_of_slot(pos);
                    expect = expect * (Rat(2) * poly::Poly::var(s.w[i][c.e[pos] - 1]));
                }
            }
            CHECK(z_poly(r, c).substitute(images) == expect);
        }
    }

    // Numeric spot check: the degree-two cumulant only sees -w_a * w_b.
    SVSpec spec{{1, 1}, {1, 1}};
    Ring r(spec);
    auto xs = eval_tan(spec, {qv({5}), qv({7})}, {qv({2}), qv({3})});
    auto zs = x_to_z_values(r, xs);
    CHECK(zs.at(it({1, 1})) == -6);
    CHECK(zs.at(it({1, 0})) == 3);
    CHECK(zs.at(it({1, 1})) == tan_pullback_formula(spec, it({1, 1}), {qv({5}), qv({7})}, {qv({2}), qv({3})}));

    auto zero_w = x_to_z_values(r, eval_tan(spec, {qv({5}), qv({7})}, {qv({0}), qv({0})}));
    CHECK(zero_w.at(it({1, 1})) == 0);
}

TEST_CASE("reparameterization and decomposition") {
    SVSpec spec{{1, 1}, {1, 1}};
    SecPoint p;
    p.t = 0;
    p.v = {qv({4}), qv({6})};
    p.w = {qv({1}), qv({2})};
    SecPoint q = rep_map(p);
    CHECK(q.t == 0);
    CHECK(q.v[0][0] == 1);
    CHECK(q.v[1][0] == 2);
    CHECK(q.w[0][0] == 3);
    CHECK(q.w[1][0] == 4);

    SecPoint half = p;
    half.t = rat(1, 2);
    CHECK_THROWS(rep_map(half));

    // With w pinned at 1 the higher z-coordinates all read off t.
    SecPoint ones;
    ones.t = rat(3, 5);
    ones.v = {qv({9}), qv({11})};
    ones.w = {qv({1}), qv({1})};
    auto mz = monomial_map(spec, ones);
    CHECK(mz.at(it({1, 1})) == rat(3, 5));
    CHECK(mz.at(it({1, 0})) == 9);

    std::mt19937 rng(777);
    for (SVSpec s : {SVSpec{{1, 1}, {1, 1}}, SVSpec{{1}, {3}}}) {
        Ring ring(s);
        for (int trial = 0; trial < 5; ++trial) {
            SecPoint pt = random_point(s, rng);
            if (pt.t == rat(1, 2)) pt.t = rat(1, 3);
            auto zs = x_to_z_values(ring, eval_sec(s, pt));
            auto dec = monomial_map(s, rep_map(pt));
            CHECK(zs == dec);
            for (const IndexTuple& c : ring.tuples())
                CHECK(zs.at(c) == sec_pullback_formula(s, c, pt));
        }
    }
}

TEST_CASE("identity batch matches serial") {
    std::mt19937 rng(424242);
    for (SVSpec spec : {SVSpec{{1, 1}, {1, 1}}, SVSpec{{1}, {3}}, SVSpec{{2}, {2}}}) {
        std::vector<SecPoint> pts;
        for (int i = 0; i < 8; ++i) pts.push_back(random_point(spec, rng));
        pts.push_back(pts.front());
        pts.back().t = rat(1, 2);
        CHECK(sec_identity_failures(spec, pts) == 0);
        CHECK(sec_identity_failures_serial(spec, pts) == 0);
    }
}

TEST_CASE("lattice points of tuples") {
    SVSpec spec{{2}, {2}};
    CHECK(lattice_point_of(spec, it({1, 2})) == zv({1, 1}));
    CHECK(lattice_point_of(spec, it({2, 2})) == zv({0, 2}));
    CHECK(lattice_point_of(spec, it({0, 1})) == zv({1, 0}));
    CHECK(representative_tuple(spec, zv({0, 2})) == it({2, 2}));
    CHECK(representative_tuple(spec, zv({1, 0})) == it({0, 1}));
    CHECK(representative_tuple(spec, zv({1, 1})) == it({1, 2}));
    CHECK_THROWS(representative_tuple(spec, zv({2, 1})));

    SVSpec mixed{{2, 1}, {2, 1}};
    CHECK(lattice_point_of(mixed, it({2, 1, 1})) == zv({1, 1, 1}));
    CHECK(representative_tuple(mixed, zv({1, 1, 1})) == it({1, 2, 1}));

    for (const ZVec& u : lattice_points(secant_polytope(spec)))
        CHECK(lattice_point_of(spec, representative_tuple(spec, u)) == u);
}

TEST_CASE("classification reports") {
    SecantReport veronese = classify(SVSpec{{2}, {2}});
    CHECK(veronese.dimX == 2);
    CHECK(veronese.dimP == 1);
    CHECK(veronese.dimSec == 4);
    CHECK(veronese.dimTan == 4);
    CHECK(veronese.degenerate);
    CHECK(veronese.latticePoints == std::vector<ZVec>{zv({0, 2}), zv({1, 1}), zv({2, 0})});
    CHECK(veronese.monoidGenerators.size() == 3);

    SecantReport cusp = classify(SVSpec{{1}, {3}});
    CHECK(cusp.dimX == 1);
    CHECK(cusp.dimP == 1);
    CHECK(cusp.dimSec == 3);
    CHECK(cusp.dimTan == 2);
    CHECK_FALSE(cusp.degenerate);
    CHECK(cusp.latticePoints == std::vector<ZVec>{zv({2}), zv({3})});
    CHECK(cusp.monoidGenerators == std::vector<ZVec>{zv({2}), zv({3})});

    SecantReport cube = classify(SVSpec{{1, 1, 1}, {1, 1, 1}});
    CHECK(cube.dimX == 3);
    CHECK(cube.dimP == 3);
    CHECK(cube.dimSec == 7);
    CHECK(cube.dimTan == 6);
    CHECK_FALSE(cube.degenerate);
    CHECK(cube.latticePoints.size() == 4);

    SecantReport p1{classify(SVSpec{{1}, {1}})};
    CHECK(p1.dimX == 1);
    CHECK(p1.dimP == -1);
    CHECK(p1.dimSec == 1);
    CHECK(p1.dimTan == 1);
    CHECK(p1.degenerate);
    CHECK(p1.latticePoints.empty());
}

TEST_CASE("monoid generators") {
    CHECK(monoid_generators({zv({2}), zv({3}), zv({4}), zv({5})}) ==
          std::vector<ZVec>{zv({2}), zv({3})});
    CHECK(monoid_generators({zv({0, 1}), zv({1, 0}), zv({1, 1})}) ==
          std::vector<ZVec>{zv({0, 1}), zv({1, 0})});
    CHECK(monoid_generators({zv({0, 0})}).empty());
    CHECK_THROWS(monoid_generators({zv({-1, 0})}));
}

TEST_CASE("toric relations") {
    std::vector<ZVec> veronese{zv({0, 2}), zv({1, 1}), zv({2, 0})};
    auto rel = toric_ideal_upto(veronese, 2);
    REQUIRE(rel.size() == 1);
    CHECK(rel[0].a == std::vector<int>{1, 0, 1});
    CHECK(rel[0].b == std::vector<int>{0, 2, 0});
    CHECK(toric_ideal_upto_serial(veronese, 2) == rel);

    CHECK(toric_ideal_upto({zv({2}), zv({3})}, 1).empty());
    CHECK(toric_ideal_upto({zv({2})}, 4).empty());

    // Without homogenization the cube relation mixes degrees two and three.
    std::vector<ZVec> cube{zv({0, 1, 1}), zv({1, 0, 1}), zv({1, 1, 0}), zv({1, 1, 1})};
    auto tan_rel = toric_ideal_upto(cube, 3, false);
    REQUIRE(tan_rel.size() == 1);
    CHECK(tan_rel[0].a == std::vector<int>{1, 1, 1, 0});
    CHECK(tan_rel[0].b == std::vector<int>{0, 0, 0, 2});
    CHECK(toric_ideal_upto(cube, 3, true).empty());
    CHECK(toric_ideal_upto_serial(cube, 3, false) == tan_rel);
}

TEST_CASE("parameterization ranks") {
    for (SVSpec spec : {SVSpec{{1}, {3}}, SVSpec{{2}, {2}}, SVSpec{{1, 1, 1}, {1, 1, 1}}}) {
        SecantReport rep = classify(spec);
        SecPoint p;
        p.t = rat(1, 3);
        long prime[] = {2, 3, 5, 7, 11, 13, 17, 19};
        int next = 0;
        for (int d : spec.dims) {
            QVec a, b;
            for (int k = 0; k < d; ++k) {
                a.push_back(rat(prime[next], 1));
                b.push_back(rat(prime[next] + 1, 3));
                ++next;
            }
            p.v.push_back(a);
            p.w.push_back(b);
        }
        CHECK(sec_jacobian_rank(spec, p) == rep.dimSec);
        CHECK(tan_jacobian_rank(spec, p.v, p.w) == rep.dimTan);
    }
}
