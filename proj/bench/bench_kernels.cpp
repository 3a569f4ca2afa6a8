// Timing harness for the parallel kernels against their serial twins.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tvar/cumulant.hpp"
#include "tvar/polyhedron.hpp"
#include "tvar/rat.hpp"

using namespace tvar;
using namespace tvar::geom;
namespace cum = tvar::cum;

namespace {

template <typename F>
double time_ms(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serialMs, double parallelMs, bool agree) {
    std::printf("%-24s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n", name,
                serialMs, parallelMs, parallelMs > 0 ? serialMs / parallelMs : 0.0,
                agree ? "results agree" : "RESULTS DIFFER");
}

void bench_lattice_points() {
    std::vector<QVec> verts;
    QVec origin(4, Rat(0));
    verts.push_back(origin);
    for (size_t i = 0; i < 4; ++i) {
        QVec v(4, Rat(0));
        v[i] = 24;
        verts.push_back(v);
    }
    Polyhedron simplex = Polyhedron::from_generators(4, verts, {});

    std::vector<ZVec> a, b;
    double ts = time_ms([&] { a = lattice_points_serial(simplex); });
    double tp = time_ms([&] { b = lattice_points(simplex); });
    report("lattice_points", ts, tp, a == b);
    std::printf("  dilated 4-simplex, %zu lattice points\n", a.size());
}

void bench_toric_ideal() {
    cum::SVSpec spec{{2}, {4}};
    cum::SecantReport rep = cum::classify(spec);
    std::vector<cum::Binomial> a, b;
    double ts = time_ms([&] { a = cum::toric_ideal_upto_serial(rep.latticePoints, 4); });
    double tp = time_ms([&] { b = cum::toric_ideal_upto(rep.latticePoints, 4); });
    report("toric_ideal_upto", ts, tp, a == b);
    std::printf("  %zu lattice points, degree bound 4, %zu binomials\n",
                rep.latticePoints.size(), a.size());
}

void bench_identity_check() {
    cum::SVSpec spec{{2, 1}, {2, 2}};
    std::mt19937 g(7);
    auto rnd = [&] {
        return rat(std::uniform_int_distribution<long>(-9, 9)(g),
                   std::uniform_int_distribution<long>(1, 9)(g));
    };
    std::vector<cum::SecPoint> pts;
    for (int i = 0; i < 40; ++i) {
        cum::SecPoint p;
        p.t = rnd();
        for (int d : spec.dims) {
            QVec v, w;
            for (int k = 0; k < d; ++k) {
                v.push_back(rnd());
                w.push_back(rnd());
            }
            p.v.push_back(v);
            p.w.push_back(w);
        }
        pts.push_back(p);
    }

    int a = 0, b = 0;
    double ts = time_ms([&] { a = cum::sec_identity_failures_serial(spec, pts); });
    double tp = time_ms([&] { b = cum::sec_identity_failures(spec, pts); });
    report("sec_identity_failures", ts, tp, a == b);
    std::printf("  %zu sample points, %d failures\n", pts.size(), a);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled, parallel kernels run serially\n\n");
#endif
    bench_lattice_points();
    bench_toric_ideal();
    bench_identity_check();
    return 0;
}
