#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvar {

using Rat = mpq_class;
using Int = mpz_class;

using QVec = std::vector<Rat>;
using ZVec = std::vector<Int>;

inline Rat rat(long p, long q = 1) {
    if (q == 0) throw std::invalid_argument("rat: zero denominator");
    Rat r(p, q);
    r.canonicalize();
    return r;
}

// Accepts "p", "-p" or "p/q"; canonical reduced form with positive denominator.
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rat: empty string");
    Rat r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("parse_rat: bad rational '" + s + "'");
    if (r.get_den() == 0)
        throw std::invalid_argument("parse_rat: zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

// "p/q" for non-integers, bare "p" otherwise.
inline std::string format_rat(const Rat& r) {
    return r.get_str();
}

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline Int rat_floor(const Rat& r) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline Int rat_ceil(const Rat& r) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

// Least k >= 1 with k*r integral.
inline Int denominator_of(const Rat& r) { return r.get_den(); }

inline Int lcm_denominators(const QVec& v) {
    Int l = 1;
    for (const Rat& r : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), r.get_den_mpz_t());
    return l;
}

inline bool is_lattice_point(const QVec& v) {
    for (const Rat& r : v)
        if (!is_integer(r)) return false;
    return true;
}

inline bool is_zero_vec(const QVec& v) {
    for (const Rat& r : v)
        if (r != 0) return false;
    return true;
}

inline Rat dot(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    Rat s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline QVec vec_add(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vec_add: size mismatch");
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline QVec vec_sub(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vec_sub: size mismatch");
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline QVec vec_scale(const Rat& c, const QVec& a) {
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline QVec to_qvec(const ZVec& v) {
    QVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = Rat(v[i]);
    return r;
}

// Scales a nonzero rational vector to a primitive integer vector (gcd 1),
// preserving direction. Zero vector maps to zero.
inline ZVec primitive_vector(const QVec& v) {
    Int l = lcm_denominators(v);
    ZVec w(v.size());
    Int g = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        Rat s = v[i] * Rat(l);
        w[i] = s.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), w[i].get_mpz_t());
    }
    if (g > 1)
        for (Int& x : w) x /= g;
    return w;
}

// Strict total order for canonical sorting of vectors.
inline bool qvec_less(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = 0; i < a.size(); ++i) {
        int c = cmp(a[i], b[i]);
        if (c != 0) return c < 0;
    }
    return false;
}

}  // namespace tvar
