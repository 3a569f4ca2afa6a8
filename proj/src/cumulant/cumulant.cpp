#include "tvar/cumulant.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tvar::cum {

int SVSpec::total_slots() const {
    int n = 0;
    for (int s : degs) n += s;
    return n;
}

int SVSpec::dim_x() const {
    int n = 0;
    for (int d : dims) n += d;
    return n;
}

int SVSpec::slot_offset(size_t factor) const {
    int off = 0;
    for (size_t i = 0; i < factor; ++i) off += degs[i];
    return off;
}

size_t SVSpec::factor_of_slot(int pos) const {
    int off = 0;
    for (size_t i = 0; i < dims.size(); ++i) {
        off += degs[i];
        if (pos < off) return i;
    }
    throw std::invalid_argument("factor_of_slot: position out of range");
}

void SVSpec::check() const {
    if (dims.empty() || dims.size() != degs.size())
        throw std::invalid_argument("SVSpec: dims and degs must be nonempty and equal length");
    double count = 1;
    for (size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 1 || degs[i] < 1)
            throw std::invalid_argument("SVSpec: dims and degs entries must be >= 1");
        for (int j = 0; j < degs[i]; ++j) count *= dims[i] + 1;
        if (count > double(1 << 21)) throw std::invalid_argument("SVSpec: index set too large");
    }
}

int degree(const IndexTuple& c) {
    int d = 0;
    for (int x : c.e) d += x != 0;
    return d;
}

bool leq(const IndexTuple& a, const IndexTuple& b) {
    if (a.e.size() != b.e.size()) return false;
    for (size_t i = 0; i < a.e.size(); ++i)
        if (a.e[i] != 0 && a.e[i] != b.e[i]) return false;
    return true;
}

IndexTuple restrict_tuple(const IndexTuple& c, const std::vector<int>& positions) {
    IndexTuple b;
    b.e.assign(c.e.size(), 0);
    for (int p : positions) b.e[p] = c.e[p];
    return b;
}

std::vector<int> support(const IndexTuple& c) {
    std::vector<int> s;
    for (size_t i = 0; i < c.e.size(); ++i)
        if (c.e[i] != 0) s.push_back(static_cast<int>(i));
    return s;
}

std::string tuple_str(const IndexTuple& c) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < c.e.size(); ++i) {
        if (i) os << ",";
        os << c.e[i];
    }
    os << ")";
    return os.str();
}

std::vector<IndexTuple> index_set(const SVSpec& spec) {
    spec.check();
    int n = spec.total_slots();
    std::vector<int> cap(n);
    for (int p = 0; p < n; ++p) cap[p] = spec.dims[spec.factor_of_slot(p)];
    std::vector<IndexTuple> out;
    IndexTuple c;
    c.e.assign(n, 0);
    while (true) {
        if (degree(c) > 0) out.push_back(c);
        int p = n - 1;
        while (p >= 0) {
            if (++c.e[p] <= cap[p]) break;
            c.e[p] = 0;
            --p;
        }
        if (p < 0) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::pair<int, int>>> interval_partitions(const IndexTuple& c) {
    if (degree(c) < 2) throw std::invalid_argument("interval_partitions: degree below two");
    int n = static_cast<int>(c.e.size());
    std::vector<std::vector<std::pair<int, int>>> out;
    for (uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
        std::vector<std::pair<int, int>> blocks;
        int begin = 0;
        bool ok = true;
        for (int p = 0; p < n; ++p) {
            bool last = (p == n - 1);
            if (last || (cuts >> p) & 1) {
                // Blocks after the first must open on a nonzero slot, so cuts
                // that differ only across a run of zeros collapse to one partition.
                if (begin > 0 && c.e[begin] == 0) {
                    ok = false;
                    break;
                }
                int deg = 0;
                for (int q = begin; q <= p; ++q) deg += c.e[q] != 0;
                if (deg < 2) {
                    ok = false;
                    break;
                }
                blocks.emplace_back(begin, p + 1);
                begin = p + 1;
            }
        }
        if (ok) out.push_back(std::move(blocks));
    }
    return out;
}

Ring::Ring(SVSpec spec) : spec_(std::move(spec)), tuples_(index_set(spec_)) {
    for (size_t i = 0; i < tuples_.size(); ++i) index_[tuples_[i]] = static_cast<uint32_t>(i);
}

uint32_t Ring::xvar(const IndexTuple& c) const {
    auto it = index_.find(c);
    if (it == index_.end()) throw std::invalid_argument("Ring: unknown tuple " + tuple_str(c));
    return it->second;
}

uint32_t Ring::zvar(const IndexTuple& c) const {
    return xvar(c) + static_cast<uint32_t>(tuples_.size());
}

poly::Poly Ring::x(const IndexTuple& c) const {
    if (degree(c) == 0) return poly::Poly(Rat(1));
    return poly::Poly::var(xvar(c));
}

poly::Poly Ring::z(const IndexTuple& c) const { return poly::Poly::var(zvar(c)); }

const IndexTuple& Ring::tuple_of(uint32_t var) const {
    size_t i = var < tuples_.size() ? var : var - tuples_.size();
    if (i >= tuples_.size()) throw std::invalid_argument("Ring: unknown variable");
    return tuples_[i];
}

std::string Ring::var_name(uint32_t var) const {
    return (is_zvar(var) ? "z" : "x") + tuple_str(tuple_of(var));
}

poly::Poly y_poly(const Ring& r, const IndexTuple& c) {
    if (degree(c) == 1) return r.x(c);
    std::vector<int> supp = support(c);
    size_t k = supp.size();
    poly::Poly sum;
    for (uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<int> keep;
        for (size_t i = 0; i < k; ++i)
            if ((mask >> i) & 1) keep.push_back(supp[i]);
        poly::Poly term = r.x(restrict_tuple(c, keep));
        if ((k - keep.size()) % 2) term = -term;
        for (size_t i = 0; i < k; ++i)
            if (!((mask >> i) & 1)) term = term * r.x(restrict_tuple(c, {supp[i]}));
        sum += term;
    }
    return sum;
}

poly::Poly z_poly(const Ring& r, const IndexTuple& c) {
    if (degree(c) == 1) return r.x(c);
    poly::Poly sum;
    for (const auto& blocks : interval_partitions(c)) {
        poly::Poly term(Rat(1));
        for (const auto& [b, e] : blocks) {
            std::vector<int> pos;
            for (int p = b; p < e; ++p) pos.push_back(p);
            term = term * y_poly(r, restrict_tuple(c, pos));
        }
        if (blocks.size() % 2 == 0) term = -term;
        sum += term;
    }
    return sum;
}

std::map<uint32_t, poly::Poly> z_from_x(const Ring& r) {
    std::map<uint32_t, poly::Poly> m;
    for (const IndexTuple& c : r.tuples()) m[r.zvar(c)] = z_poly(r, c);
    return m;
}

std::map<uint32_t, poly::Poly> x_from_z(const Ring& r) {
    std::vector<IndexTuple> order = r.tuples();
    std::stable_sort(order.begin(), order.end(),
                     [](const IndexTuple& a, const IndexTuple& b) { return degree(a) < degree(b); });
    std::map<uint32_t, poly::Poly> m;
    for (const IndexTuple& c : order) {
        poly::Poly rest = z_poly(r, c) - r.x(c);  // strictly lower variables
        m[r.xvar(c)] = r.z(c) - rest.substitute(m);
    }
    return m;
}

void check_point_shape(const SVSpec& spec, const std::vector<QVec>& v) {
    if (v.size() != spec.factors()) throw std::invalid_argument("point: factor count mismatch");
    for (size_t i = 0; i < v.size(); ++i)
        if (static_cast<int>(v[i].size()) != spec.dims[i])
            throw std::invalid_argument("point: coordinate count mismatch");
}

namespace {

// Product of coordinates over the nonzero slots of c; empty product is 1.
Rat chart_product(const SVSpec& spec, const std::vector<QVec>& coords, const IndexTuple& c) {
    Rat p = 1;
    for (size_t pos = 0; pos < c.e.size(); ++pos) {
        if (c.e[pos] == 0) continue;
        size_t i = spec.factor_of_slot(static_cast<int>(pos));
        p *= coords[i][c.e[pos] - 1];
    }
    return p;
}

}  // namespace

std::map<IndexTuple, Rat> eval_sec(const SVSpec& spec, const SecPoint& p) {
    check_point_shape(spec, p.v);
    check_point_shape(spec, p.w);
    std::map<IndexTuple, Rat> out;
    for (const IndexTuple& c : index_set(spec))
        out[c] = p.t * chart_product(spec, p.v, c) + (1 - p.t) * chart_product(spec, p.w, c);
    return out;
}

Rat sec_pullback_formula(const SVSpec& spec, const IndexTuple& c, const SecPoint& p) {
    int deg = degree(c);
    if (deg == 0) throw std::invalid_argument("sec_pullback_formula: zero tuple");
    if (deg == 1) {
        int pos = support(c)[0];
        size_t i = spec.factor_of_slot(pos);
        return p.t * p.v[i][c.e[pos] - 1] + (1 - p.t) * p.w[i][c.e[pos] - 1];
    }
    Rat f = p.t * (1 - p.t);
    Rat base = 1 - 2 * p.t;
    for (int k = 0; k < deg - 2; ++k) f *= base;
    for (int pos : support(c)) {
        size_t i = spec.factor_of_slot(pos);
        f *= p.v[i][c.e[pos] - 1] - p.w[i][c.e[pos] - 1];
    }
    return f;
}

SecPoint rep_map(const SecPoint& p) {
    if (p.t == rat(1, 2)) throw std::invalid_argument("rep_map: undefined at t = 1/2");
    Rat s = 1 - 2 * p.t;
    SecPoint q;
    q.t = p.t * (1 - p.t) / (s * s);
    q.v.resize(p.v.size());
    q.w.resize(p.v.size());
    for (size_t i = 0; i < p.v.size(); ++i) {
        q.v[i].resize(p.v[i].size());
        q.w[i].resize(p.v[i].size());
        for (size_t k = 0; k < p.v[i].size(); ++k) {
            q.v[i][k] = p.t * p.v[i][k] + (1 - p.t) * p.w[i][k];
            q.w[i][k] = s * (p.v[i][k] - p.w[i][k]);
        }
    }
    return q;
}

std::map<IndexTuple, Rat> monomial_map(const SVSpec& spec, const SecPoint& p) {
    check_point_shape(spec, p.v);
    check_point_shape(spec, p.w);
    std::map<IndexTuple, Rat> out;
    for (const IndexTuple& c : index_set(spec)) {
        if (degree(c) == 1) {
            int pos = support(c)[0];
            out[c] = p.v[spec.factor_of_slot(pos)][c.e[pos] - 1];
        } else {
            out[c] = p.t * chart_product(spec, p.w, c);
        }
    }
    return out;
}

std::map<IndexTuple, Rat> eval_tan(const SVSpec& spec, const std::vector<QVec>& v,
                                   const std::vector<QVec>& w) {
    check_point_shape(spec, v);
    check_point_shape(spec, w);
    std::map<IndexTuple, Rat> out;
    for (const IndexTuple& c : index_set(spec)) {
        std::vector<int> supp = support(c);
        Rat val = chart_product(spec, v, c);
        for (int j : supp) {
            Rat term = w[spec.factor_of_slot(j)][c.e[j] - 1];
            for (int k : supp) {
                if (k == j) continue;
                term *= v[spec.factor_of_slot(k)][c.e[k] - 1];
            }
            val -= term;
        }
        out[c] = val;
    }
    return out;
}

Rat tan_pullback_formula(const SVSpec& spec, const IndexTuple& c, const std::vector<QVec>& v,
                         const std::vector<QVec>& w) {
    int deg = degree(c);
    if (deg == 0) throw std::invalid_argument("tan_pullback_formula: zero tuple");
    if (deg == 1) {
        int pos = support(c)[0];
        size_t i = spec.factor_of_slot(pos);
        return v[i][c.e[pos] - 1] - w[i][c.e[pos] - 1];
    }
    Rat f = rat(-1, 4);
    for (int pos : support(c)) f *= 2 * w[spec.factor_of_slot(pos)][c.e[pos] - 1];
    return f;
}

std::map<IndexTuple, Rat> x_to_z_values(const Ring& r, const std::map<IndexTuple, Rat>& xvals) {
    std::map<uint32_t, Rat> point;
    for (const auto& [c, val] : xvals) point[r.xvar(c)] = val;
    std::map<IndexTuple, Rat> out;
    for (const IndexTuple& c : r.tuples()) out[c] = z_poly(r, c).eval(point);
    return out;
}

std::map<IndexTuple, Rat> z_to_x_values(const Ring& r, const std::map<IndexTuple, Rat>& zvals) {
    std::vector<IndexTuple> order = r.tuples();
    std::stable_sort(order.begin(), order.end(),
                     [](const IndexTuple& a, const IndexTuple& b) { return degree(a) < degree(b); });
    std::map<uint32_t, Rat> point;
    std::map<IndexTuple, Rat> out;
    for (const IndexTuple& c : order) {
        poly::Poly rest = z_poly(r, c) - r.x(c);
        Rat val = zvals.at(c) - rest.eval(point);
        point[r.xvar(c)] = val;
        out[c] = val;
    }
    return out;
}

SecSymbols sec_symbols(const SVSpec& spec) {
    SecSymbols s;
    s.t = s.names.id("t");
    s.v.resize(spec.factors());
    s.w.resize(spec.factors());
    for (size_t i = 0; i < spec.factors(); ++i)
        for (int k = 1; k <= spec.dims[i]; ++k)
            s.v[i].push_back(s.names.id("v" + std::to_string(i + 1) + "_" + std::to_string(k)));
    for (size_t i = 0; i < spec.factors(); ++i)
        for (int k = 1; k <= spec.dims[i]; ++k)
            s.w[i].push_back(s.names.id("w" + std::to_string(i + 1) + "_" + std::to_string(k)));
    return s;
}

namespace {

poly::Poly symbol_product(const SVSpec& spec, const std::vector<std::vector<uint32_t>>& vars,
                          const IndexTuple& c) {
    poly::Poly p(Rat(1));
    for (int pos : support(c)) {
        size_t i = spec.factor_of_slot(pos);
        p = p * poly::Poly::var(vars[i][c.e[pos] - 1]);
    }
    return p;
}

}  // namespace

poly::Poly sec_image_x(const SVSpec& spec, const SecSymbols& s, const IndexTuple& c) {
    poly::Poly t = poly::Poly::var(s.t);
    poly::Poly one(Rat(1));
    return t * symbol_product(spec, s.v, c) + (one - t) * symbol_product(spec, s.w, c);
}

poly::Poly sec_formula_poly(const SVSpec& spec, const SecSymbols& s, const IndexTuple& c) {
    int deg = degree(c);
    poly::Poly t = poly::Poly::var(s.t);
    poly::Poly one(Rat(1));
    if (deg == 1) {
        int pos = support(c)[0];
        size_t i = spec.factor_of_slot(pos);
        return t * poly::Poly::var(s.v[i][c.e[pos] - 1]) +
               (one - t) * poly::Poly::var(s.w[i][c.e[pos] - 1]);
    }
    poly::Poly f = t * (one - t) * (one - Rat(2) * t).pow(deg - 2);
    for (int pos : support(c)) {
        size_t i = spec.factor_of_slot(pos);
        f = f * (poly::Poly::var(s.v[i][c.e[pos] - 1]) - poly::Poly::var(s.w[i][c.e[pos] - 1]));
    }
    return f;
}

poly::Poly tan_image_x(const SVSpec& spec, const SecSymbols& s, const IndexTuple& c) {
    std::vector<int> supp = support(c);
    poly::Poly val = symbol_product(spec, s.v, c);
    for (int j : supp) {
        poly::Poly term = poly::Poly::var(s.w[spec.factor_of_slot(j)][c.e[j] - 1]);
        for (int k : supp) {
            if (k == j) continue;
            term = term * poly::Poly::var(s.v[spec.factor_of_slot(k)][c.e[k] - 1]);
        }
        val -= term;
    }
    return val;
}

namespace {

int jacobian_rank(const std::vector<poly::Poly>& images, const std::vector<uint32_t>& params,
                  const std::map<uint32_t, Rat>& at) {
    QMat rows;
    for (const poly::Poly& f : images) {
        QVec row;
        for (uint32_t p : params) row.push_back(f.derivative(p).eval(at));
        rows.push_back(std::move(row));
    }
    return rows.empty() ? 0 : tvar::rank(rows);
}

}  // namespace

int sec_jacobian_rank(const SVSpec& spec, const SecPoint& p) {
    check_point_shape(spec, p.v);
    check_point_shape(spec, p.w);
    SecSymbols s = sec_symbols(spec);
    std::map<uint32_t, Rat> at{{s.t, p.t}};
    std::vector<uint32_t> params{s.t};
    for (size_t i = 0; i < spec.factors(); ++i)
        for (int k = 0; k < spec.dims[i]; ++k) {
            at[s.v[i][k]] = p.v[i][k];
            at[s.w[i][k]] = p.w[i][k];
            params.push_back(s.v[i][k]);
            params.push_back(s.w[i][k]);
        }
    std::vector<poly::Poly> images;
    for (const IndexTuple& c : index_set(spec)) images.push_back(sec_image_x(spec, s, c));
    return jacobian_rank(images, params, at);
}

int tan_jacobian_rank(const SVSpec& spec, const std::vector<QVec>& v,
                      const std::vector<QVec>& w) {
    check_point_shape(spec, v);
    check_point_shape(spec, w);
    SecSymbols s = sec_symbols(spec);
    std::map<uint32_t, Rat> at;
    std::vector<uint32_t> params;
    for (size_t i = 0; i < spec.factors(); ++i)
        for (int k = 0; k < spec.dims[i]; ++k) {
            at[s.v[i][k]] = v[i][k];
            at[s.w[i][k]] = w[i][k];
            params.push_back(s.v[i][k]);
            params.push_back(s.w[i][k]);
        }
    std::vector<poly::Poly> images;
    for (const IndexTuple& c : index_set(spec)) images.push_back(tan_image_x(spec, s, c));
    return jacobian_rank(images, params, at);
}

ZVec lattice_point_of(const SVSpec& spec, const IndexTuple& c) {
    ZVec u(spec.dim_x(), 0);
    int off = 0;
    for (size_t i = 0; i < spec.factors(); ++i) {
        int so = spec.slot_offset(i);
        for (int j = 0; j < spec.degs[i]; ++j) {
            int val = c.e[so + j];
            if (val > 0) u[off + val - 1] += 1;
        }
        off += spec.dims[i];
    }
    return u;
}

IndexTuple representative_tuple(const SVSpec& spec, const ZVec& u) {
    if (static_cast<int>(u.size()) != spec.dim_x())
        throw std::invalid_argument("representative_tuple: wrong length");
    IndexTuple c;
    c.e.assign(spec.total_slots(), 0);
    int off = 0;
    for (size_t i = 0; i < spec.factors(); ++i) {
        std::vector<int> vals;
        for (int k = 1; k <= spec.dims[i]; ++k) {
            if (u[off + k - 1] < 0) throw std::invalid_argument("representative_tuple: negative");
            long m = mpz_get_si(u[off + k - 1].get_mpz_t());
            for (long r = 0; r < m; ++r) vals.push_back(k);
        }
        if (static_cast<int>(vals.size()) > spec.degs[i])
            throw std::invalid_argument("representative_tuple: too many entries for factor");
        int so = spec.slot_offset(i) + spec.degs[i] - static_cast<int>(vals.size());
        for (size_t j = 0; j < vals.size(); ++j) c.e[so + j] = vals[j];
        off += spec.dims[i];
    }
    return c;
}

geom::Polyhedron secant_polytope(const SVSpec& spec) {
    spec.check();
    size_t rank = static_cast<size_t>(spec.dim_x());
    std::vector<std::pair<QVec, Rat>> rows;
    for (size_t k = 0; k < rank; ++k) {
        QVec a(rank, Rat(0));
        a[k] = 1;
        rows.emplace_back(a, Rat(0));
    }
    int off = 0;
    for (size_t i = 0; i < spec.factors(); ++i) {
        QVec a(rank, Rat(0));
        for (int k = 0; k < spec.dims[i]; ++k) a[off + k] = -1;
        rows.emplace_back(a, Rat(-spec.degs[i]));
        off += spec.dims[i];
    }
    rows.emplace_back(QVec(rank, Rat(1)), Rat(2));
    return geom::Polyhedron::from_inequalities(rank, rows);
}

SecantReport classify(const SVSpec& spec) {
    SecantReport rep;
    rep.dimX = spec.dim_x();
    geom::Polyhedron p = secant_polytope(spec);
    rep.dimP = p.dim();
    rep.dimSec = p.is_empty() ? rep.dimX : rep.dimX + rep.dimP + 1;
    rep.latticePoints = geom::lattice_points(p);
    QMat span;
    for (const ZVec& u : rep.latticePoints) span.push_back(to_qvec(u));
    rep.dimTan = rep.dimX + (span.empty() ? 0 : tvar::rank(span));
    rep.degenerate = true;
    for (const QVec& v : p.vertices()) {
        Rat s = 0;
        for (const Rat& x : v) s += x;
        if (s != 2) rep.degenerate = false;
    }
    rep.monoidGenerators = monoid_generators(rep.latticePoints);
    return rep;
}

namespace {

bool coord_leq(const ZVec& a, const ZVec& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

bool is_zero(const ZVec& a) {
    for (const Int& x : a)
        if (x != 0) return false;
    return true;
}

bool monoid_member(const ZVec& x, const std::vector<ZVec>& gens, std::map<ZVec, bool>& memo) {
    if (is_zero(x)) return true;
    auto it = memo.find(x);
    if (it != memo.end()) return it->second;
    memo[x] = false;
    bool ok = false;
    for (const ZVec& g : gens) {
        if (is_zero(g) || !coord_leq(g, x)) continue;
        ZVec r(x.size());
        for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] - g[i];
        if (monoid_member(r, gens, memo)) {
            ok = true;
            break;
        }
    }
    memo[x] = ok;
    return ok;
}

}  // namespace

std::vector<ZVec> monoid_generators(const std::vector<ZVec>& points) {
    for (const ZVec& p : points)
        for (const Int& x : p)
            if (x < 0) throw std::invalid_argument("monoid_generators: negative coordinate");
    std::map<ZVec, bool> memo;
    std::vector<ZVec> out;
    for (const ZVec& p : points) {
        if (is_zero(p)) continue;
        bool decomposable = false;
        for (const ZVec& g : points) {
            if (is_zero(g) || g == p || !coord_leq(g, p)) continue;
            ZVec r(p.size());
            for (size_t i = 0; i < p.size(); ++i) r[i] = p[i] - g[i];
            if (!is_zero(r) && monoid_member(r, points, memo)) {
                decomposable = true;
                break;
            }
        }
        if (!decomposable && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

namespace {

void enumerate_exponents(size_t k, int rest, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
    if (k == cur.size()) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e <= rest; ++e) {
        cur[k] = e;
        enumerate_exponents(k + 1, rest - e, cur, out);
    }
    cur[k] = 0;
}

std::vector<Binomial> toric_ideal_impl(const std::vector<ZVec>& points, int maxdeg,
                                       bool homogenize, bool parallel) {
    if (points.empty()) throw std::invalid_argument("toric_ideal_upto: no points");
    if (maxdeg < 1) throw std::invalid_argument("toric_ideal_upto: maxdeg must be >= 1");
    size_t k = points.size();
    size_t dim = points[0].size();
    for (const ZVec& p : points)
        if (p.size() != dim) throw std::invalid_argument("toric_ideal_upto: ragged points");

    std::vector<ZVec> cols;
    for (const ZVec& p : points) {
        ZVec c;
        if (homogenize) c.push_back(1);
        c.insert(c.end(), p.begin(), p.end());
        cols.push_back(std::move(c));
    }

    std::vector<std::vector<int>> exps;
    std::vector<int> cur(k, 0);
    enumerate_exponents(0, maxdeg, cur, exps);

    std::map<ZVec, std::vector<size_t>> groups;
    for (size_t idx = 0; idx < exps.size(); ++idx) {
        ZVec img(cols[0].size(), 0);
        for (size_t i = 0; i < k; ++i)
            for (size_t d = 0; d < img.size(); ++d) img[d] += exps[idx][i] * cols[i][d];
        groups[img].push_back(idx);
    }

    std::vector<const std::vector<size_t>*> glist;
    for (const auto& [img, members] : groups)
        if (members.size() > 1) glist.push_back(&members);

    std::set<Binomial> found;
#ifdef _OPENMP
#pragma omp parallel if (parallel)
    {
        std::set<Binomial> local;
#pragma omp for schedule(dynamic) nowait
        for (long gi = 0; gi < static_cast<long>(glist.size()); ++gi) {
            const std::vector<size_t>& members = *glist[gi];
            for (size_t p = 0; p < members.size(); ++p) {
                for (size_t q = p + 1; q < members.size(); ++q) {
                    const std::vector<int>& e1 = exps[members[p]];
                    const std::vector<int>& e2 = exps[members[q]];
                    Binomial b;
                    b.a.resize(k);
                    b.b.resize(k);
                    for (size_t i = 0; i < k; ++i) {
                        int m = std::min(e1[i], e2[i]);
                        b.a[i] = e1[i] - m;
                        b.b[i] = e2[i] - m;
                    }
                    if (b.a == b.b) continue;
                    if (b.b > b.a) std::swap(b.a, b.b);
                    local.insert(std::move(b));
                }
            }
        }
#pragma omp critical
        found.insert(local.begin(), local.end());
    }
#else
    (void)parallel;
    for (const auto* members_p : glist) {
        const std::vector<size_t>& members = *members_p;
        for (size_t p = 0; p < members.size(); ++p) {
            for (size_t q = p + 1; q < members.size(); ++q) {
                const std::vector<int>& e1 = exps[members[p]];
                const std::vector<int>& e2 = exps[members[q]];
                Binomial b;
                b.a.resize(k);
                b.b.resize(k);
                for (size_t i = 0; i < k; ++i) {
                    int m = std::min(e1[i], e2[i]);
                    b.a[i] = e1[i] - m;
                    b.b[i] = e2[i] - m;
                }
                if (b.a == b.b) continue;
                if (b.b > b.a) std::swap(b.a, b.b);
                found.insert(std::move(b));
            }
        }
    }
#endif
    return std::vector<Binomial>(found.begin(), found.end());
}

}  // namespace

std::vector<Binomial> toric_ideal_upto(const std::vector<ZVec>& points, int maxdeg,
                                       bool homogenize) {
    return toric_ideal_impl(points, maxdeg, homogenize, true);
}

std::vector<Binomial> toric_ideal_upto_serial(const std::vector<ZVec>& points, int maxdeg,
                                              bool homogenize) {
    return toric_ideal_impl(points, maxdeg, homogenize, false);
}

namespace {

int identity_failures_impl(const SVSpec& spec, const std::vector<SecPoint>& pts, bool parallel) {
    Ring ring(spec);
    std::vector<poly::Poly> zps;
    for (const IndexTuple& c : ring.tuples()) zps.push_back(z_poly(ring, c));

    int failures = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : failures) if (parallel)
#endif
    for (long pi = 0; pi < static_cast<long>(pts.size()); ++pi) {
        const SecPoint& p = pts[pi];
        std::map<IndexTuple, Rat> xs = eval_sec(spec, p);
        std::map<uint32_t, Rat> point;
        for (const auto& [c, val] : xs) point[ring.xvar(c)] = val;

        std::map<IndexTuple, Rat> zs;
        for (size_t i = 0; i < zps.size(); ++i) zs[ring.tuples()[i]] = zps[i].eval(point);

        for (const IndexTuple& c : ring.tuples())
            if (zs[c] != sec_pullback_formula(spec, c, p)) failures += 1;

        if (p.t != rat(1, 2)) {
            std::map<IndexTuple, Rat> mz = monomial_map(spec, rep_map(p));
            for (const IndexTuple& c : ring.tuples())
                if (zs[c] != mz[c]) failures += 1;
        }

        std::map<IndexTuple, Rat> back = z_to_x_values(ring, zs);
        for (const IndexTuple& c : ring.tuples())
            if (back[c] != xs[c]) failures += 1;
    }
    return failures;
}

}  // namespace

int sec_identity_failures(const SVSpec& spec, const std::vector<SecPoint>& pts) {
    return identity_failures_impl(spec, pts, true);
}

int sec_identity_failures_serial(const SVSpec& spec, const std::vector<SecPoint>& pts) {
    return identity_failures_impl(spec, pts, false);
}

}  // namespace tvar::cum
