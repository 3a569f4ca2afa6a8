#include "tvar/coxgen.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tvar/linalg.hpp"

namespace tvar::coxgen {

using poly::Monomial;
using poly::Poly;

namespace {

std::string s_name(const ZVec& ray) {
    std::ostringstream os;
    os << "S(";
    for (size_t i = 0; i < ray.size(); ++i) {
        if (i) os << ",";
        os << ray[i];
    }
    os << ")";
    return os.str();
}

std::string t_name(const fdiv::BasePoint& p, const QVec& v) {
    std::ostringstream os;
    os << "T(" << p.str() << ";";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << format_rat(v[i]);
    }
    os << ")";
    return os.str();
}

bool ray_meets_degree(const fdiv::FDivisor& s, const ZVec& ray) {
    geom::Polyhedron rp =
        geom::Polyhedron::from_generators(s.rank, {QVec(s.rank, Rat(0))}, {to_qvec(ray)});
    for (const auto& [i, val] : s.degree)
        if (val && !geom::intersect(rp, *val).is_empty()) return true;
    return false;
}

std::vector<QVec> slice_vertex_list(const fdiv::FDivisor& s, const fdiv::BasePoint& p) {
    geom::PolyhedralComplex complex = fdiv::slice_of(s, p);
    std::vector<QVec> seen;
    for (const geom::Polyhedron& cell : complex.cells())
        for (const QVec& v : cell.vertices())
            if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
    std::sort(seen.begin(), seen.end(), qvec_less);
    return seen;
}

std::pair<Monomial, Rat> single_term(const Poly& q, const char* what) {
    if (q.terms().size() != 1)
        throw std::invalid_argument(std::string(what) + " must be a single term");
    const auto& [m, c] = *q.terms().begin();
    if (m.empty()) throw std::invalid_argument(std::string(what) + " must be nonconstant");
    return {m, c};
}

std::vector<uint32_t> block_of(const Monomial& m) {
    std::vector<uint32_t> b;
    for (const auto& [v, e] : m) b.push_back(v);
    return b;
}

bool has_linear_var(const Monomial& m) {
    for (const auto& [v, e] : m)
        if (e == 1) return true;
    return false;
}

// Lowest-indexed exponent-one variable of A[l] whose derivative does not
// vanish at the given point, together with that derivative.
std::optional<std::pair<uint32_t, Poly>> select_linear(const NormalizedTrinomialForm& f, size_t l,
                                                       const std::map<uint32_t, Rat>& env) {
    const auto& [m, c] = *f.A[l].terms().begin();
    for (const auto& [v, exp] : m) {
        if (exp != 1) continue;
        Poly d = f.A[l].derivative(v);
        if (d.eval(env) != 0) return std::make_pair(v, d);
    }
    return std::nullopt;
}

std::map<uint32_t, Rat> point_env(const std::vector<Rat>& x) {
    std::map<uint32_t, Rat> env;
    for (uint32_t v = 0; v < x.size(); ++v) env[v] = x[v];
    return env;
}

}  // namespace

Poly relation_poly(const Relation& r) { return r.m0 * r.z + r.minf + r.mz; }

std::string ring_string(const TrinomialPresentation& p) {
    std::ostringstream os;
    os << "K[";
    for (uint32_t v = 0; v < p.vars.size(); ++v) {
        if (v) os << ", ";
        os << p.vars.name(v);
    }
    os << "]";
    if (!p.relations.empty()) {
        auto nm = [&](uint32_t v) { return p.vars.name(v); };
        os << " / (";
        for (size_t i = 0; i < p.relations.size(); ++i) {
            if (i) os << ", ";
            os << relation_poly(p.relations[i]).to_string(nm);
        }
        os << ")";
    }
    return os.str();
}

TrinomialPresentation cox_presentation(const fdiv::FDivisor& s) {
    fdiv::Report rep = fdiv::validate_fdivisor(s);
    if (!rep.ok()) {
        std::string msg = "invalid f-divisor";
        for (const std::string& issue : rep.issues) msg += "; " + issue;
        throw std::invalid_argument(msg);
    }

    TrinomialPresentation out;

    std::vector<ZVec> rays;
    for (const geom::Cone& c : s.tailFan.maximal)
        for (const ZVec& r : c.rays())
            if (std::find(rays.begin(), rays.end(), r) == rays.end()) rays.push_back(r);
    std::sort(rays.begin(), rays.end());
    for (const ZVec& r : rays) {
        if (ray_meets_degree(s, r)) continue;
        out.sVars.push_back({r, out.vars.id(s_name(r))});
    }

    std::set<fdiv::BasePoint> supp;
    for (const auto& [p, slice] : s.slices) supp.insert(p);
    supp.insert(fdiv::BasePoint::at(Rat(0)));
    supp.insert(fdiv::BasePoint::infinity());

    std::map<fdiv::BasePoint, Monomial> mono;
    for (const fdiv::BasePoint& p : supp) {
        Monomial m;
        for (const QVec& v : slice_vertex_list(s, p)) {
            Int mu = lcm_denominators(v);
            uint32_t var = out.vars.id(t_name(p, v));
            out.tVars.push_back({p, v, mu, var});
            m.emplace_back(var, static_cast<int>(mu.get_si()));
        }
        mono.emplace(p, std::move(m));
    }

    for (const fdiv::BasePoint& p : supp) {
        if (p.inf || p.z == 0) continue;
        Relation r;
        r.z = p.z;
        r.m0 = Poly::term(Rat(1), mono.at(fdiv::BasePoint::at(Rat(0))));
        r.minf = Poly::term(Rat(1), mono.at(fdiv::BasePoint::infinity()));
        r.mz = Poly::term(Rat(1), mono.at(p));
        out.relations.push_back(std::move(r));
    }
    return out;
}

Poly NormalizedTrinomialForm::relation(size_t l) const {
    if (l < 2 || l >= A.size()) throw std::invalid_argument("relation index out of range");
    return A[0] * z[l] + A[1] + A[l];
}

NormalizedTrinomialForm normalized_form(const TrinomialPresentation& p) {
    NormalizedTrinomialForm f;
    f.vars = p.vars;

    std::map<uint32_t, Int> muOf;
    for (const TGen& t : p.tVars) muOf[t.var] = t.mu;
    auto check_mu = [&](const Monomial& m, const char* what) {
        for (const auto& [v, e] : m) {
            auto it = muOf.find(v);
            if (it != muOf.end() && Int(e) != it->second)
                throw std::invalid_argument(std::string(what) +
                                            ": exponent disagrees with the vertex multiplicity");
        }
    };

    if (p.relations.empty()) {
        // Free ring: keep the blocks at 0 and infinity visible when present.
        Monomial m0, minf;
        for (const TGen& t : p.tVars) {
            if (t.p == fdiv::BasePoint::at(Rat(0)))
                m0.emplace_back(t.var, static_cast<int>(t.mu.get_si()));
            else if (t.p == fdiv::BasePoint::infinity())
                minf.emplace_back(t.var, static_cast<int>(t.mu.get_si()));
        }
        std::sort(m0.begin(), m0.end());
        std::sort(minf.begin(), minf.end());
        for (const Monomial& m : {m0, minf}) {
            if (m.empty()) continue;
            f.blocks.push_back(block_of(m));
            f.A.push_back(Poly::term(Rat(1), m));
            f.z.push_back(Rat(0));
            f.linear.push_back(has_linear_var(m));
        }
    } else {
        const Poly& p0 = p.relations[0].m0;
        const Poly& pinf = p.relations[0].minf;
        auto [m0, c0] = single_term(p0, "T^mu(0)");
        auto [minf, cinf] = single_term(pinf, "T^mu(inf)");
        check_mu(m0, "T^mu(0)");
        check_mu(minf, "T^mu(inf)");
        f.A.push_back(p0);
        f.A.push_back(pinf);
        f.z.push_back(Rat(0));
        f.z.push_back(Rat(0));
        f.blocks.push_back(block_of(m0));
        f.blocks.push_back(block_of(minf));
        f.linear.push_back(has_linear_var(m0));
        f.linear.push_back(has_linear_var(minf));

        std::set<Rat> seen;
        for (const Relation& r : p.relations) {
            if (!(r.m0 == p0) || !(r.minf == pinf))
                throw std::invalid_argument("relations disagree on T^mu(0) or T^mu(inf)");
            if (r.z == 0) throw std::invalid_argument("relation constant must be nonzero");
            if (!seen.insert(r.z).second)
                throw std::invalid_argument("relation constants must be distinct");
            auto [mz, cz] = single_term(r.mz, "T^mu(z)");
            check_mu(mz, "T^mu(z)");
            f.A.push_back(r.mz);
            f.z.push_back(r.z);
            f.blocks.push_back(block_of(mz));
            f.linear.push_back(has_linear_var(mz));
        }

        bool anyLinear = false;
        for (size_t l = 1; l < f.A.size(); ++l) anyLinear = anyLinear || f.linear[l];
        if (!anyLinear)
            throw std::invalid_argument(
                "every relation block has all exponents at least two; the toric-cover "
                "precondition fails");
    }

    std::set<uint32_t> used;
    for (const auto& b : f.blocks)
        for (uint32_t v : b)
            if (!used.insert(v).second)
                throw std::invalid_argument("relation blocks are not disjoint");
    for (uint32_t v = 0; v < f.vars.size(); ++v)
        if (!used.count(v)) f.freeVars.push_back(v);
    return f;
}

NormalizedTrinomialForm swap_block(const NormalizedTrinomialForm& f, size_t l) {
    if (l < 2 || l >= f.A.size()) throw std::invalid_argument("swap index out of range");
    NormalizedTrinomialForm g = f;
    std::swap(g.A[1], g.A[l]);
    std::swap(g.blocks[1], g.blocks[l]);
    {
        bool b1 = g.linear[1];
        g.linear[1] = g.linear[l];
        g.linear[l] = b1;
    }
    // New relations: L'_l = L_l and L'_k = L_l - L_k, so the ideal is the same.
    for (size_t k = 2; k < f.A.size(); ++k) {
        if (k == l) continue;
        g.A[k] = -f.A[k];
        g.z[k] = f.z[l] - f.z[k];
    }
    return g;
}

NormalizedTrinomialForm swap_block01(const NormalizedTrinomialForm& f) {
    if (f.A.size() < 2) throw std::invalid_argument("swap requires blocks 0 and 1");
    NormalizedTrinomialForm g = f;
    std::swap(g.A[0], g.A[1]);
    std::swap(g.blocks[0], g.blocks[1]);
    {
        bool b0 = g.linear[0];
        g.linear[0] = g.linear[1];
        g.linear[1] = b0;
    }
    // New relations are the old ones scaled by 1/z_k.
    for (size_t k = 2; k < f.A.size(); ++k) {
        g.z[k] = Rat(1) / f.z[k];
        g.A[k] = f.A[k] * g.z[k];
    }
    return g;
}

bool on_variety(const NormalizedTrinomialForm& f, const std::vector<Rat>& x) {
    if (x.size() != f.vars.size()) throw std::invalid_argument("point size mismatch");
    std::map<uint32_t, Rat> env = point_env(x);
    for (size_t l = 2; l < f.A.size(); ++l)
        if (f.relation(l).eval(env) != 0) return false;
    return true;
}

bool smooth_point_check(const NormalizedTrinomialForm& f, const std::vector<Rat>& x) {
    if (!on_variety(f, x)) throw std::invalid_argument("point does not satisfy the relations");
    std::map<uint32_t, Rat> env = point_env(x);
    size_t degenerate = 0;
    for (size_t i = 0; i < f.A.size(); ++i) {
        bool allVanish = true;
        for (uint32_t v : f.blocks[i])
            if (f.A[i].derivative(v).eval(env) != 0) {
                allVanish = false;
                break;
            }
        if (allVanish) ++degenerate;
    }
    return degenerate < 3;
}

PolynomialEndomorphism build_ga_action(const NormalizedTrinomialForm& f,
                                       const std::vector<Rat>& x, const std::vector<Rat>& c) {
    const size_t n = f.vars.size();
    if (!smooth_point_check(f, x)) throw std::invalid_argument("base point is singular");
    size_t b0 = f.blocks.empty() ? 0 : f.blocks[0].size();
    size_t b1 = f.blocks.size() < 2 ? 0 : f.blocks[1].size();
    if (c.size() != b0 + b1)
        throw std::invalid_argument("expected one coefficient per variable of blocks 0 and 1");

    std::map<uint32_t, Rat> env = point_env(x);

    PolynomialEndomorphism e;
    e.vars = f.vars;
    if (e.vars.has("t"))
        throw std::invalid_argument("a generator named t clashes with the flow parameter");
    e.tVar = e.vars.id("t");

    std::vector<Poly> b(f.A.size());
    std::vector<uint32_t> sel(f.A.size(), 0);
    Poly prod(Rat(1));
    for (size_t l = 2; l < f.A.size(); ++l) {
        auto s = select_linear(f, l, env);
        if (!s)
            throw std::invalid_argument(
                "block " + std::to_string(l) +
                " has no exponent-one variable with nonvanishing derivative at the base point");
        sel[l] = s->first;
        b[l] = s->second;
        prod = prod * b[l];
    }

    e.images.resize(n);
    for (uint32_t v = 0; v < n; ++v) e.images[v] = Poly::var(v);
    Poly tp = Poly::var(e.tVar);
    size_t ci = 0;
    for (size_t blk = 0; blk < 2 && blk < f.blocks.size(); ++blk)
        for (uint32_t v : f.blocks[blk]) {
            e.images[v] = Poly::var(v) + tp * Poly(c[ci]) * prod;
            ++ci;
        }

    if (f.A.size() >= 3) {
        auto excess = [&](size_t slot) {
            std::map<uint32_t, Poly> sub;
            for (uint32_t v : f.blocks[slot]) sub[v] = e.images[v];
            Poly diff = f.A[slot].substitute(sub) - f.A[slot];
            const auto& [pm, pc] = *prod.terms().begin();
            return diff.divide_by_term(pm, pc);
        };
        Poly h0 = excess(0);
        Poly h1 = excess(1);
        for (size_t l = 2; l < f.A.size(); ++l) {
            Poly prodExcept(Rat(1));
            for (size_t k = 2; k < f.A.size(); ++k)
                if (k != l) prodExcept = prodExcept * b[k];
            e.images[sel[l]] = Poly::var(sel[l]) - (h0 * f.z[l] + h1) * prodExcept;
        }
    }

    std::map<uint32_t, Poly> subAll;
    for (uint32_t v = 0; v < n; ++v) subAll[v] = e.images[v];
    for (size_t l = 2; l < f.A.size(); ++l) {
        Poly r = f.relation(l);
        if (!(r.substitute(subAll) == r))
            throw std::logic_error("action does not fix the trinomial relations");
    }
    std::map<uint32_t, Poly> atZero{{e.tVar, Poly(Rat(0))}};
    for (uint32_t v = 0; v < n; ++v)
        if (!(e.images[v].substitute(atZero) == Poly::var(v)))
            throw std::logic_error("flow at time zero is not the identity");
    return e;
}

Poly endo_apply(const PolynomialEndomorphism& e, const Poly& p) {
    std::map<uint32_t, Poly> sub;
    for (uint32_t v = 0; v < e.images.size(); ++v) sub[v] = e.images[v];
    return p.substitute(sub);
}

std::vector<Rat> endo_flow(const PolynomialEndomorphism& e, const std::vector<Rat>& x,
                           const Rat& t) {
    if (x.size() != e.images.size()) throw std::invalid_argument("point size mismatch");
    std::map<uint32_t, Rat> env = point_env(x);
    env[e.tVar] = t;
    std::vector<Rat> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = e.images[i].eval(env);
    return out;
}

bool flow_additive(const PolynomialEndomorphism& e) {
    poly::VarTable vt = e.vars;
    if (vt.has("s"))
        throw std::invalid_argument("a generator named s clashes with the second flow parameter");
    uint32_t sVar = vt.id("s");
    std::map<uint32_t, Poly> tToS{{e.tVar, Poly::var(sVar)}};
    std::map<uint32_t, Poly> tToSum{{e.tVar, Poly::var(sVar) + Poly::var(e.tVar)}};
    std::map<uint32_t, Poly> subT;
    for (uint32_t v = 0; v < e.images.size(); ++v) subT[v] = e.images[v];
    for (uint32_t v = 0; v < e.images.size(); ++v) {
        Poly composed = e.images[v].substitute(tToS).substitute(subT);
        if (!(composed == e.images[v].substitute(tToSum))) return false;
    }
    return true;
}

std::string endo_script(const PolynomialEndomorphism& e) {
    std::ostringstream os;
    auto nm = [&](uint32_t v) { return e.vars.name(v); };
    for (uint32_t v = 0; v < e.images.size(); ++v) {
        if (v) os << "\n";
        os << e.vars.name(v) << " -> " << e.images[v].to_string(nm);
    }
    return os.str();
}

std::vector<std::pair<PolynomialEndomorphism, Rat>> transitivity_demo(
    const NormalizedTrinomialForm& f, const std::vector<Rat>& x, const std::vector<Rat>& y) {
    const size_t n = f.vars.size();
    if (x.size() != n || y.size() != n) throw std::invalid_argument("point size mismatch");
    if (!smooth_point_check(f, x)) throw std::invalid_argument("source point is singular");
    if (!smooth_point_check(f, y)) throw std::invalid_argument("target point is singular");
    if (x == y) return {};
    for (const Rat& v : y)
        if (v == 0) throw std::invalid_argument("target point must have nonzero coordinates");

    std::vector<std::pair<PolynomialEndomorphism, Rat>> out;
    std::vector<Rat> cur = x;
    auto run = [&](const PolynomialEndomorphism& e, const Rat& t) {
        cur = endo_flow(e, cur, t);
        out.emplace_back(e, t);
    };

    auto translate = [&](const std::vector<uint32_t>& coords) {
        std::vector<uint32_t> moved;
        for (uint32_t v : coords)
            if (cur[v] != y[v]) moved.push_back(v);
        if (moved.empty()) return;
        PolynomialEndomorphism e;
        e.vars = f.vars;
        if (e.vars.has("t"))
            throw std::invalid_argument("a generator named t clashes with the flow parameter");
        e.tVar = e.vars.id("t");
        e.images.resize(n);
        for (uint32_t v = 0; v < n; ++v) e.images[v] = Poly::var(v);
        for (uint32_t v : moved)
            e.images[v] = Poly::var(v) + Poly::var(e.tVar) * Poly(Rat(y[v] - cur[v]));
        run(e, Rat(1));
    };

    translate(f.freeVars);

    if (f.A.size() <= 2) {
        // No relations constrain the block coordinates.
        std::vector<uint32_t> rest;
        for (const auto& blk : f.blocks) rest.insert(rest.end(), blk.begin(), blk.end());
        translate(rest);
        if (cur != y) throw std::logic_error("translation schedule failed to reach the target");
        return out;
    }

    // Rearrange so every block past slot 1 has an exponent-one variable.
    NormalizedTrinomialForm w = f;
    {
        size_t nonlinear = 0;
        for (size_t i = 0; i < w.linear.size(); ++i)
            if (!w.linear[i]) ++nonlinear;
        if (nonlinear > 2)
            throw std::invalid_argument("more than two blocks without a linear variable");
        for (size_t l = 2; l < w.A.size(); ++l) {
            if (w.linear[l]) continue;
            if (!w.linear[1] && w.linear[0]) w = swap_block01(w);
            if (!w.linear[1])
                throw std::invalid_argument("more than two blocks without a linear variable");
            w = swap_block(w, l);
        }
    }

    // One flow of the action attached to `form`, moving the listed block-0/1
    // coordinates of `form` to their target values.
    auto phi_toward = [&](const NormalizedTrinomialForm& form,
                          const std::vector<uint32_t>& targets) {
        std::map<uint32_t, Rat> env = point_env(cur);
        Rat prod = 1;
        for (size_t k = 2; k < form.A.size(); ++k) {
            auto s = select_linear(form, k, env);
            if (!s)
                throw std::invalid_argument(
                    "block " + std::to_string(k) +
                    " has no exponent-one variable with nonvanishing derivative at an "
                    "intermediate point");
            prod *= s->second.eval(env);
        }
        std::vector<Rat> c;
        for (size_t blk = 0; blk < 2; ++blk)
            for (uint32_t v : form.blocks[blk]) {
                bool want = std::find(targets.begin(), targets.end(), v) != targets.end();
                c.push_back(want ? Rat((y[v] - cur[v]) / prod) : Rat(0));
            }
        run(build_ga_action(form, cur, c), Rat(1));
    };

    {
        std::vector<uint32_t> both = w.blocks[0];
        both.insert(both.end(), w.blocks[1].begin(), w.blocks[1].end());
        bool need = false;
        for (uint32_t v : both) need = need || cur[v] != y[v];
        if (need) phi_toward(w, both);
    }

    // Per block: equalize everything except the designated exponent-one
    // variable, whose final value the relation forces.
    for (size_t l = 2; l < w.A.size(); ++l) {
        const auto& [m, mc] = *w.A[l].terms().begin();
        uint32_t desig = 0;
        bool have = false;
        for (const auto& [v, exp] : m)
            if (exp == 1) {
                desig = v;
                have = true;
                break;
            }
        if (!have) throw std::logic_error("arranged form lost its linear variable");
        std::vector<uint32_t> rest;
        for (uint32_t v : w.blocks[l])
            if (v != desig && cur[v] != y[v]) rest.push_back(v);
        if (!rest.empty()) phi_toward(swap_block(w, l), rest);
    }

    {
        bool need = false;
        for (uint32_t v : w.blocks[1]) need = need || cur[v] != y[v];
        if (need) phi_toward(w, w.blocks[1]);
    }

    if (cur != y) throw std::logic_error("flow schedule failed to reach the target");
    return out;
}

namespace {

// Membership of a homogeneous polynomial in the ideal spanned by homogeneous
// generators, decided degree by degree with exact linear algebra.
bool in_homogeneous_ideal(const Poly& p, const std::vector<Poly>& gens, uint32_t nvars) {
    if (p.is_zero()) return true;
    int deg = p.degree();
    std::vector<Poly> cols;
    for (const Poly& g : gens) {
        if (g.is_zero() || g.degree() > deg) continue;
        for (const Monomial& m : poly::all_monomials(nvars, deg - g.degree()))
            if (poly::monomial_degree(m) == deg - g.degree())
                cols.push_back(Poly::term(Rat(1), m) * g);
    }
    if (cols.empty()) return false;
    std::map<Monomial, size_t> rows;
    auto touch = [&](const Poly& q) {
        for (const auto& [m, c] : q.terms())
            if (!rows.count(m)) {
                size_t i = rows.size();
                rows.emplace(m, i);
            }
    };
    touch(p);
    for (const Poly& q : cols) touch(q);
    QMat a(rows.size(), QVec(cols.size(), Rat(0)));
    QVec rhs(rows.size(), Rat(0));
    for (const auto& [m, idx] : rows) rhs[idx] = p.coeff(m);
    for (size_t j = 0; j < cols.size(); ++j)
        for (const auto& [m, c] : cols[j].terms()) a[rows.at(m)][j] = c;
    return tvar::solve(a, rhs).has_value();
}

}  // namespace

HomogeneousDerivation homogenize_derivation(const std::vector<Poly>& chartImages,
                                            const std::vector<Poly>& relations, int d) {
    if (d < 0) throw std::invalid_argument("d must be nonnegative");
    const size_t n = chartImages.size();
    const uint32_t nvars = static_cast<uint32_t>(n + 1);

    HomogeneousDerivation out;
    for (size_t i = 0; i <= n; ++i) out.vars.id("x" + std::to_string(i));
    out.degree = d + 1;

    for (const Poly& q : chartImages)
        for (uint32_t v : q.variables())
            if (v >= n)
                throw std::invalid_argument("chart derivation references an unknown coordinate");
    for (const Poly& g : relations) {
        for (uint32_t v : g.variables())
            if (v >= nvars) throw std::invalid_argument("relation references an unknown coordinate");
        if (g.is_zero()) continue;
        int dg = g.degree();
        for (const auto& [m, c] : g.terms())
            if (poly::monomial_degree(m) != dg)
                throw std::invalid_argument("relations must be homogeneous");
    }

    out.images.assign(n + 1, Poly());
    for (size_t i = 0; i < n; ++i) {
        Poly img;
        for (const auto& [m, c] : chartImages[i].terms()) {
            int e = poly::monomial_degree(m);
            if (d + 1 < e)
                throw std::invalid_argument("d too small: a chart image term has degree " +
                                            std::to_string(e));
            Monomial shifted;
            if (d + 1 - e > 0) shifted.emplace_back(0, d + 1 - e);
            for (const auto& [v, exp] : m) shifted.emplace_back(v + 1, exp);
            img = img + Poly::term(c, shifted);
        }
        out.images[i + 1] = img;
    }

    for (const Poly& img : out.images)
        for (const auto& [m, c] : img.terms())
            if (poly::monomial_degree(m) != d + 1)
                throw std::logic_error("image fails to be homogeneous");
    if (!out.images[0].is_zero()) throw std::logic_error("x0 must be annihilated");

    auto apply = [&](const Poly& p) {
        Poly r;
        for (uint32_t v = 0; v < nvars; ++v) r = r + p.derivative(v) * out.images[v];
        return r;
    };

    for (const Poly& g : relations)
        if (!in_homogeneous_ideal(apply(g), relations, nvars))
            throw std::invalid_argument("derivation does not preserve the relation ideal");

    long bound = 1;
    for (size_t i = 0; i <= n; ++i) {
        if (bound > 1000000 / (d + 2)) {
            bound = 1000000;
            break;
        }
        bound *= d + 2;
    }
    out.nilpotentWithinBound = true;
    for (uint32_t v = 0; v < nvars; ++v) {
        Poly p = Poly::var(v);
        int steps = -1;
        for (long k = 1; k <= bound; ++k) {
            p = apply(p);
            if (p.is_zero() || in_homogeneous_ideal(p, relations, nvars)) {
                steps = static_cast<int>(k);
                break;
            }
        }
        if (steps < 0) out.nilpotentWithinBound = false;
        out.nilpotencySteps.push_back(steps);
    }
    return out;
}

}  // namespace tvar::coxgen
