#include "tvar/polyhedron.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tvar::geom {

namespace {

bool zvec_less(const ZVec& a, const ZVec& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = 0; i < a.size(); ++i) {
        int c = cmp(a[i], b[i]);
        if (c != 0) return c < 0;
    }
    return false;
}

void sort_unique(std::vector<ZVec>& v) {
    std::sort(v.begin(), v.end(), zvec_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Local reduced row echelon form; returns pivot columns.
std::vector<size_t> rref_local(QMat& m) {
    std::vector<size_t> pivots;
    size_t rows = m.size();
    size_t cols = rows ? m[0].size() : 0;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && m[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        Rat inv = 1 / m[r][c];
        for (size_t j = 0; j < cols; ++j) m[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rat f = m[i][c];
            for (size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    return pivots;
}

// Canonical form for (rays mod lineality, lineality basis).
void canonicalize_parts(std::vector<ZVec>& rays, std::vector<ZVec>& lin) {
    QMat lm;
    for (const ZVec& l : lin) lm.push_back(to_qvec(l));
    std::vector<size_t> pivots = rref_local(lm);
    lin.clear();
    for (const QVec& row : lm) lin.push_back(primitive_vector(row));
    sort_unique(lin);

    std::vector<ZVec> out;
    for (const ZVec& rz : rays) {
        QVec r = to_qvec(rz);
        for (size_t i = 0; i < lm.size(); ++i) {
            const Rat& rp = r[pivots[i]];
            if (rp != 0) {
                Rat f = rp / lm[i][pivots[i]];
                r = vec_sub(r, vec_scale(f, lm[i]));
            }
        }
        if (!is_zero_vec(r)) out.push_back(primitive_vector(r));
    }
    sort_unique(out);
    rays = out;
}

struct TrackedRay {
    QVec v;
    std::vector<uint64_t> tight;
};

void set_bit(std::vector<uint64_t>& m, size_t i) { m[i / 64] |= (uint64_t(1) << (i % 64)); }

bool subset_of(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}

std::vector<uint64_t> intersect_bits(const std::vector<uint64_t>& a,
                                     const std::vector<uint64_t>& b) {
    std::vector<uint64_t> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] & b[i];
    return r;
}

QVec normalize_ray(const QVec& v) { return to_qvec(primitive_vector(v)); }

}  // namespace

DDResult dd_cone(size_t rank, const std::vector<QVec>& ineqs_in, const std::vector<QVec>& eqs) {
    if (rank > kMaxRank + 1)  // +1 leaves room for homogenization
        throw std::invalid_argument("dd_cone: rank above supported bound");
    std::vector<QVec> rows;
    for (const QVec& e : eqs) {
        if (e.size() != rank) throw std::invalid_argument("dd_cone: ragged equality row");
        rows.push_back(e);
        rows.push_back(vec_scale(Rat(-1), e));
    }
    for (const QVec& a : ineqs_in) {
        if (a.size() != rank) throw std::invalid_argument("dd_cone: ragged inequality row");
        rows.push_back(a);
    }

    const size_t m = rows.size();
    const size_t words = m == 0 ? 1 : (m + 63) / 64;

    std::vector<QVec> lin;
    for (size_t i = 0; i < rank; ++i) {
        QVec e(rank, Rat(0));
        e[i] = 1;
        lin.push_back(e);
    }
    std::vector<TrackedRay> rays;

    for (size_t k = 0; k < m; ++k) {
        const QVec& a = rows[k];

        size_t l0 = lin.size();
        for (size_t i = 0; i < lin.size(); ++i)
            if (dot(a, lin[i]) != 0) {
                l0 = i;
                break;
            }
        if (l0 < lin.size()) {
            QVec v0 = lin[l0];
            Rat av0 = dot(a, v0);
            if (av0 < 0) {
                v0 = vec_scale(Rat(-1), v0);
                av0 = -av0;
            }
            std::vector<QVec> newlin;
            for (size_t i = 0; i < lin.size(); ++i) {
                if (i == l0) continue;
                Rat c = dot(a, lin[i]) / av0;
                newlin.push_back(vec_sub(lin[i], vec_scale(c, v0)));
            }
            lin = std::move(newlin);
            for (TrackedRay& r : rays) {
                Rat c = dot(a, r.v) / av0;
                if (c != 0) r.v = normalize_ray(vec_sub(r.v, vec_scale(c, v0)));
                set_bit(r.tight, k);  // projected rays satisfy a.r = 0
            }
            TrackedRay nr;
            nr.v = normalize_ray(v0);
            nr.tight.assign(words, 0);
            for (size_t i = 0; i < k; ++i) set_bit(nr.tight, i);
            rays.push_back(std::move(nr));
            continue;
        }

        std::vector<size_t> pos, zero, neg;
        std::vector<Rat> val(rays.size());
        for (size_t i = 0; i < rays.size(); ++i) {
            val[i] = dot(a, rays[i].v);
            int s = sgn(val[i]);
            (s > 0 ? pos : s == 0 ? zero : neg).push_back(i);
        }
        if (neg.empty()) {
            for (size_t i : zero) set_bit(rays[i].tight, k);
            continue;
        }

        std::vector<TrackedRay> next;
        for (size_t i : pos) next.push_back(rays[i]);
        for (size_t i : zero) {
            TrackedRay r = rays[i];
            set_bit(r.tight, k);
            next.push_back(std::move(r));
        }
        for (size_t ip : pos) {
            for (size_t in : neg) {
                std::vector<uint64_t> common = intersect_bits(rays[ip].tight, rays[in].tight);
                bool adjacent = true;
                for (size_t j = 0; j < rays.size(); ++j) {
                    if (j == ip || j == in) continue;
                    if (subset_of(common, rays[j].tight)) {
                        adjacent = false;
                        break;
                    }
                }
                if (!adjacent) continue;
                TrackedRay nr;
                nr.v = normalize_ray(
                    vec_sub(vec_scale(val[ip], rays[in].v), vec_scale(val[in], rays[ip].v)));
                nr.tight = std::move(common);
                set_bit(nr.tight, k);
                next.push_back(std::move(nr));
            }
        }
        rays = std::move(next);
    }

    DDResult res;
    for (const TrackedRay& r : rays) res.rays.push_back(primitive_vector(r.v));
    for (const QVec& l : lin) res.lineality.push_back(primitive_vector(l));
    canonicalize_parts(res.rays, res.lineality);
    return res;
}

// ---------------------------------------------------------------- Cone

Cone Cone::from_rays(size_t rank, const std::vector<QVec>& gens) {
    if (rank > kMaxRank) throw std::invalid_argument("Cone: rank above supported bound");
    std::vector<QVec> rows;
    for (const QVec& g : gens) {
        if (g.size() != rank) throw std::invalid_argument("Cone: generator of wrong rank");
        if (!is_zero_vec(g)) rows.push_back(g);
    }
    // Double dualization canonicalizes and yields the H-rep as a side effect.
    DDResult dual = dd_cone(rank, rows, {});
    std::vector<QVec> dual_rows, dual_eqs;
    for (const ZVec& r : dual.rays) dual_rows.push_back(to_qvec(r));
    for (const ZVec& l : dual.lineality) dual_eqs.push_back(to_qvec(l));
    DDResult primal = dd_cone(rank, dual_rows, dual_eqs);
    Cone c;
    c.rank_ = rank;
    c.rays_ = std::move(primal.rays);
    c.lineality_ = std::move(primal.lineality);
    c.hrep_ = ConeHRep{dual.rays, dual.lineality};
    return c;
}

Cone Cone::from_rays_z(size_t rank, const std::vector<ZVec>& gens) {
    std::vector<QVec> q;
    for (const ZVec& g : gens) q.push_back(to_qvec(g));
    return from_rays(rank, q);
}

Cone Cone::from_inequalities(size_t rank, const std::vector<QVec>& ineqs,
                             const std::vector<QVec>& eqs) {
    if (rank > kMaxRank) throw std::invalid_argument("Cone: rank above supported bound");
    DDResult r = dd_cone(rank, ineqs, eqs);
    Cone c;
    c.rank_ = rank;
    c.rays_ = std::move(r.rays);
    c.lineality_ = std::move(r.lineality);
    return c;
}

const ConeHRep& Cone::hrep() const {
    if (!hrep_) {
        std::vector<QVec> rows;
        for (const ZVec& r : rays_) rows.push_back(to_qvec(r));
        for (const ZVec& l : lineality_) rows.push_back(to_qvec(l));
        std::vector<QVec> eqs;
        for (const ZVec& l : lineality_) eqs.push_back(to_qvec(l));
        // dual cone of this = {u : u.r >= 0, u.l = 0}
        DDResult d = dd_cone(rank_, rows, eqs);
        hrep_ = ConeHRep{d.rays, d.lineality};
    }
    return *hrep_;
}

std::vector<ZVec> Cone::generators_folded() const {
    std::vector<ZVec> g = rays_;
    for (const ZVec& l : lineality_) {
        g.push_back(l);
        ZVec neg(l.size());
        for (size_t i = 0; i < l.size(); ++i) neg[i] = -l[i];
        g.push_back(neg);
    }
    return g;
}

int Cone::dim() const {
    QMat m;
    for (const ZVec& r : rays_) m.push_back(to_qvec(r));
    for (const ZVec& l : lineality_) m.push_back(to_qvec(l));
    return m.empty() ? 0 : tvar::rank(m);
}

bool Cone::contains(const QVec& x) const {
    const ConeHRep& h = hrep();
    for (const ZVec& a : h.ineqs)
        if (dot(to_qvec(a), x) < 0) return false;
    for (const ZVec& e : h.eqs)
        if (dot(to_qvec(e), x) != 0) return false;
    return true;
}

bool Cone::contains_cone(const Cone& inner) const {
    for (const ZVec& g : inner.generators_folded())
        if (!contains(to_qvec(g))) return false;
    return true;
}

Cone Cone::dual() const {
    const ConeHRep& h = hrep();
    Cone c;
    c.rank_ = rank_;
    c.rays_ = h.ineqs;
    c.lineality_ = h.eqs;
    canonicalize_parts(c.rays_, c.lineality_);
    return c;
}

Cone Cone::intersect(const Cone& other) const {
    if (rank_ != other.rank_) throw std::invalid_argument("Cone::intersect: rank mismatch");
    std::vector<QVec> ineqs, eqs;
    for (const Cone* c : {this, &other}) {
        const ConeHRep& h = c->hrep();
        for (const ZVec& a : h.ineqs) ineqs.push_back(to_qvec(a));
        for (const ZVec& e : h.eqs) eqs.push_back(to_qvec(e));
    }
    return from_inequalities(rank_, ineqs, eqs);
}

std::vector<Cone> Cone::faces() const {
    std::map<std::string, Cone> seen;
    std::vector<Cone> queue{*this};
    seen[key()] = *this;
    while (!queue.empty()) {
        Cone c = queue.back();
        queue.pop_back();
        const ConeHRep& h = c.hrep();
        for (const ZVec& a : h.ineqs) {
            std::vector<QVec> ineqs;
            for (const ZVec& b : h.ineqs) ineqs.push_back(to_qvec(b));
            std::vector<QVec> eqs{to_qvec(a)};
            for (const ZVec& e : h.eqs) eqs.push_back(to_qvec(e));
            Cone f = from_inequalities(c.rank_, ineqs, eqs);
            std::string k = f.key();
            if (!seen.count(k)) {
                seen[k] = f;
                queue.push_back(f);
            }
        }
    }
    std::vector<Cone> out;
    for (auto& [k, c] : seen) out.push_back(c);
    return out;
}

bool Cone::is_face_of(const Cone& other) const {
    if (rank_ != other.rank_) return false;
    if (!other.contains_cone(*this)) return false;
    const ConeHRep& h = other.hrep();
    std::vector<QVec> eqs;
    for (const ZVec& e : h.eqs) eqs.push_back(to_qvec(e));
    std::vector<QVec> ineqs;
    for (const ZVec& a : h.ineqs) {
        bool tight = true;
        for (const ZVec& g : generators_folded())
            if (dot(to_qvec(a), to_qvec(g)) != 0) {
                tight = false;
                break;
            }
        (tight ? eqs : ineqs).push_back(to_qvec(a));
    }
    Cone f = from_inequalities(rank_, ineqs, eqs);
    return f == *this;
}

std::string Cone::key() const {
    std::ostringstream os;
    os << "C" << rank_ << "|";
    for (const ZVec& r : rays_) {
        for (const Int& x : r) os << x.get_str() << ",";
        os << ";";
    }
    os << "|";
    for (const ZVec& l : lineality_) {
        for (const Int& x : l) os << x.get_str() << ",";
        os << ";";
    }
    return os.str();
}

// ---------------------------------------------------------------- Polyhedron

Polyhedron Polyhedron::empty(size_t rank) {
    Polyhedron p;
    p.rank_ = rank;
    return p;
}

Polyhedron Polyhedron::point(const QVec& v) {
    return from_generators(v.size(), {v}, {});
}

Polyhedron Polyhedron::from_cone(const Cone& c) {
    std::vector<QVec> rays;
    for (const ZVec& g : c.generators_folded()) rays.push_back(to_qvec(g));
    return from_generators(c.rank(), {QVec(c.rank(), Rat(0))}, rays);
}

Polyhedron Polyhedron::from_generators(size_t rank, const std::vector<QVec>& vertices,
                                       const std::vector<QVec>& rays) {
    if (rank > kMaxRank) throw std::invalid_argument("Polyhedron: rank above supported bound");
    if (vertices.empty()) return empty(rank);
    std::vector<QVec> gens;
    for (const QVec& v : vertices) {
        if (v.size() != rank) throw std::invalid_argument("Polyhedron: vertex of wrong rank");
        QVec g{Rat(1)};
        g.insert(g.end(), v.begin(), v.end());
        gens.push_back(g);
    }
    for (const QVec& r : rays) {
        if (r.size() != rank) throw std::invalid_argument("Polyhedron: ray of wrong rank");
        if (is_zero_vec(r)) continue;
        QVec g{Rat(0)};
        g.insert(g.end(), r.begin(), r.end());
        gens.push_back(g);
    }
    Cone hc = Cone::from_rays(rank + 1, gens);
    Polyhedron p;
    p.rank_ = rank;
    for (const ZVec& r : hc.rays()) {
        if (r[0] > 0) {
            QVec v(rank);
            for (size_t i = 0; i < rank; ++i) v[i] = Rat(r[i + 1]) / Rat(r[0]);
            p.vertices_.push_back(std::move(v));
        } else {
            ZVec w(r.begin() + 1, r.end());
            p.rays_.push_back(std::move(w));
        }
    }
    for (const ZVec& l : hc.lineality()) {
        ZVec w(l.begin() + 1, l.end());
        p.lineality_.push_back(std::move(w));
    }
    canonicalize_parts(p.rays_, p.lineality_);
    std::sort(p.vertices_.begin(), p.vertices_.end(), qvec_less);
    // H-rep of the polyhedron from the cone's facets.
    const ConeHRep& h = hc.hrep();
    PolyHRep ph;
    for (const ZVec& a : h.ineqs) {
        ZVec n(a.begin() + 1, a.end());
        bool zero = true;
        for (const Int& x : n)
            if (x != 0) {
                zero = false;
                break;
            }
        if (zero) continue;  // the x0 >= 0 facet
        ph.ineqs.emplace_back(std::move(n), -a[0]);
    }
    for (const ZVec& e : h.eqs) {
        ZVec n(e.begin() + 1, e.end());
        bool zero = true;
        for (const Int& x : n)
            if (x != 0) {
                zero = false;
                break;
            }
        if (zero) continue;
        ph.eqs.emplace_back(std::move(n), -e[0]);
    }
    p.hrep_ = std::move(ph);
    return p;
}

Polyhedron Polyhedron::from_inequalities(size_t rank,
                                         const std::vector<std::pair<QVec, Rat>>& ineqs,
                                         const std::vector<std::pair<QVec, Rat>>& eqs) {
    if (rank > kMaxRank) throw std::invalid_argument("Polyhedron: rank above supported bound");
    std::vector<QVec> rows, eqrows;
    QVec x0(rank + 1, Rat(0));
    x0[0] = 1;
    rows.push_back(x0);
    for (const auto& [a, b] : ineqs) {
        if (a.size() != rank) throw std::invalid_argument("Polyhedron: row of wrong rank");
        QVec g{-b};
        g.insert(g.end(), a.begin(), a.end());
        rows.push_back(g);
    }
    for (const auto& [a, b] : eqs) {
        if (a.size() != rank) throw std::invalid_argument("Polyhedron: row of wrong rank");
        QVec g{-b};
        g.insert(g.end(), a.begin(), a.end());
        eqrows.push_back(g);
    }
    DDResult r = dd_cone(rank + 1, rows, eqrows);
    bool has_vertex = false;
    for (const ZVec& h : r.rays)
        if (h[0] > 0) has_vertex = true;
    if (!has_vertex) return empty(rank);
    std::vector<QVec> verts, rays2;
    for (const ZVec& h : r.rays) {
        if (h[0] > 0) {
            QVec v(rank);
            for (size_t i = 0; i < rank; ++i) v[i] = Rat(h[i + 1]) / Rat(h[0]);
            verts.push_back(std::move(v));
        } else {
            QVec w(rank);
            for (size_t i = 0; i < rank; ++i) w[i] = Rat(h[i + 1]);
            rays2.push_back(std::move(w));
        }
    }
    for (const ZVec& l : r.lineality) {
        QVec w(rank);
        for (size_t i = 0; i < rank; ++i) w[i] = Rat(l[i + 1]);
        rays2.push_back(w);
        rays2.push_back(vec_scale(Rat(-1), w));
    }
    return from_generators(rank, verts, rays2);
}

const PolyHRep& Polyhedron::hrep() const {
    if (!hrep_) {
        if (is_empty()) {
            // 0 >= 1, an unsatisfiable row
            PolyHRep h;
            h.ineqs.emplace_back(ZVec(rank_, 0), Int(1));
            hrep_ = std::move(h);
        } else {
            std::vector<QVec> verts = vertices_;
            std::vector<QVec> rays;
            for (const ZVec& r : rays_folded()) rays.push_back(to_qvec(r));
            Polyhedron q = from_generators(rank_, verts, rays);
            hrep_ = q.hrep();
        }
    }
    return *hrep_;
}

std::vector<ZVec> Polyhedron::rays_folded() const {
    std::vector<ZVec> g = rays_;
    for (const ZVec& l : lineality_) {
        g.push_back(l);
        ZVec neg(l.size());
        for (size_t i = 0; i < l.size(); ++i) neg[i] = -l[i];
        g.push_back(neg);
    }
    sort_unique(g);
    return g;
}

int Polyhedron::dim() const {
    if (is_empty()) return -1;
    QMat m;
    for (size_t i = 1; i < vertices_.size(); ++i) m.push_back(vec_sub(vertices_[i], vertices_[0]));
    for (const ZVec& r : rays_) m.push_back(to_qvec(r));
    for (const ZVec& l : lineality_) m.push_back(to_qvec(l));
    return m.empty() ? 0 : tvar::rank(m);
}

bool Polyhedron::contains_point(const QVec& x) const {
    if (is_empty()) return false;
    const PolyHRep& h = hrep();
    for (const auto& [a, b] : h.ineqs)
        if (dot(to_qvec(a), x) < Rat(b)) return false;
    for (const auto& [a, b] : h.eqs)
        if (dot(to_qvec(a), x) != Rat(b)) return false;
    return true;
}

bool Polyhedron::contains(const Polyhedron& other) const {
    if (other.is_empty()) return true;
    if (is_empty()) return false;
    for (const QVec& v : other.vertices_)
        if (!contains_point(v)) return false;
    Cone tail = tail_cone();
    for (const ZVec& r : other.rays_folded())
        if (!tail.contains(to_qvec(r))) return false;
    return true;
}

Cone Polyhedron::tail_cone() const {
    if (is_empty()) throw std::invalid_argument("tail_cone: empty polyhedron");
    return Cone::from_rays_z(rank_, rays_folded());
}

Polyhedron Polyhedron::translate(const QVec& t) const {
    if (is_empty()) return *this;
    std::vector<QVec> verts;
    for (const QVec& v : vertices_) verts.push_back(vec_add(v, t));
    std::vector<QVec> rays;
    for (const ZVec& r : rays_folded()) rays.push_back(to_qvec(r));
    return from_generators(rank_, verts, rays);
}

std::vector<Polyhedron> Polyhedron::facets() const {
    std::vector<Polyhedron> out;
    if (is_empty()) return out;
    const PolyHRep& h = hrep();
    for (const auto& [a, b] : h.ineqs) {
        std::vector<std::pair<QVec, Rat>> ineqs, eqs;
        for (const auto& [a2, b2] : h.ineqs) ineqs.emplace_back(to_qvec(a2), Rat(b2));
        for (const auto& [a2, b2] : h.eqs) eqs.emplace_back(to_qvec(a2), Rat(b2));
        eqs.emplace_back(to_qvec(a), Rat(b));
        Polyhedron f = from_inequalities(rank_, ineqs, eqs);
        if (!f.is_empty()) out.push_back(std::move(f));
    }
    return out;
}

std::vector<Polyhedron> Polyhedron::faces() const {
    std::map<std::string, Polyhedron> seen;
    if (is_empty()) return {};
    seen[key()] = *this;
    std::vector<Polyhedron> queue{*this};
    while (!queue.empty()) {
        Polyhedron c = queue.back();
        queue.pop_back();
        for (Polyhedron& f : c.facets()) {
            std::string k = f.key();
            if (!seen.count(k)) {
                seen[k] = f;
                queue.push_back(std::move(f));
            }
        }
    }
    std::vector<Polyhedron> out;
    for (auto& [k, p] : seen) out.push_back(p);
    return out;
}

bool Polyhedron::is_face_of(const Polyhedron& other) const {
    if (rank_ != other.rank_) return false;
    if (is_empty()) return true;
    if (!other.contains(*this)) return false;
    const PolyHRep& h = other.hrep();
    std::vector<std::pair<QVec, Rat>> ineqs, eqs;
    for (const auto& [a, b] : h.eqs) eqs.emplace_back(to_qvec(a), Rat(b));
    for (const auto& [a, b] : h.ineqs) {
        bool tight = true;
        for (const QVec& v : vertices_)
            if (dot(to_qvec(a), v) != Rat(b)) {
                tight = false;
                break;
            }
        if (tight)
            for (const ZVec& r : rays_folded())
                if (dot(to_qvec(a), to_qvec(r)) != 0) {
                    tight = false;
                    break;
                }
        if (tight)
            eqs.emplace_back(to_qvec(a), Rat(b));
        else
            ineqs.emplace_back(to_qvec(a), Rat(b));
    }
    Polyhedron f = from_inequalities(rank_, ineqs, eqs);
    return f == *this;
}

std::string Polyhedron::key() const {
    std::ostringstream os;
    os << "P" << rank_ << "|";
    for (const QVec& v : vertices_) {
        for (const Rat& x : v) os << format_rat(x) << ",";
        os << ";";
    }
    os << "|";
    for (const ZVec& r : rays_) {
        for (const Int& x : r) os << x.get_str() << ",";
        os << ";";
    }
    os << "|";
    for (const ZVec& l : lineality_) {
        for (const Int& x : l) os << x.get_str() << ",";
        os << ";";
    }
    return os.str();
}

// ------------------------------------------------------------ free functions

Polyhedron minkowski_sum(const Polyhedron& a, const Polyhedron& b) {
    if (a.rank() != b.rank()) throw std::invalid_argument("minkowski_sum: rank mismatch");
    if (a.is_empty() || b.is_empty()) return Polyhedron::empty(a.rank());
    std::vector<QVec> verts;
    for (const QVec& u : a.vertices())
        for (const QVec& v : b.vertices()) verts.push_back(vec_add(u, v));
    std::vector<QVec> rays;
    for (const ZVec& r : a.rays_folded()) rays.push_back(to_qvec(r));
    for (const ZVec& r : b.rays_folded()) rays.push_back(to_qvec(r));
    return Polyhedron::from_generators(a.rank(), verts, rays);
}

Polyhedron minkowski_sum(const std::vector<Polyhedron>& parts) {
    if (parts.empty()) throw std::invalid_argument("minkowski_sum: empty list");
    Polyhedron acc = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) acc = minkowski_sum(acc, parts[i]);
    return acc;
}

Polyhedron intersect(const Polyhedron& a, const Polyhedron& b) {
    if (a.rank() != b.rank()) throw std::invalid_argument("intersect: rank mismatch");
    if (a.is_empty() || b.is_empty()) return Polyhedron::empty(a.rank());
    std::vector<std::pair<QVec, Rat>> ineqs, eqs;
    for (const Polyhedron* p : {&a, &b}) {
        const PolyHRep& h = p->hrep();
        for (const auto& [row, c] : h.ineqs) ineqs.emplace_back(to_qvec(row), Rat(c));
        for (const auto& [row, c] : h.eqs) eqs.emplace_back(to_qvec(row), Rat(c));
    }
    return Polyhedron::from_inequalities(a.rank(), ineqs, eqs);
}

Cone tail_cone(const Polyhedron& p) { return p.tail_cone(); }

Cone dual_cone(const Cone& c) { return c.dual(); }

bool cone_contains_cone(const Cone& outer, const Cone& inner) {
    return outer.contains_cone(inner);
}

std::optional<ZVec> is_lattice_translate(const Polyhedron& p, const Cone& c) {
    if (p.is_empty() || p.rank() != c.rank()) return std::nullopt;
    if (!(p.tail_cone() == c)) return std::nullopt;
    if (p.vertices().size() != 1) return std::nullopt;
    const QVec& q = p.vertices()[0];
    Polyhedron qc = Polyhedron::from_cone(c).translate(q);
    if (!(qc == p)) return std::nullopt;
    if (is_lattice_point(q)) {
        ZVec v(q.size());
        for (size_t i = 0; i < q.size(); ++i) v[i] = q[i].get_num();
        return v;
    }
    if (c.lineality().empty()) return std::nullopt;
    // Integer point in q + span(lineality): rows of the orthogonal
    // complement B give B v = B q.
    QMat linrows;
    for (const ZVec& l : c.lineality()) linrows.push_back(to_qvec(l));
    std::vector<QVec> b = kernel_basis(linrows, c.rank());
    ZMat arows;
    ZVec rhs;
    for (const QVec& row : b) {
        Rat r = dot(row, q);
        QVec full = row;
        full.push_back(r);
        Int l = lcm_denominators(full);
        ZVec ar(row.size());
        for (size_t i = 0; i < row.size(); ++i) ar[i] = Rat(row[i] * Rat(l)).get_num();
        arows.push_back(std::move(ar));
        rhs.push_back(Rat(r * Rat(l)).get_num());
    }
    auto sol = solve_integer(arows, rhs);
    if (!sol) return std::nullopt;
    QVec vq = to_qvec(sol->particular);
    Polyhedron vc = Polyhedron::from_cone(c).translate(vq);
    if (!(vc == p)) return std::nullopt;
    return sol->particular;
}

namespace {

std::vector<ZVec> lattice_points_impl(const Polyhedron& p, bool parallel) {
    if (p.is_empty()) return {};
    if (!p.is_bounded()) throw std::invalid_argument("lattice_points: unbounded polyhedron");
    size_t r = p.rank();
    std::vector<Int> lo(r), hi(r);
    for (size_t i = 0; i < r; ++i) {
        Rat mn = p.vertices()[0][i], mx = p.vertices()[0][i];
        for (const QVec& v : p.vertices()) {
            if (v[i] < mn) mn = v[i];
            if (v[i] > mx) mx = v[i];
        }
        lo[i] = rat_ceil(mn);
        hi[i] = rat_floor(mx);
        if (hi[i] < lo[i]) return {};
    }
    if (r == 0) return {ZVec{}};

    long n0 = mpz_get_si(Int(hi[0] - lo[0] + 1).get_mpz_t());
    std::vector<std::vector<ZVec>> buckets(n0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long s = 0; s < n0; ++s) {
        ZVec x(r);
        x[0] = lo[0] + s;
        std::vector<ZVec> local;
        // odometer over remaining coordinates
        for (size_t i = 1; i < r; ++i) x[i] = lo[i];
        while (true) {
            QVec q = to_qvec(x);
            if (p.contains_point(q)) local.push_back(x);
            size_t i = r - 1;
            while (i >= 1) {
                ++x[i];
                if (x[i] <= hi[i]) break;
                x[i] = lo[i];
                if (i == 1) {
                    i = 0;
                    break;
                }
                --i;
            }
            if (r == 1 || i == 0) break;
        }
        buckets[s] = std::move(local);
    }
    std::vector<ZVec> out;
    for (auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end(), zvec_less);
    return out;
}

}  // namespace

std::vector<ZVec> lattice_points(const Polyhedron& p) { return lattice_points_impl(p, true); }
std::vector<ZVec> lattice_points_serial(const Polyhedron& p) {
    return lattice_points_impl(p, false);
}

// ------------------------------------------------------------ complexes

PolyhedralComplex::PolyhedralComplex(size_t rank, std::vector<Polyhedron> cells)
    : rank_(rank), cells_(std::move(cells)) {}

std::optional<std::string> PolyhedralComplex::validate() const {
    for (size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].rank() != rank_) return "cell rank mismatch";
        if (cells_[i].is_empty()) return "empty cell";
    }
    for (size_t i = 0; i < cells_.size(); ++i) {
        for (size_t j = i + 1; j < cells_.size(); ++j) {
            if (cells_[i].contains(cells_[j]) || cells_[j].contains(cells_[i]))
                return "cell contained in another cell";
            Polyhedron w = intersect(cells_[i], cells_[j]);
            if (w.is_empty()) continue;
            if (!w.is_face_of(cells_[i]) || !w.is_face_of(cells_[j]))
                return "intersection of cells is not a common face";
        }
    }
    return std::nullopt;
}

bool PolyhedralComplex::is_complete(std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (cells_.empty()) return fail("no cells");
    if (auto err = validate()) return fail(*err);
    std::map<std::string, int> facet_count;
    std::vector<std::vector<std::string>> per_cell(cells_.size());
    for (size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].dim() != static_cast<int>(rank_))
            return fail("cell of non-maximal dimension");
        for (const Polyhedron& f : cells_[i].facets()) {
            std::string k = f.key();
            facet_count[k] += 1;
            per_cell[i].push_back(k);
        }
    }
    for (size_t i = 0; i < cells_.size(); ++i)
        for (const std::string& k : per_cell[i])
            if (facet_count[k] < 2) return fail("unmatched facet (union has boundary)");
    return true;
}

std::vector<Polyhedron> PolyhedralComplex::all_faces() const {
    std::map<std::string, Polyhedron> seen;
    for (const Polyhedron& c : cells_)
        for (const Polyhedron& f : c.faces()) seen.emplace(f.key(), f);
    std::vector<Polyhedron> out;
    for (auto& [k, p] : seen) out.push_back(p);
    return out;
}

std::vector<Cone> PolyhedralComplex::tail_cones() const {
    std::map<std::string, Cone> seen;
    for (const Polyhedron& c : cells_) {
        Cone t = c.tail_cone();
        seen.emplace(t.key(), t);
    }
    std::vector<Cone> out;
    for (auto& [k, c] : seen) out.push_back(c);
    return out;
}

std::optional<std::string> Fan::validate_complete() const {
    if (maximal.empty()) return "empty fan";
    for (const Cone& c : maximal)
        if (c.rank() != rank) return "cone rank mismatch";
    std::string why;
    if (!as_complex().is_complete(&why)) return "fan not complete: " + why;
    return std::nullopt;
}

std::vector<Cone> Fan::all_faces() const {
    std::map<std::string, Cone> seen;
    for (const Cone& c : maximal)
        for (const Cone& f : c.faces()) seen.emplace(f.key(), f);
    std::vector<Cone> out;
    for (auto& [k, c] : seen) out.push_back(c);
    return out;
}

PolyhedralComplex Fan::as_complex() const {
    std::vector<Polyhedron> cells;
    for (const Cone& c : maximal) cells.push_back(Polyhedron::from_cone(c));
    return PolyhedralComplex(rank, std::move(cells));
}

}  // namespace tvar::geom
