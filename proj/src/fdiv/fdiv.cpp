#include "tvar/fdiv.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tvar::fdiv {

std::string BasePoint::str() const { return inf ? "inf" : format_rat(z); }

geom::PolyhedralComplex slice_of(const FDivisor& s, const BasePoint& p) {
    auto it = s.slices.find(p);
    if (it != s.slices.end()) return it->second;
    std::vector<geom::Polyhedron> cells;
    for (const geom::Cone& c : s.tailFan.maximal) cells.push_back(geom::Polyhedron::from_cone(c));
    return geom::PolyhedralComplex(s.rank, std::move(cells));
}

std::vector<BasePoint> support_points(const FDivisor& s, const SupportFunction& h) {
    std::set<BasePoint> pts;
    for (const auto& [p, _] : s.slices) pts.insert(p);
    for (const auto& [p, _] : h.pieces) pts.insert(p);
    return {pts.begin(), pts.end()};
}

namespace {

std::string cone_label(const FDivisor& s, const geom::Cone& c) {
    for (size_t i = 0; i < s.tailFan.maximal.size(); ++i)
        if (s.tailFan.maximal[i] == c) return "tail cone #" + std::to_string(i);
    std::ostringstream os;
    os << "tail cone of dim " << c.dim();
    return os.str();
}

// Distinct tails of maximal cells over all slices, trivial ones included.
std::vector<geom::Cone> maximal_cell_tails(const FDivisor& s) {
    std::vector<geom::Cone> tails;
    std::set<std::string> seen;
    auto add = [&](const geom::Cone& c) {
        if (seen.insert(c.key()).second) tails.push_back(c);
    };
    for (const geom::Cone& c : s.tailFan.maximal) add(c);
    for (const auto& [p, complex] : s.slices)
        for (const geom::Polyhedron& cell : complex.cells()) add(cell.tail_cone());
    return tails;
}

bool contains_translate(const std::vector<geom::Polyhedron>& faces, const geom::Cone& tail) {
    for (const geom::Polyhedron& f : faces)
        if (geom::is_lattice_translate(f, tail)) return true;
    return false;
}

bool contains_bad_cell(const std::vector<geom::Polyhedron>& faces, const geom::Cone& tail) {
    for (const geom::Polyhedron& f : faces)
        if (f.tail_cone() == tail && !geom::is_lattice_translate(f, tail)) return true;
    return false;
}

std::string join_points(const std::vector<BasePoint>& pts) {
    std::string out;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ", ";
        out += pts[i].str();
    }
    return out;
}

}  // namespace

Report validate_fdivisor(const FDivisor& s) {
    Report rep;
    if (s.rank == 0 || s.rank != s.tailFan.rank) {
        rep.issues.push_back("rank mismatch between divisor and tail fan");
        return rep;
    }
    if (auto err = s.tailFan.validate_complete()) {
        rep.issues.push_back("tail fan: " + *err);
        return rep;
    }

    std::set<std::string> fan_faces;
    for (const geom::Cone& c : s.tailFan.all_faces()) fan_faces.insert(c.key());

    for (const auto& [p, complex] : s.slices) {
        std::string where = "slice at " + p.str();
        if (complex.rank() != s.rank) {
            rep.issues.push_back(where + ": rank mismatch");
            continue;
        }
        if (auto err = complex.validate()) {
            rep.issues.push_back(where + ": " + *err);
            continue;
        }
        std::string why;
        if (!complex.is_complete(&why)) {
            rep.issues.push_back(where + ": not complete (" + why + ")");
            continue;
        }
        for (const geom::Polyhedron& cell : complex.cells())
            if (!fan_faces.count(cell.tail_cone().key()))
                rep.issues.push_back(where + ": cell tail outside the tail fan");
        for (size_t i = 0; i < s.tailFan.maximal.size(); ++i) {
            int hits = 0;
            for (const geom::Polyhedron& cell : complex.cells())
                if (cell.tail_cone() == s.tailFan.maximal[i]) ++hits;
            if (hits != 1)
                rep.issues.push_back(where + ": " + std::to_string(hits) + " cells with tail #" +
                                     std::to_string(i));
        }
    }
    if (!rep.ok()) return rep;

    for (const auto& [i, val] : s.degree)
        if (i >= s.tailFan.maximal.size())
            rep.issues.push_back("degree entry for unknown cone #" + std::to_string(i));
    for (size_t i = 0; i < s.tailFan.maximal.size(); ++i) {
        auto it = s.degree.find(i);
        if (it == s.degree.end()) {
            rep.issues.push_back("missing degree entry for cone #" + std::to_string(i));
            continue;
        }
        if (!it->second) continue;
        const geom::Cone& sigma = s.tailFan.maximal[i];
        std::vector<geom::Polyhedron> parts{geom::Polyhedron::from_cone(sigma)};
        for (const auto& [p, complex] : s.slices)
            for (const geom::Polyhedron& cell : complex.cells())
                if (cell.tail_cone() == sigma) parts.push_back(cell);
        geom::Polyhedron sum = geom::minkowski_sum(parts);
        if (!(sum == *it->second))
            rep.issues.push_back("degree mismatch at cone #" + std::to_string(i));
        geom::Polyhedron sigma_poly = geom::Polyhedron::from_cone(sigma);
        if (sum == sigma_poly || !sigma_poly.contains(sum))
            rep.issues.push_back("degree part at cone #" + std::to_string(i) +
                                 " is not a proper subset of the cone");
    }
    return rep;
}

ToricResult is_toric(const FDivisor& s) {
    ToricResult res;
    for (const auto& [p, complex] : s.slices) {
        bool translate = false;
        if (complex.cells().size() == s.tailFan.maximal.size()) {
            for (const geom::Polyhedron& cell : complex.cells()) {
                auto v = geom::is_lattice_translate(cell, cell.tail_cone());
                if (!v) continue;
                QVec shift = to_qvec(*v);
                bool all = true;
                for (const geom::Cone& sigma : s.tailFan.maximal) {
                    geom::Polyhedron moved = geom::Polyhedron::from_cone(sigma).translate(shift);
                    if (std::find(complex.cells().begin(), complex.cells().end(), moved) ==
                        complex.cells().end()) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    translate = true;
                    break;
                }
            }
        }
        if (!translate) res.exceptional.push_back(p);
    }
    res.toric = res.exceptional.size() <= 2;
    return res;
}

CriterionResult toric_cover_check(const FDivisor& s) {
    CriterionResult res;
    res.ok = true;
    std::map<BasePoint, std::vector<geom::Polyhedron>> faces;
    for (const auto& [p, complex] : s.slices) faces[p] = complex.all_faces();
    for (const geom::Cone& tail : maximal_cell_tails(s)) {
        std::vector<BasePoint> failing;
        for (const auto& [p, fs] : faces)
            if (!contains_translate(fs, tail)) failing.push_back(p);
        if (failing.size() > 2) {
            res.ok = false;
            res.witnesses.push_back(cone_label(s, tail) + ": no lattice translate in slices at " +
                                    join_points(failing));
        }
    }
    return res;
}

CriterionResult all_cones_flexible_check(const FDivisor& s) {
    CriterionResult res;
    res.ok = true;
    std::map<BasePoint, std::vector<geom::Polyhedron>> faces;
    for (const auto& [p, complex] : s.slices) faces[p] = complex.all_faces();
    for (const geom::Cone& tail : maximal_cell_tails(s)) {
        std::vector<BasePoint> failing;
        for (const auto& [p, fs] : faces)
            if (contains_bad_cell(fs, tail)) failing.push_back(p);
        if (failing.size() > 2) {
            res.ok = false;
            res.witnesses.push_back(cone_label(s, tail) +
                                    ": non-translate cells with this tail in slices at " +
                                    join_points(failing));
        }
    }
    return res;
}

namespace {

size_t cone_containing(const FDivisor& s, const QVec& v) {
    for (size_t i = 0; i < s.tailFan.maximal.size(); ++i)
        if (s.tailFan.maximal[i].contains(v)) return i;
    throw std::invalid_argument("point outside the tail fan support");
}

}  // namespace

AffinePiece piece_for(const FDivisor& s, const SupportFunction& h, const BasePoint& p, size_t i) {
    auto it = h.pieces.find(p);
    if (it != h.pieces.end()) {
        if (i >= it->second.size()) throw std::invalid_argument("piece index out of range");
        return it->second[i];
    }
    auto sl = s.slices.find(p);
    if (sl == s.slices.end()) {
        if (i >= h.lin.size()) throw std::invalid_argument("piece index out of range");
        return {h.lin[i], 0};
    }
    // Derived piece: a single linear form agreeing with the linear part on
    // the whole cell, checked exactly cone by cone.
    const geom::Polyhedron& cell = sl->second.cells().at(i);
    for (size_t j = 0; j < s.tailFan.maximal.size(); ++j) {
        bool match = true;
        for (size_t k = 0; match && k < s.tailFan.maximal.size(); ++k) {
            geom::Polyhedron part =
                geom::intersect(cell, geom::Polyhedron::from_cone(s.tailFan.maximal[k]));
            if (part.is_empty()) continue;
            for (const QVec& v : part.vertices())
                if (dot(h.lin[j], v) != dot(h.lin[k], v)) match = false;
            for (const ZVec& r : part.rays_folded())
                if (dot(h.lin[j], to_qvec(r)) != dot(h.lin[k], to_qvec(r))) match = false;
        }
        if (match) return {h.lin[j], 0};
    }
    throw std::invalid_argument("linear part is not affine on cell " + std::to_string(i) +
                                " of the slice at " + p.str() + "; supply pieces");
}

Rat lin_value(const FDivisor& s, const SupportFunction& h, const QVec& v) {
    return dot(h.lin[cone_containing(s, v)], v);
}

Rat value_at(const FDivisor& s, const SupportFunction& h, const BasePoint& p, const QVec& v) {
    geom::PolyhedralComplex complex = slice_of(s, p);
    for (size_t i = 0; i < complex.cells().size(); ++i) {
        if (!complex.cells()[i].contains_point(v)) continue;
        AffinePiece piece = piece_for(s, h, p, i);
        return dot(piece.u, v) + piece.a;
    }
    throw std::invalid_argument("point outside the slice support");
}

Report validate_sf(const FDivisor& s, const SupportFunction& h) {
    Report rep;
    if (h.lin.size() != s.tailFan.maximal.size()) {
        rep.issues.push_back("linear part: expected one form per maximal tail cone");
        return rep;
    }
    for (const QVec& u : h.lin)
        if (u.size() != s.rank) {
            rep.issues.push_back("linear part: wrong dimension");
            return rep;
        }
    for (size_t i = 0; i < h.lin.size(); ++i)
        for (size_t j = i + 1; j < h.lin.size(); ++j) {
            geom::Cone common = s.tailFan.maximal[i].intersect(s.tailFan.maximal[j]);
            for (const ZVec& g : common.generators_folded())
                if (dot(h.lin[i], to_qvec(g)) != dot(h.lin[j], to_qvec(g)))
                    rep.issues.push_back("linear part discontinuous across cones #" +
                                         std::to_string(i) + ", #" + std::to_string(j));
        }

    for (const BasePoint& p : support_points(s, h)) {
        std::string where = "pieces at " + p.str();
        geom::PolyhedralComplex complex = slice_of(s, p);
        auto it = h.pieces.find(p);
        if (it != h.pieces.end() && it->second.size() != complex.cells().size()) {
            rep.issues.push_back(where + ": piece count does not match cell count");
            continue;
        }
        std::vector<AffinePiece> pieces;
        bool bad = false;
        for (size_t i = 0; i < complex.cells().size(); ++i) {
            try {
                pieces.push_back(piece_for(s, h, p, i));
            } catch (const std::invalid_argument& e) {
                rep.issues.push_back(std::string(e.what()));
                bad = true;
                break;
            }
            if (pieces.back().u.size() != s.rank) {
                rep.issues.push_back(where + ": wrong form dimension");
                bad = true;
                break;
            }
        }
        if (bad) continue;

        const auto& cells = complex.cells();
        for (size_t i = 0; i < cells.size(); ++i)
            for (size_t j = i + 1; j < cells.size(); ++j) {
                geom::Polyhedron common = geom::intersect(cells[i], cells[j]);
                if (common.is_empty()) continue;
                bool cont = true;
                for (const QVec& v : common.vertices())
                    if (dot(pieces[i].u, v) + pieces[i].a != dot(pieces[j].u, v) + pieces[j].a)
                        cont = false;
                for (const ZVec& r : common.rays_folded())
                    if (dot(pieces[i].u, to_qvec(r)) != dot(pieces[j].u, to_qvec(r))) cont = false;
                if (!cont)
                    rep.issues.push_back(where + ": discontinuous across cells " +
                                         std::to_string(i) + ", " + std::to_string(j));
            }

        for (size_t i = 0; i < cells.size(); ++i) {
            geom::Cone tail = cells[i].tail_cone();
            for (const ZVec& g : tail.generators_folded()) {
                QVec gq = to_qvec(g);
                if (dot(pieces[i].u, gq) != lin_value(s, h, gq))
                    rep.issues.push_back(where + ": cell " + std::to_string(i) +
                                         " disagrees with the linear part on its tail");
            }
        }
    }
    return rep;
}

namespace {

std::vector<ZVec> fan_rays(const FDivisor& s) {
    std::vector<ZVec> rays;
    for (const geom::Cone& c : s.tailFan.maximal)
        for (const ZVec& r : c.rays())
            if (std::find(rays.begin(), rays.end(), r) == rays.end()) rays.push_back(r);
    std::sort(rays.begin(), rays.end());
    return rays;
}

bool ray_meets_degree(const FDivisor& s, const ZVec& ray) {
    geom::Polyhedron ray_poly =
        geom::Polyhedron::from_generators(s.rank, {QVec(s.rank, Rat(0))}, {to_qvec(ray)});
    for (const auto& [i, val] : s.degree)
        if (val && !geom::intersect(ray_poly, *val).is_empty()) return true;
    return false;
}

std::vector<std::pair<BasePoint, QVec>> slice_vertices(const FDivisor& s,
                                                       const SupportFunction& h) {
    std::vector<std::pair<BasePoint, QVec>> out;
    for (const BasePoint& p : support_points(s, h)) {
        std::vector<QVec> seen;
        geom::PolyhedralComplex complex = slice_of(s, p);
        for (const geom::Polyhedron& cell : complex.cells())
            for (const QVec& v : cell.vertices())
                if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
        std::sort(seen.begin(), seen.end(), qvec_less);
        for (const QVec& v : seen) out.emplace_back(p, v);
    }
    return out;
}

}  // namespace

InvariantDivisor divisor(const FDivisor& s, const SupportFunction& h) {
    InvariantDivisor d;
    for (const ZVec& ray : fan_rays(s)) {
        if (ray_meets_degree(s, ray)) continue;
        d.horizontal.emplace_back(ray, -lin_value(s, h, to_qvec(ray)));
    }
    for (const auto& [p, v] : slice_vertices(s, h)) {
        Rat mu = Rat(lcm_denominators(v));
        d.vertical.emplace_back(p, v, -mu * value_at(s, h, p, v));
    }
    return d;
}

bool is_effective(const FDivisor& s, const SupportFunction& h) {
    for (size_t i = 0; i < s.tailFan.maximal.size(); ++i)
        for (const ZVec& g : s.tailFan.maximal[i].generators_folded())
            if (dot(h.lin[i], to_qvec(g)) > 0) return false;
    for (const auto& [p, v] : slice_vertices(s, h))
        if (value_at(s, h, p, v) > 0) return false;
    return true;
}

namespace {

// Inclusion-maximal faces of the slice at p on which h_p vanishes.
std::vector<geom::Polyhedron> maximal_zero_faces(const FDivisor& s, const SupportFunction& h,
                                                 const BasePoint& p) {
    geom::PolyhedralComplex complex = slice_of(s, p);
    const auto& cells = complex.cells();
    std::vector<geom::Polyhedron> zero;
    std::set<std::string> seen;
    for (const geom::Polyhedron& f : complex.all_faces()) {
        size_t host = cells.size();
        for (size_t i = 0; i < cells.size(); ++i)
            if (cells[i].contains(f)) {
                host = i;
                break;
            }
        AffinePiece piece = piece_for(s, h, p, host);
        bool vanishes = true;
        for (const QVec& v : f.vertices())
            if (dot(piece.u, v) + piece.a != 0) vanishes = false;
        for (const ZVec& r : f.rays_folded())
            if (dot(piece.u, to_qvec(r)) != 0) vanishes = false;
        if (vanishes && seen.insert(f.key()).second) zero.push_back(f);
    }
    std::vector<geom::Polyhedron> maximal;
    for (const geom::Polyhedron& f : zero) {
        bool dominated = false;
        for (const geom::Polyhedron& g : zero)
            if (!(g == f) && g.contains(f)) dominated = true;
        if (!dominated) maximal.push_back(f);
    }
    return maximal;
}

// Maximal cones of [lin h = 0].
std::vector<geom::Cone> zero_fan(const FDivisor& s, const SupportFunction& h) {
    std::vector<geom::Cone> zs;
    for (size_t i = 0; i < s.tailFan.maximal.size(); ++i) {
        geom::Cone z = s.tailFan.maximal[i].intersect(
            geom::Cone::from_inequalities(s.rank, {}, {h.lin[i]}));
        zs.push_back(z);
    }
    std::vector<geom::Cone> maximal;
    std::set<std::string> seen;
    for (const geom::Cone& z : zs) {
        bool dominated = false;
        for (const geom::Cone& w : zs)
            if (!(w == z) && geom::cone_contains_cone(w, z)) dominated = true;
        if (!dominated && seen.insert(z.key()).second) maximal.push_back(z);
    }
    return maximal;
}

}  // namespace

FDivisor zero_set(const FDivisor& s, const SupportFunction& h) {
    FDivisor out;
    out.rank = s.rank;
    out.tailFan.rank = s.rank;
    out.tailFan.maximal = zero_fan(s, h);
    for (const auto& [p, complex] : s.slices)
        out.slices.emplace(p, geom::PolyhedralComplex(s.rank, maximal_zero_faces(s, h, p)));
    for (size_t j = 0; j < out.tailFan.maximal.size(); ++j) {
        const geom::Cone& z = out.tailFan.maximal[j];
        std::optional<geom::Polyhedron> val;
        for (size_t i = 0; i < s.tailFan.maximal.size(); ++i) {
            if (!geom::cone_contains_cone(s.tailFan.maximal[i], z)) continue;
            auto it = s.degree.find(i);
            if (it == s.degree.end() || !it->second) break;
            geom::Polyhedron cut = geom::intersect(*it->second, geom::Polyhedron::from_cone(z));
            if (!cut.is_empty()) val = cut;
            break;
        }
        out.degree[j] = val;
    }
    return out;
}

geom::Polyhedron box(const FDivisor& s, const SupportFunction& h) {
    std::vector<std::pair<QVec, Rat>> rows;
    for (size_t i = 0; i < s.tailFan.maximal.size(); ++i)
        for (const ZVec& g : s.tailFan.maximal[i].generators_folded())
            rows.emplace_back(to_qvec(g), dot(h.lin[i], to_qvec(g)));
    return geom::Polyhedron::from_inequalities(s.rank, rows);
}

Rat dual_value(const FDivisor& s, const SupportFunction& h, const BasePoint& p, const QVec& u) {
    if (!box(s, h).contains_point(u))
        throw std::invalid_argument("dual value undefined outside the box");
    geom::PolyhedralComplex complex = slice_of(s, p);
    std::optional<Rat> best;
    for (size_t i = 0; i < complex.cells().size(); ++i) {
        AffinePiece piece = piece_for(s, h, p, i);
        for (const QVec& v : complex.cells()[i].vertices()) {
            Rat val = dot(u, v) - dot(piece.u, v) - piece.a;
            if (!best || val < *best) best = val;
        }
    }
    return *best;
}

CriterionResult ample_necessary(const FDivisor& s, const SupportFunction& h) {
    CriterionResult res;
    res.ok = true;
    auto fail = [&](std::string msg) {
        res.ok = false;
        res.witnesses.push_back(std::move(msg));
    };

    std::vector<BasePoint> pts = support_points(s, h);
    // The trivial slice stands in for the unlisted points; lin h itself must
    // be strongly concave.
    std::vector<std::pair<std::optional<BasePoint>, geom::PolyhedralComplex>> charts;
    {
        std::vector<geom::Polyhedron> cells;
        for (const geom::Cone& c : s.tailFan.maximal) cells.push_back(geom::Polyhedron::from_cone(c));
        charts.emplace_back(std::nullopt, geom::PolyhedralComplex(s.rank, std::move(cells)));
    }
    for (const BasePoint& p : pts) charts.emplace_back(p, slice_of(s, p));

    for (const auto& [pt, complex] : charts) {
        std::string name = pt ? pt->str() : "generic point";
        const auto& cells = complex.cells();
        std::vector<AffinePiece> pieces;
        if (!pt) {
            for (const QVec& u : h.lin) pieces.push_back({u, 0});
        } else {
            for (size_t i = 0; i < cells.size(); ++i) pieces.push_back(piece_for(s, h, *pt, i));
        }
        for (size_t i = 0; i < cells.size(); ++i)
            for (size_t j = i + 1; j < cells.size(); ++j) {
                geom::Polyhedron common = geom::intersect(cells[i], cells[j]);
                if (common.is_empty() || common.dim() != static_cast<int>(s.rank) - 1) continue;
                if (pieces[i] == pieces[j]) {
                    fail("not strongly concave at " + name + ": cells " + std::to_string(i) +
                         ", " + std::to_string(j) + " share one affine piece");
                    continue;
                }
                auto dominated = [&](size_t lo, size_t hi) {
                    for (const QVec& v : cells[lo].vertices())
                        if (dot(pieces[hi].u, v) + pieces[hi].a < dot(pieces[lo].u, v) + pieces[lo].a)
                            return false;
                    for (const ZVec& r : cells[lo].rays_folded())
                        if (dot(pieces[hi].u, to_qvec(r)) < dot(pieces[lo].u, to_qvec(r)))
                            return false;
                    return true;
                };
                if (!dominated(i, j) || !dominated(j, i))
                    fail("not concave at " + name + " across cells " + std::to_string(i) + ", " +
                         std::to_string(j));
            }
    }

    geom::Polyhedron bx = box(s, h);
    for (const QVec& u : bx.vertices())
        for (const BasePoint& p : pts) {
            Rat val = dual_value(s, h, p, u);
            if (val < 0)
                fail("dual value " + format_rat(val) + " at " + p.str() +
                     " for a box vertex is negative");
        }
    return res;
}

SupportFunction polar_chart(const FDivisor& s, const SupportFunction& h, const BasePoint& q,
                            size_t cell) {
    if (q.inf) throw std::invalid_argument("polar chart: base cell must not sit at infinity");
    if (!ample_necessary(s, h).ok)
        throw std::invalid_argument("polar chart requires the ampleness conditions");
    if (!all_cones_flexible_check(s).ok)
        throw std::invalid_argument("polar chart requires the flexibility criterion");

    geom::PolyhedralComplex chart = slice_of(s, q);
    if (cell >= chart.cells().size()) throw std::invalid_argument("polar chart: no such cell");
    const geom::Polyhedron& delta = chart.cells()[cell];
    geom::Cone tail = delta.tail_cone();

    BasePoint zero = BasePoint::at(0);
    BasePoint infp = BasePoint::infinity();
    for (const auto& [p, complex] : s.slices) {
        if (p == zero || p == infp) continue;
        if (contains_bad_cell(complex.all_faces(), tail))
            throw std::invalid_argument(
                "polar chart: relabel the exceptional points for the tail cone to 0 and infinity");
    }

    AffinePiece base = piece_for(s, h, q, cell);
    if (!box(s, h).contains_point(base.u))
        throw std::logic_error("polar chart: the cell's linear form leaves the box");

    SupportFunction out;
    for (const QVec& u : h.lin) out.lin.push_back(vec_sub(u, base.u));

    std::vector<BasePoint> pts = support_points(s, h);
    std::map<BasePoint, std::vector<AffinePiece>> shifted;
    std::map<BasePoint, Rat> maxes;
    for (const BasePoint& p : pts) {
        geom::PolyhedralComplex complex = slice_of(s, p);
        std::vector<AffinePiece>& ps = shifted[p];
        std::optional<Rat> mx;
        for (size_t i = 0; i < complex.cells().size(); ++i) {
            AffinePiece piece = piece_for(s, h, p, i);
            piece.u = vec_sub(piece.u, base.u);
            for (const QVec& v : complex.cells()[i].vertices()) {
                Rat val = dot(piece.u, v) + piece.a;
                if (!mx || val > *mx) mx = val;
            }
            ps.push_back(std::move(piece));
        }
        maxes[p] = mx ? *mx : Rat(0);
    }

    Rat total = 0;
    for (const BasePoint& p : pts)
        if (!(p == infp)) total += maxes[p];

    for (const BasePoint& p : pts) {
        std::vector<AffinePiece> ps = shifted[p];
        Rat shift = (p == infp) ? total : Rat(-maxes[p]);
        for (AffinePiece& piece : ps) piece.a += shift;
        out.pieces[p] = std::move(ps);
    }
    if (!out.pieces.count(infp) && total != 0) {
        std::vector<AffinePiece> ps;
        for (const QVec& u : out.lin) ps.push_back({u, total});
        out.pieces[infp] = std::move(ps);
    }
    // Piece lists that merely restate the linear part on a trivial slice are
    // redundant; dropping them keeps the output canonical.
    for (auto it = out.pieces.begin(); it != out.pieces.end();) {
        bool trivial = !s.slices.count(it->first);
        if (trivial)
            for (size_t j = 0; j < it->second.size(); ++j)
                if (!(it->second[j] == AffinePiece{out.lin[j], 0})) {
                    trivial = false;
                    break;
                }
        it = trivial ? out.pieces.erase(it) : std::next(it);
    }

    // Postconditions from the construction; any failure is a logic error.
    if (!is_effective(s, out)) throw std::logic_error("polar chart: result not effective");
    {
        std::vector<geom::Polyhedron> zq = maximal_zero_faces(s, out, q);
        if (zq.size() != 1 || !(zq[0] == delta))
            throw std::logic_error("polar chart: zero set at the base point is not the cell");
    }
    for (const BasePoint& p : pts) {
        if (p == zero || p == infp || p == q) continue;
        std::vector<geom::Polyhedron> zp = maximal_zero_faces(s, out, p);
        if (zp.size() != 1 || !geom::is_lattice_translate(zp[0], tail))
            throw std::logic_error("polar chart: zero set at " + p.str() +
                                   " is not a lattice translate of the tail cone");
    }
    {
        std::vector<geom::Cone> zf = zero_fan(s, out);
        if (zf.size() != 1 || !(zf[0] == tail))
            throw std::logic_error("polar chart: generic zero set is not the tail cone");
    }
    return out;
}

}  // namespace tvar::fdiv
