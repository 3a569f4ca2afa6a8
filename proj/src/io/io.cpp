#include "tvar/io.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace tvar::io {

using nlohmann::ordered_json;
using geom::Cone;
using geom::Polyhedron;
using geom::PolyhedralComplex;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

std::string item(const std::string& where, const char* key) {
    return where + "." + key;
}

std::string at(const std::string& where, size_t i) {
    return where + "[" + std::to_string(i) + "]";
}

const ordered_json& field(const ordered_json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing key '") + key + "'");
    return *it;
}

void check_keys(const ordered_json& j, std::initializer_list<const char*> keys,
                const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) fail(where, "unknown key '" + it.key() + "'");
    }
}

Rat get_rat(const ordered_json& j, const std::string& where) {
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (j.is_string()) {
        try {
            return parse_rat(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(where, e.what());
        }
    }
    fail(where, "expected an integer or a \"p/q\" string");
}

Int get_int(const ordered_json& j, const std::string& where) {
    Rat r = get_rat(j, where);
    if (!is_integer(r)) fail(where, "expected an integer");
    return r.get_num();
}

QVec get_qvec(const ordered_json& j, size_t rank, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    if (j.size() != rank)
        fail(where, "expected " + std::to_string(rank) + " entries, got " +
                        std::to_string(j.size()));
    QVec v;
    for (size_t i = 0; i < j.size(); ++i) v.push_back(get_rat(j[i], at(where, i)));
    return v;
}

ZVec get_zvec(const ordered_json& j, size_t rank, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    if (j.size() != rank)
        fail(where, "expected " + std::to_string(rank) + " entries, got " +
                        std::to_string(j.size()));
    ZVec v;
    for (size_t i = 0; i < j.size(); ++i) v.push_back(get_int(j[i], at(where, i)));
    return v;
}

std::vector<QVec> get_ray_list(const ordered_json& j, size_t rank, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of rays");
    std::vector<QVec> rays;
    for (size_t i = 0; i < j.size(); ++i)
        rays.push_back(to_qvec(get_zvec(j[i], rank, at(where, i))));
    return rays;
}

fdiv::BasePoint get_point(const ordered_json& j, const std::string& where) {
    if (j.is_number_integer()) return fdiv::BasePoint::at(Rat(j.get<long>()));
    if (!j.is_string()) fail(where, "expected \"inf\" or a rational");
    try {
        return parse_base_point(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

Polyhedron get_polyhedron(const ordered_json& j, size_t rank, const std::string& where) {
    check_keys(j, {"vertices", "rays"}, where);
    const ordered_json& jv = field(j, "vertices", where);
    if (!jv.is_array() || jv.empty()) fail(item(where, "vertices"), "expected a nonempty array");
    std::vector<QVec> pts;
    for (size_t i = 0; i < jv.size(); ++i)
        pts.push_back(get_qvec(jv[i], rank, at(item(where, "vertices"), i)));
    std::vector<QVec> rays;
    if (j.contains("rays")) rays = get_ray_list(j["rays"], rank, item(where, "rays"));
    return Polyhedron::from_generators(rank, pts, rays);
}

// A maximal cone of the tail fan, given as an index or as a ray list.
size_t get_cone_ref(const ordered_json& j, const geom::Fan& fan, const std::string& where) {
    if (j.is_number_integer()) {
        long k = j.get<long>();
        if (k < 0 || static_cast<size_t>(k) >= fan.maximal.size())
            fail(where, "cone index " + std::to_string(k) + " out of range");
        return static_cast<size_t>(k);
    }
    if (j.is_array()) {
        Cone c = Cone::from_rays(fan.rank, get_ray_list(j, fan.rank, where));
        for (size_t i = 0; i < fan.maximal.size(); ++i)
            if (fan.maximal[i] == c) return i;
        fail(where, "rays do not span a maximal cone of the tail fan");
    }
    fail(where, "expected a cone index or a ray list");
}

ordered_json rat_json(const Rat& r) { return ordered_json(format_rat(r)); }

ordered_json int_json(const Int& n) {
    if (n.fits_slong_p()) return ordered_json(n.get_si());
    return ordered_json(n.get_str());
}

ordered_json qvec_json(const QVec& v) {
    ordered_json a = ordered_json::array();
    for (const Rat& r : v) a.push_back(rat_json(r));
    return a;
}

ordered_json zvec_json(const ZVec& v) {
    ordered_json a = ordered_json::array();
    for (const Int& n : v) a.push_back(int_json(n));
    return a;
}

ordered_json ray_list_json(const std::vector<ZVec>& rays) {
    ordered_json a = ordered_json::array();
    for (const ZVec& r : rays) a.push_back(zvec_json(r));
    return a;
}

ordered_json polyhedron_json(const Polyhedron& p) {
    ordered_json o = ordered_json::object();
    ordered_json verts = ordered_json::array();
    for (const QVec& v : p.vertices()) verts.push_back(qvec_json(v));
    o["vertices"] = verts;
    o["rays"] = ray_list_json(p.rays_folded());
    return o;
}

ordered_json parse_text(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
}

}  // namespace

fdiv::BasePoint parse_base_point(const std::string& text) {
    if (text == "inf") return fdiv::BasePoint::infinity();
    return fdiv::BasePoint::at(parse_rat(text));
}

fdiv::FDivisor parse_fdivisor(const std::string& text) {
    ordered_json j = parse_text(text);
    check_keys(j, {"rank", "tailFan", "slices", "degree"}, "divisor");

    fdiv::FDivisor s;
    Int rank = get_int(field(j, "rank", "divisor"), "divisor.rank");
    if (rank < 1 || rank > static_cast<long>(geom::kMaxRank))
        fail("divisor.rank", "rank must be between 1 and " + std::to_string(geom::kMaxRank));
    s.rank = rank.get_ui();
    s.tailFan.rank = s.rank;

    const ordered_json& jf = field(j, "tailFan", "divisor");
    if (!jf.is_array() || jf.empty()) fail("divisor.tailFan", "expected a nonempty array");
    for (size_t i = 0; i < jf.size(); ++i) {
        std::string where = at("divisor.tailFan", i);
        try {
            s.tailFan.maximal.push_back(Cone::from_rays(s.rank, get_ray_list(jf[i], s.rank, where)));
        } catch (const std::invalid_argument& e) {
            fail(where, e.what());
        }
    }

    if (j.contains("slices")) {
        const ordered_json& js = j["slices"];
        if (!js.is_array()) fail("divisor.slices", "expected an array");
        for (size_t i = 0; i < js.size(); ++i) {
            std::string where = at("divisor.slices", i);
            check_keys(js[i], {"point", "cells"}, where);
            fdiv::BasePoint p = get_point(field(js[i], "point", where), item(where, "point"));
            if (s.slices.count(p)) fail(item(where, "point"), "duplicate slice point " + p.str());
            const ordered_json& jc = field(js[i], "cells", where);
            if (!jc.is_array()) fail(item(where, "cells"), "expected an array");
            std::vector<Polyhedron> cells;
            for (size_t k = 0; k < jc.size(); ++k) {
                std::string cw = at(item(where, "cells"), k);
                try {
                    cells.push_back(get_polyhedron(jc[k], s.rank, cw));
                } catch (const std::invalid_argument& e) {
                    fail(cw, e.what());
                }
            }
            s.slices.emplace(p, PolyhedralComplex(s.rank, std::move(cells)));
        }
    }

    if (j.contains("degree")) {
        const ordered_json& jd = j["degree"];
        if (!jd.is_array()) fail("divisor.degree", "expected an array");
        for (size_t i = 0; i < jd.size(); ++i) {
            std::string where = at("divisor.degree", i);
            check_keys(jd[i], {"cone", "value"}, where);
            size_t k = get_cone_ref(field(jd[i], "cone", where), s.tailFan, item(where, "cone"));
            if (s.degree.count(k)) fail(item(where, "cone"), "duplicate degree entry");
            const ordered_json& jv = field(jd[i], "value", where);
            if (jv.is_null()) {
                s.degree.emplace(k, std::nullopt);
            } else {
                try {
                    s.degree.emplace(k, get_polyhedron(jv, s.rank, item(where, "value")));
                } catch (const std::invalid_argument& e) {
                    fail(item(where, "value"), e.what());
                }
            }
        }
    }
    return s;
}

fdiv::FDivisor read_fdivisor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_fdivisor(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string write_fdivisor(const fdiv::FDivisor& s) {
    ordered_json j = ordered_json::object();
    j["rank"] = s.rank;
    ordered_json fan = ordered_json::array();
    for (const Cone& c : s.tailFan.maximal) fan.push_back(ray_list_json(c.generators_folded()));
    j["tailFan"] = fan;

    ordered_json slices = ordered_json::array();
    for (const auto& [p, complex] : s.slices) {
        ordered_json o = ordered_json::object();
        o["point"] = p.str();
        ordered_json cells = ordered_json::array();
        for (const Polyhedron& cell : complex.cells()) cells.push_back(polyhedron_json(cell));
        o["cells"] = cells;
        slices.push_back(o);
    }
    j["slices"] = slices;

    ordered_json degree = ordered_json::array();
    for (const auto& [k, value] : s.degree) {
        ordered_json o = ordered_json::object();
        o["cone"] = k;
        o["value"] = value ? polyhedron_json(*value) : ordered_json(nullptr);
        degree.push_back(o);
    }
    j["degree"] = degree;
    return j.dump(2) + "\n";
}

fdiv::SupportFunction parse_sf(const fdiv::FDivisor& s, const std::string& text) {
    ordered_json j = parse_text(text);
    check_keys(j, {"lin", "pieces"}, "support function");

    fdiv::SupportFunction h;
    const ordered_json& jl = field(j, "lin", "support function");
    if (!jl.is_array()) fail("sf.lin", "expected an array");
    std::vector<std::optional<QVec>> lin(s.tailFan.maximal.size());
    for (size_t i = 0; i < jl.size(); ++i) {
        std::string where = at("sf.lin", i);
        check_keys(jl[i], {"cone", "u"}, where);
        size_t k = get_cone_ref(field(jl[i], "cone", where), s.tailFan, item(where, "cone"));
        if (lin[k]) fail(item(where, "cone"), "duplicate lin entry for cone " + std::to_string(k));
        lin[k] = get_qvec(field(jl[i], "u", where), s.rank, item(where, "u"));
    }
    for (size_t k = 0; k < lin.size(); ++k) {
        if (!lin[k]) fail("sf.lin", "missing entry for cone " + std::to_string(k));
        h.lin.push_back(*lin[k]);
    }

    if (j.contains("pieces")) {
        const ordered_json& jp = j["pieces"];
        if (!jp.is_array()) fail("sf.pieces", "expected an array");
        std::map<fdiv::BasePoint, std::map<size_t, fdiv::AffinePiece>> grouped;
        for (size_t i = 0; i < jp.size(); ++i) {
            std::string where = at("sf.pieces", i);
            check_keys(jp[i], {"point", "cell", "u", "a"}, where);
            fdiv::BasePoint p = get_point(field(jp[i], "point", where), item(where, "point"));
            Int cell = get_int(field(jp[i], "cell", where), item(where, "cell"));
            if (cell < 0) fail(item(where, "cell"), "expected a nonnegative cell index");
            fdiv::AffinePiece piece;
            piece.u = get_qvec(field(jp[i], "u", where), s.rank, item(where, "u"));
            piece.a = get_rat(field(jp[i], "a", where), item(where, "a"));
            if (!grouped[p].emplace(cell.get_ui(), piece).second)
                fail(item(where, "cell"),
                     "duplicate piece for point " + p.str() + ", cell " + cell.get_str());
        }
        for (const auto& [p, pieces] : grouped) {
            std::vector<fdiv::AffinePiece> v;
            for (const auto& [k, piece] : pieces) {
                if (k != v.size())
                    fail("sf.pieces", "cell indices for point " + p.str() +
                                          " must cover 0.." + std::to_string(pieces.size() - 1));
                v.push_back(piece);
            }
            h.pieces.emplace(p, std::move(v));
        }
    }
    return h;
}

fdiv::SupportFunction read_sf(const fdiv::FDivisor& s, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_sf(s, buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string write_sf(const fdiv::SupportFunction& h) {
    ordered_json j = ordered_json::object();
    ordered_json lin = ordered_json::array();
    for (size_t k = 0; k < h.lin.size(); ++k) {
        ordered_json o = ordered_json::object();
        o["cone"] = k;
        o["u"] = qvec_json(h.lin[k]);
        lin.push_back(o);
    }
    j["lin"] = lin;

    ordered_json pieces = ordered_json::array();
    for (const auto& [p, v] : h.pieces) {
        for (size_t k = 0; k < v.size(); ++k) {
            ordered_json o = ordered_json::object();
            o["point"] = p.str();
            o["cell"] = k;
            o["u"] = qvec_json(v[k].u);
            o["a"] = rat_json(v[k].a);
            pieces.push_back(o);
        }
    }
    j["pieces"] = pieces;
    return j.dump(2) + "\n";
}

bool fdivisor_equal(const fdiv::FDivisor& a, const fdiv::FDivisor& b) {
    if (a.rank != b.rank || a.tailFan.maximal != b.tailFan.maximal) return false;
    if (a.degree != b.degree) return false;
    if (a.slices.size() != b.slices.size()) return false;
    auto it = b.slices.begin();
    for (const auto& [p, complex] : a.slices) {
        if (!(it->first == p) || it->second.cells() != complex.cells()) return false;
        ++it;
    }
    return true;
}

}  // namespace tvar::io
