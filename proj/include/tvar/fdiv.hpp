#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tvar/polyhedron.hpp"
#include "tvar/rat.hpp"

namespace tvar::fdiv {

// Point of P^1: a rational number or infinity.
struct BasePoint {
    bool inf = false;
    Rat z = 0;

    static BasePoint infinity() {
        BasePoint p;
        p.inf = true;
        return p;
    }
    static BasePoint at(const Rat& z) {
        BasePoint p;
        p.z = z;
        return p;
    }

    bool operator==(const BasePoint& o) const { return inf == o.inf && (inf || z == o.z); }
    bool operator<(const BasePoint& o) const {
        if (inf != o.inf) return !inf;
        return !inf && z < o.z;
    }
    std::string str() const;
};

// Slices over P^1 with a common tail fan plus degree data per maximal cone.
// Unlisted points carry the trivial slice (the tail fan itself); degree
// entries index tailFan.maximal, nullopt meaning the empty degree part.
struct FDivisor {
    size_t rank = 0;
    geom::Fan tailFan;
    std::map<BasePoint, geom::PolyhedralComplex> slices;
    std::map<size_t, std::optional<geom::Polyhedron>> degree;
};

struct Report {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

Report validate_fdivisor(const FDivisor& s);

// The slice at p: the stored complex, or the tail fan for unlisted points.
geom::PolyhedralComplex slice_of(const FDivisor& s, const BasePoint& p);
// Points carrying a listed slice or listed pieces.
struct SupportFunction;
std::vector<BasePoint> support_points(const FDivisor& s, const SupportFunction& h);

struct ToricResult {
    bool toric = false;
    std::vector<BasePoint> exceptional;
};
ToricResult is_toric(const FDivisor& s);

struct CriterionResult {
    bool ok = false;
    std::vector<std::string> witnesses;
};
CriterionResult toric_cover_check(const FDivisor& s);
CriterionResult all_cones_flexible_check(const FDivisor& s);

struct AffinePiece {
    QVec u;
    Rat a = 0;
    bool operator==(const AffinePiece& o) const { return u == o.u && a == o.a; }
};

// lin[i] pairs with tailFan.maximal[i]; pieces[p][j] pairs with cell j of the
// slice at p (tail fan cone j when the slice is trivial).
struct SupportFunction {
    std::vector<QVec> lin;
    std::map<BasePoint, std::vector<AffinePiece>> pieces;

    bool operator==(const SupportFunction& o) const { return lin == o.lin && pieces == o.pieces; }
};

Report validate_sf(const FDivisor& s, const SupportFunction& h);

// The piece of h_p on cell i of the slice at p.
AffinePiece piece_for(const FDivisor& s, const SupportFunction& h, const BasePoint& p, size_t i);
Rat lin_value(const FDivisor& s, const SupportFunction& h, const QVec& v);
Rat value_at(const FDivisor& s, const SupportFunction& h, const BasePoint& p, const QVec& v);

struct InvariantDivisor {
    std::vector<std::pair<ZVec, Rat>> horizontal;            // ray generator, coefficient
    std::vector<std::tuple<BasePoint, QVec, Rat>> vertical;  // point, vertex, coefficient
};
InvariantDivisor divisor(const FDivisor& s, const SupportFunction& h);

bool is_effective(const FDivisor& s, const SupportFunction& h);
FDivisor zero_set(const FDivisor& s, const SupportFunction& h);

geom::Polyhedron box(const FDivisor& s, const SupportFunction& h);
// h_p^*(u); throws outside the box.
Rat dual_value(const FDivisor& s, const SupportFunction& h, const BasePoint& p, const QVec& u);

CriterionResult ample_necessary(const FDivisor& s, const SupportFunction& h);

// The support function h^inf cut out for cell `cell` of the slice at q.
// Requires the ampleness conditions and the flexibility criterion, q != inf,
// and the exceptional points for the cell's tail cone lying in {0, inf}.
SupportFunction polar_chart(const FDivisor& s, const SupportFunction& h, const BasePoint& q,
                            size_t cell);

}  // namespace tvar::fdiv
