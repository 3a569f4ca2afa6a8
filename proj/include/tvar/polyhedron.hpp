#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tvar/linalg.hpp"
#include "tvar/rat.hpp"

namespace tvar::geom {

inline constexpr size_t kMaxRank = 8;

// Generators of { x : a.x >= 0 for a in ineqs, e.x = 0 for e in eqs },
// split into extreme rays modulo lineality and a lineality basis.
struct DDResult {
    std::vector<ZVec> rays;
    std::vector<ZVec> lineality;
};
DDResult dd_cone(size_t rank, const std::vector<QVec>& ineqs, const std::vector<QVec>& eqs);

struct ConeHRep {
    std::vector<ZVec> ineqs;  // primitive facet normals, a.x >= 0
    std::vector<ZVec> eqs;    // e.x = 0
};

// Closed convex polyhedral cone in canonical form: extreme rays modulo
// lineality (primitive, sorted) plus a lineality basis (reduced, sorted).
class Cone {
  public:
    Cone() = default;
    static Cone from_rays(size_t rank, const std::vector<QVec>& gens);
    static Cone from_rays_z(size_t rank, const std::vector<ZVec>& gens);
    static Cone from_inequalities(size_t rank, const std::vector<QVec>& ineqs,
                                  const std::vector<QVec>& eqs = {});

    size_t rank() const { return rank_; }
    const std::vector<ZVec>& rays() const { return rays_; }
    const std::vector<ZVec>& lineality() const { return lineality_; }
    const ConeHRep& hrep() const;

    // All generators with lineality folded in as +/- pairs.
    std::vector<ZVec> generators_folded() const;

    int dim() const;
    bool is_pointed() const { return lineality_.empty(); }
    bool is_zero() const { return rays_.empty() && lineality_.empty(); }
    bool is_fulldim() const { return dim() == static_cast<int>(rank_); }

    bool contains(const QVec& x) const;
    bool contains_cone(const Cone& inner) const;
    Cone dual() const;
    Cone intersect(const Cone& other) const;
    // Faces of all dimensions, this cone included.
    std::vector<Cone> faces() const;
    bool is_face_of(const Cone& other) const;

    bool operator==(const Cone& o) const { return rank_ == o.rank_ && rays_ == o.rays_ && lineality_ == o.lineality_; }
    std::string key() const;

  private:
    size_t rank_ = 0;
    std::vector<ZVec> rays_;
    std::vector<ZVec> lineality_;
    mutable std::optional<ConeHRep> hrep_;
};

struct PolyHRep {
    // a.x >= b rows; eq rows a.x = b.
    std::vector<std::pair<ZVec, Int>> ineqs;
    std::vector<std::pair<ZVec, Int>> eqs;
};

// Convex polyhedron conv(vertices) + cone(rays) + span(lineality), canonical.
// The empty polyhedron has no vertices.
class Polyhedron {
  public:
    Polyhedron() = default;
    static Polyhedron empty(size_t rank);
    static Polyhedron from_generators(size_t rank, const std::vector<QVec>& vertices,
                                      const std::vector<QVec>& rays);
    // rows are (a, b) meaning a.x >= b; eqs meaning a.x = b.
    static Polyhedron from_inequalities(size_t rank,
                                        const std::vector<std::pair<QVec, Rat>>& ineqs,
                                        const std::vector<std::pair<QVec, Rat>>& eqs = {});
    static Polyhedron from_cone(const Cone& c);
    static Polyhedron point(const QVec& v);

    size_t rank() const { return rank_; }
    bool is_empty() const { return vertices_.empty(); }
    const std::vector<QVec>& vertices() const { return vertices_; }
    const std::vector<ZVec>& rays() const { return rays_; }
    const std::vector<ZVec>& lineality() const { return lineality_; }
    // Rays with lineality folded in as +/- pairs (external representation).
    std::vector<ZVec> rays_folded() const;
    const PolyHRep& hrep() const;

    int dim() const;
    bool is_bounded() const { return rays_.empty() && lineality_.empty(); }

    bool contains_point(const QVec& x) const;
    bool contains(const Polyhedron& other) const;
    Cone tail_cone() const;
    Polyhedron translate(const QVec& v) const;

    // Faces of all dimensions, this polyhedron included, empty face excluded.
    std::vector<Polyhedron> faces() const;
    std::vector<Polyhedron> facets() const;
    bool is_face_of(const Polyhedron& other) const;

    bool operator==(const Polyhedron& o) const {
        return rank_ == o.rank_ && vertices_ == o.vertices_ && rays_ == o.rays_ &&
               lineality_ == o.lineality_;
    }
    std::string key() const;

  private:
    size_t rank_ = 0;
    std::vector<QVec> vertices_;
    std::vector<ZVec> rays_;
    std::vector<ZVec> lineality_;
    mutable std::optional<PolyHRep> hrep_;
};

Polyhedron minkowski_sum(const Polyhedron& a, const Polyhedron& b);
Polyhedron minkowski_sum(const std::vector<Polyhedron>& parts);
Polyhedron intersect(const Polyhedron& a, const Polyhedron& b);

Cone tail_cone(const Polyhedron& p);
Cone dual_cone(const Cone& c);
bool cone_contains_cone(const Cone& outer, const Cone& inner);

// Lattice translation v with p == v + c, if one exists.
std::optional<ZVec> is_lattice_translate(const Polyhedron& p, const Cone& c);

// All lattice points of a bounded polyhedron. Throws if unbounded.
std::vector<ZVec> lattice_points(const Polyhedron& p);
std::vector<ZVec> lattice_points_serial(const Polyhedron& p);

// A finite collection of maximal cells (lower faces implicit).
class PolyhedralComplex {
  public:
    PolyhedralComplex() = default;
    PolyhedralComplex(size_t rank, std::vector<Polyhedron> cells);

    size_t rank() const { return rank_; }
    const std::vector<Polyhedron>& cells() const { return cells_; }

    // Pairwise intersections are faces of both; cells nonempty and mutually
    // non-contained. Returns an error description, or nullopt when valid.
    std::optional<std::string> validate() const;
    // Valid, all cells full-dimensional, and every facet of every cell is a
    // facet of another cell; such a complex covers N_Q.
    bool is_complete(std::string* why = nullptr) const;

    // All faces of all cells, deduplicated.
    std::vector<Polyhedron> all_faces() const;
    std::vector<Cone> tail_cones() const;

  private:
    size_t rank_ = 0;
    std::vector<Polyhedron> cells_;
};

// Complete fan given by maximal cones.
struct Fan {
    size_t rank = 0;
    std::vector<Cone> maximal;

    std::optional<std::string> validate_complete() const;
    // All faces of all maximal cones, deduplicated.
    std::vector<Cone> all_faces() const;
    PolyhedralComplex as_complex() const;
};

}  // namespace tvar::geom
