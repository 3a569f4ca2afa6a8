#pragma once

#include <map>
#include <string>
#include <vector>

#include "tvar/poly.hpp"
#include "tvar/polyhedron.hpp"
#include "tvar/rat.hpp"

namespace tvar::cum {

// Segre-Veronese data: factors P^{d_i} in symmetric powers s_i.
struct SVSpec {
    std::vector<int> dims;
    std::vector<int> degs;

    size_t factors() const { return dims.size(); }
    int total_slots() const;
    int dim_x() const;
    int slot_offset(size_t factor) const;
    size_t factor_of_slot(int pos) const;
    void check() const;
};

// Flat tuple (c^1_1..c^1_{s_1},...,c^n_1..c^n_{s_n}) with 0 <= c^i_j <= d_i.
struct IndexTuple {
    std::vector<int> e;
    auto operator<=>(const IndexTuple&) const = default;
};

int degree(const IndexTuple& c);
bool leq(const IndexTuple& a, const IndexTuple& b);
IndexTuple restrict_tuple(const IndexTuple& c, const std::vector<int>& positions);
std::vector<int> support(const IndexTuple& c);
std::string tuple_str(const IndexTuple& c);

// All of C(A-hat): every shape-valid tuple except all zeros, sorted.
std::vector<IndexTuple> index_set(const SVSpec& spec);

// Decompositions of the full slot range into consecutive intervals, each
// containing at least two nonzero entries; blocks returned as [begin, end).
// Non-initial blocks open on a nonzero slot, so cut placements that differ
// only inside a run of zeros count once. Throws when degree(c) < 2.
// The one-block decomposition comes first.
std::vector<std::vector<std::pair<int, int>>> interval_partitions(const IndexTuple& c);

// Variable bookkeeping: one x-variable and one z-variable per tuple.
class Ring {
  public:
    explicit Ring(SVSpec spec);

    const SVSpec& spec() const { return spec_; }
    const std::vector<IndexTuple>& tuples() const { return tuples_; }

    uint32_t xvar(const IndexTuple& c) const;
    uint32_t zvar(const IndexTuple& c) const;
    // x(c) as a polynomial; the all-zero tuple is the constant 1.
    poly::Poly x(const IndexTuple& c) const;
    poly::Poly z(const IndexTuple& c) const;
    const IndexTuple& tuple_of(uint32_t var) const;
    bool is_zvar(uint32_t var) const { return var >= tuples_.size(); }
    std::string var_name(uint32_t var) const;

  private:
    SVSpec spec_;
    std::vector<IndexTuple> tuples_;
    std::map<IndexTuple, uint32_t> index_;
};

poly::Poly y_poly(const Ring& r, const IndexTuple& c);
poly::Poly z_poly(const Ring& r, const IndexTuple& c);

// z(c) as polynomials in x-variables, and the inverse substitution.
std::map<uint32_t, poly::Poly> z_from_x(const Ring& r);
std::map<uint32_t, poly::Poly> x_from_z(const Ring& r);

// Point of A^1 x B' x B'; v[i], w[i] hold the d_i coordinates of factor i
// (the 0-th coordinate of each factor is pinned to 1 by the chart).
struct SecPoint {
    Rat t;
    std::vector<QVec> v, w;
};

void check_point_shape(const SVSpec& spec, const std::vector<QVec>& v);

// x-coordinates of sec(t,v,w) in the chart.
std::map<IndexTuple, Rat> eval_sec(const SVSpec& spec, const SecPoint& p);
Rat sec_pullback_formula(const SVSpec& spec, const IndexTuple& c, const SecPoint& p);

// Reparameterization of the secant; undefined at t = 1/2.
SecPoint rep_map(const SecPoint& p);
// Monomial parameterization values in z-coordinates.
std::map<IndexTuple, Rat> monomial_map(const SVSpec& spec, const SecPoint& p);

// Tangential limit parameterization, x-coordinates.
std::map<IndexTuple, Rat> eval_tan(const SVSpec& spec, const std::vector<QVec>& v,
                                   const std::vector<QVec>& w);
Rat tan_pullback_formula(const SVSpec& spec, const IndexTuple& c,
                         const std::vector<QVec>& v, const std::vector<QVec>& w);

// Coordinate conversions at a point (z-polynomials evaluated, resp. the
// triangular system solved by increasing degree).
std::map<IndexTuple, Rat> x_to_z_values(const Ring& r, const std::map<IndexTuple, Rat>& xvals);
std::map<IndexTuple, Rat> z_to_x_values(const Ring& r, const std::map<IndexTuple, Rat>& zvals);

// Symbolic parameterization images for identity checks.
struct SecSymbols {
    uint32_t t = 0;
    std::vector<std::vector<uint32_t>> v, w;
    poly::VarTable names;
};
SecSymbols sec_symbols(const SVSpec& spec);
poly::Poly sec_image_x(const SVSpec& spec, const SecSymbols& s, const IndexTuple& c);
poly::Poly sec_formula_poly(const SVSpec& spec, const SecSymbols& s, const IndexTuple& c);
poly::Poly tan_image_x(const SVSpec& spec, const SecSymbols& s, const IndexTuple& c);

// Ranks of the parameterization Jacobians at a point, by exact elimination.
int sec_jacobian_rank(const SVSpec& spec, const SecPoint& p);
int tan_jacobian_rank(const SVSpec& spec, const std::vector<QVec>& v,
                      const std::vector<QVec>& w);

// Lattice point u(c) in Z^{sum d_i}: multiplicities of values 1..d_i per factor.
ZVec lattice_point_of(const SVSpec& spec, const IndexTuple& c);
// Canonical tuple with ascending slot values realizing u; throws if impossible.
IndexTuple representative_tuple(const SVSpec& spec, const ZVec& u);

geom::Polyhedron secant_polytope(const SVSpec& spec);

struct SecantReport {
    int dimX = 0;
    int dimP = -1;
    int dimSec = 0;
    int dimTan = 0;
    bool degenerate = false;
    std::vector<ZVec> latticePoints;
    std::vector<ZVec> monoidGenerators;
};
SecantReport classify(const SVSpec& spec);

// Minimal generating set (atoms) of the monoid generated by the points.
std::vector<ZVec> monoid_generators(const std::vector<ZVec>& points);

// z^a - z^b with disjoint supports over the given point order.
struct Binomial {
    std::vector<int> a, b;
    auto operator<=>(const Binomial&) const = default;
};

// All binomial relations of total degree <= maxdeg among monomials with
// exponent columns (1,u) (homogenize) or u (plain).
std::vector<Binomial> toric_ideal_upto(const std::vector<ZVec>& points, int maxdeg,
                                       bool homogenize = true);
std::vector<Binomial> toric_ideal_upto_serial(const std::vector<ZVec>& points, int maxdeg,
                                              bool homogenize = true);

// Exact verification of the pullback, decomposition and round-trip
// identities at the given points; returns the number of failures.
int sec_identity_failures(const SVSpec& spec, const std::vector<SecPoint>& pts);
int sec_identity_failures_serial(const SVSpec& spec, const std::vector<SecPoint>& pts);

}  // namespace tvar::cum
