#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tvar/fdiv.hpp"
#include "tvar/poly.hpp"
#include "tvar/rat.hpp"

namespace tvar::coxgen {

// Generator tags for the trinomial presentation of the Cox ring of a rational
// complexity-one T-variety. S-generators are indexed by rays of the tail fan
// that miss the degree locus; T-generators by a base point P and a vertex v of
// the slice at P, with mu(v) the smallest positive integer making mu(v)*v a
// lattice point.
struct SGen {
    ZVec ray;
    uint32_t var;
};

struct TGen {
    fdiv::BasePoint p;
    QVec v;
    Int mu;
    uint32_t var;
};

// One trinomial z * T^{mu(0)} + T^{mu(inf)} + T^{mu(z)}. The monomials are
// stored separately; relation_poly assembles the full polynomial.
struct Relation {
    Rat z;
    poly::Poly m0;
    poly::Poly minf;
    poly::Poly mz;
};

struct TrinomialPresentation {
    poly::VarTable vars;
    std::vector<SGen> sVars;
    std::vector<TGen> tVars;
    std::vector<Relation> relations;
};

poly::Poly relation_poly(const Relation& r);
std::string ring_string(const TrinomialPresentation& p);

// Presentation of the Cox ring attached to an f-divisor. The support is
// normalized first: trivial slices are adjoined at 0 and infinity when
// missing, so the relation monomials T^{mu(0)} and T^{mu(inf)} always exist.
// One relation per finite nonzero base point in the support. Throws
// std::invalid_argument when the f-divisor fails validation.
TrinomialPresentation cox_presentation(const fdiv::FDivisor& s);

// Relabeled trinomial data: relations z[l] * A[0] + A[1] + A[l] for
// l = 2..m over disjoint variable blocks, plus free variables untouched by
// any relation. A[l] is a single term; slot permutations may introduce
// scalar coefficients. linear[l] records whether A[l] has an exponent-one
// variable; the flexibility arguments need this for every l >= 1, and
// normalized_form only refuses outright when no relation block has one.
struct NormalizedTrinomialForm {
    poly::VarTable vars;
    std::vector<uint32_t> freeVars;
    std::vector<std::vector<uint32_t>> blocks;
    std::vector<poly::Poly> A;
    std::vector<Rat> z;
    std::vector<bool> linear;

    size_t m() const { return A.empty() ? 0 : A.size() - 1; }
    poly::Poly relation(size_t l) const;
};

NormalizedTrinomialForm normalized_form(const TrinomialPresentation& p);

// Exchange slot 1 with slot l >= 2, or slots 0 and 1, adjusting the z
// constants and term coefficients so the generated ideal is unchanged.
NormalizedTrinomialForm swap_block(const NormalizedTrinomialForm& f, size_t l);
NormalizedTrinomialForm swap_block01(const NormalizedTrinomialForm& f);

bool on_variety(const NormalizedTrinomialForm& f, const std::vector<Rat>& x);

// True when x is a smooth point of the affine variety cut out by the
// relations: singularity is equivalent to at least three of the monomials
// A[i] having every partial derivative vanish at x. Throws when x does not
// satisfy the relations.
bool smooth_point_check(const NormalizedTrinomialForm& f, const std::vector<Rat>& x);

// Substitution map on the generators, polynomial in a formal flow parameter.
// Specializing the parameter to 0 yields the identity.
struct PolynomialEndomorphism {
    poly::VarTable vars;
    uint32_t tVar;
    std::vector<poly::Poly> images;
};

// Additive-group action fixing every trinomial exactly: blocks 0 and 1 are
// translated by t * c * prod B_k where B_k is the partial derivative of A[k]
// with respect to its selected exponent-one variable (lowest variable id with
// nonvanishing derivative at x), and each selected variable is corrected by
// -(z[l] H_0 + H_1) * prod_{k != l} B_k. c lists coefficients for the block-0
// variables followed by the block-1 variables.
PolynomialEndomorphism build_ga_action(const NormalizedTrinomialForm& f,
                                       const std::vector<Rat>& x, const std::vector<Rat>& c);

poly::Poly endo_apply(const PolynomialEndomorphism& e, const poly::Poly& p);
std::vector<Rat> endo_flow(const PolynomialEndomorphism& e, const std::vector<Rat>& x,
                           const Rat& t);
// Checks phi_s after phi_t equals phi_{s+t} as a polynomial identity in two
// formal parameters.
bool flow_additive(const PolynomialEndomorphism& e);
std::string endo_script(const PolynomialEndomorphism& e);

// A finite schedule of flows moving x to y: translate the free variables,
// equalize blocks 0 and 1, then per block l >= 2 equalize its non-selected
// variables through the swapped action and repair block 1. The selected
// variables agree automatically through the relations; the composed flow is
// verified to map x to y exactly. Requires x smooth and y smooth with all
// coordinates nonzero.
std::vector<std::pair<PolynomialEndomorphism, Rat>> transitivity_demo(
    const NormalizedTrinomialForm& f, const std::vector<Rat>& x, const std::vector<Rat>& y);

// Homogeneous derivation on the affine cone lifted from a derivation on the
// chart x0 != 0. Variables are x0..xn; every image is homogeneous of degree
// d + 1 and x0 generates the kernel.
struct HomogeneousDerivation {
    poly::VarTable vars;
    std::vector<poly::Poly> images;
    int degree;
    bool nilpotentWithinBound;
    std::vector<int> nilpotencySteps;
};

// chartImages[i] is the image of the chart coordinate u_{i+1} = x_{i+1}/x0 as
// a polynomial in the chart coordinates (variable id j stands for u_{j+1});
// relations are homogeneous polynomials in x0..xn cutting out the cone. The
// lift sends x_{i+1} to x0^{d+1} * chartImages[i](x/x0), cleared of
// denominators; d must satisfy d + 1 >= deg chartImages[i] for every i.
// Ideal preservation is verified by exact bounded-degree membership, and
// nilpotency by iterating on each coordinate up to 2^(n+1) steps, reported in
// nilpotentWithinBound rather than asserted.
HomogeneousDerivation homogenize_derivation(const std::vector<poly::Poly>& chartImages,
                                            const std::vector<poly::Poly>& relations, int d);

}  // namespace tvar::coxgen
