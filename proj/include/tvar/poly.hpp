#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tvar/rat.hpp"

namespace tvar::poly {

// Sparse monomial: (variable, exponent) pairs sorted by variable, exponents >= 1.
using Monomial = std::vector<std::pair<uint32_t, int>>;

Monomial monomial_mul(const Monomial& a, const Monomial& b);
int monomial_degree(const Monomial& m);

// Multivariate polynomial with exact rational coefficients.
class Poly {
  public:
    Poly() = default;
    explicit Poly(const Rat& c);
    explicit Poly(long c) : Poly(Rat(c)) {}
    static Poly var(uint32_t v, int exp = 1);
    static Poly term(const Rat& c, const Monomial& m);

    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    // Value of a constant polynomial (zero or degree 0). Throws otherwise.
    Rat constant_value() const;
    int degree() const;

    const std::map<Monomial, Rat>& terms() const { return t_; }
    Rat coeff(const Monomial& m) const;

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    Poly operator*(const Rat& c) const;
    bool operator==(const Poly& o) const { return t_ == o.t_; }

    Poly pow(int k) const;
    Poly derivative(uint32_t v) const;

    // Simultaneous substitution; variables absent from the map stay fixed.
    Poly substitute(const std::map<uint32_t, Poly>& sub) const;
    // Full evaluation; throws if some variable has no value.
    Rat eval(const std::map<uint32_t, Rat>& point) const;

    // Exact division by the single term c*m; throws when not divisible.
    Poly divide_by_term(const Monomial& m, const Rat& c) const;

    std::set<uint32_t> variables() const;
    std::string to_string(const std::function<std::string(uint32_t)>& name) const;

  private:
    void strip();
    std::map<Monomial, Rat> t_;
};

inline Poly operator*(const Rat& c, const Poly& p) { return p * c; }

// Bidirectional variable-name registry.
class VarTable {
  public:
    uint32_t id(const std::string& name);
    bool has(const std::string& name) const { return ids_.count(name) != 0; }
    const std::string& name(uint32_t v) const;
    size_t size() const { return names_.size(); }

  private:
    std::map<std::string, uint32_t> ids_;
    std::vector<std::string> names_;
};

// All monomials in variables 0..nvars-1 of total degree <= maxdeg.
std::vector<Monomial> all_monomials(uint32_t nvars, int maxdeg);

}  // namespace tvar::poly
