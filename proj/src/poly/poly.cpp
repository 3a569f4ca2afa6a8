#include "tvar/poly.hpp"

#include <algorithm>
#include <sstream>

namespace tvar::poly {

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            r.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return r;
}

int monomial_degree(const Monomial& m) {
    int d = 0;
    for (const auto& [v, e] : m) d += e;
    return d;
}

Poly::Poly(const Rat& c) {
    if (c != 0) t_[{}] = c;
}

Poly Poly::var(uint32_t v, int exp) {
    Poly p;
    if (exp < 0) throw std::invalid_argument("Poly::var: negative exponent");
    if (exp == 0) return Poly(Rat(1));
    p.t_[{{v, exp}}] = 1;
    return p;
}

Poly Poly::term(const Rat& c, const Monomial& m) {
    Poly p;
    if (c != 0) p.t_[m] = c;
    return p;
}

bool Poly::is_constant() const {
    return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty());
}

Rat Poly::constant_value() const {
    if (t_.empty()) return 0;
    if (!is_constant()) throw std::invalid_argument("Poly: not constant");
    return t_.begin()->second;
}

int Poly::degree() const {
    int d = -1;
    for (const auto& [m, c] : t_) d = std::max(d, monomial_degree(m));
    return d;
}

Rat Poly::coeff(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? Rat(0) : it->second;
}

void Poly::strip() {
    for (auto it = t_.begin(); it != t_.end();) {
        if (it->second == 0)
            it = t_.erase(it);
        else
            ++it;
    }
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.t_) c = -c;
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    r += o;
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    r -= o;
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    for (const auto& [m, c] : o.t_) t_[m] += c;
    strip();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (const auto& [m, c] : o.t_) t_[m] -= c;
    strip();
    return *this;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    for (const auto& [m1, c1] : t_)
        for (const auto& [m2, c2] : o.t_) r.t_[monomial_mul(m1, m2)] += c1 * c2;
    r.strip();
    return r;
}

Poly Poly::operator*(const Rat& c) const {
    Poly r;
    if (c == 0) return r;
    r = *this;
    for (auto& [m, v] : r.t_) v *= c;
    return r;
}

Poly Poly::pow(int k) const {
    if (k < 0) throw std::invalid_argument("Poly::pow: negative exponent");
    Poly r(Rat(1));
    Poly b = *this;
    while (k > 0) {
        if (k & 1) r = r * b;
        b = b * b;
        k >>= 1;
    }
    return r;
}

Poly Poly::derivative(uint32_t v) const {
    Poly r;
    for (const auto& [m, c] : t_) {
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i].first != v) continue;
            Monomial n = m;
            Rat nc = c * m[i].second;
            if (n[i].second == 1)
                n.erase(n.begin() + i);
            else
                n[i].second -= 1;
            r.t_[n] += nc;
            break;
        }
    }
    r.strip();
    return r;
}

Poly Poly::substitute(const std::map<uint32_t, Poly>& sub) const {
    Poly r;
    for (const auto& [m, c] : t_) {
        Poly term(c);
        for (const auto& [v, e] : m) {
            auto it = sub.find(v);
            if (it == sub.end())
                term = term * Poly::var(v, e);
            else
                term = term * it->second.pow(e);
        }
        r += term;
    }
    return r;
}

Rat Poly::eval(const std::map<uint32_t, Rat>& point) const {
    Rat s = 0;
    for (const auto& [m, c] : t_) {
        Rat t = c;
        for (const auto& [v, e] : m) {
            auto it = point.find(v);
            if (it == point.end()) throw std::invalid_argument("Poly::eval: unassigned variable");
            Rat p = 1;
            for (int i = 0; i < e; ++i) p *= it->second;
            t *= p;
        }
        s += t;
    }
    return s;
}

Poly Poly::divide_by_term(const Monomial& m, const Rat& c) const {
    if (c == 0) throw std::invalid_argument("Poly: division by zero term");
    Poly r;
    for (const auto& [mm, cc] : t_) {
        Monomial q;
        size_t i = 0;
        for (const auto& [v, e] : m) {
            while (i < mm.size() && mm[i].first < v) q.push_back(mm[i++]);
            if (i == mm.size() || mm[i].first != v || mm[i].second < e)
                throw std::invalid_argument("Poly: term does not divide");
            if (mm[i].second > e) q.emplace_back(v, mm[i].second - e);
            ++i;
        }
        while (i < mm.size()) q.push_back(mm[i++]);
        r.t_[q] = cc / c;
    }
    return r;
}

std::set<uint32_t> Poly::variables() const {
    std::set<uint32_t> s;
    for (const auto& [m, c] : t_)
        for (const auto& [v, e] : m) s.insert(v);
    return s;
}

std::string Poly::to_string(const std::function<std::string(uint32_t)>& name) const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : t_) {
        Rat a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool printed = false;
        if (a != 1 || m.empty()) {
            os << format_rat(a);
            printed = true;
        }
        for (const auto& [v, e] : m) {
            if (printed) os << "*";
            printed = true;
            os << name(v);
            if (e != 1) os << "^" << e;
        }
    }
    return os.str();
}

uint32_t VarTable::id(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    uint32_t v = static_cast<uint32_t>(names_.size());
    ids_[name] = v;
    names_.push_back(name);
    return v;
}

const std::string& VarTable::name(uint32_t v) const {
    if (v >= names_.size()) throw std::invalid_argument("VarTable: unknown variable");
    return names_[v];
}

std::vector<Monomial> all_monomials(uint32_t nvars, int maxdeg) {
    std::vector<Monomial> out{{}};
    for (uint32_t v = 0; v < nvars; ++v) {
        std::vector<Monomial> next;
        for (const Monomial& m : out) {
            int used = monomial_degree(m);
            next.push_back(m);
            for (int e = 1; e + used <= maxdeg; ++e) {
                Monomial n = m;
                n.emplace_back(v, e);
                next.push_back(n);
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace tvar::poly
