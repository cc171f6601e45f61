#pragma once

#include "polynomial.hpp"

#include <optional>
#include <vector>

namespace dworklab {

// F_q or F_{q^2} = F_q[t]/(t^2 - c1 t - c0).
class SmallField {
public:
    struct Elem {
        std::uint64_t a = 0, b = 0;  // a + b t
        friend bool operator==(const Elem& x, const Elem& y) { return x.a == y.a && x.b == y.b; }
    };

    SmallField(std::uint64_t q, int degree) : q_(q), deg_(degree) {
        if (!is_prime(q)) throw std::invalid_argument("modulus is not prime");
        if (degree != 1 && degree != 2) throw std::invalid_argument("only degree 1 or 2 extensions");
        if (degree == 2) pick_modulus();
    }

    std::uint64_t q() const { return q_; }
    int degree() const { return deg_; }
    std::uint64_t size() const { return deg_ == 1 ? q_ : q_ * q_; }

    Elem from_index(std::uint64_t i) const { return deg_ == 1 ? Elem{i, 0} : Elem{i % q_, i / q_}; }
    Elem embed(std::uint64_t r) const { return Elem{r % q_, 0}; }
    bool is_zero(const Elem& x) const { return x.a == 0 && x.b == 0; }

    Elem add(const Elem& x, const Elem& y) const { return Elem{(x.a + y.a) % q_, (x.b + y.b) % q_}; }
    Elem mul(const Elem& x, const Elem& y) const {
        std::uint64_t ac = mulmod(x.a, y.a, q_), bd = mulmod(x.b, y.b, q_);
        std::uint64_t cross = (mulmod(x.a, y.b, q_) + mulmod(x.b, y.a, q_)) % q_;
        // t^2 = c0 + c1 t
        return Elem{(ac + mulmod(bd, c0_, q_)) % q_, (cross + mulmod(bd, c1_, q_)) % q_};
    }

    Elem eval(const FieldPoly& f, const std::vector<Elem>& x) const {
        if (f.field().q != q_) throw ModulusMismatch();
        Elem acc{0, 0};
        for (const auto& [e, c] : f.terms()) {
            Elem t = embed(c.residue);
            for (std::size_t i = 0; i < e.size(); ++i)
                for (std::uint32_t k = 0; k < e[i]; ++k) t = mul(t, x[i]);
            acc = add(acc, t);
        }
        return acc;
    }

private:
    void pick_modulus() {
        // Irreducible t^2 - c1 t - c0: no root in F_q.
        for (std::uint64_t c1 = 0; c1 < q_; ++c1)
            for (std::uint64_t c0 = 1; c0 < q_; ++c0) {
                bool root = false;
                for (std::uint64_t t = 0; t < q_ && !root; ++t) {
                    std::uint64_t lhs = mulmod(t, t, q_);
                    std::uint64_t rhs = (mulmod(c1, t, q_) + c0) % q_;
                    root = lhs == rhs;
                }
                if (!root) {
                    c0_ = c0;
                    c1_ = c1;
                    return;
                }
            }
        throw std::logic_error("no irreducible quadratic found");
    }

    std::uint64_t q_;
    int deg_;
    std::uint64_t c0_ = 0, c1_ = 0;
};

// First common zero in P^{n-1}(F_{q^e}) of the given polynomials, as field-element indices.
inline std::optional<std::vector<std::uint64_t>> find_projective_zero(const std::vector<FieldPoly>& polys,
                                                                        int extension_degree) {
    if (polys.empty()) throw std::invalid_argument("no polynomials");
    std::size_t n = polys.front().nvars();
    SmallField k(polys.front().field().q, extension_degree);
    std::uint64_t s = k.size();
    // Points normalized with the first nonzero coordinate equal to 1.
    for (std::size_t lead = 0; lead < n; ++lead) {
        std::size_t free = n - lead - 1;
        std::vector<std::uint64_t> idx(free, 0);
        for (;;) {
            std::vector<SmallField::Elem> x(n, SmallField::Elem{0, 0});
            x[lead] = SmallField::Elem{1, 0};
            for (std::size_t j = 0; j < free; ++j) x[lead + 1 + j] = k.from_index(idx[j]);
            bool all = true;
            for (const auto& p : polys)
                if (!k.is_zero(k.eval(p, x))) {
                    all = false;
                    break;
                }
            if (all) {
                std::vector<std::uint64_t> out(n, 0);
                out[lead] = 1;
                for (std::size_t j = 0; j < free; ++j) out[lead + 1 + j] = idx[j];
                return out;
            }
            std::size_t j = 0;
            while (j < free && ++idx[j] == s) idx[j++] = 0;
            if (j == free) break;
        }
    }
    return std::nullopt;
}

}  // namespace dworklab
