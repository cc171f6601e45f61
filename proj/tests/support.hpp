#pragma once

#include <dworklab/polynomial.hpp>

#include <random>

namespace testsupport {

using namespace dworklab;

inline Rational random_rational(std::mt19937_64& rng, long num_max, long den_max) {
    std::uniform_int_distribution<long> num(-num_max, num_max), den(1, den_max);
    return make_rational(num(rng), den(rng));
}

inline Form random_form(std::mt19937_64& rng, std::size_t n, unsigned max_deg, std::size_t terms, long num_max = 9,
                        long den_max = 1) {
    Form f(n);
    std::uniform_int_distribution<unsigned> deg(0, max_deg);
    std::uniform_int_distribution<std::size_t> var(0, n - 1);
    for (std::size_t t = 0; t < terms; ++t) {
        ExponentVec e(n);
        unsigned d = deg(rng);
        for (unsigned k = 0; k < d; ++k) e[var(rng)] += 1;
        f.add_term(e, random_rational(rng, num_max, den_max));
    }
    return f;
}

inline Form random_homogeneous(std::mt19937_64& rng, std::size_t n, unsigned d, std::size_t terms, long num_max = 9) {
    Form f(n);
    std::uniform_int_distribution<std::size_t> var(0, n - 1);
    for (std::size_t t = 0; t < terms; ++t) {
        ExponentVec e(n);
        for (unsigned k = 0; k < d; ++k) e[var(rng)] += 1;
        f.add_term(e, random_rational(rng, num_max, 1));
    }
    return f;
}

inline std::vector<Rational> random_point(std::mt19937_64& rng, std::size_t n) {
    std::vector<Rational> p;
    for (std::size_t i = 0; i < n; ++i) p.push_back(random_rational(rng, 20, 7));
    return p;
}

}  // namespace testsupport
