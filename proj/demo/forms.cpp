// Walk through the form-level analyses on a handful of forms.
#include <dworklab/center.hpp>
#include <dworklab/form_analysis.hpp>
#include <dworklab/parser.hpp>

#include <iostream>

using namespace dworklab;

int main() {
    std::vector<Form> forms = {
        parse_form("x1^3 + x1*x2^2 + x2*x3*x4"),
        parse_form("x1^3 + x2^3 + x2*x3^2"),
        generate_example(2, 3, 2),
        generate_example(3, 3, 2),
        generate_example(3, 5, 2),
    };
    for (const auto& f : forms) {
        std::cout << print_form(f) << "\n";
        auto rank = intertwining_rank(f);
        std::cout << "  rank " << rank.rank << " (witness x" << rank.witness << ")\n";
        auto v = is_dwork_regular(f);
        std::cout << "  nonsingular " << v.nonsingular << ", dwork-regular " << v.dwork_regular;
        if (!v.dwork_regular) {
            std::cout << ", fails on {";
            for (std::size_t i = 0; i < v.failing_subset.size(); ++i) std::cout << (i ? "," : "") << v.failing_subset[i];
            std::cout << "} (" << v.kind << ")";
        }
        std::cout << "\n";
        if (!v.dwork_regular) continue;
        auto bp = bad_primes(f, 100);
        std::cout << "  bad primes <= 100:";
        for (auto q : bp.bad) std::cout << " " << q;
        std::cout << (bp.bad.empty() ? " none" : "") << "\n";
        auto d = decide_decomposability(f);
        std::cout << "  center dim " << d.center_dimension << ", " << to_string(d.verdict) << "\n";
        if (rank.rank < f.nvars()) {
            auto w = find_derivative_witness(f, rank.rank);
            std::cout << "  d1 P at (";
            for (std::size_t i = 0; i < w.m.size(); ++i) std::cout << (i ? "," : "") << w.m[i];
            std::cout << ") = " << w.value << "\n";
        }
    }
    std::cout << "\n(n, k, r)   delta   s*\n";
    for (auto [n, k, r] : std::vector<std::tuple<long, long, long>>{{3, 3, 2}, {4, 3, 2}, {4, 4, 3}, {5, 3, 2}}) {
        Rational d = delta_threshold(n, k, r);
        std::cout << "(" << n << ", " << k << ", " << r << ")   " << d << "   " << make_rational(1, 4) + d << "\n";
    }
}
