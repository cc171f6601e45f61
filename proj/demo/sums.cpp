// Complete sums for the (3,3,2) example and one lower-bound chain on a desk instance.
#include <dworklab/counterexample.hpp>

#include <iomanip>
#include <iostream>

using namespace dworklab;

int main() {
    progress_to_stderr() = false;
    Form pk = generate_example(3, 3, 2);
    Form g = specialized_symbol(pk, {1, 1}, 1);
    std::cout << "P_3 = " << print_form(pk) << "\nat x1 = x2 = 1: " << print_form(g) << "\n\n";
    std::cout << " q   max|T|/weil   good pairs   required\n";
    for (std::uint64_t q : {11, 13, 17, 19, 23, 29}) {
        auto t = scan_all_pairs(reduce_mod(g, q));
        auto w = certify_weil(t);
        auto gp = good_pairs(t);
        std::cout << std::setw(3) << q << "   " << std::fixed << std::setprecision(4) << w.max_ratio << "        "
                  << std::setw(5) << gp.count << "   " << std::setw(8) << gp.required << "\n";
    }

    auto plan = solve_parameters(3, 3, 2);
    auto M = find_derivative_witness(pk, 2).m;
    Constants c;
    c.c5 = 0.2;
    Instance in = desk_instance(plan, pk, M, 256, 16, c);
    std::cout << "\nkappa " << plan.kappa << ", lambda " << plan.lambda << ", s* " << plan.s_threshold << "\n";
    std::cout << "instance R/L = " << in.rl << ", Q = " << in.Q << ", L = 2^" << std::lround(log2q(in.L)) << "\n";
    BoxSet bs = build_boxes(in, pk, M, c);
    std::cout << "boxes " << bs.box_count << ", union " << std::scientific << std::setprecision(4) << bs.union_measure
              << " of sum " << bs.sum_measure << "\n";
    const auto& pb = bs.per_prime.front();
    const auto& [a, b] = pb.good.pairs.front();
    ChainReport r = lower_bound_chain(in, pk, M, {pb.q, a, b, 0.0, std::vector<double>(b.size(), 0.0)}, c);
    std::cout << std::fixed << std::setprecision(3) << "q = " << pb.q << ", (a, b) = (" << a << ", " << b[0]
              << "): |S| = " << r.S_abs << ", main " << r.main << ", E2 " << r.E2 << ", threshold " << r.threshold
              << (r.certified ? ", certified" : ", not certified") << "\n";
    auto op = evaluate_operator(in, pk, M, r);
    std::cout << "operator value " << op.value << " with " << op.nodes << " nodes per axis\n";
}
