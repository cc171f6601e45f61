// dworklab: JSON front end for the form, exponential-sum and counterexample analyses.
// Exit codes: 0 success, 1 analysis refused (precondition not met), 2 usage error.

#include <dworklab/center.hpp>
#include <dworklab/config.hpp>
#include <dworklab/counterexample.hpp>
#include <dworklab/expsum.hpp>
#include <dworklab/form_analysis.hpp>
#include <dworklab/parser.hpp>
#include <dworklab/sum_cache.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace dworklab;
using Json = nlohmann::ordered_json;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string rat(const Rational& r) { return r.get_str(); }

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json cplx(const std::complex<double>& z) { return Json::array({num(z.real()), num(z.imag())}); }

Json matrix_json(const RationalMatrix& a) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(rat(a(i, j)));
        rows.push_back(row);
    }
    return rows;
}

struct Global {
    std::uint64_t seed = 0;
    unsigned threads = default_threads();
    std::string cache_dir;
    bool no_cache = false;
    bool quiet = false;

    SumTableCache cache() const { return SumTableCache(cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir)); }
};

struct FormOpt {
    std::string text;
    std::optional<std::size_t> n;

    void add(CLI::App* cmd) {
        cmd->add_option("--form", text, "form in the x1, x2, ... grammar")->required();
        cmd->add_option("--n", n, "number of variables (default: largest index)");
    }
    Form get() const { return parse_form(text, n); }
};

void require_prime(std::uint64_t q) {
    if (!is_prime(q)) throw UsageError("--q " + std::to_string(q) + " is not prime");
}

// ---------------------------------------------------------------- counterexample setup

struct ProblemOpt {
    std::string config;
    std::optional<long> n, k, r, j;
    std::optional<std::string> form, witness, instance;
    std::vector<std::string> sets;

    void add(CLI::App* cmd) {
        cmd->add_option("--config", config, "experiment config file (key = value)");
        cmd->add_option("--n", n);
        cmd->add_option("--k", k);
        cmd->add_option("--r", r);
        cmd->add_option("--form", form, "P_k text, or 'generate' for the example family");
        cmd->add_option("--witness", witness, "comma list M_1..M_r (default: derivative witness search)");
        cmd->add_option("--j", j, "use R = 2^j on the progression");
        cmd->add_option("--instance", instance, "'rl=256,Q=16' or 'R=..,L=..,Q=..,S1=..'");
        cmd->add_option("--set", sets, "config override key=value (repeatable)");
    }

    ExperimentConfig load(const Global& g) const {
        ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_config(config);
        if (n) cfg.n = n;
        if (k) cfg.k = k;
        if (r) cfg.r = r;
        if (form) cfg.form = *form;
        if (witness) cfg.witness = parse_long_list(*witness, "--witness");
        for (const auto& s : sets) {
            auto eq = s.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects key=value");
            apply_config_line(cfg, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
        }
        if (instance) cfg.instances = {parse_instance(*instance)};
        if (j) {
            cfg.instances.clear();
            cfg.j_list = {*j};
        }
        if (!cfg.seed) cfg.seed = g.seed;
        cfg.constants.validate();
        if (!cfg.n || !cfg.k || !cfg.r) throw UsageError("need n, k, r (flags or config)");
        return cfg;
    }
};

struct Problem {
    ExperimentConfig cfg;
    ParamPlan plan;
    Form pk;
    std::vector<long> M;
};

Problem make_problem(const ProblemOpt& o, const Global& g) {
    Problem p;
    p.cfg = o.load(g);
    p.plan = solve_parameters(*p.cfg.n, *p.cfg.k, *p.cfg.r);
    p.pk = config_form(p.cfg);
    p.M = config_witness(p.cfg, p.pk);
    return p;
}

Instance pick_instance(const Problem& p) {
    if (!p.cfg.instances.empty()) return resolve_instance(p.cfg.instances.front(), p.plan, p.pk, p.M, p.cfg.constants);
    if (!p.cfg.j_list.empty()) return feasible_instance(p.plan, p.cfg.j_list.front());
    throw UsageError("no instance: give --j, --instance or a config with j_list / instance");
}

BoxSetOptions box_options(const Global& g, const Problem& p, const SumTableCache* cache) {
    BoxSetOptions o;
    o.threads = g.threads;
    o.cache = cache;
    o.seed = *p.cfg.seed;
    return o;
}

Json plan_json(const ParamPlan& p) {
    Json rel = Json::array();
    for (const auto& r : p.relations)
        rel.push_back({{"name", r.name}, {"lhs", rat(r.lhs)}, {"sense", r.sense}, {"rhs", rat(r.rhs)},
                       {"holds", r.holds}, {"equality", r.equality}});
    return {{"n", p.n}, {"k", p.k}, {"r", p.r}, {"D", p.D.get_str()}, {"modulus", p.modulus.get_str()},
            {"sigma", rat(p.sigma)}, {"kappa", rat(p.kappa)}, {"lambda", rat(p.lambda)}, {"Delta0", rat(p.Delta0)},
            {"delta", rat(p.delta)}, {"s_threshold", rat(p.s_threshold)}, {"exponent_bound", rat(p.exponent_bound())},
            {"relations", rel}, {"consistent", p.consistent()}};
}

Json instance_json(const Instance& in) {
    Json checks = Json::array();
    for (const auto& c : in.checks)
        checks.push_back({{"name", c.name}, {"holds", c.holds}, {"log2_lhs", num(c.log2_lhs)}, {"log2_rhs", num(c.log2_rhs)}});
    Json j = {{"R", rat(in.R)}, {"L", rat(in.L)}, {"Q", rat(in.Q)}, {"S1", rat(in.S1)}, {"R_over_L", in.rl.get_str()},
              {"Delta0", rat(in.Delta0)}, {"constraints", checks}};
    if (in.j) j["j"] = *in.j;
    return j;
}

Json window_json(const TWindow& w) {
    Json checks = Json::array();
    for (const auto& [name, ok] : w.checks) checks.push_back({{"name", name}, {"holds", ok}});
    auto v = w.violated();
    return {{"d1P", num(static_cast<double>(w.d1P))}, {"A1", num(static_cast<double>(w.A1))},
            {"tau_max", num(static_cast<double>(w.tau_max))}, {"t_cap", num(static_cast<double>(w.t_cap))},
            {"compatibility", num(static_cast<double>(w.compat))}, {"delta0", num(w.delta0)},
            {"checks", checks}, {"open", !v.has_value()}};
}

Json boxes_json(const BoxSet& bs) {
    Json per = Json::array();
    for (const auto& pb : bs.per_prime)
        per.push_back({{"q", pb.q}, {"good_pairs", pb.good.count}, {"required", pb.good.required.get_str()},
                       {"density_ok", pb.good.density_ok}, {"half_width_a", num(pb.half_width_a)},
                       {"half_width_b", num(pb.half_width_b)}, {"box_measure", num(pb.box_measure)}});
    Json j = {{"Q", rat(bs.Q)}, {"primes", bs.primes}, {"per_prime", per}, {"box_count", bs.box_count},
              {"slab_factor", num(bs.slab_factor)}, {"sum_measure", num(bs.sum_measure)},
              {"union_measure", num(bs.union_measure)}, {"exact", bs.exact},
              {"overlapping_pairs", bs.overlapping_pairs}, {"union_times_logQ", num(bs.union_times_logQ())},
              {"jacobian", num(bs.jacobian)}, {"omega_star_measure", num(bs.omega_star_measure)}};
    if (!bs.exact) j["union_stderr"] = num(bs.union_stderr);
    return j;
}

Json chain_json(const ChainReport& r) {
    Json x = Json::array();
    for (auto v : r.x) x.push_back(num(static_cast<double>(v)));
    return {{"q", r.point.q}, {"a", r.point.a}, {"b", r.point.b}, {"dy1", num(r.point.dy1)}, {"dy", r.point.dy},
            {"V", num(r.V)}, {"s", num(r.s)}, {"tau", num(static_cast<double>(r.tau))}, {"t", num(static_cast<double>(r.t))},
            {"x", x}, {"S", cplx(r.dec.S)}, {"abs_S", num(r.S_abs)}, {"T", cplx(r.dec.T)}, {"main", num(r.main)},
            {"E2", num(r.E2)}, {"E2_budget", num(r.budget)}, {"threshold", num(r.threshold)},
            {"main_floor", num(r.main_floor)}, {"sup_partial", r.sup_partial ? num(*r.sup_partial) : Json(nullptr)},
            {"E1_estimate", num(r.E1_estimate)}, {"pointwise_lower", num(r.pointwise_lower)},
            {"certified", r.certified}, {"E2_le_half_main", r.e2_half_main}, {"E2_within_budget", r.e2_within_budget},
            {"main_above_floor", r.main_above_floor}};
}

// ---------------------------------------------------------------- form commands

Json cmd_rank(const FormOpt& f) {
    Form pk = f.get();
    auto rep = intertwining_rank(pk);
    return {{"form", print_form(pk)}, {"rank", rep.rank}, {"witness_variable", rep.witness}, {"ranks", rep.ranks},
            {"intertwining_sets", rep.intertwining_sets}, {"permutation", rep.permutation},
            {"relabeled", print_form(rep.relabeled)}};
}

Json verdict_json(const RegularityVerdict& v, const std::string& field) {
    return {{"field", field}, {"dwork_regular", v.dwork_regular}, {"nonsingular", v.nonsingular},
            {"failing_subset", v.failing_subset}, {"kind", v.kind.empty() ? Json(nullptr) : Json(v.kind)}};
}

Json cmd_dwork(const FormOpt& f, std::optional<std::uint64_t> q, const Global& g) {
    Form h = f.get();
    if (q) {
        require_prime(*q);
        return verdict_json(is_dwork_regular(reduce_mod(h, *q), g.threads), "F_" + std::to_string(*q));
    }
    return verdict_json(is_dwork_regular(h, g.threads), "Q");
}

Json cmd_nonsingular(const FormOpt& f, std::optional<std::uint64_t> q) {
    Form h = f.get();
    if (q) {
        require_prime(*q);
        return {{"field", "F_" + std::to_string(*q)}, {"nonsingular", is_nonsingular(reduce_mod(h, *q))}};
    }
    return {{"field", "Q"}, {"nonsingular", is_nonsingular(h)}};
}

Json cmd_bad_primes(const FormOpt& f, std::uint64_t q_max, const Global& g) {
    auto rep = bad_primes(f.get(), q_max, g.threads);
    return {{"q_max", rep.q_max}, {"bad", rep.bad}, {"excluded", rep.excluded}, {"good_count", rep.good.size()},
            {"largest_bad", rep.largest_bad ? Json(*rep.largest_bad) : Json(nullptr)}};
}

Json cmd_deligne(const FormOpt& f, std::uint64_t q, const std::vector<long>& c) {
    require_prime(q);
    FieldPoly h = reduce_mod(f.get(), q);
    std::vector<FieldElem> ce;
    for (long v : c) ce.push_back(h.field().from_int(v));
    auto rep = deligne_after_specialization(h, ce);
    return {{"q", q}, {"c", c}, {"deligne", rep.deligne}, {"degree", rep.degree},
            {"specialized", print_form(rep.specialized)},
            {"leading", rep.specialized.is_zero() ? Json(nullptr) : Json(print_form(rep.leading))}};
}

Json cmd_center(const FormOpt& f) {
    auto basis = compute_center(f.get());
    Json b = Json::array();
    for (const auto& a : basis.basis) b.push_back(matrix_json(a));
    return {{"dimension", basis.dimension()}, {"central", basis.dimension() == 1}, {"basis", b}};
}

Json cmd_decompose(const FormOpt& f, const Global& g) {
    DecomposabilityOptions opt;
    opt.seed = g.seed;
    auto v = decide_decomposability(f.get(), opt);
    return {{"center_dimension", v.center_dimension}, {"central", v.central}, {"verdict", to_string(v.verdict)},
            {"idempotent", v.idempotent ? matrix_json(*v.idempotent) : Json(nullptr)}};
}

Json cmd_examples(long n, long k, long r) {
    if (n < 1 || k < 0 || r < 0) throw UsageError("n, k, r must be positive");
    Form f = generate_example(static_cast<std::size_t>(n), static_cast<unsigned>(k), static_cast<std::size_t>(r));
    auto rank = intertwining_rank(f);
    Json j = {{"n", n}, {"k", k}, {"r", r}, {"form", print_form(f)}, {"rank", rank.rank}};
    if (r < n) {
        auto w = find_derivative_witness(f, static_cast<std::size_t>(r));
        j["witness"] = w.m;
        j["d1_value"] = rat(w.value);
    }
    return j;
}

// ---------------------------------------------------------------- sum commands

Json cmd_table(const FormOpt& f, std::uint64_t q, bool summary, const Global& g) {
    require_prime(q);
    FieldPoly p = reduce_mod(f.get(), q);
    auto cache = g.cache();
    SumTable t = cached_scan(p, g.no_cache ? nullptr : &cache, ScanOptions{g.threads});
    double mx = 0, parseval = 0;
    for (const auto& v : t.values) {
        mx = std::max(mx, std::abs(v));
        parseval += std::norm(v);
    }
    double expect = std::pow(static_cast<double>(q), 2.0 * t.m + 1);
    Json j = {{"q", q}, {"m", t.m}, {"k", t.k}, {"entries", t.values.size()}, {"weil_bound", num(weil_bound(t.k, t.m, q))},
              {"max_abs_nonzero_a", nullptr}, {"parseval_sum", num(parseval)}, {"parseval_expected", num(expect)}};
    double mx_a = 0;
    std::uint64_t per_a = t.values.size() / q;
    for (std::uint64_t i = per_a; i < t.values.size(); ++i) mx_a = std::max(mx_a, std::abs(t.values[i]));
    j["max_abs_nonzero_a"] = num(mx_a);
    j["max_abs"] = num(mx);
    if (!summary) {
        Json vals = Json::array();
        for (const auto& v : t.values) vals.push_back(cplx(v));
        j["values"] = vals;
    }
    return j;
}

Json cmd_good_pairs(const FormOpt& f, std::uint64_t q, const std::string& a1, const std::string& a2, bool no_density,
                    bool summary, const Global& g) {
    require_prime(q);
    FieldPoly p = reduce_mod(f.get(), q);
    auto cache = g.cache();
    SumTable t = cached_scan(p, g.no_cache ? nullptr : &cache, ScanOptions{g.threads});
    GoodPairOptions opt;
    if (!a1.empty()) opt.alpha1 = parse_rational(a1);
    if (!a2.empty()) opt.alpha2 = parse_rational(a2);
    opt.enforce_density = !no_density;
    auto gp = good_pairs(t, opt);
    Json j = {{"q", q}, {"m", gp.m}, {"k", gp.k}, {"alpha1", rat(gp.alpha1)}, {"alpha2", rat(gp.alpha2)},
              {"count", gp.count}, {"required", gp.required.get_str()}, {"threshold", gp.threshold},
              {"density_ok", gp.density_ok}};
    if (!summary) {
        Json pairs = Json::array();
        for (const auto& [a, b] : gp.pairs) pairs.push_back(Json::array({a, b}));
        j["pairs"] = pairs;
    }
    return j;
}

// ---------------------------------------------------------------- counterexample commands

Json cmd_params(const ProblemOpt& o, const Global& g) {
    ExperimentConfig cfg = o.load(g);
    return plan_json(solve_parameters(*cfg.n, *cfg.k, *cfg.r));
}

Json cmd_boxes(const ProblemOpt& o, const Global& g) {
    Problem p = make_problem(o, g);
    Instance in = pick_instance(p);
    auto cache = g.cache();
    BoxSet bs = build_boxes(in, p.pk, p.M, p.cfg.constants, box_options(g, p, g.no_cache ? nullptr : &cache));
    TestFunction tf = make_test_function(in, p.M);
    TWindow w = t_window(in, p.pk, p.M, p.cfg.constants, p.cfg.constants.c4 / static_cast<double>(bs.primes.front()));
    return {{"form", print_form(p.pk)}, {"witness", p.M}, {"instance", instance_json(in)},
            {"test_function", {{"C", num(tf.C)}, {"annulus", {num(tf.inner_radius), num(tf.outer_radius)}},
                               {"annulus_ok", tf.annulus_ok}, {"f_norm_bracket", {num(tf.norm_lower), num(tf.norm_upper)}}}},
            {"t_window", window_json(w)}, {"boxes", boxes_json(bs)}};
}

struct PointOpt {
    std::optional<std::uint64_t> q, a;
    std::string b, dy;
    double dy1 = 0;
    bool scan = false, op = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--q", q, "prime in [Q/2, Q]");
        cmd->add_option("--a", a);
        cmd->add_option("--b", b, "comma list b_1..b_(n-r)");
        cmd->add_option("--dy1", dy1, "offset of y_1 from 2 pi a/q");
        cmd->add_option("--dy", dy, "comma list of offsets of y_j from 2 pi b_j/q");
        cmd->add_flag("--scan", scan, "every good pair at the center and box corners");
        cmd->add_flag("--operator", op, "also evaluate the operator at the constructed (x, t)");
    }
};

Json cmd_lower_bound(const ProblemOpt& o, const PointOpt& pt, const Global& g) {
    Problem p = make_problem(o, g);
    Instance in = pick_instance(p);
    Json out = {{"form", print_form(p.pk)}, {"witness", p.M}, {"instance", instance_json(in)}};
    const Constants& c = p.cfg.constants;
    if (pt.scan) {
        auto cache = g.cache();
        BoxSet bs = build_boxes(in, p.pk, p.M, c, box_options(g, p, g.no_cache ? nullptr : &cache));
        auto sc = scan_chain(in, p.pk, p.M, c, bs, g.threads);
        Json fails = Json::array();
        for (const auto& f : sc.failures) fails.push_back(chain_json(f));
        out["scan"] = {{"points", sc.points}, {"certified", sc.certified}, {"E2_le_half_main", sc.e2_half_main},
                       {"E2_within_budget", sc.e2_within_budget}, {"main_above_floor", sc.main_above_floor},
                       {"positive_pointwise_lower", sc.positive_lower},
                       {"min_certificate_ratio", num(sc.min_certificate_ratio)},
                       {"max_E2_over_main", num(sc.max_e2_over_main)}, {"failures", fails}};
        return out;
    }
    if (!pt.q || !pt.a || pt.b.empty()) throw UsageError("need --q, --a and --b (or --scan)");
    ChainPoint cp;
    cp.q = *pt.q;
    cp.a = *pt.a;
    for (long v : parse_long_list(pt.b, "--b")) {
        if (v < 0) throw UsageError("--b entries must be nonnegative");
        cp.b.push_back(static_cast<std::uint64_t>(v));
    }
    cp.dy1 = pt.dy1;
    if (pt.dy.empty())
        cp.dy.assign(cp.b.size(), 0.0);
    else
        for (const auto& s : detail::split(pt.dy, ',')) cp.dy.push_back(detail::parse_double(s, "--dy"));
    ChainReport rep = lower_bound_chain(in, p.pk, p.M, cp, c);
    out["window"] = window_json(rep.window);
    out["chain"] = chain_json(rep);
    if (pt.op) {
        auto v = evaluate_operator(in, p.pk, p.M, rep);
        out["operator"] = {{"value", num(v.value)}, {"S", cplx(v.S)}, {"integral", cplx(v.integral)},
                           {"phi_limit", num(v.phi_limit)}, {"nodes_per_axis", v.nodes}};
    }
    return out;
}

Json cmd_growth(const ProblemOpt& o, const std::string& j_list, std::optional<double> s, const Global& g) {
    Problem p = make_problem(o, g);
    if (!j_list.empty()) p.cfg.j_list = parse_long_list(j_list, "--j-list");
    if (s) p.cfg.s = s;
    if (p.cfg.j_list.empty()) throw UsageError("growth needs j_list");
    if (!p.cfg.s) throw UsageError("growth needs s");
    auto cache = g.cache();
    auto rep = growth_experiment(p.plan, p.pk, p.M, p.cfg.j_list, *p.cfg.s, p.cfg.constants,
                                 box_options(g, p, g.no_cache ? nullptr : &cache));
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        Json row = {{"j", r.j}, {"feasible", r.feasible}};
        if (!r.feasible) {
            row["reason"] = r.reason;
        } else {
            row["R"] = "2^" + std::to_string(static_cast<long>(std::lround(r.log2R)));
            row["L"] = "2^" + std::to_string(static_cast<long>(std::lround(r.log2L)));
            row["Q"] = "2^" + std::to_string(static_cast<long>(std::lround(r.log2Q)));
            row["primes"] = r.primes;
            row["boxes"] = r.boxes;
            row["omega_measure"] = num(r.omega_measure);
            row["omega_star_measure"] = num(r.omega_star_measure);
            row["union_times_logQ"] = num(r.union_times_logQ);
            row["pointwise_lower"] = num(r.pointwise_lower);
            row["lower_bound"] = num(r.lower_bound);
            row["f_norm_bracket"] = {num(r.f_norm_lower), num(r.f_norm_upper)};
            row["log_ratio"] = num(r.log_ratio);
            row["ratio"] = num(r.ratio);
            row["t_window"] = r.t_window_issue ? Json(*r.t_window_issue) : Json("open");
        }
        rows.push_back(row);
    }
    return {{"form", print_form(p.pk)}, {"witness", p.M}, {"s", num(rep.s)}, {"s_threshold", rat(p.plan.s_threshold)},
            {"rows", rows}, {"feasible_rows", rep.feasible_rows}, {"increasing", rep.increasing},
            {"nonincreasing", rep.nonincreasing}, {"analytic_exponent", num(rep.analytic_exponent)},
            {"fitted_slope", num(rep.fitted_slope)}, {"fitted_slope_logQ_corrected", num(rep.fitted_slope_log_corrected)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dworklab: Dwork-regular forms, exponential sums and maximal-function counterexamples"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Global g;
    app.add_option("--seed", g.seed, "seed for randomized searches and Monte Carlo");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", g.cache_dir, "SumTable cache directory (default $DWORKLAB_CACHE or ./.dworklab)");
    app.add_flag("--no-cache", g.no_cache, "do not read or write the SumTable cache");
    app.add_flag("--quiet", g.quiet, "no progress lines on stderr");

    std::function<Json()> action;

    FormOpt f_rank, f_dw, f_ns, f_bp, f_ds, f_c, f_dec, f_tab, f_gp;
    std::optional<std::uint64_t> q_dw, q_ns;
    std::uint64_t q_max = 0, q_ds = 0, q_tab = 0, q_gp = 0;
    std::string c_ds, a1, a2, j_list;
    bool summary_tab = false, summary_gp = false, no_density = false;
    long n = 0, k = 0, r = 0;
    std::optional<double> s;
    ProblemOpt po_params, po_boxes, po_lb, po_growth;
    PointOpt point;

    auto* rank = app.add_subcommand("rank", "intertwining rank of a form");
    f_rank.add(rank);
    rank->callback([&] { action = [&] { return cmd_rank(f_rank); }; });

    auto* dw = app.add_subcommand("dwork-check", "Dwork-regularity over Q or F_q");
    f_dw.add(dw);
    dw->add_option("--q", q_dw, "work over F_q");
    dw->callback([&] { action = [&] { return cmd_dwork(f_dw, q_dw, g); }; });

    auto* ns = app.add_subcommand("nonsingular", "nonsingularity over Q or F_q");
    f_ns.add(ns);
    ns->add_option("--q", q_ns, "work over F_q");
    ns->callback([&] { action = [&] { return cmd_nonsingular(f_ns, q_ns); }; });

    auto* bp = app.add_subcommand("bad-primes", "primes where Dwork-regularity fails mod q");
    f_bp.add(bp);
    bp->add_option("--q-max", q_max)->required();
    bp->callback([&] { action = [&] { return cmd_bad_primes(f_bp, q_max, g); }; });

    auto* ds = app.add_subcommand("deligne-specialize", "fix the first r variables mod q and test the Deligne property");
    f_ds.add(ds);
    ds->add_option("--q", q_ds)->required();
    ds->add_option("--c", c_ds, "comma list of values for x1..xr")->required();
    ds->callback([&] { action = [&] { return cmd_deligne(f_ds, q_ds, parse_long_list(c_ds, "--c")); }; });

    auto* ce = app.add_subcommand("center", "Harrison center of a form");
    f_c.add(ce);
    ce->callback([&] { action = [&] { return cmd_center(f_c); }; });

    auto* dec = app.add_subcommand("decompose", "decomposability verdict from the center");
    f_dec.add(dec);
    dec->callback([&] { action = [&] { return cmd_decompose(f_dec, g); }; });

    auto* ex = app.add_subcommand("examples", "member of the indecomposable Dwork-regular example family");
    ex->add_option("--n", n)->required();
    ex->add_option("--k", k)->required();
    ex->add_option("--r", r)->required();
    ex->callback([&] { action = [&] { return cmd_examples(n, k, r); }; });

    auto* cd = app.add_subcommand("codim", "codimension formulas");
    cd->add_option("--n", n)->required();
    cd->add_option("--k", k)->required();
    cd->callback([&] {
        action = [&] {
            if (n < 2 || k < 2) throw UsageError("codim needs n >= 2, k >= 2");
            auto [a, b] = codimensions(static_cast<unsigned long>(n), static_cast<unsigned long>(k));
            return Json{{"codim_P_n_minus_1", a.get_str()}, {"codim_P_1", b.get_str()},
                        {"corollary_threshold", rat(corollary_threshold(n, k))}};
        };
    });

    auto* de = app.add_subcommand("delta", "regularity threshold increment");
    de->add_option("--n", n)->required();
    de->add_option("--k", k)->required();
    de->add_option("--r", r)->required();
    de->callback([&] {
        action = [&] {
            Rational d = delta_threshold(n, k, r);
            return Json{{"delta", rat(d)}, {"s_threshold", rat(make_rational(1, 4) + d)}};
        };
    });

    auto* tab = app.add_subcommand("expsum-table", "all complete sums T(a, b; q)");
    f_tab.add(tab);
    tab->add_option("--q", q_tab)->required();
    tab->add_flag("--summary", summary_tab, "omit the value list");
    tab->callback([&] { action = [&] { return cmd_table(f_tab, q_tab, summary_tab, g); }; });

    auto* gp = app.add_subcommand("good-pairs", "pairs with large complete sums");
    f_gp.add(gp);
    gp->add_option("--q", q_gp)->required();
    gp->add_option("--alpha1", a1, "lower constant (default 1/2)");
    gp->add_option("--alpha2", a2, "density constant (default (1/8)(k-1)^(-2m))");
    gp->add_flag("--no-density", no_density, "do not fail on low density");
    gp->add_flag("--summary", summary_gp, "omit the pair list");
    gp->callback([&] { action = [&] { return cmd_good_pairs(f_gp, q_gp, a1, a2, no_density, summary_gp, g); }; });

    auto* pa = app.add_subcommand("params", "optimal exponent plan");
    po_params.add(pa);
    pa->callback([&] { action = [&] { return cmd_params(po_params, g); }; });

    auto* bx = app.add_subcommand("boxes", "box set and its measure for one instance");
    po_boxes.add(bx);
    bx->callback([&] { action = [&] { return cmd_boxes(po_boxes, g); }; });

    auto* lb = app.add_subcommand("lower-bound", "certified lower-bound chain at a box point");
    po_lb.add(lb);
    point.add(lb);
    lb->callback([&] { action = [&] { return cmd_lower_bound(po_lb, point, g); }; });

    auto* gr = app.add_subcommand("growth", "certified ratio across the j progression");
    po_growth.add(gr);
    gr->add_option("--j-list", j_list, "comma list of j");
    gr->add_option("--s", s, "Sobolev exponent");
    gr->callback([&] { action = [&] { return cmd_growth(po_growth, j_list, s, g); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    progress_to_stderr() = !g.quiet;
    try {
        Json out = action();
        std::cout << out.dump(2) << "\n";
        return 0;
    } catch (const Refusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
