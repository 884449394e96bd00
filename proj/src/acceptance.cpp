#include "ctl/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ctl/besq.hpp"
#include "ctl/cladogram.hpp"
#include "ctl/gw.hpp"
#include "ctl/levy.hpp"
#include "ctl/mailman.hpp"
#include "ctl/parallel.hpp"
#include "ctl/splitting.hpp"
#include "ctl/street.hpp"

namespace ctl {

bool CriterionResult::pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const TestReport& r) { return r.pass; });
}

std::string summary_line(const CriterionResult& r) {
    std::ostringstream os;
    os.precision(4);
    os << (r.pass() ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << ':';
    for (std::size_t i = 0; i < r.checks.size(); ++i) {
        const auto& c = r.checks[i];
        os << (i ? "; " : " ") << c.name << ' ';
        if (c.metadata.contains("lo"))
            os << c.metadata["value"].get<double>() << (c.pass ? " in [" : " outside [") << c.metadata["lo"].get<double>()
               << ", " << c.metadata["hi"].get<double>() << ']';
        else
            os << c.statistic << (c.pass ? "<=" : ">") << c.threshold;
    }
    return os.str();
}

nlohmann::json to_json(const CriterionResult& r) {
    nlohmann::json j;
    j["criterion"] = r.id;
    j["title"] = r.title;
    j["pass"] = r.pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
    return j;
}

namespace {

std::size_t scaled(double base, const AcceptanceConfig& cfg, std::size_t floor = 100) {
    return std::max(floor, static_cast<std::size_t>(std::llround(base * cfg.effort)));
}

const ScaleFunctionTable& wide_table() {
    static const ScaleFunctionTable w = scale_function(2.0e4 + 10.0, 0.005);
    return w;
}

const ScaleFunctionTable& fine_table() {
    static const ScaleFunctionTable w = scale_function(2.0, 1e-4);
    return w;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t i) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[i]);
    return out;
}

CriterionResult extinction_law(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{1, "GW extinction law", {}};
    const std::size_t n = scaled(1e5, cfg);
    auto s = replicate(n, key, [](std::size_t, Rng& rng) {
        return run_gw(1, std::numeric_limits<double>::infinity(), rng).extinction_time;
    });
    r.checks.push_back(ks_bound("extinction time ks", s, survival_cdf, 0.006));
    Summary m = summarize(s);
    r.checks.push_back(z_check("extinction time mean", m.mean, 1.0, m.se(), 3.0, n));
    return r;
}

CriterionResult laplace_consistency(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{2, "Laplace consistency", {}};
    double worst = 0.0;
    nlohmann::json per = nlohmann::json::object();
    for (double th : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        double d = std::abs(laplace_psi(th) - laplace_psi_continued_fraction(th, 200).value);
        worst = std::max(worst, d);
        per[std::to_string(th)] = d;
    }
    TestReport cf = bound_check("closed form vs continued fraction", worst, 1e-8);
    cf.metadata["per_theta"] = per;
    r.checks.push_back(cf);
    const std::size_t n = scaled(1e5, cfg);
    auto s = replicate(n, key, [](std::size_t, Rng& rng) {
        return std::exp(-2.0 * run_gw(1, std::numeric_limits<double>::infinity(), rng).extinction_time);
    });
    Summary m = summarize(s);
    r.checks.push_back(z_check("psi(2) monte carlo", m.mean, laplace_psi(2.0), m.se(), 3.0, n));
    return r;
}

CriterionResult conditional_growth(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{3, "conditional growth", {}};
    const std::size_t n = scaled(1e5, cfg);
    for (double t : {0.5, 1.0, 2.0}) {
        auto s = replicate(n, derive_key(key, static_cast<std::uint64_t>(t * 10)),
                           [t](std::size_t, Rng& rng) { return static_cast<double>(run_gw(1, t, rng).population); });
        std::vector<double> alive;
        for (double z : s)
            if (z > 0.0) alive.push_back(z);
        Summary m = summarize(alive);
        std::ostringstream name;
        name << "mean given survival t=" << t;
        r.checks.push_back(z_check(name.str(), m.mean, conditional_mean(t), m.se(), 3.0, alive.size()));
    }
    return r;
}

CriterionResult martingales(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{4, "martingales", {}};
    const std::size_t n = scaled(1e5, cfg);
    auto s = replicate(n, key, [](std::size_t, Rng& rng) {
        GWOutcome o = run_gw(1, 1.0, rng);
        return std::vector<double>{scale_martingale_value(o.population),
                                   laguerre_martingale_value(0.1, o.population, 1.0)};
    });
    Summary m0 = summarize(column(s, 0)), m1 = summarize(column(s, 1));
    r.checks.push_back(z_check("scale martingale", m0.mean, 1.0, m0.se(), 3.0, n));
    r.checks.push_back(z_check("laguerre martingale x=0.1", m1.mean, 1.0, m1.se(), 3.0, n));
    return r;
}

CriterionResult yaglom(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{5, "Yaglom limit", {}};
    YaglomBatch b = yaglom_samples(200.0, 1.0, scaled(1e4, cfg), key);
    TestReport k = ks_bound("rescaled survivors vs exponential", b.samples,
                            [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); }, 0.05);
    k.metadata["attempts"] = b.attempts;
    r.checks.push_back(k);
    return r;
}

CriterionResult scale_function_checks(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{6, "scale function", {}};
    const ScaleFunctionTable& w = wide_table();
    r.checks.push_back(flag_check("W(0) = 1", w(0.0) == 1.0, w(0.0)));
    TestReport asym = interval_check("W(1e4)/100", w(1e4) / 100.0, 1.17, 1.22);
    asym.metadata["asymptote_constant"] = scale_asymptote_constant();
    r.checks.push_back(asym);
    for (double th : {0.5, 1.0, 2.0}) {
        double lt = scale_laplace_transform(w, th);
        std::ostringstream name;
        name << "laplace transform theta=" << th;
        r.checks.push_back(bound_check(name.str(), std::abs(lt * laplace_exponent(th) - 1.0), 0.01));
    }
    const std::size_t n = scaled(2e5, cfg);
    auto below = replicate(n, key, [](std::size_t, Rng& rng) {
        return exit_interval_record(1.0, 0.0, 2.0, rng).above ? 0.0 : 1.0;
    });
    Summary m = summarize(below);
    r.checks.push_back(z_check("exit below frequency (1,1)", m.mean, w(1.0) / w(2.0), m.se(), 3.0, n));
    return r;
}

CriterionResult ladder_laws(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{7, "ladder laws", {}};
    const std::size_t n = scaled(1e5, cfg);
    const std::uint64_t budget = 1000000;
    auto recs = replicate(n, key, [budget](std::size_t, Rng& rng) { return first_passage_record(1.0, 1.0, rng, budget); });
    std::vector<double> over, under, tail;
    for (const auto& c : recs) {
        if (!c.complete) continue;
        over.push_back(c.overshoot);
        under.push_back(c.undershoot);
        tail.push_back(c.overshoot + c.undershoot > 4.0 ? 1.0 : 0.0);
    }
    auto g = [](double u) { return u <= 0.0 ? 0.0 : 1.0 - ladder_height_sf(u); };
    const double truncated = static_cast<double>(n - over.size()) / static_cast<double>(n);
    TestReport a = ks_bound("overshoot ks", over, g, 0.006);
    a.metadata["truncated_fraction"] = truncated;
    a.metadata["jump_budget"] = budget;
    r.checks.push_back(a);
    TestReport b = ks_bound("undershoot ks", under, g, 0.006);
    b.metadata["truncated_fraction"] = truncated;
    r.checks.push_back(b);
    Summary m = summarize(tail);
    r.checks.push_back(z_check("P(I+J>4)", m.mean, initial_jump_sf(4.0), m.se(), 3.0, tail.size()));
    return r;
}

CriterionResult conditional_undershoot(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{8, "conditional undershoot", {}};
    const ScaleFunctionTable& w = fine_table();
    const double a = 1.0;
    UndershootLaw law(a, w);
    const std::size_t n = scaled(2e4, cfg);
    auto recs = replicate(n * 2, key, [a](std::size_t, Rng& rng) { return exit_interval_record(a, 0.0, a, rng); });
    std::vector<double> u;
    for (const auto& e : recs)
        if (e.above) u.push_back(e.undershoot);
    r.checks.push_back(ks_bound("undershoot vs r_a", u, [&](double v) { return law.cdf(v); }, 0.02));
    const int cells = 200000;
    const double h = a / cells;
    double total = 0.0;
    for (int i = 0; i < cells; ++i) total += h * conditional_undershoot_density_r(a, h * (i + 0.5), w);
    r.checks.push_back(bound_check("integral of r_a minus one", std::abs(total - 1.0), 1e-6));
    return r;
}

CriterionResult scaled_limits(const AcceptanceConfig&, std::uint64_t) {
    CriterionResult r{9, "scaled limits", {}};
    const ScaleFunctionTable& w = wide_table();
    const double n = 1e4;
    auto rel = [](double x, double y) { return std::abs(x / y - 1.0); };
    double eg = 0.0, eh = 0.0, es = 0.0, cg = 0.0, ch = 0.0, cs = 0.0;
    for (double v : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        double f = finite_n_g(1.0, v, n, w);
        eg = std::max(eg, rel(f, limit_rate_gstar(1.0, v)));
        cg = std::max(cg, rel(f, corrected_limit_g(1.0, v)));
    }
    for (double v : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        double f = finite_n_h(1.0, v, n, w);
        eh = std::max(eh, rel(f, limit_density_h(1.0, v)));
        ch = std::max(ch, rel(f, corrected_limit_h(1.0, v)));
        double fs = finite_n_hstar(1.0, 2.0, v, n, w);
        es = std::max(es, rel(fs, limit_density_hstar(1.0, 2.0, v)));
        cs = std::max(cs, rel(fs, corrected_limit_hstar(1.0, 2.0, v)));
    }
    TestReport g = bound_check("g* grid max relative error", eg, 0.02);
    g.metadata["against_corrected_limit"] = cg;
    TestReport hh = bound_check("h grid max relative error", eh, 0.02);
    hh.metadata["against_corrected_limit"] = ch;
    TestReport hs = bound_check("h* grid max relative error", es, 0.02);
    hs.metadata["against_corrected_limit"] = cs;
    r.checks.push_back(g);
    r.checks.push_back(hh);
    r.checks.push_back(hs);
    r.checks.push_back(bound_check("g*_1(1) spot", std::abs(limit_rate_gstar(1.0, 1.0) - 1.0), 1e-12));
    r.checks.push_back(bound_check("h_1(1) spot",
                                   std::abs(limit_density_h(1.0, 1.0) - 3.0 / (4.0 * std::numbers::pi)), 1e-12));
    return r;
}

CriterionResult age_ppp(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{10, "age process Poisson field", {}};
    const std::size_t n = scaled(1000, cfg);
    auto s = replicate(n, key, [](std::size_t, Rng& rng) {
        AgeProcess p = forest_age_process(1.0, 1000.0, 90, rng, 10000000);
        return std::vector<double>{static_cast<double>(p.count_in_box(0.0, 1.0, 1.0)),
                                   static_cast<double>(p.count_in_box(1.0, 2.0, 1.0)), p.truncated ? 1.0 : 0.0};
    });
    auto c1 = column(s, 0), c2 = column(s, 1), tr = column(s, 2);
    Summary m = summarize(c1);
    TestReport mean = z_check("box count mean", m.mean, 1.0, m.se(), 3.0, n);
    mean.metadata["truncated_runs"] = summarize(tr).mean * static_cast<double>(n);
    r.checks.push_back(mean);
    r.checks.push_back(poisson_dispersion("box count dispersion", c1, cfg.alpha));
    r.checks.push_back(bound_check("disjoint box correlation", std::abs(correlation(c1, c2)),
                                   3.0 / std::sqrt(static_cast<double>(n)), n));
    return r;
}

CriterionResult restriction(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{11, "restriction consistency", {}};
    const std::size_t n = scaled(1000, cfg);
    auto s = replicate(n, key, [](std::size_t, Rng& rng) {
        ForestPath f = forest_path(8, rng, 1u << 20);
        AgeProcess lo = age_process_at_level(f.path, 1.0, 100.0);
        AgeProcess hi = age_process_at_level(f.path, 2.0, 100.0);
        RestrictionReport rep = check_restriction_consistency(lo, hi);
        return std::vector<double>{static_cast<double>(rep.violations), static_cast<double>(rep.checked)};
    });
    double viol = 0.0, checked = 0.0;
    for (const auto& v : s) {
        viol += v[0];
        checked += v[1];
    }
    TestReport t = bound_check("violations", viol, 0.0, n);
    t.metadata["atoms_checked"] = checked;
    r.checks.push_back(t);
    return r;
}

CriterionResult entrance_law(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{12, "streets and entrance law", {}};
    const std::size_t n = scaled(1e4, cfg);
    for (double a : {1.0, 2.0 * std::numbers::pi}) {
        auto len = replicate(n, derive_key(key, static_cast<std::uint64_t>(a * 1000)),
                             [a](std::size_t, Rng& rng) { return entrance_sample(a, rng).length; });
        Summary m = summarize(len);
        std::ostringstream name;
        name.precision(4);
        name << "street length mean a=" << a;
        r.checks.push_back(z_check(name.str(), m.mean, entrance_length_mean(a), m.se(), 3.0, n));
    }
    const double big = 1e4;
    const double sf = initial_jump_sf(big);
    r.checks.push_back(bound_check("initial jump tail sqrt(n) P(V>n)",
                                   std::abs(std::sqrt(big) * sf / (1.5 / std::numbers::sqrt2) - 1.0), 0.02));
    r.checks.push_back(bound_check("n P(V>n)^2 vs 9/8", std::abs(big * sf * sf / 1.125 - 1.0), 0.02));
    const std::size_t draws = scaled(8e6, cfg);
    const std::size_t chunk = 100000;
    const std::size_t chunks = (draws + chunk - 1) / chunk;
    auto hits = replicate(chunks, derive_key(key, "tail"), [&](std::size_t c, Rng& rng) {
        std::size_t m = std::min(chunk, draws - c * chunk), k = 0;
        for (std::size_t i = 0; i < m; ++i) k += initial_jump_sample(rng) > big;
        return static_cast<double>(k);
    });
    double p = 0.0;
    for (double h : hits) p += h;
    p /= static_cast<double>(draws);
    TestReport mc = bound_check("monte carlo n P(V>n)^2 vs 9/8", std::abs(big * p * p / 1.125 - 1.0), 0.02, draws);
    mc.metadata["estimate"] = big * p * p;
    r.checks.push_back(mc);
    return r;
}

CriterionResult kernel_coherence(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{13, "kernel coherence", {}};
    const std::size_t n = scaled(1e4, cfg);
    auto moved = replicate(n, derive_key(key, "moved"), [](std::size_t, Rng& rng) {
        Street s = entrance_sample(1.0, rng);
        return transition_sample(s, 2.0, 1000.0, rng).street.length;
    });
    auto direct = replicate(n, derive_key(key, "direct"),
                            [](std::size_t, Rng& rng) { return entrance_sample(2.0, rng).length; });
    TestReport t = two_sample_ks("street length after transition vs entrance", moved, direct);
    t.threshold = 0.05;
    t.pass = t.statistic <= t.threshold;
    t.metadata["mean_moved"] = summarize(moved).mean;
    t.metadata["mean_direct"] = summarize(direct).mean;
    r.checks.push_back(t);
    return r;
}

// Birth-death chain with up rate 2m - 1 and down rate 2m, run to extinction.
double shifted_extinction(int m, double horizon, Rng& rng) {
    double t = 0.0;
    while (m > 0) {
        const double up = 2.0 * m - 1.0, down = 2.0 * m;
        t += rng.exponential(up + down);
        if (t > horizon) return horizon;
        m += rng.uniform() * (up + down) < up ? 1 : -1;
    }
    return t;
}

CriterionResult cladogram(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{14, "cladogram chain", {}};
    const auto shapes = enumerate_rooted_shapes(4);
    const auto exact = exact_transition_matrix(4);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < shapes.size(); ++i) index[shapes[i].canonical()] = i;
    const std::size_t per = scaled(4000, cfg);
    auto rows = replicate(shapes.size(), derive_key(key, "matrix"), [&](std::size_t i, Rng& rng) {
        std::vector<double> counts(shapes.size(), 0.0);
        for (std::size_t k = 0; k < per; ++k) {
            RootedBinaryTree t = shapes[i];
            discrete_step(t, rng);
            counts[index.at(t.canonical())] += 1.0;
        }
        return counts;
    });
    double worst = 0.0;
    std::size_t impossible = 0;
    for (std::size_t i = 0; i < shapes.size(); ++i)
        for (std::size_t j = 0; j < shapes.size(); ++j) {
            const double p = exact[i][j], f = rows[i][j] / static_cast<double>(per);
            if (p == 0.0) {
                impossible += rows[i][j] > 0.0;
                continue;
            }
            worst = std::max(worst, std::abs(f - p) / std::sqrt(p * (1.0 - p) / static_cast<double>(per)));
        }
    TestReport tm = bound_check("transition frequencies max z", worst, 4.0, per * shapes.size());
    tm.metadata["impossible_moves_seen"] = impossible;
    if (impossible) tm.pass = false;
    r.checks.push_back(tm);

    const std::size_t samples = scaled(1e5, cfg), thin = 20;
    Rng chain(derive_key(key, "stationary"));
    RootedBinaryTree t = shapes[0];
    for (int k = 0; k < 1000; ++k) discrete_step(t, chain);
    std::vector<double> census(shapes.size(), 0.0);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t k = 0; k < thin; ++k) discrete_step(t, chain);
        census[index.at(t.canonical())] += 1.0;
    }
    std::vector<double> uniform(shapes.size(), 1.0);
    r.checks.push_back(chi_square_gof("stationary census", census, uniform, 0.001));

    Rng pick(derive_key(key, "start tree"));
    const RootedBinaryTree start = RootedBinaryTree::random(6, pick);
    const int u = start.children(start.root())[0];
    const auto kids = start.children(u);
    const int m0 = static_cast<int>(start.leaves_below(kids[0]).size());
    const int m1 = static_cast<int>(start.leaves_below(kids[1]).size());
    const double horizon = 1e4;
    const std::size_t reps = scaled(2e4, cfg);
    auto from_chain = replicate(reps, derive_key(key, "parts"), [&](std::size_t, Rng& rng) {
        auto parts = track_parts(start, u, horizon, rng);
        for (const auto& p : parts)
            if (p.extinct_at) return *p.extinct_at;
        return horizon;
    });
    auto direct = replicate(reps, derive_key(key, "direct gw"), [&](std::size_t, Rng& rng) {
        double a = run_gw(m0, horizon, rng).extinction_time, b = run_gw(m1, horizon, rng).extinction_time;
        return std::min({a, b, horizon});
    });
    auto shifted = replicate(reps, derive_key(key, "shifted"), [&](std::size_t, Rng& rng) {
        return std::min(shifted_extinction(m0, horizon, rng), shifted_extinction(m1, horizon, rng));
    });
    TestReport ext = two_sample_ks("first part extinction vs GW", from_chain, direct, cfg.alpha);
    ext.metadata["part_sizes"] = {m0, m1};
    ext.metadata["ks_vs_shifted_rates"] = ks_two_sample_distance(from_chain, shifted);
    r.checks.push_back(ext);
    return r;
}

CriterionResult mailman_trees(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{15, "mailmen and k-trees", {}};
    const std::size_t reps = scaled(200, cfg, 20);
    auto s = replicate(reps, key, [](std::size_t i, Rng& rng) {
        MailmanFamily f = sample_family(1.0, 64, 32, rng);
        std::vector<Mailman> first8(f.members.begin(), f.members.begin() + 8);
        ProperKTree t64 = ktree_from_mailmen(f.members);
        ProperKTree t8 = ktree_from_mailmen(first8);
        double four = i < 50 ? static_cast<double>(t64.four_point_violations()) : 0.0;
        double nested = static_cast<double>(nested_consistency_mismatches(f.members, 8) +
                                            nested_consistency_mismatches(f.members, 32));
        double recipe = 0.0;
        for (int a = 1; a <= 64; a += 7)
            for (int b = a + 1; b <= 64; b += 5)
                recipe = std::max(recipe, std::abs(t64.distance(a, b) -
                                                   recipe_distance(f.members[static_cast<std::size_t>(a - 1)],
                                                                   f.members[static_cast<std::size_t>(b - 1)])));
        return std::vector<double>{four, nested, recipe, leaf_tightness_stat(t8), leaf_tightness_stat(t64)};
    });
    double four = 0.0, nested = 0.0, recipe = 0.0;
    for (const auto& v : s) {
        four += v[0];
        nested += v[1];
        recipe = std::max(recipe, v[2]);
    }
    r.checks.push_back(bound_check("four-point violations", four, 0.0, std::min<std::size_t>(reps, 50)));
    r.checks.push_back(bound_check("nested consistency mismatches", nested, 0.0, reps));
    r.checks.push_back(bound_check("tree vs recipe distance", recipe, 0.0, reps));
    auto median = [](std::vector<double> x) {
        std::sort(x.begin(), x.end());
        return x[x.size() / 2];
    };
    const double m8 = median(column(s, 3)), m64 = median(column(s, 4));
    TestReport tight = flag_check("tightness median decreases k=8 to k=64", m64 < m8, m64);
    tight.metadata["median_k8"] = m8;
    tight.metadata["median_k64"] = m64;
    r.checks.push_back(tight);
    return r;
}

CriterionResult besq(const AcceptanceConfig& cfg, std::uint64_t key) {
    CriterionResult r{16, "squared Bessel links", {}};
    const std::size_t n = scaled(3000, cfg);
    auto ladder = replicate(n, derive_key(key, "ladder"), [](std::size_t, Rng& rng) {
        return besq_absorption_ladder(-1.0, 1.0, 1e-4, 3, 200.0, rng);
    });
    std::vector<double> finest = column(ladder, 2);
    r.checks.push_back(ks_bound("absorption time vs exact law", finest,
                                [](double t) { return hitting_time_cdf(1.0, 1.0, t); }, 0.03));
    double coarse = 0.0, fine = 0.0;
    for (const auto& t : ladder) {
        coarse += std::min(std::abs(t[0] - t[1]), 1.0);
        fine += std::min(std::abs(t[1] - t[2]), 1.0);
    }
    TestReport gap = interval_check("gap ratio dt=2e-4 to 1e-4", fine > 0.0 ? coarse / fine : 0.0, 1.5, 2.5);
    gap.metadata["gap_2e-4"] = coarse / static_cast<double>(n);
    gap.metadata["gap_1e-4"] = fine / static_cast<double>(n);
    r.checks.push_back(gap);

    const std::size_t triples = scaled(100, cfg, 10);
    auto err = replicate(triples, derive_key(key, "simplex"), [](std::size_t, Rng& rng) {
        DiffusionPath a = simulate_besq(-1.0, 1.0, 1e-3, 2.0, rng);
        DiffusionPath b = simulate_besq(-1.0, 0.5, 1e-3, 2.0, rng);
        DiffusionPath c = simulate_besq(-1.0, 2.0, 1e-3, 2.0, rng);
        SimplexPath s = nwf_time_change(a, b, c);
        bool increasing = std::is_sorted(s.clock.begin(), s.clock.end());
        return increasing ? s.max_sum_error() : 1.0;
    });
    r.checks.push_back(bound_check("simplex sum error", *std::max_element(err.begin(), err.end()), 1e-12, triples));

    ConvergenceReport conv = gw_besq_convergence_check(500.0, 1.0, {0.2}, scaled(1000, cfg), derive_key(key, "gw"));
    TestReport cz = bound_check("GW vs BESQ moments worst z", conv.worst_z(), 3.0, conv.replicas);
    cz.metadata["gw_mean"] = conv.rows[0].gw_mean;
    cz.metadata["besq_mean"] = conv.rows[0].besq_mean;
    cz.metadata["exact_mean"] = conv.rows[0].exact_mean;
    r.checks.push_back(cz);
    return r;
}

CriterionResult determinism(const AcceptanceConfig& cfg, std::uint64_t) {
    CriterionResult r{17, "determinism", {}};
    AcceptanceConfig small = cfg;
    small.effort = 0.02 * cfg.effort;
    auto dump = [&](int threads) {
        std::string out;
        const int saved = omp_get_max_threads();
        omp_set_num_threads(threads);
        for (int id : {1, 3, 4, 8, 11, 14, 15}) out += to_json(run_criterion(id, small)).dump() + '\n';
        omp_set_num_threads(saved);
        return out;
    };
    const std::string a = dump(1), b = dump(3);
    TestReport t = flag_check("reduced suite identical across runs and thread counts", a == b,
                              static_cast<double>(a.size()));
    r.checks.push_back(t);
    return r;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceConfig& cfg) {
    const std::uint64_t key = derive_key(derive_key(cfg.seed, "criterion"), static_cast<std::uint64_t>(id));
    switch (id) {
        case 1: return extinction_law(cfg, key);
        case 2: return laplace_consistency(cfg, key);
        case 3: return conditional_growth(cfg, key);
        case 4: return martingales(cfg, key);
        case 5: return yaglom(cfg, key);
        case 6: return scale_function_checks(cfg, key);
        case 7: return ladder_laws(cfg, key);
        case 8: return conditional_undershoot(cfg, key);
        case 9: return scaled_limits(cfg, key);
        case 10: return age_ppp(cfg, key);
        case 11: return restriction(cfg, key);
        case 12: return entrance_law(cfg, key);
        case 13: return kernel_coherence(cfg, key);
        case 14: return cladogram(cfg, key);
        case 15: return mailman_trees(cfg, key);
        case 16: return besq(cfg, key);
        case 17: return determinism(cfg, key);
        default: throw std::invalid_argument("run_criterion: no criterion " + std::to_string(id));
    }
}

}  // namespace ctl
