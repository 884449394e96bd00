// ctl: experiments over branching trees, their contour processes and limits.
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctl/acceptance.hpp"
#include "ctl/besq.hpp"
#include "ctl/cladogram.hpp"
#include "ctl/gw.hpp"
#include "ctl/levy.hpp"
#include "ctl/mailman.hpp"
#include "ctl/parallel.hpp"
#include "ctl/splitting.hpp"
#include "ctl/street.hpp"

using namespace ctl;

namespace {

struct Common {
    std::uint64_t seed = 1;
    std::size_t replicas = 0;  // 0: subcommand default
    double scale_n = 0.0;      // 0: subcommand default
    std::string out;
    double alpha = 0.01;
    std::string format = "json";
};

std::size_t pick(std::size_t v, std::size_t fallback) { return v ? v : fallback; }
double pick(double v, double fallback) { return v > 0.0 ? v : fallback; }

std::uint64_t experiment_key(const Common& c, const char* name) { return derive_key(c.seed, name); }

class Sink {
public:
    explicit Sink(const Common& c) : format_(c.format) {
        if (!c.out.empty()) {
            file_ = std::make_unique<std::ofstream>(c.out);
            if (!*file_) throw std::runtime_error("cannot write " + c.out);
        }
        if (format_ == "csv") os() << csv_header() << '\n';
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }
    void report(const TestReport& r) {
        os() << (format_ == "csv" ? to_csv_line(r) : to_json_line(r)) << '\n';
        ok_ = ok_ && r.pass;
    }
    int exit_code() const { return ok_ ? 0 : 1; }

private:
    std::string format_;
    std::unique_ptr<std::ofstream> file_;
    bool ok_ = true;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

int gw_verify(const Common& c, std::size_t n) {
    Sink sink(c);
    auto s = replicate(n, experiment_key(c, "gw-verify"), [](std::size_t, Rng& rng) {
        return run_gw(1, std::numeric_limits<double>::infinity(), rng).extinction_time;
    });
    sink.report(ks_statistic("extinction time vs L", s, survival_cdf, c.alpha));
    Summary m = summarize(s);
    sink.report(z_check("extinction time mean", m.mean, 1.0, m.se(), 3.0, n));
    return sink.exit_code();
}

int levy_scale(const Common& c, double x_max, double step, const std::string& table) {
    Sink sink(c);
    ScaleFunctionTable w = scale_function(x_max, step);
    if (!table.empty()) {
        std::ostringstream os;
        os.precision(17);
        os << "x,W\n";
        auto v = w.values();
        for (std::size_t i = 0; i < v.size(); ++i) os << step * static_cast<double>(i) << ',' << v[i] << '\n';
        write_text(table, os.str());
    }
    sink.report(flag_check("W(0) = 1", w(0.0) == 1.0, w(0.0)));
    TestReport a = bound_check("W(x)/sqrt(x) vs asymptote", std::abs(w(x_max) / std::sqrt(x_max) /
                                                                      scale_asymptote_constant() - 1.0), 0.02);
    a.metadata["ratio"] = w(x_max) / std::sqrt(x_max);
    sink.report(a);
    for (double th : {0.5, 1.0, 2.0}) {
        std::ostringstream name;
        name << "laplace transform theta=" << th;
        sink.report(bound_check(name.str(), std::abs(scale_laplace_transform(w, th) * laplace_exponent(th) - 1.0), 0.01));
    }
    return sink.exit_code();
}

int levy_ladder(const Common& c, std::size_t n, std::uint64_t budget) {
    Sink sink(c);
    auto recs = replicate(n, experiment_key(c, "levy-ladder"),
                          [budget](std::size_t, Rng& rng) { return first_passage_record(1.0, 1.0, rng, budget); });
    std::vector<double> over, under;
    for (const auto& r : recs)
        if (r.complete) {
            over.push_back(r.overshoot);
            under.push_back(r.undershoot);
        }
    auto g = [](double u) { return u <= 0.0 ? 0.0 : 1.0 - ladder_height_sf(u); };
    TestReport a = ks_statistic("overshoot vs G", over, g, c.alpha);
    a.metadata["truncated"] = n - over.size();
    sink.report(a);
    sink.report(ks_statistic("undershoot vs G", under, g, c.alpha));
    return sink.exit_code();
}

int age_ppp(const Common& c, std::size_t reps, double n, double a, const std::string& atoms) {
    Sink sink(c);
    auto procs = replicate(reps, experiment_key(c, "age-ppp"), [&](std::size_t, Rng& rng) {
        return forest_age_process(a, n, 90, rng, 10000000);
    });
    if (!atoms.empty()) write_text(atoms, procs.front().to_csv());
    std::vector<double> c1, c2;
    for (const auto& p : procs) {
        c1.push_back(static_cast<double>(p.count_in_box(0.0, 1.0, 1.0)));
        c2.push_back(static_cast<double>(p.count_in_box(1.0, 2.0, 1.0)));
    }
    Summary m = summarize(c1);
    sink.report(z_check("box count mean", m.mean, 1.0, m.se(), 3.0, reps));
    sink.report(poisson_dispersion("box count dispersion", c1, c.alpha));
    sink.report(bound_check("disjoint box correlation", std::abs(correlation(c1, c2)),
                            3.0 / std::sqrt(static_cast<double>(reps)), reps));
    return sink.exit_code();
}

int chain_stationarity(const Common& c, int leaves, std::size_t samples, std::size_t thin) {
    Sink sink(c);
    const auto shapes = enumerate_rooted_shapes(leaves);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < shapes.size(); ++i) index[shapes[i].canonical()] = i;
    Rng rng(experiment_key(c, "chain-stationarity"));
    RootedBinaryTree t = shapes.front();
    std::vector<double> census(shapes.size(), 0.0);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t k = 0; k < thin; ++k) discrete_step(t, rng);
        census[index.at(t.canonical())] += 1.0;
    }
    std::vector<double> uniform(shapes.size(), 1.0);
    sink.report(chi_square_gof("shape census vs uniform", census, uniform, c.alpha));
    return sink.exit_code();
}

int chain_poissonized(const Common& c, double n, std::size_t reps, const std::string& events) {
    Sink sink(c);
    const std::vector<double> times{0.1, 0.5};
    if (!events.empty()) {
        Rng rng(derive_key(experiment_key(c, "chain-poissonized"), "events"));
        RootedBinaryTree t = RootedBinaryTree::random(static_cast<int>(n), rng);
        PoissonizedRun run = poissonized_run(t, n * times.back(), rng);
        std::ostringstream os;
        for (const auto& e : run.events) os << to_json_line(e) << '\n';
        write_text(events, os.str());
    }
    auto s = replicate(reps, experiment_key(c, "chain-poissonized"), [&](std::size_t, Rng& rng) {
        RootedBinaryTree t = RootedBinaryTree::random(static_cast<int>(n), rng);
        std::vector<double> out;
        double prev = 0.0;
        for (double tt : times) {
            poissonized_run(t, n * (tt - prev), rng, nullptr, false);
            prev = tt;
            out.push_back(t.n_leaves() / n);
        }
        return out;
    });
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> col;
        for (const auto& r : s) col.push_back(r[i]);
        Summary m = summarize(col);
        std::ostringstream name;
        name << "rescaled leaf count mean t=" << times[i];
        sink.report(z_check(name.str(), m.mean, besq_minus_one_moments(1.0, times[i]).mean, m.se(), 3.0, reps));
    }
    return sink.exit_code();
}

int street_evolve(const Common& c, double a0, double a1, double n, std::size_t reps, const std::string& streets) {
    Sink sink(c);
    auto moved = replicate(reps, derive_key(experiment_key(c, "street-evolve"), "moved"), [&](std::size_t, Rng& rng) {
        return transition_sample(entrance_sample(a0, rng), a1, n, rng).street;
    });
    auto direct = replicate(reps, derive_key(experiment_key(c, "street-evolve"), "direct"),
                            [&](std::size_t, Rng& rng) { return entrance_sample(a1, rng).length; });
    if (!streets.empty()) {
        std::ostringstream os;
        for (const auto& s : moved) os << to_json(s).dump() << '\n';
        write_text(streets, os.str());
    }
    std::vector<double> len;
    for (const auto& s : moved) len.push_back(s.length);
    sink.report(two_sample_ks("street length after transition vs entrance", len, direct, c.alpha));
    return sink.exit_code();
}

int entrance_law(const Common& c, double a, std::size_t reps) {
    Sink sink(c);
    auto len = replicate(reps, experiment_key(c, "entrance-law"),
                         [a](std::size_t, Rng& rng) { return entrance_sample(a, rng).length; });
    Summary m = summarize(len);
    const double mean = entrance_length_mean(a);
    sink.report(z_check("street length mean", m.mean, mean, m.se(), 3.0, reps));
    sink.report(ks_statistic("street length vs exponential", len,
                             [mean](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x / mean); }, c.alpha));
    return sink.exit_code();
}

int mailman_ktree(const Common& c, double a, std::size_t k, std::size_t depth, const std::string& newick) {
    Sink sink(c);
    Rng rng(experiment_key(c, "mailman-ktree"));
    MailmanFamily f = sample_family(a, k, depth, rng);
    ProperKTree t = ktree_from_mailmen(f.members);
    if (!newick.empty()) write_text(newick, t.to_newick() + "\n");
    sink.report(bound_check("four-point violations", static_cast<double>(t.four_point_violations()), 0.0, k));
    sink.report(bound_check("nested consistency mismatches",
                            static_cast<double>(nested_consistency_mismatches(f.members, k / 2)), 0.0, k));
    TestReport tight = flag_check("leaf tightness", true, leaf_tightness_stat(t));
    tight.metadata["zero_edges"] = t.zero_edges();
    sink.report(tight);
    return sink.exit_code();
}

int besq_t0(const Common& c, double x, double dt, std::size_t reps) {
    Sink sink(c);
    auto t = replicate(reps, experiment_key(c, "besq-t0"), [&](std::size_t, Rng& rng) {
        return besq_absorption_ladder(-1.0, x, dt, 1, 1e3, rng)[0];
    });
    sink.report(ks_statistic("absorption time vs exact law", t,
                             [x](double s) { return hitting_time_cdf(x, 1.0, s); }, c.alpha));
    return sink.exit_code();
}

int all_acceptance(const Common& c, double effort) {
    Sink sink(c);
    AcceptanceConfig cfg;
    cfg.seed = c.seed;
    cfg.effort = effort;
    cfg.alpha = c.alpha;
    bool ok = true;
    for (int id = 1; id <= criterion_count; ++id) {
        CriterionResult r = run_criterion(id, cfg);
        if (c.format == "csv") {
            for (auto rep : r.checks) {
                rep.name = std::to_string(id) + ": " + rep.name;
                sink.report(rep);
            }
        } else {
            sink.os() << to_json(r).dump() << '\n';
        }
        std::cerr << summary_line(r) << '\n';
        ok = ok && r.pass();
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branching trees, Levy contours and their scaling limits"};
    app.set_config("--config", "", "flat key=value file; flags override it");
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--seed", c.seed, "root seed")->capture_default_str();
    app.add_option("--replicas", c.replicas, "replica count (0: subcommand default)");
    app.add_option("--scale-n", c.scale_n, "scale n (0: subcommand default)");
    app.add_option("--out", c.out, "report path (default stdout)");
    app.add_option("--alpha", c.alpha, "test level")->capture_default_str();
    app.add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    int code = 0;
    auto* gw = app.add_subcommand("gw-verify", "extinction law of GW(-1)");
    std::size_t gw_n = 100000;
    gw->add_option("--n", gw_n, "samples")->capture_default_str();
    gw->callback([&] { code = gw_verify(c, pick(c.replicas, gw_n)); });

    auto* scale = app.add_subcommand("levy-scale", "scale function table and checks");
    double x_max = 10000.0, step = 0.005;
    std::string table;
    scale->add_option("--xmax", x_max)->capture_default_str();
    scale->add_option("--step", step)->capture_default_str();
    scale->add_option("--table", table, "CSV path for the table");
    scale->callback([&] { code = levy_scale(c, x_max, step, table); });

    auto* ladder = app.add_subcommand("levy-ladder", "first-crossing overshoot and undershoot");
    std::uint64_t budget = 1000000;
    ladder->add_option("--budget", budget, "jump budget per path")->capture_default_str();
    ladder->callback([&] { code = levy_ladder(c, pick(c.replicas, std::size_t{100000}), budget); });

    auto* ppp = app.add_subcommand("age-ppp", "age process at a level of the forest");
    double level = 1.0;
    std::string atoms;
    ppp->add_option("--level", level)->capture_default_str();
    ppp->add_option("--atoms", atoms, "CSV path for the first replica's atoms");
    ppp->callback([&] { code = age_ppp(c, pick(c.replicas, std::size_t{1000}), pick(c.scale_n, 1000.0), level, atoms); });

    auto* stat = app.add_subcommand("chain-stationarity", "shape census of the discrete chain");
    int leaves = 4;
    std::size_t thin = 20;
    stat->add_option("--leaves", leaves)->check(CLI::Range(2, 7))->capture_default_str();
    stat->add_option("--thin", thin)->capture_default_str();
    stat->callback([&] { code = chain_stationarity(c, leaves, pick(c.replicas, std::size_t{100000}), thin); });

    auto* pois = app.add_subcommand("chain-poissonized", "rescaled leaf count of the continuous-time chain");
    std::string events;
    pois->add_option("--events", events, "JSON-lines path for one run's events");
    pois->callback([&] { code = chain_poissonized(c, pick(c.scale_n, 200.0), pick(c.replicas, std::size_t{2000}), events); });

    auto* evolve = app.add_subcommand("street-evolve", "street transition against the entrance law");
    double a0 = 1.0, a1 = 2.0;
    std::string streets;
    evolve->add_option("--a0", a0)->capture_default_str();
    evolve->add_option("--a1", a1)->capture_default_str();
    evolve->add_option("--streets", streets, "JSON-lines path for moved streets");
    evolve->callback([&] {
        code = street_evolve(c, a0, a1, pick(c.scale_n, 1000.0), pick(c.replicas, std::size_t{10000}), streets);
    });

    auto* ent = app.add_subcommand("entrance-law", "street length under the entrance law");
    double ent_a = 1.0;
    ent->add_option("--a", ent_a)->capture_default_str();
    ent->callback([&] { code = entrance_law(c, ent_a, pick(c.replicas, std::size_t{10000})); });

    auto* mm = app.add_subcommand("mailman-ktree", "k-tree from a mailman family");
    double mm_a = 1.0;
    std::size_t k = 64, depth = 32;
    std::string newick;
    mm->add_option("--a", mm_a)->capture_default_str();
    mm->add_option("--k", k)->check(CLI::Range(2, 4096))->capture_default_str();
    mm->add_option("--depth", depth)->capture_default_str();
    mm->add_option("--newick", newick, "path for the tree in Newick form");
    mm->callback([&] { code = mailman_ktree(c, mm_a, k, depth, newick); });

    auto* t0 = app.add_subcommand("besq-t0", "absorption time of the dimension -1 process");
    double x = 1.0, dt = 1e-4;
    t0->add_option("--x", x)->capture_default_str();
    t0->add_option("--dt", dt)->capture_default_str();
    t0->callback([&] { code = besq_t0(c, x, dt, pick(c.replicas, std::size_t{3000})); });

    auto* acc = app.add_subcommand("all-acceptance", "every acceptance criterion");
    double effort = 1.0;
    acc->add_option("--effort", effort, "sample-count multiplier")->capture_default_str();
    acc->callback([&] { code = all_acceptance(c, effort); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return code;
}
