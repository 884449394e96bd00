// One line per criterion; exit code 0 only if all pass.
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "ctl/acceptance.hpp"

int main(int argc, char** argv) {
    ctl::AcceptanceConfig cfg;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--seed" && i + 1 < argc) cfg.seed = std::strtoull(argv[++i], nullptr, 10);
        else if (a == "--effort" && i + 1 < argc) cfg.effort = std::atof(argv[++i]);
        else if (a == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
        else {
            std::cerr << "usage: ctl_acceptance [--seed s] [--effort f] [--only k]\n";
            return 2;
        }
    }
    bool all = true;
    for (int id = 1; id <= ctl::criterion_count; ++id) {
        if (only && id != only) continue;
        auto t0 = std::chrono::steady_clock::now();
        ctl::CriterionResult r = ctl::run_criterion(id, cfg);
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << ctl::summary_line(r) << std::endl;
        std::cerr << "  criterion " << id << " took " << s << " s\n";
        all = all && r.pass();
    }
    return all ? 0 : 1;
}
