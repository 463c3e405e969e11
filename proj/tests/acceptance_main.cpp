// Acceptance battery driver: runs one named criterion (or all) at the pinned
// sizes, seeds and tolerances, printing one pass/fail line per criterion.
//
//   acceptance [criterion-name | all] [--list]

#include "rmtlab/acceptance.hpp"

#include <cstdio>
#include <cstring>

int main(int argc, char** argv) {
    using namespace rmtlab::acceptance;
    if (argc > 1 && std::strcmp(argv[1], "--list") == 0) {
        for (auto& name : criterion_names()) std::printf("%s\n", name.c_str());
        return 0;
    }
    std::string which = argc > 1 ? argv[1] : "all";
    bool all_pass = true;
    if (which == "all") {
        for (auto& res : run_all()) all_pass = all_pass && res.pass;
    } else {
        auto res = run_criterion(which);
        std::printf("[%s] %-30s (%.1f s) %s\n", res.pass ? "PASS" : "FAIL",
                    res.name.c_str(), res.seconds, res.details.c_str());
        all_pass = res.pass;
    }
    return all_pass ? 0 : 1;
}
