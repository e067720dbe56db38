// Acceptance suite: runs every shipped claim at its pinned tolerance and
// prints one pass/fail line per check.  Exits nonzero if any check fails.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "post/acceptance.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = post::acceptance::kDefaultSeed;
    unsigned threads = 4;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            threads = static_cast<unsigned>(std::strtoul(argv[++i], nullptr, 10));
        } else {
            std::fprintf(stderr, "usage: %s [--seed u64] [--threads n]\n", argv[0]);
            return 1;
        }
    }

    int failures = 0;
    for (const auto& spec : post::acceptance::checks()) {
        const post::acceptance::CheckResult r =
            post::acceptance::run_check(spec, seed, threads);
        std::printf("[%s] %-24s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.walltime_s, r.details.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of %zu checks failed\n", failures, post::acceptance::checks().size());
        return 1;
    }
    std::printf("all %zu checks passed\n", post::acceptance::checks().size());
    return 0;
}
