// Runs the full verification battery and prints one pass/fail line per
// criterion. Exit code 0 iff every criterion passed.
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "kpsh/suite.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 7;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--seed") == 0) seed = std::strtoull(argv[i + 1], nullptr, 10);

    const kpsh::SuiteResult res = kpsh::run_suite(seed);
    for (const kpsh::CriterionResult& c : res.criteria)
        std::printf("[%s] criterion %2d (%s): %s  [%.1fs]\n", c.passed ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), c.detail.c_str(), c.seconds);
    std::printf("%s: %zu/%zu criteria passed (seed %llu)\n",
                res.all_passed() ? "SUCCESS" : "FAILURE",
                static_cast<std::size_t>(
                    std::count_if(res.criteria.begin(), res.criteria.end(),
                                  [](const kpsh::CriterionResult& c) { return c.passed; })),
                res.criteria.size(), static_cast<unsigned long long>(seed));
    return res.all_passed() ? 0 : 1;
}
