#include <iostream>

#include "rcgossip/acceptance.hpp"

int main()
{
    const auto results = rcgossip::run_acceptance();
    std::cout << rcgossip::format_results(results);
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << (failed == 0 ? "all criteria passed\n" : std::to_string(failed) + " criteria failed\n");
    return failed == 0 ? 0 : 1;
}
