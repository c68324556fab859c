#include <iostream>
#include <string>

#include "membrane/verify.hpp"

// Prints one line per acceptance criterion; exits nonzero if any fails.
int main(int argc, char** argv) {
    const std::string preset = argc > 1 ? argv[1] : "desk";
    const auto results = membrane::verify::run_acceptance(membrane::verify::preset_options(preset), &std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    std::cout << (results.size() - failed) << '/' << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
