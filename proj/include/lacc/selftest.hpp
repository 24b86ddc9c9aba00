#pragma once

#include <iosfwd>
#include <string>

namespace lacc {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs the full acceptance suite, one [PASS]/[FAIL] line per criterion.
// cli_path names the front-door binary used for the end-to-end criteria.
// Returns the number of failed criteria.
int run_selftest(std::ostream& out, const std::string& cli_path, int threads = 1);

}
