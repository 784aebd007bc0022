#include <iostream>
#include <string>

#include "ghof/repro.hpp"

// Acceptance runner: one pass/fail line per criterion. With an argument it
// runs a single criterion, without it the full suite. Exit 3 on any failure.
int main(int argc, char** argv) {
  std::string suite = argc > 1 ? argv[1] : "all";
  try {
    int failures = ghof::repro::run_suite(suite, std::cout);
    return failures > 0 ? 3 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
