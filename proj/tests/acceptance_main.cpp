#include <cstdio>

#include "mayerkit/verify.hpp"

int main() {
  const auto suite = mayerkit::verify::run_suite("all", 4);
  return suite.all_passed ? 0 : 1;
}
