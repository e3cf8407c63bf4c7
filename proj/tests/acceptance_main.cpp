// Runs every acceptance criterion and prints one PASS/FAIL line each.

#include <iostream>

#include "eqalg/acceptance.hpp"

int main() {
  bool all = true;
  for (const auto& c : eqalg::acceptance::criteria()) {
    auto r = c.run();
    std::cout << eqalg::acceptance::format_line(r) << std::endl;
    all = all && r.pass();
  }
  return all ? 0 : 1;
}
