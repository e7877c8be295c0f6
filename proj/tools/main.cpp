#include <cstdlib>
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace ckdv::cli;
  Invocation inv;
  try {
    inv = parse_invocation(argc, argv, std::getenv("CKDV_OUT"));
  } catch (const UsageError& e) {
    std::cerr << "ckdv: " << e.what() << "\nRun 'ckdv --help' for usage.\n";
    return kExitUsage;
  }
  if (inv.help) {
    std::cout << inv.help_text;
    return kExitOk;
  }
  return execute(inv, std::cout, std::cerr);
}
