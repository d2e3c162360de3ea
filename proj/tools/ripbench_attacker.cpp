// Attacker-only executable. It links no victim-side code, so it cannot reach the engine's internals.
#include <iostream>

#include "attack_client.hpp"

int main(int argc, char** argv) {
  CLI::App app{"RIP attacker client"};
  app.require_subcommand(1);
  ripbench::cli::ClientFlags f;
  auto* cl = app.add_subcommand("attack-client", "RIP attack against a remote victim");
  ripbench::cli::add_client(cl, f);
  CLI11_PARSE(app, argc, argv);
  try {
    return ripbench::cli::run_attack_client(f);
  } catch (const std::exception& e) {
    std::cerr << "ripbench-attacker: " << e.what() << '\n';
    return 1;
  }
}
