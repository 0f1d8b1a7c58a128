#include <csignal>
#include <iostream>

#include "cli.hpp"

namespace {

extern "C" void on_interrupt(int) {
  vreason::cli::stop_flag().store(true);
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  return vreason::cli::run_cli(argc, argv, std::cout, std::cerr);
}
