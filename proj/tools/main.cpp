//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include <csignal>
#include <iostream>

#include "cli.hpp"

namespace {

std::atomic<bool> g_cancel{false};

extern "C" void on_interrupt(int) { g_cancel.store(true); }

}  // namespace

int main(int argc, char **argv) {
  std::signal(SIGINT, on_interrupt);
  const std::vector<std::string> args(argv + 1, argv + argc);
  return mhnpath::cli::run(args, std::cout, std::cerr, &g_cancel);
}
