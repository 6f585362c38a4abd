#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "mdbg/log.hpp"

int main(int argc, char** argv) {
  // Constant-dimension and similar warnings are expected in randomized tests.
  mdbg::log::set_min_level(mdbg::log::Level::error);
  doctest::Context context(argc, argv);
  return context.run();
}
