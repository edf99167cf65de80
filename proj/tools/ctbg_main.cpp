#include <cstdlib>

#include "ctbg/cli.hpp"

int main(int argc, char** argv) {
  // The linear algebra backend must not spawn its own threads underneath
  // the OpenMP loops; an explicit user setting wins.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);
  return ctbg::run_cli(argc, argv);
}
