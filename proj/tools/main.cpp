#include "cli.hpp"

#include <malloc.h>

int main(int argc, char** argv) {
  // Per-epoch temporaries are tens of MB; keep them on the heap for reuse.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  return fsgnn::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
