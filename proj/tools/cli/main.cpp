#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "commands.hpp"

int main(int argc, char** argv) {
#ifdef __GLIBC__
  // The optimizer allocates and frees multi-megabyte buffers in a tight loop;
  // keeping them on the heap instead of mmap/munmap avoids page-fault churn.
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
  std::vector<std::string> args(argv + 1, argv + argc);
  return wavenhance::cli::run(args);
}
