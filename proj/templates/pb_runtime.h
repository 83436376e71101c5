/* Runtime support shared by all driver templates: argument parsing,
 * monotonic timing, validation checks, aligned allocation. */
#ifndef PB_RUNTIME_H
#define PB_RUNTIME_H

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <time.h>

typedef struct {
  int n;
  int threads;
  int ntimes;
  int warmup;
  const char *counters;
} pb_args;

static int pb_parse_args(int argc, char **argv, pb_args *a) {
  a->warmup = 1;
  a->counters = NULL;
  if (argc < 4) {
    fprintf(stderr, "usage: %s <n> <threads> <ntimes> [--counters E1,E2,...] [--warmup R]\n",
            argv[0]);
    return -1;
  }
  a->n = atoi(argv[1]);
  a->threads = atoi(argv[2]);
  a->ntimes = atoi(argv[3]);
  for (int i = 4; i < argc; i++) {
    if (strcmp(argv[i], "--counters") == 0 && i + 1 < argc) {
      a->counters = argv[++i];
    } else if (strcmp(argv[i], "--warmup") == 0 && i + 1 < argc) {
      a->warmup = atoi(argv[++i]);
    } else {
      fprintf(stderr, "unknown argument '%s'\n", argv[i]);
      return -1;
    }
  }
  if (a->n < 1 || a->threads < 1 || a->ntimes < 1 || a->warmup < 0) {
    fprintf(stderr, "n, threads, and ntimes must be positive\n");
    return -1;
  }
  return 0;
}

static double pb_now(void) {
  struct timespec ts;
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return (double)ts.tv_sec + 1e-9 * (double)ts.tv_nsec;
}

static void *pb_alloc(size_t bytes) {
  void *p = NULL;
  size_t rounded = (bytes + 63) / 64 * 64;
  if (posix_memalign(&p, 64, rounded ? rounded : 64) != 0) {
    fprintf(stderr, "allocation of %zu bytes failed\n", bytes);
    exit(3);
  }
  memset(p, 0, rounded);
  return p;
}

static long long pb_fail = 0;

#define PB_CHECK(cond)                                                        \
  do {                                                                        \
    if (!(cond))                                                              \
      pb_fail++;                                                              \
  } while (0)

#define PB_CHECK_NEAR(x, expect)                                              \
  do {                                                                        \
    double pb_x_ = (x), pb_e_ = (expect);                                     \
    if (fabs(pb_x_ - pb_e_) > 1e-9 * (1.0 + fabs(pb_e_)))                     \
      pb_fail++;                                                              \
  } while (0)

#endif
