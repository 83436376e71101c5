/* Hardware counters over perf_event_open, one event group per OpenMP
 * thread. Events that cannot be opened print as `unsupported`. */
#ifndef PB_COUNTERS_H
#define PB_COUNTERS_H

#include <linux/perf_event.h>
#include <omp.h>
#include <stdint.h>
#include <stdio.h>
#include <string.h>
#include <sys/ioctl.h>
#include <sys/syscall.h>
#include <unistd.h>

#define PB_MAX_EVENTS 8
#define PB_MAX_THREADS 1024

typedef struct {
  char name[64];
  uint32_t type;
  uint64_t config;
  int known;
  int fds[PB_MAX_THREADS];
  int supported;
} pb_event;

static pb_event pb_events[PB_MAX_EVENTS];
static int pb_n_events = 0;

static int pb_lookup_event(const char *name, uint32_t *type, uint64_t *config) {
  static const struct {
    const char *name;
    uint32_t type;
    uint64_t config;
  } table[] = {
      {"CYCLES", PERF_TYPE_HARDWARE, PERF_COUNT_HW_CPU_CYCLES},
      {"INSTRUCTIONS", PERF_TYPE_HARDWARE, PERF_COUNT_HW_INSTRUCTIONS},
      {"LLC_REFERENCES", PERF_TYPE_HARDWARE, PERF_COUNT_HW_CACHE_REFERENCES},
      {"LLC_MISSES", PERF_TYPE_HARDWARE, PERF_COUNT_HW_CACHE_MISSES},
      {"L1D_MISS", PERF_TYPE_HW_CACHE,
       PERF_COUNT_HW_CACHE_L1D | (PERF_COUNT_HW_CACHE_OP_READ << 8) |
           (PERF_COUNT_HW_CACHE_RESULT_MISS << 16)},
      {"L1D_ACCESS", PERF_TYPE_HW_CACHE,
       PERF_COUNT_HW_CACHE_L1D | (PERF_COUNT_HW_CACHE_OP_READ << 8) |
           (PERF_COUNT_HW_CACHE_RESULT_ACCESS << 16)},
      {"L1D_WRITE_MISS", PERF_TYPE_HW_CACHE,
       PERF_COUNT_HW_CACHE_L1D | (PERF_COUNT_HW_CACHE_OP_WRITE << 8) |
           (PERF_COUNT_HW_CACHE_RESULT_MISS << 16)},
  };
  for (size_t i = 0; i < sizeof table / sizeof table[0]; i++) {
    if (strcmp(name, table[i].name) == 0) {
      *type = table[i].type;
      *config = table[i].config;
      return 1;
    }
  }
  /* Raw event codes: r<hex>, e.g. r412e. */
  if (name[0] == 'r' && name[1] != '\0') {
    char *end = NULL;
    unsigned long long v = strtoull(name + 1, &end, 16);
    if (end && *end == '\0') {
      *type = PERF_TYPE_RAW;
      *config = v;
      return 1;
    }
  }
  return 0;
}

static int pb_open_one(uint32_t type, uint64_t config) {
  struct perf_event_attr attr;
  memset(&attr, 0, sizeof attr);
  attr.size = sizeof attr;
  attr.type = type;
  attr.config = config;
  attr.disabled = 1;
  attr.exclude_kernel = 1;
  attr.exclude_hv = 1;
  return (int)syscall(SYS_perf_event_open, &attr, 0, -1, -1, 0);
}

/* Parse the comma separated list and open each event on every thread of
 * the OpenMP team. Call before the timed region. */
static void pb_counters_open(const char *list, int threads) {
  char buf[512];
  if (!list)
    return;
  snprintf(buf, sizeof buf, "%s", list);
  for (char *tok = strtok(buf, ","); tok && pb_n_events < PB_MAX_EVENTS;
       tok = strtok(NULL, ",")) {
    pb_event *e = &pb_events[pb_n_events++];
    snprintf(e->name, sizeof e->name, "%s", tok);
    e->known = pb_lookup_event(tok, &e->type, &e->config);
    e->supported = e->known;
    for (int t = 0; t < PB_MAX_THREADS; t++)
      e->fds[t] = -1;
  }
  if (threads > PB_MAX_THREADS)
    threads = PB_MAX_THREADS;
#pragma omp parallel num_threads(threads)
  {
    int id = omp_get_thread_num();
    for (int i = 0; i < pb_n_events; i++) {
      if (!pb_events[i].known)
        continue;
      int fd = pb_open_one(pb_events[i].type, pb_events[i].config);
      pb_events[i].fds[id] = fd;
      if (fd < 0) {
#pragma omp atomic write
        pb_events[i].supported = 0;
      }
    }
  }
}

static void pb_counters_ioctl(unsigned long req) {
  for (int i = 0; i < pb_n_events; i++)
    for (int t = 0; t < PB_MAX_THREADS; t++)
      if (pb_events[i].fds[t] >= 0)
        ioctl(pb_events[i].fds[t], req, 0);
}

static void pb_counters_start(void) {
  pb_counters_ioctl(PERF_EVENT_IOC_RESET);
  pb_counters_ioctl(PERF_EVENT_IOC_ENABLE);
}

static void pb_counters_stop(void) { pb_counters_ioctl(PERF_EVENT_IOC_DISABLE); }

static void pb_counters_print(void) {
  for (int i = 0; i < pb_n_events; i++) {
    pb_event *e = &pb_events[i];
    if (!e->supported) {
      printf("counter.%s=unsupported\n", e->name);
      continue;
    }
    unsigned long long total = 0;
    for (int t = 0; t < PB_MAX_THREADS; t++) {
      uint64_t v = 0;
      if (e->fds[t] >= 0 && read(e->fds[t], &v, sizeof v) == (ssize_t)sizeof v)
        total += v;
    }
    printf("counter.%s=%llu\n", e->name, total);
  }
}

#endif
