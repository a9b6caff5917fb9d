#include <stdio.h>
#include <string.h>

#include "nilpotwist.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    NwStatus s_ = (call);                                                  \
    if (s_ != NW_STATUS_OK) {                                              \
      fprintf(stderr, "%s -> %d: %s\n", #call, s_, nw_last_error_message()); \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  NwGroup *h = NULL;
  CHECK(nw_group_from_spec("heisenberg:p=3:k=2", &h));
  uint64_t order = 0;
  CHECK(nw_group_order(h, &order));

  NwString *s = NULL;
  CHECK(nw_string_of(h, &s));
  size_t len = 0;
  CHECK(nw_string_len(s, &len));
  printf("order %llu terms %zu centers", (unsigned long long)order, len);
  for (size_t i = 0; i < len; i++) {
    NwGroup *t = NULL;
    uint64_t z = 0;
    CHECK(nw_string_term(s, i, &t));
    CHECK(nw_group_center_order(t, &z));
    printf(" %llu", (unsigned long long)z);
    nw_group_free(t);
  }
  printf("\n");

  NwGroup *bad = NULL;
  NwStatus st = nw_group_from_spec("burnside:Q:p=3", &bad);
  printf("bad spec status %d message %s\n", st, nw_last_error_message() ? "set" : "null");

  nw_string_free(s);
  nw_group_free(h);
  return 0;
}
