/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "godel/godel_geo.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

int main(void) {
  godel_profile* p = NULL;
  EXPECT(godel_profile_parse("class1(m=2,omega=1)", &p) == GODEL_OK);
  EXPECT(p != NULL);

  double s[6];
  EXPECT(godel_profile_sample(p, 1.0, s) == GODEL_OK);
  EXPECT(fabs(s[1] + 2.0 * s[3]) < 1e-12); /* H' = -2 omega D */

  double f[3];
  EXPECT(godel_profile_invariants(p, 1.0, f) == GODEL_OK);
  EXPECT(fabs(f[0] - 1.0) < 1e-12);
  EXPECT(fabs(f[1]) < 1e-12);
  EXPECT(fabs(f[0] + f[2]) < 1e-10);

  double nabla[64];
  EXPECT(godel_frame_connection(p, 1.0, nabla) == GODEL_OK);
  /* nabla_{E1} E2 = -q E3 with q = H'/2D = -1 */
  EXPECT(fabs(nabla[16 * 0 + 4 * 1 + 2] - 1.0) < 1e-12);

  double R[256];
  EXPECT(godel_frame_curvature(p, 1.0, R) == GODEL_OK);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) EXPECT(fabs(R[64 * i + 16 * j + 4 * k + 3]) == 0.0);

  const double e4[4] = {0, 0, 0, 1};
  double res = -1;
  EXPECT(godel_codazzi_normal_residual(p, 1.0, e4, &res) == GODEL_OK);
  EXPECT(res == 0.0);
  godel_profile_free(p);

  p = NULL;
  EXPECT(godel_profile_parse("class1(m=", &p) == GODEL_E_PARSE);
  EXPECT(p == NULL);
  EXPECT(strlen(godel_last_error()) > 0);
  EXPECT(godel_profile_sample(NULL, 1.0, s) == GODEL_E_ARGUMENT);

  godel_report* rep = NULL;
  EXPECT(godel_run("verify-geometry", "{\"profile\": \"class2(omega=0.5)\", \"r\": \"0.8:1.6:4\"}", &rep) == GODEL_OK);
  EXPECT(godel_report_exit_code(rep) == 0);
  char* text = NULL;
  EXPECT(godel_report_render(rep, "json", &text) == GODEL_OK);
  EXPECT(text != NULL && strstr(text, "\"bracket\"") != NULL);
  godel_string_free(text);
  EXPECT(godel_report_render(rep, "yaml", &text) != GODEL_OK);
  godel_report_free(rep);

  rep = NULL;
  EXPECT(godel_run("verify-geometry", "{\"profile\": \"custom(H=\\\"1\\\",D=\\\"r\\\")\"}", &rep) == GODEL_OK);
  EXPECT(godel_report_exit_code(rep) == 1);
  godel_report_free(rep);

  rep = NULL;
  EXPECT(godel_run("verify-geometry", "{\n\"profile\": 3\n}", &rep) == GODEL_E_CONFIG);
  EXPECT(strstr(godel_last_error(), "line 2") != NULL);
  EXPECT(godel_run("no-such-command", "{\"profile\": \"class4(alpha=1)\"}", &rep) != GODEL_OK);

  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("c api: all checks passed\n");
  return failures ? 1 : 0;
}
