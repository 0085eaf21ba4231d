// Exercises the shared library through its C interface only.

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "catsurf/catsurf.h"

namespace {

double number(catsurf_report* r, const char* key) {
  double v = NAN;
  EXPECT_EQ(catsurf_report_number(r, key, &v), CATSURF_OK) << key;
  return v;
}

}  // namespace

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(catsurf_version(), "0.1.0");
  EXPECT_STREQ(catsurf_mixer_id(), "splitmix64-v1");
  EXPECT_STREQ(catsurf_status_string(CATSURF_OK), "ok");
}

TEST(CApi, NullAndInvalidArguments) {
  EXPECT_EQ(catsurf_model_create(4, 0.47, nullptr), CATSURF_ERR_NULL);
  catsurf_model* m = nullptr;
  EXPECT_EQ(catsurf_model_create(4, 1.5, &m), CATSURF_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(m, nullptr);
  EXPECT_NE(std::string(catsurf_last_error()), "");
  const double bad[] = {0.5, 0.6};
  EXPECT_EQ(catsurf_model_create_rates(bad, 2, &m), CATSURF_ERR_INVALID_ARGUMENT);
  catsurf_model_destroy(nullptr);
  catsurf_report_destroy(nullptr);
  catsurf_scores_destroy(nullptr);
}

TEST(CApi, ApplyArrivalAndWeight) {
  catsurf_report* r = nullptr;
  ASSERT_EQ(catsurf_apply_arrival("103", CATSURF_BLOCKED, 1, 2, 1, &r), CATSURF_OK);
  EXPECT_EQ(number(r, "kind"), 1.0);
  EXPECT_EQ(number(r, "victim"), 0.0);
  double missing = 0;
  EXPECT_EQ(catsurf_report_number(r, "nope", &missing), CATSURF_ERR_NOT_FOUND);
  catsurf_report_destroy(r);

  catsurf_scores* s = nullptr;
  ASSERT_EQ(catsurf_scores_table1(&s), CATSURF_OK);
  double w = 0;
  ASSERT_EQ(catsurf_weight("1100000", s, &w), CATSURF_OK);
  EXPECT_NEAR(w, 2.664, 1e-12);
  ASSERT_EQ(catsurf_weight("111", s, &w), CATSURF_OK);
  EXPECT_TRUE(std::isinf(w));
  EXPECT_EQ(catsurf_weight("12", s, &w), CATSURF_ERR_INVALID_ARGUMENT);
  double v = 0;
  ASSERT_EQ(catsurf_scores_get(s, "304", &v), CATSURF_OK);
  EXPECT_DOUBLE_EQ(v, 0.339);
  EXPECT_EQ(catsurf_scores_get(s, "2222", &v), CATSURF_ERR_NOT_FOUND);
  catsurf_scores_destroy(s);
}

TEST(CApi, CertificateRoundTrip) {
  catsurf_model* m = nullptr;
  ASSERT_EQ(catsurf_model_create(4, 0.47, &m), CATSURF_OK);
  catsurf_scores* s = nullptr;
  ASSERT_EQ(catsurf_scores_table1(&s), CATSURF_OK);
  catsurf_scores* copy = nullptr;
  ASSERT_EQ(catsurf_scores_from_json(catsurf_scores_json(s), &copy), CATSURF_OK);
  catsurf_report* r = nullptr;
  ASSERT_EQ(catsurf_verify_certificate(m, 3, copy, 6, &r), CATSURF_OK);
  EXPECT_EQ(number(r, "positive"), 1.0);
  EXPECT_GE(number(r, "c"), 1e-4);
  EXPECT_NE(std::string(catsurf_report_json(r)).find("POSITIVE"), std::string::npos);
  catsurf_report_destroy(r);
  catsurf_scores_destroy(copy);
  catsurf_scores_destroy(s);
  catsurf_model_destroy(m);
}

TEST(CApi, SolveReturnsScores) {
  catsurf_solve_options o;
  catsurf_solve_options_init(&o);
  o.p1 = 0.5;
  catsurf_report* r = nullptr;
  catsurf_scores* s = nullptr;
  ASSERT_EQ(catsurf_solve_scores(&o, &r, &s), CATSURF_OK);
  EXPECT_EQ(number(r, "certified"), 1.0);
  double ref = 1;
  ASSERT_EQ(catsurf_scores_get(s, "222", &ref), CATSURF_OK);
  EXPECT_EQ(ref, 0.0);
  catsurf_report_destroy(r);
  catsurf_scores_destroy(s);
  o.tolerance = 0;
  EXPECT_EQ(catsurf_solve_scores(&o, &r, nullptr), CATSURF_ERR_INVALID_ARGUMENT);
}

TEST(CApi, TrajectoryIsDeterministic) {
  catsurf_model* m = nullptr;
  ASSERT_EQ(catsurf_model_create(4, 0.47, &m), CATSURF_OK);
  catsurf_report *a = nullptr, *b = nullptr;
  const std::string init(48, '0');
  ASSERT_EQ(catsurf_trajectory(m, init.c_str(), CATSURF_TORUS, 9, 0, 0, 1, &a), CATSURF_OK);
  ASSERT_EQ(catsurf_trajectory(m, init.c_str(), CATSURF_TORUS, 9, 0, 0, 1, &b), CATSURF_OK);
  EXPECT_EQ(number(a, "fingerprint_hi"), number(b, "fingerprint_hi"));
  EXPECT_EQ(number(a, "fingerprint_lo"), number(b, "fingerprint_lo"));
  EXPECT_STREQ(catsurf_report_csv(a), catsurf_report_csv(b));
  catsurf_report_destroy(a);
  catsurf_report_destroy(b);
  catsurf_model_destroy(m);
}

TEST(CApi, SimulationEntryPoints) {
  catsurf_model* m = nullptr;
  ASSERT_EQ(catsurf_model_create(2, 0.5, &m), CATSURF_OK);
  catsurf_sim_options o;
  catsurf_sim_options_init(&o);
  o.size = 16;
  o.runs = 20;
  catsurf_report* r = nullptr;
  ASSERT_EQ(catsurf_simulate(m, &o, &r), CATSURF_OK);
  const double f = number(r, "gas1_frequency");
  EXPECT_GE(f, 0.0);
  EXPECT_LE(f, 1.0);
  catsurf_report_destroy(r);

  const double grid[] = {0.3, 0.6};
  ASSERT_EQ(catsurf_sweep(3, grid, 2, &o, &r), CATSURF_OK);
  catsurf_report_destroy(r);
  EXPECT_EQ(catsurf_sweep(3, grid, 0, &o, &r), CATSURF_ERR_INVALID_ARGUMENT);
  o.runs = 0;
  EXPECT_EQ(catsurf_simulate(m, &o, &r), CATSURF_ERR_INVALID_ARGUMENT);
  catsurf_model_destroy(m);
}

TEST(CApi, Coupling) {
  catsurf_report* r = nullptr;
  const char* script = "4 2 1 L\n5 2 2 L\n4 3 3 L\n3 3 3 L\n6 3 3 L\n5 1 1 L\n";
  ASSERT_EQ(catsurf_couple_replay(script, "0000000000", "0000000000", CATSURF_BLOCKED, &r),
            CATSURF_OK);
  EXPECT_EQ(number(r, "steps"), 6.0);
  EXPECT_EQ(number(r, "violations"), 1.0);
  catsurf_report_destroy(r);
  EXPECT_EQ(catsurf_couple_replay("bad line", "00", "00", CATSURF_BLOCKED, &r),
            CATSURF_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(catsurf_couple_mc(nullptr, nullptr, nullptr, 0, 16, CATSURF_TORUS, 20, 20, 1, 0, &r),
            CATSURF_OK);
  EXPECT_EQ(number(r, "runs"), 20.0);
  catsurf_report_destroy(r);
}
