#include <gtest/gtest.h>

#include "opdyn/experiment.hpp"

using namespace opdyn;

namespace {

Report run_json(const std::string& text, int workers = 0) { return run_scenario(parse_config(json::parse(text)), workers); }

void expect_passed(const Report& r) {
  for (const auto& a : r.assertions) EXPECT_TRUE(a.passed) << a.name << ": " << a.detail;
  EXPECT_TRUE(r.passed());
}

}  // namespace

TEST(Config, StrictSchema) {
  EXPECT_THROW(parse_config(json::parse(R"j({"scenario":"E1","colour":1})j")), SchemaError);
  EXPECT_THROW(parse_config(json::parse(R"j({"scenario":"E8"})j")), SchemaError);
  EXPECT_THROW(parse_config(json::parse(R"j({"horizons":{"N":10}})j")), SchemaError);
  EXPECT_THROW(parse_config(json::parse(R"j({"scenario":"E1","horizons":{"N":10.5}})j")), SchemaError);
  EXPECT_THROW(parse_config(json::parse(R"j({"scenario":"E1","horizons":{"N":"1e5x"}})j")), SchemaError);
  EXPECT_THROW(parse_config(json::parse(R"j({"scenario":"E6","targets":[{"vector":"e(1)"}]})j")), SchemaError);
}

TEST(Config, DecimalStringsAndNumbers) {
  const auto c = parse_config(json::parse(
      R"j({"scenario":"E6","horizons":{"N":"2e4","K":100},"tolerances":{"eps":"0.01"},"orders":[3,"4"],
          "operator":{"premult":"(2,0)"},"scaling":{"family":"log_pow","k":"2"},
          "targets":[{"vector":"e(1)","eps":1e-3}]})j"));
  EXPECT_EQ(*c.N, 20'000);
  EXPECT_EQ(*c.K, 100);
  EXPECT_EQ(*c.eps, 0.01);
  EXPECT_EQ(c.orders, (std::vector<std::int64_t>{3, 4}));
  EXPECT_EQ(*c.premult, std::complex<double>(2.0, 0.0));
  EXPECT_EQ(*c.scaling, "log_pow k=2");
  EXPECT_EQ(c.targets.size(), 1u);
}

TEST(Config, ResourceCap) {
  EXPECT_THROW(run_json(R"j({"scenario":"E1","horizons":{"N":"1e9"}})j"), ResourceCapExceeded);
}

TEST(Scenarios, E1GeometricBadSequence) {
  const Report r = run_json(R"j({"scenario":"E1","horizons":{"N":20000}})j");
  expect_passed(r);
  EXPECT_TRUE(verify_report(r.doc).ok());
}

TEST(Scenarios, E1NegativeA) {
  expect_passed(run_json(R"j({"scenario":"E1","a":"-0.5","gap":32,"horizons":{"N":20000}})j"));
}

TEST(Scenarios, E2Factorial) {
  const Report r = run_json(R"j({"scenario":"E2"})j");
  expect_passed(r);
  EXPECT_TRUE(r.doc["verdicts"]["recurrence"]["returns"].empty());
  EXPECT_TRUE(verify_report(r.doc).ok());
}

TEST(Scenarios, E3EvenOdd) {
  const Report r = run_json(R"j({"scenario":"E3","horizons":{"N":40000}})j");
  expect_passed(r);
  EXPECT_EQ(r.doc["verdicts"]["ratio_evens"]["verdict"], "Good");
}

TEST(Scenarios, E4Salas) {
  const Report r = run_json(R"j({"scenario":"E4"})j");
  expect_passed(r);
  EXPECT_EQ(r.doc["verdicts"]["summary"], "Salas: none found up to N_max=10000");
  EXPECT_TRUE(verify_report(r.doc).ok());
}

TEST(Scenarios, E5SqrtRatio) {
  const Report r = run_json(R"j({"scenario":"E5"})j");
  expect_passed(r);
  EXPECT_TRUE(verify_report(r.doc).ok());
}

TEST(Scenarios, E6Pipeline) {
  const Report r = run_json(R"j({"scenario":"E6","horizons":{"N":30000}})j");
  expect_passed(r);
  int ap = 0;
  int mr = 0;
  for (const auto& c : r.doc["certificates"]) {
    ap += c["type"] == "ap_witness";
    mr += c["type"] == "mr_witness";
  }
  EXPECT_EQ(ap, 3);
  EXPECT_EQ(mr, 1);
  const auto v = verify_report(r.doc);
  for (const auto& c : v.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.detail;
}

TEST(Scenarios, E7Symbols) {
  const Report r = run_json(R"j({"scenario":"E7"})j");
  expect_passed(r);
  EXPECT_EQ(r.doc["verdicts"]["0.8,1"], "FrequentlyHypercyclic-and-MultiplyRecurrent");
  EXPECT_TRUE(verify_report(r.doc).ok());
}

TEST(Scenarios, FailingAssertionIsNamed) {
  // A density tolerance far below the finite-window error fails exactly one check.
  const Report r = run_json(R"j({"scenario":"E2","tolerances":{"density":1e-9}})j");
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.failed(), (std::vector<std::string>{"density_target0"}));
  EXPECT_FALSE(r.doc["passed"].get<bool>());
}

TEST(Verify, TamperedCertificatesAreRejected) {
  Report r = run_json(R"j({"scenario":"E6","horizons":{"N":20000}})j");
  json doc = r.doc;
  for (auto& c : doc["certificates"]) {
    if (c["type"] == "ap_witness") c["witness"]["a"] = c["witness"]["a"].get<int>() + 1;
  }
  const auto v = verify_report(doc);
  EXPECT_FALSE(v.ok());
  int failed = 0;
  for (const auto& c : v.checks) failed += !c.passed;
  EXPECT_EQ(failed, 3);

  json doc2 = run_json(R"j({"scenario":"E4"})j").doc;
  doc2["certificates"][0]["weights"] = "inverse_step_bilateral";
  EXPECT_FALSE(verify_report(doc2).ok());
}

TEST(Determinism, ByteIdenticalAcrossRunsAndWorkers) {
  const std::string cfg = R"j({"scenario":"E6","horizons":{"N":20000}})j";
  const std::string a = run_json(cfg, 1).render();
  EXPECT_EQ(a, run_json(cfg, 1).render());
  EXPECT_EQ(a, run_json(cfg, 8).render());
}
