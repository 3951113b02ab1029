#include <doctest.h>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "mhfit/error.hpp"
#include "mhfit/learners.hpp"
#include "mhfit/metrics.hpp"

using namespace mhfit;

namespace {

std::vector<ActivityLabel> labels(std::initializer_list<int> codes) {
  std::vector<ActivityLabel> out;
  for (int c : codes) out.emplace_back(c);
  return out;
}

ConfusionMatrix matrix(std::vector<int> codes, std::vector<std::uint64_t> counts) {
  ConfusionMatrix cm;
  for (int c : codes) cm.class_codes.emplace_back(c);
  cm.counts = std::move(counts);
  return cm;
}

}  // namespace

TEST_CASE("build_confusion counts") {
  const auto cm = build_confusion(labels({1, 1, 2}), labels({1, 2, 2}), labels({1, 2}));
  CHECK(cm.counts == std::vector<std::uint64_t>{1, 1, 0, 1});
  CHECK(cm.total() == 3);
  CHECK(cm.trace() == 2);

  const auto diag = build_confusion(labels({3, 3, 5, 7}), labels({3, 3, 5, 7}), labels({3, 5, 7}));
  CHECK(diag.counts == std::vector<std::uint64_t>{2, 0, 0, 0, 1, 0, 0, 0, 1});

  CHECK_THROWS_AS(build_confusion(labels({}), labels({}), labels({1})), Error);
  CHECK_THROWS_AS(build_confusion(labels({1}), labels({1, 2}), labels({1, 2})), Error);
  try {
    build_confusion(labels({4}), labels({1}), labels({1, 2}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownLabel);
  }
}

TEST_CASE("binary worked example") {
  const auto r = compute_metrics(matrix({1, 2}, {8, 1, 2, 9}));
  CHECK(r.accuracy == 0.85);
  const auto& c = r.per_class[0];
  CHECK(c.sensitivity == doctest::Approx(0.8889).epsilon(1e-4));
  CHECK(c.specificity == doctest::Approx(0.8182).epsilon(1e-4));
  CHECK(c.precision == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(c.f1 == doctest::Approx(0.8421).epsilon(1e-4));
  CHECK(r.macro.sensitivity == doctest::Approx((8.0 / 9.0 + 9.0 / 11.0) / 2.0).epsilon(1e-12));
  CHECK(r.micro.sensitivity == doctest::Approx(r.accuracy).epsilon(1e-12));
}

TEST_CASE("label swap exchanges sensitivity and specificity") {
  const auto a = compute_metrics(matrix({1, 2}, {5, 3, 4, 7}));
  const auto b = compute_metrics(matrix({1, 2}, {7, 4, 3, 5}));
  CHECK(a.macro.sensitivity == doctest::Approx(b.macro.specificity).epsilon(1e-15));
}

TEST_CASE("perfect and degenerate matrices") {
  const auto perfect = compute_metrics(matrix({1, 2, 3}, {4, 0, 0, 0, 5, 0, 0, 0, 6}));
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro.sensitivity == 1.0);
  CHECK(perfect.macro.specificity == 1.0);
  CHECK(perfect.macro.f1 == 1.0);

  // class 2 is never true and never predicted: excluded from macro means
  const auto r = compute_metrics(matrix({1, 2, 3}, {3, 0, 1, 0, 0, 0, 1, 0, 3}));
  CHECK(r.per_class[1].support == 0);
  CHECK(r.per_class[1].sensitivity_undefined);
  CHECK(r.per_class[1].precision_undefined);
  CHECK(r.per_class[1].f1_undefined);
  CHECK(r.macro.sensitivity == doctest::Approx(0.75).epsilon(1e-15));

  CHECK_THROWS_AS(compute_metrics(matrix({1, 2}, {0, 0, 0, 0})), Error);
}

TEST_CASE("percent formatting rounds half up") {
  CHECK(format_percent(0.9592) == "95.92");
  CHECK(format_percent(1.0) == "100.00");
  CHECK(format_percent(0.0) == "0.00");
  CHECK(format_percent(0.12345) == "12.35");
  CHECK(format_percent(0.5707) == "57.07");
}

TEST_CASE("report rendering") {
  auto r = compute_metrics(matrix({1, 2}, {8, 1, 2, 9}));
  r.model_name = "XGBoost";
  r.seed = 7;
  const std::vector<MetricsReport> rows = {r};
  CHECK(table_csv(rows) ==
        "Model,Accuracy (%),Sensitivity (%),Specificity (%),F-1 Score (%)\n"
        "XGBoost,85.00,85.35,85.35,84.96\n");
  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["accuracy"].get<double>() == 0.85);
  CHECK(j["seed"].get<std::uint64_t>() == 7);
  CHECK(j["per_class"].size() == 2);
  CHECK(j["confusion"]["counts"][0][1].get<int>() == 1);
  CHECK(confusion_csv(r.confusion) == "true\\predicted,1,2\n1,8,1\n2,2,9\n");
}

TEST_CASE("evaluate") {
  const auto ds = fixtures::make_dataset({{0}, {1}, {2}, {3}}, {2, 2, 2, 2});
  const auto m = train(ModelSpec::defaults(ModelKind::DecisionTree), ds);
  const auto r = evaluate(m, ds, "spec text");
  CHECK(r.accuracy == 1.0);
  CHECK(r.preprocess_spec == "spec text");
  CHECK(r.model_name == "Decision Tree");
  CHECK(report_json(evaluate(m, ds)) == report_json(evaluate(m, ds)));

  SUBCASE("class codes are the union of model and test") {
    const auto test = fixtures::make_dataset({{0}, {1}}, {2, 5});
    const auto u = evaluate(m, test);
    CHECK(u.confusion.class_codes.size() == 2);
    CHECK(u.accuracy == 0.5);
    const auto manual = compute_metrics(build_confusion(test.labels(), predict_all(m, test),
                                                        u.confusion.class_codes));
    CHECK(manual.accuracy == u.accuracy);
    CHECK(manual.macro.f1 == u.macro.f1);
  }
  CHECK_THROWS_AS(evaluate(m, fixtures::make_dataset({{0, 1}}, {2})), Error);
}
