#include <cmath>
#include <sstream>
#include <string>

#include <doctest.h>
#include <fmt/format.h>
#include <json.hpp>

#include "model_fit.hpp"
#include "report.hpp"
#include "simgen.hpp"

using namespace gevreg;

TEST_CASE("p-value rendering") {
  CHECK(format_p_value(std::nullopt) == "");
  CHECK(format_p_value(0.04) == "0.0400");
  CHECK(format_p_value(0.0455002638963584) == "0.0455");
  CHECK(format_p_value(1.0) == "1.0000");
  CHECK(format_p_value(3e-7) == "< 0.0001");
  CHECK(format_p_value(0.0) == "< 0.0001");
  CHECK(format_p_value(0.0, 500) == "< 0.002");
  CHECK(format_p_value(0.0, 1000) == "< 0.001");
  CHECK(format_p_value(0.0, 200) == "< 0.005");
  CHECK(format_p_value(0.0, 20000) == "< 0.0001");
  CHECK(format_p_value(0.01, 500) == "0.0100");
}

TEST_CASE("parameter labels") {
  CHECK(parameter_label("Intercept", 0) == "Intercept (beta1)");
  CHECK(parameter_label("weight", 1) == "weight (beta2)");
}

TEST_CASE("text and JSON agree to the rendered precision") {
  const Dataset d = simulate_dataset(dengue_analog_spec(1));
  const FitResult fit = fit_mle(d);
  REQUIRE(fit.converged);
  const InferenceTable table = wald_inference(fit, 0.05);
  const std::string text = render_fit_text(fit, table, static_cast<std::size_t>(d.rows()));
  const auto json = nlohmann::json::parse(render_fit_json(fit, table, static_cast<std::size_t>(d.rows())));

  CHECK(text.find("Parameter estimates of GEV regression model") == 0);
  std::istringstream lines(text);
  std::string line;
  std::string header;
  while (std::getline(lines, line)) {
    if (line.rfind("Parameter ", 0) == 0) header = line;
  }
  const auto pos = [&](const char* col) { return header.find(col); };
  REQUIRE(pos("Estimate") != std::string::npos);
  CHECK(pos("Parameter") < pos("Estimate"));
  CHECK(pos("Estimate") < pos("SE"));
  CHECK(pos("SE") < pos("95% C.I"));
  CHECK(pos("95% C.I") < pos("P-value"));

  CHECK(json["command"] == "fit");
  CHECK(json["version"] == library_version());
  CHECK(json["tau"]["mode"] == "profiled");
  REQUIRE(json["parameters"].size() == 2);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& p = json["parameters"][j];
    const std::string label = parameter_label(p["name"].get<std::string>(), j);
    CHECK(text.find(label) != std::string::npos);
    for (const char* key : {"estimate", "se", "ci_low", "ci_high"}) {
      CHECK(text.find(fmt::format("{:.4f}", p[key].get<double>())) != std::string::npos);
    }
  }
  CHECK(json["parameters"][0]["p_value"].is_null());
  CHECK(text.find(fmt::format("tau = {:.4f}", json["tau"]["value"].get<double>())) != std::string::npos);
}
