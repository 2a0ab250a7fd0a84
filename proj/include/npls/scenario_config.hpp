#pragma once

#include <string>

#include <json.hpp>

#include "npls/scenario.hpp"

namespace npls {

// Scenario config file schema (JSON):
// {
//   "seed": 0, "alpha": 0.3, "image_threshold": 0.5,
//   "t_clean": 3, "t_remove": 5, "clog_decay": 0.98, "rate_noise": 0.0,
//   "fire_s4_and_s5": true,
//   "units": [{"id": "u1", "valve": {"true_rate": 10.0, "estimated_rate":
//              10.0, "viscosity": 1.0, "clog": 1.0}}],
//   "orders": [{"liquid": "yogurt", "bottle": "b1", "target": 200,
//               "min": 195, "max": 205}],
//   "num_orders": 20          // generates b1..bN when "orders" is absent
// }
inline ScenarioConfig scenario_config_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.alpha = j.value("alpha", 0.3);
  cfg.image_threshold = j.value("image_threshold", 0.5);
  cfg.t_clean = j.value("t_clean", 3);
  cfg.t_remove = j.value("t_remove", 5);
  cfg.clog_decay = j.value("clog_decay", 0.98);
  cfg.rate_noise = j.value("rate_noise", 0.0);
  cfg.fire_s4_and_s5 = j.value("fire_s4_and_s5", true);
  if (j.contains("units")) {
    for (const auto& ju : j.at("units")) {
      UnitConfig u;
      u.id = ju.at("id").get<std::string>();
      if (ju.contains("valve")) {
        const auto& jv = ju.at("valve");
        u.valve.true_rate = jv.value("true_rate", 10.0);
        u.valve.estimated = jv.value("estimated_rate", u.valve.true_rate);
        u.valve.viscosity = jv.value("viscosity", 1.0);
        u.valve.clog = jv.value("clog", 1.0);
      }
      cfg.units.push_back(std::move(u));
    }
  } else {
    cfg.units.push_back({"u1", ValveModel{}});
  }
  if (j.contains("orders")) {
    for (const auto& jo : j.at("orders")) {
      Order o;
      o.liquid = jo.value("liquid", "yogurt");
      o.bottle = jo.at("bottle").get<std::string>();
      o.target = jo.at("target").get<double>();
      o.min_ml = jo.at("min").get<double>();
      o.max_ml = jo.at("max").get<double>();
      cfg.orders.push_back(std::move(o));
    }
  } else {
    int n = j.value("num_orders", 10);
    for (int i = 1; i <= n; ++i)
      cfg.orders.push_back(
          {"yogurt", "b" + std::to_string(i), 200.0, 195.0, 205.0});
  }
  return cfg;
}

inline ScenarioConfig scenario_config_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw RuntimeError("config-invalid", e.what());
  }
  return scenario_config_from_json(j);
}

}  // namespace npls
