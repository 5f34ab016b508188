/*
 *   Copyright 2026 The guesswork-lab Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 */


// Python module gwlab._core. Structured results cross the boundary as JSON
// text and are decoded by the package wrapper.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "gwlab/allocation.hpp"
#include "gwlab/attack.hpp"
#include "gwlab/errors.hpp"
#include "gwlab/experiments.hpp"
#include "gwlab/hashmodel.hpp"
#include "gwlab/infotheory.hpp"
#include "gwlab/rates.hpp"
#include "gwlab/report.hpp"
#include "gwlab/serialize.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

gwlab::ExperimentConfig make_config(const std::string& mode, double s, double p,
                                    unsigned m, unsigned n,
                                    std::vector<unsigned> m_sweep,
                                    std::uint64_t trials, std::uint64_t seed,
                                    const std::string& strategy,
                                    const std::string& averaging, double rho,
                                    std::optional<double> theta, bool natural,
                                    std::optional<std::uint64_t> users,
                                    bool table, unsigned workers) {
  gwlab::ExperimentConfig cfg;
  cfg.mode = gwlab::parse_mode(mode);
  cfg.scenario.s = s;
  cfg.scenario.p = p;
  cfg.scenario.m = m_sweep.empty() ? m : m_sweep.front();
  cfg.scenario.n = n;
  cfg.scenario.theta = theta;
  cfg.m_sweep = std::move(m_sweep);
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.strategy = gwlab::parse_strategy_kind(strategy);
  if (averaging == "key") cfg.averaging = gwlab::Averaging::key;
  else if (averaging == "strategy") cfg.averaging = gwlab::Averaging::strategy;
  else throw gwlab::ConfigError("averaging", "expected 'key' or 'strategy'");
  cfg.rho = rho;
  cfg.natural = natural;
  cfg.users = users;
  cfg.table = table;
  cfg.workers = workers;
  if (cfg.m_sweep.empty() && n == 0)
    cfg.scenario.n = gwlab::default_password_width(cfg.mode, s, p, m);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "guesswork-lab core";
  mod.attr("SCHEMA") = gwlab::kSchema;
  mod.attr("DEFAULT_SEED") = gwlab::kDefaultSeed;

  py::register_exception<gwlab::ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<gwlab::DomainError>(mod, "DomainError", PyExc_ValueError);
  py::register_exception<gwlab::RangeError>(mod, "RangeError", PyExc_IndexError);
  py::register_exception<gwlab::ResourceError>(mod, "ResourceError", PyExc_MemoryError);

  mod.def("binary_entropy", &gwlab::binary_entropy, py::arg("q"));
  mod.def("kl_divergence", &gwlab::kl_divergence, py::arg("q"), py::arg("p"));
  mod.def("renyi_entropy_bernoulli", &gwlab::renyi_entropy_bernoulli, py::arg("p"),
          py::arg("rho"));
  mod.def("solve_bias_for_alpha", &gwlab::solve_bias_for_alpha, py::arg("alpha"));
  mod.def("expected_guesses_per_bin", &gwlab::expected_guesses_per_bin,
          py::arg("m"), py::arg("n"), py::arg("q_b"), py::arg("p"));
  mod.def("users_for_s", &gwlab::users_for_s, py::arg("s"), py::arg("m"));

  mod.def(
      "rates_json",
      [](double s, double p, unsigned m, unsigned n, std::optional<double> theta) {
        gwlab::ScenarioParams sc{s, p, m, n, theta};
        json arr = json::array();
        for (const gwlab::RateReport& r : gwlab::all_rates(sc))
          arr.push_back(gwlab::to_json(r));
        return arr.dump();
      },
      py::arg("s"), py::arg("p"), py::arg("m") = 8, py::arg("n") = 0,
      py::arg("theta") = py::none());
  mod.def("table1_json", [] {
    std::vector<gwlab::Table1Cell> cells = gwlab::table1();
    return gwlab::to_json(cells).dump();
  });
  mod.def(
      "keysize_json",
      [](std::vector<double> alphas) {
        return gwlab::to_json(gwlab::keysize_panel(alphas)).dump();
      },
      py::arg("alphas"));

  auto experiment = [](bool sweep) {
    return [sweep](const std::string& mode, double s, double p, unsigned m, unsigned n,
                   std::vector<unsigned> m_sweep, std::uint64_t trials,
                   std::uint64_t seed, const std::string& strategy,
                   const std::string& averaging, double rho,
                   std::optional<double> theta, bool natural,
                   std::optional<std::uint64_t> users, bool table, unsigned workers) {
      gwlab::ExperimentConfig cfg =
          make_config(mode, s, p, m, n, std::move(m_sweep), trials, seed, strategy,
                      averaging, rho, theta, natural, users, table, workers);
      gwlab::validate(cfg, sweep);
      py::gil_scoped_release release;
      json out = sweep ? gwlab::to_json(gwlab::sweep_rate(cfg))
                       : gwlab::to_json(gwlab::run_experiment(cfg));
      return out.dump();
    };
  };
  mod.def("simulate_json", experiment(false), py::arg("mode"), py::arg("s") = 0.9,
          py::arg("p") = 0.3, py::arg("m") = 8, py::arg("n") = 0,
          py::arg("m_sweep") = std::vector<unsigned>{}, py::arg("trials") = 10000,
          py::arg("seed") = gwlab::kDefaultSeed, py::arg("strategy") = "ascending",
          py::arg("averaging") = "key", py::arg("rho") = 1.0,
          py::arg("theta") = py::none(), py::arg("natural") = false,
          py::arg("users") = py::none(), py::arg("table") = false,
          py::arg("workers") = 0);
  mod.def("sweep_json", experiment(true), py::arg("mode"), py::arg("s") = 0.9,
          py::arg("p") = 0.3, py::arg("m") = 8, py::arg("n") = 0,
          py::arg("m_sweep") = std::vector<unsigned>{}, py::arg("trials") = 10000,
          py::arg("seed") = gwlab::kDefaultSeed, py::arg("strategy") = "ascending",
          py::arg("averaging") = "key", py::arg("rho") = 1.0,
          py::arg("theta") = py::none(), py::arg("natural") = false,
          py::arg("users") = py::none(), py::arg("table") = false,
          py::arg("workers") = 0);

  py::class_<gwlab::KeyedHashModel>(mod, "KeyedHashModel")
      .def(py::init<unsigned, unsigned, double, std::uint64_t>(), py::arg("m"),
           py::arg("n"), py::arg("p"), py::arg("seed"))
      .def_property_readonly("m", &gwlab::KeyedHashModel::m)
      .def_property_readonly("n", &gwlab::KeyedHashModel::n)
      .def_property_readonly("p", &gwlab::KeyedHashModel::p)
      .def("eval", [](const gwlab::KeyedHashModel& h, std::uint64_t pw) {
        return h.eval(pw).to_string();
      })
      .def("to_json", [](const gwlab::KeyedHashModel& h) {
        return gwlab::to_json(h).dump();
      });

  mod.def(
      "online_attack",
      [](const gwlab::KeyedHashModel& h, const std::string& bin,
         std::uint64_t budget) {
        gwlab::BinLabel b = gwlab::BinLabel::from_string(bin);
        if (b.m != h.m()) throw gwlab::DomainError("bin width differs from the model");
        gwlab::AttackResult r =
            gwlab::online_attack(h, b, gwlab::GuessStrategy::ascending(), budget);
        return py::make_tuple(r.guesses, r.success);
      },
      py::arg("model"), py::arg("bin"), py::arg("budget") = gwlab::kExhaustive);
}
