#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "hchain/dynamics.hpp"
#include "hchain/equilibrium.hpp"
#include "hchain/errors.hpp"
#include "hchain/flucthydro.hpp"
#include "hchain/hydro.hpp"
#include "hchain/steady_state.hpp"

namespace py = pybind11;
using namespace hchain;

namespace {

std::vector<double> temps_or_empty(const std::optional<std::vector<double>>& t) {
  return t ? *t : std::vector<double>{};
}

GridField field(const Eigen::VectorXd& v) {
  if (v.size() < 3) throw ConfigError("grid functions need at least 3 nodes");
  return GridField{v};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Harmonic chain NESS toolkit";
  m.attr("__version__") = HCHAIN_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::enum_<Model>(m, "Model")
      .value("VelocityFlip", Model::VelocityFlip)
      .value("SelfConsistent", Model::SelfConsistent);

  py::class_<ChainParams>(m, "ChainParams")
      .def(py::init([](int n_sites, double pinning, double flip_rate, double bath_coupling,
                       double temp_left, double temp_right, Model model) {
             ChainParams p{n_sites, pinning, flip_rate, bath_coupling, temp_left, temp_right, model};
             p.validate();
             return p;
           }),
           py::arg("n_sites") = 8, py::arg("pinning") = 0.0, py::arg("flip_rate") = 1.0,
           py::arg("bath_coupling") = 1.0, py::arg("temp_left") = 1.0,
           py::arg("temp_right") = 1.0, py::arg("model") = Model::VelocityFlip)
      .def_readwrite("n_sites", &ChainParams::n_sites)
      .def_readwrite("pinning", &ChainParams::pinning)
      .def_readwrite("flip_rate", &ChainParams::flip_rate)
      .def_readwrite("bath_coupling", &ChainParams::bath_coupling)
      .def_readwrite("temp_left", &ChainParams::temp_left)
      .def_readwrite("temp_right", &ChainParams::temp_right)
      .def_readwrite("model", &ChainParams::model)
      .def("__repr__", [](const ChainParams& p) {
        return "ChainParams(n_sites=" + std::to_string(p.n_sites) +
               ", model=" + std::string(to_string(p.model)) + ")";
      });

  // Covariances are (2N, 2N) over (q_1..q_N, p_1..p_N).
  m.def("stationary_covariance",
        [](const ChainParams& p, std::optional<std::vector<double>> temps) {
          return stationary_covariance(p, temps_or_empty(temps)).cov;
        },
        py::arg("params"), py::arg("bath_temperatures") = py::none());
  m.def("gibbs_covariance", &gibbs_covariance, py::arg("n_sites"), py::arg("temperature"),
        py::arg("pinning") = 0.0);
  m.def("self_consistent_profile",
        [](ChainParams p) {
          p.model = Model::SelfConsistent;
          const SelfConsistentResult r = self_consistent_profile(p);
          return py::make_tuple(r.profile.temps, r.residual);
        },
        py::arg("params"), "(temperatures, residual) of the self-consistent bath profile");
  m.def("steady_summary",
        [](const ChainParams& p, std::optional<std::vector<double>> temps) {
          const std::vector<double> t = temps_or_empty(temps);
          const SteadySummary s = steady_current_and_s(p, stationary_covariance(p, t));
          py::dict d;
          d["mean_current"] = s.mean_current;
          d["mean_energy"] = s.mean_energy;
          d["energy_variance"] = s.energy_variance;
          d["s_gaussian"] = s.s_gaussian;
          return d;
        },
        py::arg("params"), py::arg("bath_temperatures") = py::none());
  m.def("spectral_gap",
        [](const ChainParams& p) {
          const GapResult g = spectral_gap(p);
          return py::make_tuple(g.rate, g.method);
        },
        py::arg("params"));
  m.def("b_kernel_envelope",
        [](const ChainParams& p, const std::string& which) {
          const BKernel b = b_kernel(p);
          auto var = [](char c) {
            switch (c) {
              case 'q': return KernelVar::Q;
              case 'p': return KernelVar::P;
              case 'r': return KernelVar::R;
            }
            throw ConfigError("kernel variables are q, p or r");
          };
          if (which.size() != 2) throw ConfigError("which must be two letters, e.g. \"pp\"");
          return b.envelope(var(which[0]), var(which[1]));
        },
        py::arg("params"), py::arg("which") = "pp");

  m.def("lte_fluctuation_prediction",
        [](const std::vector<double>& temps, double pinning) {
          return lte_fluctuation_prediction(TemperatureProfile{temps}, pinning);
        },
        py::arg("temperatures"), py::arg("pinning") = 0.0);
  m.def("lte_fluctuation_limit", &lte_fluctuation_limit, py::arg("temp_left"),
        py::arg("temp_right"), py::arg("pinning") = 0.0, py::arg("resolution") = 400);
  m.def("unit_energy_covariance", &unit_energy_covariance, py::arg("n_sites"),
        py::arg("pinning") = 0.0);

  m.def("simulate",
        [](const ChainParams& p, double dt, double t_burn, double t_sample, int sample_stride,
           std::uint64_t seed, int replicas, std::optional<std::vector<double>> temps) {
          SimConfig c;
          c.dt = dt;
          c.t_burn = t_burn;
          c.t_sample = t_sample;
          c.sample_stride = sample_stride;
          c.seed = seed;
          c.replicas = replicas;
          const std::vector<double> t = temps_or_empty(temps);
          std::vector<TrajectoryStats> reps;
          {
            py::gil_scoped_release release;
            reps = run_replicas(p, c, t);
          }
          std::vector<std::vector<double>> segments;
          for (const auto& r : reps) segments.push_back(r.h_samples);
          const EstimateWithError s = estimate_s(segments, p.n_sites, resolve(c, p).n_batches);
          const EstimateWithError j = current_estimate(reps);
          std::vector<double> psq;
          for (const auto& e : p_sq_estimates(reps)) psq.push_back(e.value);
          py::dict d;
          d["s"] = s.value;
          d["s_error"] = s.std_error;
          d["mean_current"] = j.value;
          d["mean_current_error"] = j.std_error;
          d["p_sq"] = psq;
          d["h_samples"] = reps.front().h_samples;
          d["warnings"] = s.warnings;
          return d;
        },
        py::arg("params"), py::arg("dt") = 0.0, py::arg("t_burn") = -1.0,
        py::arg("t_sample") = 100.0, py::arg("sample_stride") = 10, py::arg("seed") = 1,
        py::arg("replicas") = 1, py::arg("bath_temperatures") = py::none());

  m.def("s_infinity", &s_infinity, py::arg("temp_left"), py::arg("temp_right"));
  m.def("inv_dirichlet_laplacian",
        [](const Eigen::VectorXd& g) { return inv_dirichlet_laplacian(field(g)).values; },
        py::arg("g"));
  m.def("ness_field_covariance",
        [](const Eigen::VectorXd& f, const Eigen::VectorXd& g, double tl, double tr) {
          const FieldCovariance c = ness_field_covariance(field(f), field(g), tl, tr);
          py::dict d;
          d["r_variance"] = c.r_variance;
          d["y_variance"] = c.y_variance;
          d["cross"] = c.cross;
          return d;
        },
        py::arg("f"), py::arg("g"), py::arg("temp_left"), py::arg("temp_right"));
  m.def("spde_simulate",
        [](double tl, double tr, const std::vector<Eigen::VectorXd>& tests, double gamma,
           double t_final, double t_burn, std::uint64_t seed, int sample_every) {
          if (tests.empty()) throw ConfigError("need at least one test function");
          SpdeConfig cfg;
          cfg.mesh = static_cast<int>(tests.front().size()) - 1;
          cfg.gamma = gamma;
          cfg.t_final = t_final;
          cfg.t_burn = t_burn;
          cfg.seed = seed;
          cfg.sample_every = sample_every;
          std::vector<GridField> fs;
          for (const auto& t : tests) fs.push_back(field(t));
          SpdeEstimates e;
          {
            py::gil_scoped_release release;
            e = spde_simulate(tl, tr, cfg, fs, fs);
          }
          auto pairs = [](const std::vector<EstimateWithError>& v) {
            std::vector<std::pair<double, double>> out;
            for (const auto& x : v) out.emplace_back(x.value, x.std_error);
            return out;
          };
          py::dict d;
          d["r_variance"] = pairs(e.r_variance);
          d["y_variance"] = pairs(e.y_variance);
          d["cross"] = pairs(e.cross);
          d["dt"] = e.dt;
          return d;
        },
        py::arg("temp_left"), py::arg("temp_right"), py::arg("test_functions"),
        py::arg("gamma") = 1.0, py::arg("t_final") = 50.0, py::arg("t_burn") = 1.0,
        py::arg("seed") = 1, py::arg("sample_every") = 10);

  m.def("hydro_evolve",
        [](int mesh, double gamma, double tl, double tr, const Eigen::VectorXd& u0,
           const Eigen::VectorXd& eps0, double t_final, double dt) {
          HydroState s = HydroState::stationary(mesh, gamma, tl, tr);
          if (u0.size() != mesh + 1 || eps0.size() != mesh + 1)
            throw ConfigError("initial fields need mesh + 1 nodes");
          s.u.values = u0;
          s.eps.values = eps0;
          const HydroState end = hydro_evolve(s, t_final, dt, 1 << 30).back();
          return py::make_tuple(end.u.values, end.eps.values);
        },
        py::arg("mesh"), py::arg("gamma"), py::arg("temp_left"), py::arg("temp_right"),
        py::arg("u0"), py::arg("eps0"), py::arg("t_final"), py::arg("dt"));
}
