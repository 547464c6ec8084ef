#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sympal/applications.hpp"
#include "sympal/degenerate.hpp"
#include "sympal/errors.hpp"
#include "sympal/json_io.hpp"
#include "sympal/linalg.hpp"
#include "sympal/simultaneous.hpp"
#include "sympal/williamson.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace sympal;

struct Options {
  std::string format = "json";
  std::string order = "asc";
  double tol_multiplier = 1.0;
  bool tol_set = false;
  double rank_tol = -1.0;
  double sym_tol = -1.0;
};

Tolerances make_tolerances(const Options& opt) {
  double mult = 1.0;
  if (const char* env = std::getenv("SYMPAL_TOL")) {
    try {
      mult = std::stod(env);
    } catch (...) {
      throw ParseError("SYMPAL_TOL is not a number");
    }
    if (!(mult > 0.0)) throw ParseError("SYMPAL_TOL must be positive");
  }
  if (opt.tol_set) mult = opt.tol_multiplier;  // flag wins over the env var
  Tolerances t = Tolerances{}.scaled(mult);
  if (opt.rank_tol > 0.0) t.rank_tol = opt.rank_tol;
  if (opt.sym_tol > 0.0) t.sym_tol = opt.sym_tol;
  return t;
}

Matrix read_matrix(const std::string& path) {
  if (path == "-") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(std::cin);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("stdin: ") + e.what());
    }
    return matrix_from_json(j);
  }
  return load_matrix(path);
}

double residual_symplectic(const Matrix& s) {
  const Matrix j = standard_symplectic_form(s.rows() / 2);
  return max_abs(transpose(s) * j * s - j);
}

double residual_diag(const Matrix& s, const Matrix& m, const std::vector<double>& spec) {
  const std::size_t n = s.rows() / 2;
  Matrix target(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    target(i, i) = spec[i];
    target(n + i, n + i) = spec[i];
  }
  return max_abs(transpose(s) * m * s - target);
}

void reverse_pairs(Matrix& s, std::vector<double>& spec) {
  const std::size_t n = spec.size();
  Matrix out(s.rows(), s.cols());
  std::vector<double> rspec(n);
  for (std::size_t j = 0; j < n; ++j) {
    rspec[j] = spec[n - 1 - j];
    out.set_column(j, s.column(n - 1 - j));
    out.set_column(n + j, s.column(2 * n - 1 - j));
  }
  s = std::move(out);
  spec = std::move(rspec);
}

json spectrum_json(const std::vector<double>& spec) {
  json out = json::array();
  for (double v : spec) out.push_back(v);
  return out;
}

void print_text(const json& j, std::ostream& os, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      const std::string name = prefix.empty() ? key : prefix + "." + key;
      if (value.is_object() || (value.is_array() && !value.empty() && value[0].is_array())) {
        print_text(value, os, name);
      } else if (value.is_array()) {
        os << name << ":";
        for (const auto& e : value) os << " " << e.dump();
        os << "\n";
      } else {
        os << name << ": " << value.dump() << "\n";
      }
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& row = j[i];
      os << prefix << "[" << i << "]:";
      if (row.is_array()) {
        for (const auto& e : row) os << " " << e.dump();
        os << "\n";
      } else {
        os << " " << row.dump() << "\n";
      }
    }
  }
}

void emit(const json& report, const Options& opt) {
  if (opt.format == "text") {
    print_text(report, std::cout, "");
  } else {
    std::cout << report.dump(2) << "\n";
  }
}

json region_capacity(const json& spec, const Tolerances& tol, double* out) {
  if (!spec.contains("region") || !spec["region"].is_object()) {
    throw ParseError("capacity: expected {\"region\": {...}}");
  }
  const auto& r = spec["region"];
  if (!r.contains("type") || !r["type"].is_string()) {
    throw ParseError("capacity: region needs a \"type\"");
  }
  const std::string type = r["type"].get<std::string>();
  json desc{{"type", type}};
  if (type == "ball") {
    if (!r.contains("radius") || !r["radius"].is_number()) {
      throw ParseError("capacity: ball needs a numeric \"radius\"");
    }
    const double radius = r["radius"].get<double>();
    desc["radius"] = radius;
    *out = capacity(PhaseSpaceRegion::ball(radius), tol);
  } else if (type == "cylinder") {
    if (!r.contains("radius") || !r["radius"].is_number() || !r.contains("axis") ||
        !r["axis"].is_number_unsigned()) {
      throw ParseError("capacity: cylinder needs \"axis\" and \"radius\"");
    }
    const double radius = r["radius"].get<double>();
    const std::size_t axis = r["axis"].get<std::size_t>();
    desc["axis"] = axis;
    desc["radius"] = radius;
    *out = capacity(PhaseSpaceRegion::cylinder(axis, radius), tol);
  } else if (type == "ellipsoid") {
    if (!r.contains("matrix")) throw ParseError("capacity: ellipsoid needs a \"matrix\"");
    *out = capacity(PhaseSpaceRegion::ellipsoid(matrix_from_json(r["matrix"])), tol);
  } else {
    throw ParseError("capacity: unknown region type \"" + type + "\"");
  }
  return desc;
}

std::vector<double> parse_vector_arg(const std::string& arg) {
  std::vector<double> out;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ParseError("--z0: \"" + item + "\" is not a number");
    }
  }
  if (out.empty()) throw ParseError("--z0: empty vector");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sympal: symplectic spectra, Williamson normal forms and friends"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  app.add_option("--order", opt.order, "Spectrum ordering")
      ->check(CLI::IsMember({"asc", "desc"}))
      ->capture_default_str();
  auto* tol_opt =
      app.add_option("--tol", opt.tol_multiplier, "Multiplier applied to all tolerance defaults");
  app.add_option("--rank-tol", opt.rank_tol, "Override the rank tolerance");
  app.add_option("--sym-tol", opt.sym_tol, "Override the symmetry tolerance");

  std::string path_a, path_b;
  std::vector<std::string> paths;
  double t_param = 0.5, s_param = 0.5, flow_t = 0.0;
  std::string z0_arg;

  auto* c_spectrum = app.add_subcommand("spectrum", "Symplectic eigenvalues of a PD matrix");
  c_spectrum->add_option("matrix", path_a, "Matrix JSON file (or - for stdin)")->required();

  auto* c_williamson = app.add_subcommand("williamson", "Williamson normal form of a PD matrix");
  c_williamson->add_option("matrix", path_a)->required();

  auto* c_degenerate =
      app.add_subcommand("degenerate", "Symplectic diagonalization of a PSD matrix with symplectic kernel");
  c_degenerate->add_option("matrix", path_a)->required();

  auto* c_hormander = app.add_subcommand("hormander", "Hoermander PSD normal form");
  c_hormander->add_option("matrix", path_a)->required();

  auto* c_simdiag = app.add_subcommand("simdiag", "Simultaneous diagonalization of a commuting pair");
  c_simdiag->add_option("matrix_a", path_a)->required();
  c_simdiag->add_option("matrix_b", path_b)->required();

  auto* c_family = app.add_subcommand("family", "Simultaneous diagonalization of a commuting family");
  c_family->add_option("matrices", paths, "Matrix JSON files")->required()->expected(-1);

  auto* c_mean = app.add_subcommand("mean", "t-geometric mean of two PD matrices");
  c_mean->add_option("matrix_a", path_a)->required();
  c_mean->add_option("matrix_b", path_b)->required();
  c_mean->add_option("--t", t_param, "Interpolation parameter in [0, 1]")->capture_default_str();

  auto* c_power = app.add_subcommand("power-check", "Commutator residual of matrix powers");
  c_power->add_option("matrix_a", path_a)->required();
  c_power->add_option("matrix_b", path_b)->required();
  c_power->add_option("--s", s_param, "Exponent")->capture_default_str();

  auto* c_flow = app.add_subcommand("flow", "Hamiltonian flow z(t) = e^{tJM} z0");
  c_flow->add_option("matrix", path_a)->required();
  c_flow->add_option("--z0", z0_arg, "Initial point, comma-separated")->required();
  c_flow->add_option("--t", flow_t, "Time")->required();

  auto* c_partition = app.add_subcommand("partition", "Partition function from a manifest");
  c_partition->add_option("manifest", path_a)->required();

  auto* c_capacity = app.add_subcommand("capacity", "Symplectic capacity of a phase-space region");
  c_capacity->add_option("region", path_a)->required();

  auto* c_constraints =
      app.add_subcommand("constraints", "Hoermander constraints between a PSD/PD pair");
  c_constraints->add_option("matrix_m", path_a)->required();
  c_constraints->add_option("matrix_mt", path_b)->required();

  CLI11_PARSE(app, argc, argv);
  opt.tol_set = tol_opt->count() > 0;

  try {
    const Tolerances tol = make_tolerances(opt);
    const bool desc = opt.order == "desc";
    json report;

    if (c_spectrum->parsed()) {
      const Matrix m = read_matrix(path_a);
      std::vector<double> spec = symplectic_spectrum(m, tol);
      if (desc) std::reverse(spec.begin(), spec.end());
      report["spectrum"] = spectrum_json(spec);
    } else if (c_williamson->parsed()) {
      const Matrix m = read_matrix(path_a);
      WilliamsonDecomposition wd = williamson_decompose(m, tol);
      if (desc) reverse_pairs(wd.s, wd.spectrum);
      report["spectrum"] = spectrum_json(wd.spectrum);
      report["S"] = matrix_to_json(wd.s);
      report["residual_symplectic"] = residual_symplectic(wd.s);
      report["residual_diag"] = residual_diag(wd.s, m, wd.spectrum);
    } else if (c_degenerate->parsed()) {
      const Matrix m = read_matrix(path_a);
      DegenerateDecomposition dd = degenerate_williamson(m, tol);
      if (desc) reverse_pairs(dd.s, dd.spectrum);
      report["spectrum"] = spectrum_json(dd.spectrum);
      report["k"] = dd.k;
      report["S"] = matrix_to_json(dd.s);
      report["residual_symplectic"] = residual_symplectic(dd.s);
      report["residual_diag"] = residual_diag(dd.s, m, dd.spectrum);
    } else if (c_hormander->parsed()) {
      const Matrix m = read_matrix(path_a);
      const HormanderPSDForm form = hormander_psd_normal_form(m, tol);
      report["k"] = form.k;
      report["l"] = form.l;
      report["mu"] = spectrum_json(form.mu);
      report["S"] = matrix_to_json(form.s);
      report["residual_symplectic"] = residual_symplectic(form.s);
      // Residual against the [[A_n, 0], [0, B_n]] block target.
      const std::size_t n = m.rows() / 2;
      Matrix target(2 * n, 2 * n);
      for (std::size_t i = 0; i < form.k; ++i) {
        target(i, i) = form.mu[i];
        target(n + i, n + i) = form.mu[i];
      }
      for (std::size_t i = 0; i < form.l; ++i) target(form.k + i, form.k + i) = 1.0;
      report["residual_block"] = max_abs(transpose(form.s) * m * form.s - target);
    } else if (c_simdiag->parsed()) {
      const Matrix a = read_matrix(path_a);
      const Matrix b = read_matrix(path_b);
      const auto pd = [&](const Matrix& m) {
        const EigenDecomposition eig = symmetric_eigen(m, tol);
        return eig.values.front() > tol.rank_tol * norm_scale(m);
      };
      const bool use_pd = pd(a) && pd(b);
      const SimDiagResult sim =
          use_pd ? simultaneous_williamson(a, b, tol) : simultaneous_williamson_psd(a, b, tol);
      report["variant"] = use_pd ? "pd" : "psd";
      report["spectra"] = {spectrum_json(sim.spectra[0]), spectrum_json(sim.spectra[1])};
      report["S"] = matrix_to_json(sim.s);
      report["residual_symplectic"] = residual_symplectic(sim.s);
      report["residual_diag"] = {residual_diag(sim.s, a, sim.spectra[0]),
                                 residual_diag(sim.s, b, sim.spectra[1])};
      report["commutator_residual"] = poisson_commutator_residual(a, b);
    } else if (c_family->parsed()) {
      std::vector<Matrix> forms;
      forms.reserve(paths.size());
      for (const auto& p : paths) forms.push_back(read_matrix(p));
      const SimDiagResult sim = family_diagonalize(forms, tol);
      json spectra = json::array();
      for (const auto& sp : sim.spectra) spectra.push_back(spectrum_json(sp));
      report["spectra"] = std::move(spectra);
      report["S"] = matrix_to_json(sim.s);
      report["residual_symplectic"] = residual_symplectic(sim.s);
      json diags = json::array(), comms = json::array();
      for (std::size_t i = 0; i < forms.size(); ++i) {
        diags.push_back(residual_diag(sim.s, forms[i], sim.spectra[i]));
        for (std::size_t j = i + 1; j < forms.size(); ++j) {
          comms.push_back({{"i", i},
                           {"j", j},
                           {"residual", poisson_commutator_residual(forms[i], forms[j])}});
        }
      }
      report["residual_diag"] = std::move(diags);
      report["commutator_residuals"] = std::move(comms);
    } else if (c_mean->parsed()) {
      const Matrix a = read_matrix(path_a);
      const Matrix b = read_matrix(path_b);
      const Matrix g = geometric_mean(a, b, t_param, tol);
      report["t"] = t_param;
      report["mean"] = matrix_to_json(g);
    } else if (c_power->parsed()) {
      const Matrix a = read_matrix(path_a);
      const Matrix b = read_matrix(path_b);
      report["s"] = s_param;
      report["residual"] = power_commutator_residual(a, b, s_param, tol);
    } else if (c_flow->parsed()) {
      const Matrix m = read_matrix(path_a);
      const std::vector<double> z0 = parse_vector_arg(z0_arg);
      const std::vector<double> zt = hamiltonian_flow(m, z0, flow_t, tol);
      const double h0 = dot(z0, m * z0);
      const double ht = dot(zt, m * zt);
      report["t"] = flow_t;
      report["z"] = spectrum_json(zt);
      report["energy_residual"] = std::abs(ht - h0) / std::max(1.0, std::abs(h0));
    } else if (c_partition->parsed()) {
      const json manifest = load_json(path_a);
      if (!manifest.contains("hamiltonians") || !manifest["hamiltonians"].is_array() ||
          manifest["hamiltonians"].empty()) {
        throw ParseError("partition: manifest needs a nonempty \"hamiltonians\" array");
      }
      for (const char* key : {"beta", "hbar"}) {
        if (!manifest.contains(key) || !manifest[key].is_number()) {
          throw ParseError(std::string("partition: manifest needs numeric \"") + key + "\"");
        }
      }
      const std::string mode = manifest.value("mode", std::string("noninteracting"));
      if (mode != "noninteracting" && mode != "interacting") {
        throw ParseError("partition: mode must be \"noninteracting\" or \"interacting\"");
      }
      const ThermoParams params(manifest["beta"].get<double>(), manifest["hbar"].get<double>());
      const std::size_t particles = manifest.value("particles", std::size_t{1});
      std::vector<QuadraticHamiltonian> hs;
      for (const auto& hj : manifest["hamiltonians"]) {
        Matrix m = matrix_from_json(hj);
        const std::size_t dim = m.rows();
        if (dim == 0 || dim % 2 != 0) {
          throw ParseError("partition: Hamiltonians must have even dimension");
        }
        if (mode == "noninteracting") {
          hs.emplace_back(std::move(m), 1, dim / 2);
        } else {
          if (dim % (2 * particles) != 0) {
            throw ParseError("partition: matrix dimension is not divisible by 2*particles");
          }
          hs.emplace_back(std::move(m), particles, dim / (2 * particles));
        }
      }
      const double z = mode == "noninteracting" ? partition_noninteracting(hs, params, tol)
                                                : partition_interacting(hs, params, tol);
      report["mode"] = mode;
      report["beta"] = params.beta;
      report["hbar"] = params.hbar;
      report["partition"] = z;
    } else if (c_capacity->parsed()) {
      const json spec = load_json(path_a);
      double value = 0.0;
      report["region"] = region_capacity(spec, tol, &value);
      report["capacity"] = value;
    } else if (c_constraints->parsed()) {
      const Matrix m = read_matrix(path_a);
      const Matrix mt = read_matrix(path_b);
      const ConstraintReport cr = hormander_constraints(m, mt, tol);
      report["k"] = cr.k;
      json chi = json::array();
      for (std::size_t idx : cr.chi_indices) chi.push_back(idx);
      report["chi_indices"] = std::move(chi);
      report["c"] = spectrum_json(cr.c);
      report["S"] = matrix_to_json(cr.s);
      report["residual_symplectic"] = residual_symplectic(cr.s);
    }

    emit(report, opt);
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    json err{{"error", e.what()}, {"residual", e.residual()}};
    std::cout << err.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
