// Command-line driver: parses a JSON problem description and dispatches to
// the library modules, writing CSV/SVG artifacts into the output directory.
// Exit codes: 0 success, 2 configuration or acceptance failure, 3 numerical
// failure (partial artifacts listed in manifest.json).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specgraph/artifacts.hpp"
#include "specgraph/config.hpp"
#include "specgraph/validation.hpp"

namespace {

using namespace specgraph;

// Every artifact goes through one sink so a failure can report exactly what
// was already flushed.
class ArtifactSink {
 public:
  explicit ArtifactSink(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void put(const std::string& name, const std::string& content) {
    std::string path = (std::filesystem::path(dir_) / name).string();
    write_text_file(path, content);
    written_.push_back(path);
    std::cout << "wrote " << path << "\n";
  }

  void manifest(const std::string& error) const {
    nlohmann::json j;
    j["error"] = error;
    j["artifacts"] = written_;
    std::string path =
        (std::filesystem::path(dir_) / "manifest.json").string();
    try {
      write_text_file(path, j.dump(2) + "\n");
      std::cerr << "partial artifacts listed in " << path << "\n";
    } catch (const std::exception&) {
      // nothing usable to report
    }
  }

 private:
  std::string dir_;
  std::vector<std::string> written_;
};

struct Cmd {
  RunConfig cfg;
  ArtifactSink sink;
  BivariatePotential pot;
  ParameterDomain dom;

  explicit Cmd(const RunConfig& c)
      : cfg(c),
        sink(c.out_dir),
        pot(config_potential(c)),
        dom(config_domain(c, pot)) {}

  double one_k(const char* who) const {
    if (cfg.k.empty())
      throw ValidationError(std::string(who) + " needs at least one k value");
    return cfg.k.front();
  }

  ProblemInstance problem(double k) const {
    return {pot, cfg.a, cfg.b, k, cfg.r_trunc};
  }

  std::pair<Cx, Cx> region() const {
    if (cfg.region) return *cfg.region;
    return {cfg.dom_lo, cfg.dom_hi};
  }

  // ------------------------------------------------------------- commands
  void graph(Cx lambda) {
    TurningPointSet tps = turning_points(pot, lambda, cfg.eps_tp);
    StokesGraph g = trace_graph(pot, lambda, tps, config_trace(cfg));
    sink.put("graph.csv", csv_graph(g));
    sink.put("graph.svg", svg_graph(g));
  }

  std::vector<SpectralCurve> all_families() {
    RootTracker tracker(pot, dom, cfg.eps_tp);
    CurveOptions opt = config_curves(cfg);
    std::vector<SpectralCurve> out;
    for (auto& c : singular_curves(tracker, opt)) out.push_back(std::move(c));
    if (cfg.a.finite)
      for (auto& c : critical_curves(tracker, cfg.a, BoundarySide::A, opt))
        out.push_back(std::move(c));
    if (cfg.b.finite)
      for (auto& c : critical_curves(tracker, cfg.b, BoundarySide::B, opt))
        out.push_back(std::move(c));
    for (auto& c : out) essential_filter(tracker, c, cfg.a, cfg.b, opt);
    if (cfg.a.finite && cfg.b.finite)
      for (auto& c : balanced_curves(tracker, cfg.a, cfg.b, opt))
        out.push_back(std::move(c));
    return out;
  }

  void curves() {
    auto fams = all_families();
    sink.put("curves.csv", csv_curves(fams));
    sink.put("curves.svg", svg_curves(fams, cfg.dom_lo, cfg.dom_hi));
  }

  LimitSpectralGraph spectral_set(bool emit) {
    LimitSpectralGraph T =
        assemble_T(pot, dom, cfg.a, cfg.b, config_curves(cfg));
    if (emit) {
      sink.put("spectral_set.csv", csv_curves(T.curves));
      sink.put("spectral_set.svg",
               svg_curves(T.curves, cfg.dom_lo, cfg.dom_hi, {}, {}, true));
    }
    return T;
  }

  std::vector<QuantizeBatch> quantize(const LimitSpectralGraph& T, double k) {
    RootTracker tracker(pot, dom, cfg.eps_tp);
    QuantizeOptions opt = config_quantize(cfg);
    std::vector<QuantizeBatch> batches;
    for (std::size_t i = 0; i < T.curves.size(); ++i) {
      QuantizeBatch b;
      b.curve_id = int(i);
      b.kind = T.curves[i].kind;
      b.estimates = quantize_along_curve(tracker, T.curves[i], cfg.a, cfg.b,
                                         k, std::nullopt, opt);
      batches.push_back(std::move(b));
    }
    return batches;
  }

  std::vector<OracleEigenvalue> oracle(double k) {
    auto [lo, hi] = region();
    return find_eigenvalues(problem(k), lo, hi, cfg.cell_n,
                            config_oracle(cfg));
  }

  void plot() {
    double k = one_k("plot");
    LimitSpectralGraph T = spectral_set(false);
    std::vector<OracleEigenvalue> eigs = oracle(k);
    std::vector<EigenvalueEstimate> ests;
    for (auto& b : quantize(T, k))
      for (auto& e : b.estimates) ests.push_back(e);
    auto [lo, hi] = region();
    sink.put("overlay.svg", svg_curves(T.curves, lo, hi, eigs, ests, true));
  }
};

int validate_command() {
  AcceptanceSuite suite;
  bool all = true;
  suite.run_all([&](const CriterionResult& r) {
    all = all && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": "
              << r.name << " -- " << r.detail << std::endl;
  });
  std::cout << (all ? "acceptance: all criteria passed"
                    : "acceptance: some criteria FAILED")
            << std::endl;
  return all ? 0 : 2;
}

Cx parse_lambda(const std::string& text) {
  std::istringstream in(text);
  double re = 0, im = 0;
  char comma = 0;
  if (!(in >> re >> comma >> im) || comma != ',' || !(in >> std::ws).eof())
    throw ValidationError("--lambda expects RE,IM");
  return {re, im};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical eigenvalue distribution toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, lambda_text;
  double k_override = 0;
  int grid_override = 0, cells_override = 0;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* o = sub->add_option("--config", config_path, "JSON problem file");
    if (need_config) o->required();
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--k", k_override, "replace the configured k list");
    sub->add_option("--grid", grid_override, "curve-tracing grid override");
    sub->add_option("--cells", cells_override, "oracle cell grid override");
  };

  CLI::App* c_graph = app.add_subcommand("graph", "Stokes graph at one lambda");
  c_graph->add_option("--lambda", lambda_text, "complex parameter RE,IM")
      ->required();
  add_common(c_graph, true);
  CLI::App* c_curves =
      app.add_subcommand("curves", "all curve families with essential flags");
  add_common(c_curves, true);
  CLI::App* c_spectral =
      app.add_subcommand("spectral-set", "limit spectral graph T");
  add_common(c_spectral, true);
  CLI::App* c_quant =
      app.add_subcommand("quantize", "eigenvalue estimates along T");
  add_common(c_quant, true);
  CLI::App* c_oracle =
      app.add_subcommand("oracle", "direct eigenvalues in the region");
  add_common(c_oracle, true);
  CLI::App* c_plot =
      app.add_subcommand("plot", "overlay of T, estimates, and eigenvalues");
  add_common(c_plot, true);
  CLI::App* c_validate =
      app.add_subcommand("validate", "run the acceptance suite");
  add_common(c_validate, false);

  CLI11_PARSE(app, argc, argv);

  if (c_validate->parsed()) return validate_command();

  std::optional<Cmd> cmd;
  try {
    std::ifstream in(config_path);
    if (!in) throw ValidationError("cannot open config file " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse_config(buf.str());
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (k_override > 0) cfg.k = {k_override};
    if (grid_override > 0) cfg.grid_n = grid_override;
    if (cells_override > 0) cfg.cell_n = cells_override;
    cmd.emplace(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (c_graph->parsed()) {
      cmd->graph(parse_lambda(lambda_text));
    } else if (c_curves->parsed()) {
      cmd->curves();
    } else if (c_spectral->parsed()) {
      cmd->spectral_set(true);
    } else if (c_quant->parsed()) {
      if (cmd->cfg.k.empty())
        throw ValidationError("quantize needs at least one k value");
      LimitSpectralGraph T = cmd->spectral_set(false);
      std::vector<QuantizeBatch> batches;
      for (double k : cmd->cfg.k)
        for (auto& b : cmd->quantize(T, k)) batches.push_back(std::move(b));
      cmd->sink.put("quantize.csv", csv_quantize(batches));
    } else if (c_oracle->parsed()) {
      if (cmd->cfg.k.empty())
        throw ValidationError("oracle needs at least one k value");
      std::vector<OracleEigenvalue> all;
      for (double k : cmd->cfg.k)
        for (auto& e : cmd->oracle(k)) all.push_back(e);
      cmd->sink.put("oracle.csv", csv_oracle(all));
    } else if (c_plot->parsed()) {
      cmd->plot();
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    cmd->sink.manifest(e.what());
    return 3;
  }
  return 0;
}
