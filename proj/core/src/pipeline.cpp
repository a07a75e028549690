#include "cminet/pipeline.hpp"

#include "cminet/cclasso.hpp"
#include "cminet/cmimn.hpp"
#include "cminet/correlation.hpp"
#include "cminet/errors.hpp"
#include "cminet/io.hpp"
#include "cminet/parallel.hpp"
#include "cminet/render.hpp"
#include "cminet/sparcc.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cminet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json to_json(const ParamValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

json params_json(const ParamRecord& record) {
  json out = json::object();
  for (const auto& [key, value] : record) out[key] = to_json(value);
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(number_or_null(v));
  return out;
}

MethodResult correlation_result(Method m, const CountTable& table, const CorrelationParams& p) {
  const CorrelationMethod estimator = m == Method::pearson    ? CorrelationMethod::pearson
                                      : m == Method::spearman ? CorrelationMethod::spearman
                                                              : CorrelationMethod::bicor;
  Eigen::MatrixXd data;
  switch (p.input) {
    case CorrelationInput::clr:
      data = clr_transform(to_composition(table, p.pseudo)).values;
      break;
    case CorrelationInput::proportions: {
      data = table.values();
      for (Eigen::Index i = 0; i < data.rows(); ++i) data.row(i) /= data.row(i).sum();
      break;
    }
    case CorrelationInput::counts:
      data = table.values();
      break;
  }
  MethodResult out;
  out.method = m;
  out.params = p.record();
  out.taxa = table.taxa();
  out.weights = correlation_matrix(data, estimator, table.taxa()).values;
  return out;
}

std::string method_file(Method m, const char* suffix) {
  return std::string(to_string(m)) + suffix;
}

}  // namespace

std::uint64_t method_seed(std::uint64_t master, Method m) {
  return derive_seed(master, static_cast<std::uint64_t>(m));
}

PreparedTable prepare_table(const CountTable& raw, double min_prevalence, double min_total) {
  PreparedTable out{raw, {}, {}};

  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < raw.n_samples(); ++i) {
    if (raw.values().row(i).sum() > 0.0) {
      rows.push_back(i);
    } else {
      out.dropped_samples.push_back(raw.samples()[i]);
    }
  }
  CountTable table = raw.select_samples(rows);

  const CountTable filtered = filter_taxa(table, min_prevalence, min_total);
  for (const auto& t : table.taxa()) {
    if (std::find(filtered.taxa().begin(), filtered.taxa().end(), t) == filtered.taxa().end()) {
      out.dropped_taxa.push_back(t);
    }
  }
  table = filtered;

  if (table.n_samples() >= 2) {
    const Eigen::MatrixXd clr = clr_transform(to_composition(table, 0.5)).values;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < table.n_taxa(); ++j) {
      const auto col = table.values().col(j);
      const bool raw_constant = (col.array() == col(0)).all();
      const auto c = clr.col(j);
      const double spread = c.maxCoeff() - c.minCoeff();
      if (raw_constant || spread <= 1e-12 * (1.0 + c.cwiseAbs().maxCoeff())) {
        out.dropped_taxa.push_back(table.taxa()[j]);
      } else {
        keep.push_back(j);
      }
    }
    if (keep.empty()) throw FilterError("every taxon is constant");
    table = table.select_taxa(keep);
  }

  if (table.n_samples() < 4) throw FilterError("fewer than 4 samples with nonzero totals");
  if (table.n_taxa() < 3) throw FilterError("fewer than 3 non-degenerate taxa remain");
  out.table = std::move(table);
  return out;
}

PreparedTable prepare_table(const PipelineConfig& cfg) {
  return prepare_table(load_count_table(cfg.input_path(), cfg.orientation()),
                       cfg.min_prevalence(), cfg.min_total());
}

MethodResult run_method(Method m, const CountTable& table, const PipelineConfig& cfg,
                        std::uint64_t seed, int workers) {
  switch (m) {
    case Method::pearson:
    case Method::spearman:
    case Method::bicor:
      return correlation_result(m, table, cfg.correlation());
    case Method::sparcc: {
      auto p = cfg.sparcc();
      p.workers = workers;
      MethodResult out;
      out.method = m;
      out.params = sparcc_record(p);
      out.taxa = table.taxa();
      out.weights = sparcc_fit(table, p, seed).values;
      return out;
    }
    case Method::spieceasi_mb:
      return spieceasi_fit(table, cfg.spieceasi(SpiecEasiMode::mb), seed, workers);
    case Method::spieceasi_glasso:
      return spieceasi_fit(table, cfg.spieceasi(SpiecEasiMode::glasso), seed, workers);
    case Method::spring:
      return spring_fit(table, cfg.spring(), seed, workers);
    case Method::gcoda:
      return gcoda_fit(table, cfg.gcoda(), workers);
    case Method::cmimn:
      return cmimn_fit(table, cfg.cmimn());
    case Method::cclasso: {
      const auto p = cfg.cclasso();
      auto fit = cclasso_fit(table, p, seed, workers);
      MethodResult out;
      out.method = m;
      out.params = p.record();
      out.taxa = table.taxa();
      out.weights = std::move(fit.correlation.values);
      out.pvalues = std::move(fit.pvalues);
      out.selection.lambda = fit.selected_lambda;
      for (const auto& [lambda, loss] : fit.cv_trace) {
        out.selection.lambda_path.push_back(lambda);
        out.selection.criterion.push_back(loss);
      }
      if (!fit.converged) out.selection.notes.emplace_back("final fit reached the iteration cap");
      if (fit.pseudo_applied && !p.counts) {
        out.selection.notes.emplace_back("zeros present: pseudo-count applied before closure");
      }
      return out;
    }
  }
  throw ConfigError("unknown method");
}

int default_render_threshold(int method_count) { return method_count / 2; }

void write_renderings(const WeightedConsensus& c, const fs::path& dir, std::uint64_t seed,
                      std::optional<int> threshold) {
  const int t = threshold.value_or(default_render_threshold(c.method_count()));
  write_text(dir / "network.svg", render_threshold_panel(c, t, seed));
  fs::create_directories(dir / "threshold_panels");
  for (int k = 0; k < c.method_count(); ++k) {
    write_text(dir / "threshold_panels" / ("t_" + std::to_string(k) + ".svg"),
               render_threshold_panel(c, k, seed));
  }
  write_text(dir / "hamming_heatmap.svg", render_hamming_heatmap(hamming_matrix(c.networks), c.methods));
}

RunOutcome run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunOutcome outcome{prepare_table(cfg), {}, std::nullopt, {}, RunStatus::complete};
  const CountTable& table = outcome.prepared.table;
  for (const auto& s : outcome.prepared.dropped_samples) {
    outcome.warnings.push_back("dropped sample '" + s + "' with zero total");
  }
  for (const auto& t : outcome.prepared.dropped_taxa) {
    outcome.warnings.push_back("dropped taxon '" + t + "' (filtered or constant)");
  }
  for (const auto& w : outcome.warnings) log << "warning: " << w << '\n';

  const fs::path dir = cfg.output_dir();
  fs::create_directories(dir / "methods");

  for (Method m : cfg.methods()) {
    MethodRun run;
    run.method = m;
    run.rule = cfg.rule(m);
    const auto start = std::chrono::steady_clock::now();
    try {
      run.result = run_method(m, table, cfg, method_seed(cfg.seed(), m), cfg.jobs());
      run.network = binarize(*run.result, run.rule);
      run.ok = true;
    } catch (const Error& e) {
      run.error = e.what();
      run.result.reset();
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!run.ok) {
      const std::string msg = "method " + std::string(to_string(m)) + " failed and was dropped "
                              "from the consensus: " + run.error;
      outcome.warnings.push_back(msg);
      log << "WARNING: " << msg << '\n';
    }
    outcome.runs.push_back(std::move(run));
  }

  std::vector<BinaryNetwork> nets;
  std::vector<std::string> names;
  for (const auto& run : outcome.runs) {
    if (!run.ok) continue;
    const std::string name(to_string(run.method));
    write_labelled_matrix(dir / "methods" / method_file(run.method, "_adjacency.tsv"), table.taxa(),
                          run.network->adjacency());
    if (run.result->weights) {
      write_labelled_matrix(dir / "methods" / method_file(run.method, "_weights.tsv"),
                            table.taxa(), *run.result->weights);
    }
    if (run.result->pvalues) {
      write_labelled_matrix(dir / "methods" / method_file(run.method, "_pvalues.tsv"),
                            table.taxa(), *run.result->pvalues);
    }
    nets.push_back(*run.network);
    names.push_back(name);
  }

  const bool any_failed = nets.size() != outcome.runs.size();
  if (nets.size() >= 2) {
    outcome.consensus = build_consensus(nets, names);
    const auto& c = *outcome.consensus;
    write_labelled_matrix(dir / "consensus_matrix.tsv", c.taxa, c.weights);
    write_edge_list(dir / "edge_list.tsv", edge_list(c));
    write_sweep_table(dir / "threshold_sweep.tsv", threshold_sweep(c));
    write_labelled_matrix(dir / "hamming_matrix.tsv", c.methods, hamming_matrix(c.networks));
    auto t = cfg.render_threshold();
    if (t && *t > c.method_count()) {
      outcome.warnings.push_back("render.threshold exceeds the method count; using the default");
      log << "warning: " << outcome.warnings.back() << '\n';
      t.reset();
    }
    write_renderings(c, dir, cfg.seed(), t);
    outcome.status = any_failed ? RunStatus::partial : RunStatus::complete;
  } else {
    outcome.status = RunStatus::no_consensus;
    outcome.warnings.push_back("fewer than two methods succeeded; no consensus was built");
    log << "ERROR: " << outcome.warnings.back() << '\n';
  }

  json manifest;
  manifest["config"] = cfg.entries();
  manifest["seed"] = cfg.seed();
  manifest["jobs"] = cfg.jobs();
  manifest["status"] = outcome.status == RunStatus::complete  ? "complete"
                       : outcome.status == RunStatus::partial ? "partial"
                                                              : "no_consensus";
  manifest["input"] = {{"path", cfg.input_path().string()},
                       {"n_samples", table.n_samples()},
                       {"n_taxa", table.n_taxa()},
                       {"taxa", table.taxa()},
                       {"dropped_samples", outcome.prepared.dropped_samples},
                       {"dropped_taxa", outcome.prepared.dropped_taxa}};
  manifest["warnings"] = outcome.warnings;
  manifest["consensus_methods"] = names;
  if (outcome.consensus) {
    manifest["render_threshold"] =
        cfg.render_threshold().value_or(default_render_threshold(outcome.consensus->method_count()));
  }
  json methods = json::object();
  for (const auto& run : outcome.runs) {
    json entry;
    entry["status"] = run.ok ? "ok" : "failed";
    entry["seconds"] = run.seconds;
    entry["seed"] = method_seed(cfg.seed(), run.method);
    entry["binarization"] = run.rule.describe();
    if (!run.ok) entry["error"] = run.error;
    if (run.result) {
      const auto& r = *run.result;
      entry["params"] = params_json(r.params);
      json sel;
      sel["lambda"] = r.selection.lambda ? number_or_null(*r.selection.lambda) : json(nullptr);
      sel["lambda_path"] = numbers(r.selection.lambda_path);
      sel["stability"] = numbers(r.selection.stability);
      sel["criterion"] = numbers(r.selection.criterion);
      sel["flagged"] = r.selection.flagged;
      sel["notes"] = r.selection.notes;
      entry["selection"] = sel;
    }
    if (run.network) entry["edges"] = run.network->edge_count();
    methods[std::string(to_string(run.method))] = entry;
  }
  manifest["methods"] = methods;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return outcome;
}

StoredRun load_run(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw LoadError("no manifest.json in '" + dir.string() + "'");
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed manifest: ") + e.what());
  }
  StoredRun out;
  std::vector<BinaryNetwork> nets;
  std::vector<std::string> names;
  try {
    out.seed = manifest.at("seed").get<std::uint64_t>();
    if (manifest.contains("render_threshold")) {
      out.render_threshold = manifest["render_threshold"].get<int>();
    }
    names = manifest.at("consensus_methods").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed manifest: ") + e.what());
  }
  if (names.size() < 2) throw LoadError("the stored run has no consensus");
  for (const auto& name : names) {
    auto [labels, adj] = read_labelled_int_matrix(dir / "methods" / (name + "_adjacency.tsv"));
    try {
      nets.emplace_back(std::move(adj), std::move(labels), name);
    } catch (const ConsensusError& e) {
      throw LoadError("adjacency of " + name + " is invalid: " + e.what());
    }
  }
  out.consensus = build_consensus(std::move(nets), std::move(names));
  return out;
}

}  // namespace cminet
