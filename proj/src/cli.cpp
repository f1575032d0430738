#include "slnlap/cli.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slnlap/asymptotic.hpp"
#include "slnlap/errors.hpp"
#include "slnlap/inversion.hpp"
#include "slnlap/minimiser.hpp"
#include "slnlap/model.hpp"
#include "slnlap/oracle.hpp"
#include "slnlap/transform.hpp"

namespace slnlap::cli {

namespace {

int pool_threads(int item_count) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* env = std::getenv("SLN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) threads = std::min(threads, cap);
  }
  return std::min(threads, item_count);
}

// Fan out independent evaluations; results are slotted by index so report
// order never depends on completion order.
void parallel_indexed(int count, const std::function<void(int)>& work) {
  const int threads = pool_threads(count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_to_csv(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    return format_sci(std::get<double>(cell));
  }
  if (std::holds_alternative<std::int64_t>(cell)) {
    return std::to_string(std::get<std::int64_t>(cell));
  }
  return csv_quote(std::get<std::string>(cell));
}

nlohmann::ordered_json cell_to_json(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    const double v = std::get<double>(cell);
    if (std::isfinite(v)) return v;
    return nullptr;  // JSON has no inf/nan
  }
  if (std::holds_alternative<std::int64_t>(cell)) {
    return std::get<std::int64_t>(cell);
  }
  return std::get<std::string>(cell);
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

struct TableLayout {
  std::vector<std::string> row_labels;
  std::vector<double> columns;
};

void write_output(const RunConfig& cfg, const std::string& text,
                  std::ostream& out) {
  if (!cfg.output_path) {
    out << text;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(*cfg.output_path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string());
    f << text;
    if (!f.good()) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("rename failed: " + ec.message());
}

Row transform_row(const EstimateWithError& est, std::uint64_t seed) {
  return Row{
      {"theta", est.theta},
      {"value", est.value},
      {"log_value", est.log_value},
      {"std_error", est.std_error},
      {"method", to_string(est.method)},
      {"reps", static_cast<std::int64_t>(est.reps)},
      {"seed", static_cast<std::int64_t>(seed)},
  };
}

// The CSV schemas are pinned; the model's optional name travels in the
// JSON reports only.
void maybe_add_model_name(Row& row, const RunConfig& cfg,
                          const LognormalModel& model) {
  if (cfg.output_format == ReportFormat::json && !model.name.empty()) {
    row.push_back({"model", model.name});
  }
}

int cmd_minimise(const RunConfig& cfg, const LognormalModel& model,
                 std::ostream& out) {
  std::vector<Row> rows(cfg.theta_list.size());
  parallel_indexed(static_cast<int>(cfg.theta_list.size()), [&](int i) {
    const MinimiserResult r = minimise_h(model, cfg.theta_list[i]);
    std::string xs;
    for (int d = 0; d < model.dim; ++d) {
      if (d) xs += ' ';
      xs += format_sci(r.x_star[d]);
    }
    const char* method = r.method == MinimiseMethod::newton ? "newton"
                         : r.method == MinimiseMethod::hybrid ? "hybrid"
                                                              : "fixed_point";
    rows[i] = Row{
        {"theta", cfg.theta_list[i]},
        {"x_star", xs},
        {"residual_inf", r.residual_inf},
        {"iterations", static_cast<std::int64_t>(r.iterations)},
        {"method", std::string(method)},
    };
    maybe_add_model_name(rows[i], cfg, model);
  });
  write_output(cfg, emit_report(rows, cfg.output_format), out);
  return 0;
}

int cmd_asymptotic(const RunConfig& cfg, const LognormalModel& model,
                   std::ostream& out) {
  const AsymptoticExpansion ex = expand(model);
  const Vector cm = ex.c - model.mu;
  const Matrix resid = model.precision * ex.beta;
  const Vector resid_cm = model.precision * cm;

  if (cfg.output_format == ReportFormat::json) {
    nlohmann::ordered_json j;
    j["beta"] = nlohmann::ordered_json::array();
    for (int i = 0; i < model.dim; ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int k = 0; k < ex.beta.cols(); ++k) row.push_back(ex.beta(i, k));
      j["beta"].push_back(row);
    }
    j["c"] = std::vector<double>(ex.c.data(), ex.c.data() + model.dim);
    j["c_minus_mu"] = std::vector<double>(cm.data(), cm.data() + model.dim);
    j["plus_set"] = ex.plus_set;
    j["minus_set"] = ex.minus_set;
    j["minus1_set"] = ex.minus1_set;
    j["star1_set"] = ex.star1_set;
    j["k_index"] = ex.k_index;
    write_output(cfg, j.dump(2) + "\n", out);
    return 0;
  }

  std::ostringstream os;
  const auto emit_matrix = [&](const char* title, const Matrix& M,
                               const Vector& extra) {
    os << title << "\n";
    for (int i = 0; i < M.rows(); ++i) {
      for (int k = 0; k < M.cols(); ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %12.6f", M(i, k));
        os << buf;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "  | %12.6f", extra[i]);
      os << buf << "\n";
    }
  };
  emit_matrix("(beta | c - mu)", ex.beta, cm);
  emit_matrix("D (beta | c - mu)", resid, resid_cm);
  write_output(cfg, os.str(), out);
  return 0;
}

int cmd_transform(const RunConfig& cfg, const LognormalModel& model,
                  std::ostream& out) {
  const LaplaceMethod method = laplace_method_from_string(cfg.method);
  std::vector<Row> rows(cfg.theta_list.size());
  parallel_indexed(static_cast<int>(cfg.theta_list.size()), [&](int i) {
    const EstimateWithError est =
        laplace(model, cfg.theta_list[i], method, cfg.reps, cfg.seed);
    rows[i] = transform_row(est, cfg.seed);
    maybe_add_model_name(rows[i], cfg, model);
  });
  write_output(cfg, emit_report(rows, cfg.output_format), out);
  return 0;
}

int cmd_density(const RunConfig& cfg, const LognormalModel& model,
                std::ostream& out) {
  const DensityMethod method = density_method_from_string(cfg.method);
  std::vector<Row> rows(cfg.x_list.size());
  parallel_indexed(static_cast<int>(cfg.x_list.size()), [&](int i) {
    const double est = density(model, cfg.x_list[i], method, cfg.gs_terms,
                               cfg.reps, cfg.seed);
    rows[i] = Row{
        {"x", cfg.x_list[i]},
        {"estimate", est},
        {"method", to_string(method)},
        {"gs_terms", static_cast<std::int64_t>(cfg.gs_terms)},
        {"reps", static_cast<std::int64_t>(cfg.reps)},
        {"seed", static_cast<std::int64_t>(cfg.seed)},
    };
    maybe_add_model_name(rows[i], cfg, model);
  });
  write_output(cfg, emit_report(rows, cfg.output_format), out);
  return 0;
}

int cmd_oracle(const RunConfig& cfg, const LognormalModel& model,
               std::ostream& out) {
  if (!cfg.theta_list.empty() && !cfg.x_list.empty()) {
    throw UsageError("oracle takes --theta or --x, not both");
  }
  if (cfg.theta_list.empty() && cfg.x_list.empty()) {
    throw UsageError("oracle requires --theta or --x");
  }
  std::vector<Row> rows;
  if (!cfg.theta_list.empty()) {
    rows.resize(cfg.theta_list.size());
    parallel_indexed(static_cast<int>(cfg.theta_list.size()), [&](int i) {
      const double v = laplace_quadrature(model, cfg.theta_list[i]);
      rows[i] = Row{
          {"theta", cfg.theta_list[i]},
          {"value", v},
          {"log_value", std::log(v)},
          {"std_error", 0.0},
          {"method", std::string("oracle")},
          {"reps", static_cast<std::int64_t>(0)},
          {"seed", static_cast<std::int64_t>(cfg.seed)},
      };
      maybe_add_model_name(rows[i], cfg, model);
    });
  } else {
    rows.resize(cfg.x_list.size());
    parallel_indexed(static_cast<int>(cfg.x_list.size()), [&](int i) {
      const double v = density_convolution(model, cfg.x_list[i]);
      rows[i] = Row{
          {"x", cfg.x_list[i]},
          {"estimate", v},
          {"method", std::string("oracle")},
          {"gs_terms", static_cast<std::int64_t>(0)},
          {"reps", static_cast<std::int64_t>(0)},
          {"seed", static_cast<std::int64_t>(cfg.seed)},
      };
      maybe_add_model_name(rows[i], cfg, model);
    });
  }
  write_output(cfg, emit_report(rows, cfg.output_format), out);
  return 0;
}

int cmd_table1(const RunConfig& cfg, const LognormalModel& model,
               std::ostream& out) {
  const std::vector<double> thetas{100, 2500, 5000, 7500, 10000};
  const std::vector<LaplaceMethod> methods{
      LaplaceMethod::tilde, LaplaceMethod::cmc, LaplaceMethod::is,
      LaplaceMethod::qmc};

  std::vector<double> oracle(thetas.size());
  Matrix rel(methods.size(), thetas.size());
  parallel_indexed(static_cast<int>(thetas.size()), [&](int i) {
    oracle[i] = laplace_quadrature(model, thetas[i]);
    for (size_t m = 0; m < methods.size(); ++m) {
      const EstimateWithError est =
          laplace(model, thetas[i], methods[m], cfg.reps, cfg.seed);
      rel(static_cast<Eigen::Index>(m), i) = (est.value - oracle[i]) / oracle[i];
    }
  });

  std::vector<Row> rows;
  for (size_t m = 0; m < methods.size(); ++m) {
    Row row{{"method", to_string(methods[m])}};
    for (size_t i = 0; i < thetas.size(); ++i) {
      char key[32];
      std::snprintf(key, sizeof key, "%g", thetas[i]);
      row.push_back({key, rel(static_cast<Eigen::Index>(m),
                              static_cast<Eigen::Index>(i))});
    }
    rows.push_back(std::move(row));
  }
  write_output(cfg, emit_report(rows, cfg.output_format), out);
  return 0;
}

int cmd_table2(const RunConfig& cfg, const LognormalModel& model,
               std::ostream& out) {
  const std::vector<double> xs{0.01, 1.0, 1.5, 2.0, 3.0};
  const std::vector<DensityMethod> methods{
      DensityMethod::cond, DensityMethod::tilde, DensityMethod::is,
      DensityMethod::qmc};

  Matrix rel(methods.size(), xs.size());
  parallel_indexed(static_cast<int>(xs.size()), [&](int i) {
    const double oracle = density_convolution(model, xs[i]);
    for (size_t m = 0; m < methods.size(); ++m) {
      const double est = density(model, xs[i], methods[m], cfg.gs_terms,
                                 cfg.reps, cfg.seed);
      rel(static_cast<Eigen::Index>(m), i) = (est - oracle) / oracle;
    }
  });

  std::vector<Row> rows;
  for (size_t m = 0; m < methods.size(); ++m) {
    Row row{{"method", to_string(methods[m])}};
    for (size_t i = 0; i < xs.size(); ++i) {
      char key[32];
      std::snprintf(key, sizeof key, "%g", xs[i]);
      row.push_back({key, rel(static_cast<Eigen::Index>(m),
                              static_cast<Eigen::Index>(i))});
    }
    rows.push_back(std::move(row));
  }
  write_output(cfg, emit_report(rows, cfg.output_format), out);
  return 0;
}

}  // namespace

std::string format_sci(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  // "3.360000e-04" -> "3.360000e-4": bare decimal exponent.
  std::string s(buf);
  const auto epos = s.find('e');
  const long exp10 = std::strtol(s.c_str() + epos + 1, nullptr, 10);
  return s.substr(0, epos + 1) + std::to_string(exp10);
}

std::string emit_report(const std::vector<Row>& rows, ReportFormat format,
                        const std::vector<std::string>& columns) {
  if (format == ReportFormat::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Row& row : rows) {
      nlohmann::ordered_json obj;
      for (const auto& [key, cell] : row) obj[key] = cell_to_json(cell);
      arr.push_back(std::move(obj));
    }
    return rows.empty() ? "[]\n" : arr.dump(2) + "\n";
  }
  std::ostringstream os;
  if (rows.empty()) {
    for (size_t k = 0; k < columns.size(); ++k) {
      if (k) os << ',';
      os << csv_quote(columns[k]);
    }
    if (!columns.empty()) os << '\n';
    return os.str();
  }
  for (size_t k = 0; k < rows[0].size(); ++k) {
    if (k) os << ',';
    os << csv_quote(rows[0][k].first);
  }
  os << '\n';
  for (const Row& row : rows) {
    for (size_t k = 0; k < row.size(); ++k) {
      if (k) os << ',';
      os << cell_to_csv(row[k].second);
    }
    os << '\n';
  }
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Laplace transform and density of a sum of dependent "
               "lognormals via saddlepoint factorisation"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string theta_text, x_text, format_text = "csv";
  std::string output_path;

  const auto add_common = [&](CLI::App* sub, bool wants_theta, bool wants_x) {
    sub->add_option("--model", cfg.model_path, "model JSON file")->required();
    if (wants_theta) sub->add_option("--theta", theta_text, "theta list");
    if (wants_x) sub->add_option("--x", x_text, "x list");
    sub->add_option("--method", cfg.method, "estimator");
    sub->add_option("--reps", cfg.reps, "Monte Carlo replications");
    sub->add_option("--seed", cfg.seed, "RNG seed (default 42)");
    sub->add_option("--gs-terms", cfg.gs_terms, "Gaver-Stehfest term count");
    sub->add_option("--format", format_text, "csv|json");
    sub->add_option("--output", output_path, "write report to file");
  };

  add_common(app.add_subcommand("minimise", "solve for the minimiser"),
             true, false);
  add_common(app.add_subcommand("asymptotic", "asymptotic expansion tables"),
             false, false);
  add_common(app.add_subcommand("transform", "Laplace transform estimates"),
             true, false);
  add_common(app.add_subcommand("density", "density estimates by inversion"),
             false, true);
  add_common(app.add_subcommand("oracle", "quadrature ground truth"),
             true, true);
  add_common(app.add_subcommand("table1", "transform relative-error grid"),
             false, false);
  add_common(app.add_subcommand("table2", "density relative-error grid"),
             false, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (!theta_text.empty()) {
      cfg.theta_list = parse_list(theta_text, "--theta");
      for (double t : cfg.theta_list) {
        if (t < 0.0) throw UsageError("--theta: entries must be >= 0");
      }
    }
    if (!x_text.empty()) {
      cfg.x_list = parse_list(x_text, "--x");
      for (double x : cfg.x_list) {
        if (!(x > 0.0)) throw UsageError("--x: entries must be > 0");
      }
    }
    if (cfg.reps < 1) throw UsageError("--reps: must be >= 1");
    if (format_text == "csv") {
      cfg.output_format = ReportFormat::csv;
    } else if (format_text == "json") {
      cfg.output_format = ReportFormat::json;
    } else {
      throw UsageError("--format: must be csv or json");
    }
    if (!output_path.empty()) cfg.output_path = output_path;

    const bool needs_theta =
        cfg.subcommand == "minimise" || cfg.subcommand == "transform";
    if (needs_theta && cfg.theta_list.empty()) {
      throw UsageError("--theta: required for " + cfg.subcommand);
    }
    if (cfg.subcommand == "density" && cfg.x_list.empty()) {
      throw UsageError("--x: required for density");
    }
    if ((cfg.subcommand == "transform" || cfg.subcommand == "density") &&
        cfg.method.empty()) {
      throw UsageError("--method: required for " + cfg.subcommand);
    }
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    const LognormalModel model = load_model_file(cfg.model_path);
    if (cfg.subcommand == "minimise") return cmd_minimise(cfg, model, out);
    if (cfg.subcommand == "asymptotic") return cmd_asymptotic(cfg, model, out);
    if (cfg.subcommand == "transform") return cmd_transform(cfg, model, out);
    if (cfg.subcommand == "density") return cmd_density(cfg, model, out);
    if (cfg.subcommand == "oracle") return cmd_oracle(cfg, model, out);
    if (cfg.subcommand == "table1") return cmd_table1(cfg, model, out);
    if (cfg.subcommand == "table2") return cmd_table2(cfg, model, out);
    err << "unknown subcommand\n";
    return 2;
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace slnlap::cli
