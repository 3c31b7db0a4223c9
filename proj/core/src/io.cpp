#include "curecg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <tuple>

#include <json.hpp>

#include "curecg/errors.hpp"

namespace curecg {

namespace {

using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

IoError line_error(const std::string& source, std::size_t line, const std::string& what) {
  return IoError(source + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view field, const std::string& source, std::size_t line) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw line_error(source, line, "not a number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw line_error(source, line, "non-finite value: '" + std::string(field) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(std::string("design field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw IoError("unknown design field '" + key + "'");
  }
}

json param_json(const ParamVector& theta) {
  return json{{"alpha", theta.alpha},
              {"beta", theta.beta},
              {"gamma1", theta.gamma1},
              {"gamma2", theta.gamma2}};
}

json summaries_json(const std::vector<ParameterSummary>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"name", r.name},
                   {"truth", r.truth},
                   {"mean", r.mean},
                   {"bias", r.bias},
                   {"rmse", r.rmse}});
  }
  return out;
}

}  // namespace

Dataset parse_dataset_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto header = split_commas(line);
    if (header.size() < 2 || header[0] != "y" || header[1] != "delta") {
      throw line_error(source, line_no, "header must start with 'y,delta'");
    }
    columns = header.size();
    break;
  }
  if (columns == 0) throw IoError(source + ": empty file");

  Dataset data;
  std::vector<double> covariates(columns - 2);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != columns) {
      throw line_error(source, line_no,
                       "expected " + std::to_string(columns) + " fields, found " +
                           std::to_string(fields.size()));
    }
    const double y = parse_double(fields[0], source, line_no);
    if (!(y > 0.0)) throw line_error(source, line_no, "y must be positive");
    int delta = 0;
    if (fields[1] == "1") {
      delta = 1;
    } else if (fields[1] != "0") {
      throw line_error(source, line_no, "delta must be 0 or 1");
    }
    for (std::size_t j = 2; j < columns; ++j) {
      covariates[j - 2] = parse_double(fields[j], source, line_no);
    }
    data.add(SurvivalRecord{y, delta, CovariateVector::with_intercept(covariates)});
  }
  if (data.empty()) throw IoError(source + ": no data records");
  return data;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_dataset_csv(in, path.string());
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  const std::size_t p = data.empty() ? 1 : data.covariate_dim() - 1;
  out << "y,delta";
  for (std::size_t j = 1; j <= p; ++j) out << ",x" << j;
  out << '\n';
  for (const auto& r : data) {
    out << format_double(r.y) << ',' << r.delta;
    for (std::size_t j = 1; j < r.x.size(); ++j) out << ',' << format_double(r.x[j]);
    out << '\n';
  }
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_dataset_csv(data, out);
  if (!out) throw IoError("write failed: " + path.string());
}

Design parse_design_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("design JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw IoError("design JSON needs a string field 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "binary") {
    reject_unknown(j, {"type", "n", "n1", "n2", "p01", "p00", "alpha", "gamma1", "gamma2", "c1",
                       "c2"});
    BinaryDesign d;
    if (j.contains("n")) {
      if (j.contains("n1") || j.contains("n2")) {
        throw IoError("design JSON: give either n or n1/n2");
      }
      std::size_t n = 0;
      read_field(j, "n", n);
      std::tie(d.n1, d.n2) = binary_group_sizes(n);
    }
    read_field(j, "n1", d.n1);
    read_field(j, "n2", d.n2);
    read_field(j, "p01", d.p01);
    read_field(j, "p00", d.p00);
    read_field(j, "alpha", d.alpha);
    read_field(j, "gamma1", d.gamma1);
    read_field(j, "gamma2", d.gamma2);
    read_field(j, "c1", d.c1);
    read_field(j, "c2", d.c2);
    d.validate();
    return d;
  }
  if (type == "continuous") {
    reject_unknown(j, {"type", "n", "p_low", "p_high", "x_min", "x_max", "alpha", "gamma1",
                       "gamma2", "c"});
    ContinuousDesign d;
    read_field(j, "n", d.n);
    read_field(j, "p_low", d.p_low);
    read_field(j, "p_high", d.p_high);
    read_field(j, "x_min", d.x_min);
    read_field(j, "x_max", d.x_max);
    read_field(j, "alpha", d.alpha);
    read_field(j, "gamma1", d.gamma1);
    read_field(j, "gamma2", d.gamma2);
    read_field(j, "c", d.c);
    d.validate();
    return d;
  }
  throw IoError("design type must be 'binary' or 'continuous', got '" + type + "'");
}

Design read_design_json(const std::filesystem::path& path) {
  return parse_design_json(read_text_file(path));
}

std::string design_to_json(const Design& design) {
  json j;
  if (const auto* b = std::get_if<BinaryDesign>(&design)) {
    j = {{"type", "binary"}, {"n1", b->n1},         {"n2", b->n2},        {"p01", b->p01},
         {"p00", b->p00},    {"alpha", b->alpha},   {"gamma1", b->gamma1}, {"gamma2", b->gamma2},
         {"c1", b->c1},      {"c2", b->c2}};
  } else {
    const auto& c = std::get<ContinuousDesign>(design);
    j = {{"type", "continuous"}, {"n", c.n},          {"p_low", c.p_low},
         {"p_high", c.p_high},   {"x_min", c.x_min},  {"x_max", c.x_max},
         {"alpha", c.alpha},     {"gamma1", c.gamma1}, {"gamma2", c.gamma2},
         {"c", c.c}};
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> parameter_names(std::size_t beta_size) {
  std::vector<std::string> names{"alpha"};
  for (std::size_t j = 0; j < beta_size; ++j) names.push_back("beta" + std::to_string(j));
  names.emplace_back("gamma1");
  names.emplace_back("gamma2");
  return names;
}

std::string fit_to_json(const FitResult& fit) {
  json j{{"theta_hat", param_json(fit.theta_hat)},
         {"loglik", fit.loglik},
         {"iterations", fit.iterations},
         {"converged", fit.converged},
         {"status", fit.status}};
  return j.dump(2) + "\n";
}

ParamVector parse_estimate_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const json& t = j.contains("theta_hat") ? j.at("theta_hat") : j;
    ParamVector theta;
    theta.alpha = t.at("alpha").get<double>();
    theta.beta = t.at("beta").get<std::vector<double>>();
    theta.gamma1 = t.at("gamma1").get<double>();
    theta.gamma2 = t.at("gamma2").get<double>();
    if (!theta.is_feasible()) throw DomainError("estimate outside the feasible set");
    return theta;
  } catch (const json::exception& e) {
    throw IoError(std::string("estimate JSON: ") + e.what());
  }
}

std::string summary_to_json(const MCSummary& summary) {
  json fits = json::array();
  for (const auto& r : summary.replications) {
    json row{{"index", r.index}, {"succeeded", r.succeeded}};
    if (r.succeeded) {
      row["theta_hat"] = param_json(r.fit.theta_hat);
      row["iterations"] = r.fit.iterations;
    } else {
      row["failure"] = r.failure;
    }
    fits.push_back(std::move(row));
  }
  json j{{"attempted", summary.attempted},
         {"succeeded", summary.succeeded},
         {"failed", summary.failed},
         {"wall_seconds", summary.wall_seconds},
         {"parameters", summaries_json(summary.parameters)},
         {"cure_rates", summaries_json(summary.cure_rates)},
         {"replications", std::move(fits)}};
  return j.dump(2) + "\n";
}

std::string bootstrap_to_json(const BootstrapResult& result) {
  json se = json::object();
  if (!result.se.empty()) {
    const auto names = parameter_names(result.se.size() - 3);
    for (std::size_t j = 0; j < names.size(); ++j) se[names[j]] = result.se[j];
  }
  json j{{"B", result.B},
         {"failures", result.failures},
         {"succeeded", result.replicate_estimates.size()},
         {"se", std::move(se)}};
  return j.dump(2) + "\n";
}

std::string ks_to_json(const KSResult& ks, std::size_t n, std::size_t m_sets, std::size_t clamped) {
  json j{{"statistic", ks.statistic},
         {"p_value", ks.p_value},
         {"n", n},
         {"m_sets", m_sets},
         {"clamped", clamped}};
  return j.dump(2) + "\n";
}

void write_trace_jsonl(const FitResult& fit, std::ostream& out) {
  for (const auto& t : fit.trace) {
    out << json{{"k", t.k},
                {"loglik", t.loglik},
                {"step", t.step},
                {"rel_change", t.rel_change},
                {"restarted", t.restarted}}
               .dump()
        << '\n';
  }
}

void write_residuals_csv(const ResidualSet& residuals, std::ostream& out) {
  out << "index,residual\n";
  for (std::size_t i = 0; i < residuals.residuals.size(); ++i) {
    out << i << ',' << format_double(residuals.residuals[i]) << '\n';
  }
}

void write_qq_csv(const std::vector<std::pair<double, double>>& qq, std::ostream& out) {
  out << "theoretical,sample\n";
  for (const auto& [t, s] : qq) out << format_double(t) << ',' << format_double(s) << '\n';
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace curecg
