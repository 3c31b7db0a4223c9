#pragma once

// File formats.
//
// Dataset CSV: header `y,delta,x1[,x2...]`, one record per line; delta is 0 or 1;
// the intercept is implicit.  Design JSON:
//   {"type": "binary", "n1", "n2", "p01", "p00", "alpha", "gamma1", "gamma2", "c1", "c2"}
//   {"type": "continuous", "n", "p_low", "p_high", "x_min", "x_max", "alpha",
//    "gamma1", "gamma2", "c"}
// Omitted numeric fields take the defaults of BinaryDesign / ContinuousDesign; a
// binary design may give "n" (150, 200 or 300) instead of n1/n2.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "curecg/diagnostics.hpp"
#include "curecg/likelihood.hpp"
#include "curecg/optimizer.hpp"
#include "curecg/simulator.hpp"
#include "curecg/study.hpp"

namespace curecg {

// Throws IoError naming the offending line.
Dataset parse_dataset_csv(std::istream& in, const std::string& source = "<input>");
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const Dataset& data, std::ostream& out);
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

// Throws IoError on malformed JSON or unknown keys, DomainError on invalid values.
Design parse_design_json(const std::string& text);
Design read_design_json(const std::filesystem::path& path);
std::string design_to_json(const Design& design);

// "alpha", "beta0".."betap", "gamma1", "gamma2" for the flat layout.
std::vector<std::string> parameter_names(std::size_t beta_size);

std::string fit_to_json(const FitResult& fit);
// Reads the theta_hat object written by fit_to_json.
ParamVector parse_estimate_json(const std::string& text);
std::string summary_to_json(const MCSummary& summary);
std::string bootstrap_to_json(const BootstrapResult& result);
std::string ks_to_json(const KSResult& ks, std::size_t n, std::size_t m_sets, std::size_t clamped);

// One JSON object per line: {"k", "loglik", "step", "rel_change"}.
void write_trace_jsonl(const FitResult& fit, std::ostream& out);

void write_residuals_csv(const ResidualSet& residuals, std::ostream& out);
void write_qq_csv(const std::vector<std::pair<double, double>>& qq, std::ostream& out);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace curecg
