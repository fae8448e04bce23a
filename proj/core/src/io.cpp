#include "ldsmdl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "ldsmdl/errors.hpp"

namespace ldsmdl {

namespace {

using nlohmann::ordered_json;

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (const double x : v) out.push_back(x);
  return out;
}

Matrix matrix_from(const ordered_json& j, int rows, int cols, const char* key) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    throw ParseError(std::string("params: '") + key + "' must have " + std::to_string(rows) +
                     " rows");
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ParseError(std::string("params: '") + key + "' row " + std::to_string(i) +
                       " must have " + std::to_string(cols) + " entries");
    }
    for (int k = 0; k < cols; ++k) m(i, k) = row[k].get<double>();
  }
  return m;
}

ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json fit_json(const FitResult& fit) {
  ordered_json j;
  j["loglik"] = number_or_null(fit.loglik);
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["restart"] = fit.restart;
  ordered_json trace = ordered_json::array();
  for (const double v : fit.loglik_trace) trace.push_back(number_or_null(v));
  j["loglik_trace"] = std::move(trace);
  j["rescaled"] = fit.rescaled;
  j["floored"] = fit.floored;
  j["params"] = ordered_json::parse(params_to_json(fit.params));
  return j;
}

double parse_cell(std::string_view cell, int line) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
    cell.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("csv line " + std::to_string(line) + ": cannot parse '" +
                     std::string(cell) + "' as a number");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string sequence_to_csv(const SequenceData& data) {
  std::string out;
  for (int t = 0; t < data.length(); ++t) {
    for (int k = 0; k < data.dim(); ++k) {
      if (k > 0) out += ',';
      out += format_double(data.Y(t, k));
    }
    out += '\n';
  }
  return out;
}

SequenceData sequence_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      row.push_back(parse_cell(std::string_view(line).substr(start, comma - start), line_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, got " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("csv: no data rows");
  Matrix y(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t k = 0; k < rows[t].size(); ++k) y(t, k) = rows[t][k];
  return SequenceData(std::move(y));
}

std::string params_to_json(const LdsParams& p) {
  ordered_json j;
  j["d"] = p.latent_dim();
  j["d_out"] = p.obs_dim();
  j["A"] = matrix_json(p.A);
  j["C"] = matrix_json(p.C);
  j["R1"] = matrix_json(p.R1);
  j["R2"] = matrix_json(p.R2);
  j["mu0"] = vector_json(p.mu0);
  j["R0"] = matrix_json(p.R0);
  return j.dump(2);
}

LdsParams params_from_json(const std::string& text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    const int d = j.at("d").get<int>();
    const int d_out = j.at("d_out").get<int>();
    if (d < 1 || d_out < 1) throw ParseError("params: d and d_out must be >= 1");
    LdsParams p;
    p.A = matrix_from(j.at("A"), d, d, "A");
    p.C = matrix_from(j.at("C"), d_out, d, "C");
    p.R1 = matrix_from(j.at("R1"), d, d, "R1");
    p.R2 = matrix_from(j.at("R2"), d_out, d_out, "R2");
    p.R0 = matrix_from(j.at("R0"), d, d, "R0");
    const auto& mu = j.at("mu0");
    if (!mu.is_array() || static_cast<int>(mu.size()) != d) {
      throw ParseError("params: 'mu0' must have d entries");
    }
    p.mu0.resize(d);
    for (int i = 0; i < d; ++i) p.mu0(i) = mu[i].get<double>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("params: ") + e.what());
  }
}

std::string trace_to_json(const SelectionTrace& trace) {
  ordered_json j;
  j["mode"] = trace.mode == SearchMode::kAnnihilation ? "annihilate" : "grid";
  j["criterion"] = std::string(criterion_name(trace.criterion));
  j["chosen_order"] = trace.chosen_order;
  j["stopped_early"] = trace.stopped_early;
  ordered_json records = ordered_json::array();
  for (const auto& rec : trace.per_order) {
    ordered_json r;
    r["order"] = rec.order;
    r["ok"] = rec.ok;
    if (!rec.ok) {
      r["error"] = rec.error;
      r["dl"] = nullptr;
      records.push_back(std::move(r));
      continue;
    }
    r["dl"] = number_or_null(rec.dl);
    ordered_json criteria = ordered_json::object();
    for (const auto& c : rec.criteria) {
      ordered_json entry;
      entry["value"] = number_or_null(c.value);
      ordered_json parts = ordered_json::object();
      for (const auto& [name, part] : c.components) parts[name] = number_or_null(part);
      entry["components"] = std::move(parts);
      criteria[std::string(criterion_name(c.name))] = std::move(entry);
    }
    r["criteria"] = std::move(criteria);
    r["fit"] = fit_json(rec.fit);
    records.push_back(std::move(r));
  }
  j["per_order"] = std::move(records);
  if (trace.chosen_order > 0) {
    j["chosen_params"] = ordered_json::parse(params_to_json(trace.chosen_params));
  }
  return j.dump(2) + "\n";
}

std::string sweep_to_csv(const SelectionTrace& trace) {
  std::vector<const OrderRecord*> rows;
  for (const auto& rec : trace.per_order) rows.push_back(&rec);
  std::sort(rows.begin(), rows.end(),
            [](const OrderRecord* a, const OrderRecord* b) { return a->order < b->order; });

  std::vector<std::vector<double>> normalized;
  for (const Criterion c : kAllCriteria) {
    std::vector<double> raw;
    for (const auto* rec : rows) raw.push_back(rec->value(c));
    normalized.push_back(normalize_values(std::span<const double>(raw)));
  }

  std::string out = "order,loglik";
  for (const Criterion c : kAllCriteria) out += "," + std::string(criterion_name(c));
  for (const Criterion c : kAllCriteria) out += "," + std::string(criterion_name(c)) + "_norm";
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const OrderRecord& rec = *rows[r];
    out += std::to_string(rec.order);
    out += ',';
    if (rec.ok) out += format_double(rec.fit.loglik);
    for (const Criterion c : kAllCriteria) {
      out += ',';
      if (rec.ok) out += format_double(rec.value(c));
    }
    for (std::size_t k = 0; k < kAllCriteria.size(); ++k) {
      out += ',';
      if (rec.ok) out += format_double(normalized[k][r]);
    }
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace ldsmdl
