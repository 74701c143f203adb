#include "delay_embed/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace delay_embed::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

void write_timeseries_csv(const std::filesystem::path& csv_path,
                          const TimeSeries& ts) {
  validate(ts);
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot open " + csv_path.string());
  out << "t";
  for (int j = 0; j < ts.components(); ++j) out << ",x" << (j + 1);
  out << "\n";
  for (int k = 0; k < ts.samples(); ++k) {
    out << format_double(k * ts.dt);
    for (int j = 0; j < ts.components(); ++j)
      out << "," << format_double(ts.data(j, k));
    out << "\n";
  }

  json meta;
  meta["dt"] = ts.dt;
  meta["J"] = ts.components();
  if (ts.period_samples)
    meta["period_samples"] = *ts.period_samples;
  else
    meta["period_samples"] = nullptr;
  std::ofstream ms(sidecar_path(csv_path));
  ms << meta.dump(2) << "\n";
}

TimeSeries read_timeseries_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::invalid_argument("cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t", 0) != 0)
    throw std::invalid_argument("timeseries csv: missing header");
  int cols = 0;
  for (char c : line)
    if (c == ',') ++cols;
  if (cols < 1) throw std::invalid_argument("timeseries csv: no components");

  std::vector<double> t;
  std::vector<std::vector<double>> comp(cols);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ',')) break;
    t.push_back(std::stod(cell));
    for (int j = 0; j < cols; ++j) {
      if (!std::getline(ss, cell, ','))
        throw std::invalid_argument("timeseries csv: short row");
      comp[j].push_back(std::stod(cell));
    }
  }
  if (t.empty()) throw std::invalid_argument("timeseries csv: no samples");

  TimeSeries ts;
  ts.data.resize(cols, t.size());
  for (int j = 0; j < cols; ++j)
    for (size_t k = 0; k < t.size(); ++k) ts.data(j, k) = comp[j][k];
  ts.dt = t.size() >= 2 ? t[1] - t[0] : 1.0;

  const auto meta_path = sidecar_path(csv_path);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream ms(meta_path);
    json meta = json::parse(ms);
    if (meta.contains("dt") && !meta["dt"].is_null()) ts.dt = meta["dt"];
    if (meta.contains("period_samples") && !meta["period_samples"].is_null())
      ts.period_samples = meta["period_samples"].get<int>();
  }
  validate(ts);
  return ts;
}

void write_model_json(const std::filesystem::path& path,
                      const delay_solver::DelayModel& model) {
  json doc;
  doc["J"] = model.J;
  doc["L"] = model.L;
  doc["imag_residue"] = model.imag_residue;
  doc["solver"] = model.solver;
  doc["svd_cutoff"] = model.svd_cutoff;
  // row layout marker: rows are component-major, K_0 (newest sample) first
  doc["ordering"] = "newest-first";
  json rows = json::array();
  for (int r = 0; r < model.weights.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < model.weights.cols(); ++c) row.push_back(model.weights(r, c));
    rows.push_back(row);
  }
  doc["weights"] = rows;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

delay_solver::DelayModel read_model_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  json doc = json::parse(in);
  delay_solver::DelayModel model;
  model.J = doc.at("J");
  model.L = doc.at("L");
  model.imag_residue = doc.value("imag_residue", 0.0);
  model.solver = doc.value("solver", "");
  model.svd_cutoff = doc.value("svd_cutoff", 0.0);
  const auto& rows = doc.at("weights");
  const int nr = static_cast<int>(rows.size());
  detail::require(nr == model.J * (model.L + 1), "model json: weight shape mismatch");
  const int nc = static_cast<int>(rows.front().size());
  detail::require(nc == model.J, "model json: weight shape mismatch");
  model.weights.resize(nr, nc);
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nc; ++c) model.weights(r, c) = rows[r][c];
  return model;
}

void write_spectrum_json(const std::filesystem::path& path,
                         const spectral::FourierSpectrum& spec,
                         const spectral::SparsityPattern& pattern) {
  json doc;
  doc["M"] = spec.M;
  json coeffs = json::array();
  for (int i = 0; i < spec.M; ++i)
    coeffs.push_back({spec.coeffs(i).real(), spec.coeffs(i).imag()});
  doc["coeffs"] = coeffs;
  doc["pattern"] = pattern.indices;
  doc["P"] = pattern.P();
  doc["threshold"] = pattern.threshold_used;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

spectral::FourierSpectrum read_spectrum_json(const std::filesystem::path& path,
                                             spectral::SparsityPattern* pattern) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  json doc = json::parse(in);
  spectral::FourierSpectrum spec;
  spec.M = doc.at("M");
  spec.coeffs.resize(spec.M);
  const auto& coeffs = doc.at("coeffs");
  detail::require(static_cast<int>(coeffs.size()) == spec.M,
                  "spectrum json: coefficient count mismatch");
  for (int i = 0; i < spec.M; ++i)
    spec.coeffs(i) = cplx(coeffs[i][0], coeffs[i][1]);
  if (pattern) {
    pattern->indices = doc.at("pattern").get<std::vector<int>>();
    pattern->threshold_used = doc.value("threshold", 0.0);
  }
  return spec;
}

void write_vector_report_json(const std::filesystem::path& path,
                              const VectorReport& report) {
  json doc;
  doc["P_union"] = report.P_union;
  doc["minimal_L"] = report.minimal_L;
  doc["oc_index"] = report.oc_index;
  doc["ranks_by_L"] = report.ranks_by_L;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

void write_modal_json(const std::filesystem::path& path,
                      const modal::ModalDecomposition& dec) {
  json doc;
  json evs = json::array();
  for (int i = 0; i < dec.eigenvalues.size(); ++i) {
    const cplx ev = dec.eigenvalues(i);
    evs.push_back({{"re", ev.real()},
                   {"im", ev.imag()},
                   {"modulus", std::abs(ev)},
                   {"phase", std::arg(ev)}});
  }
  doc["eigenvalues"] = evs;
  doc["r_prime"] = dec.r_prime;
  doc["vandermonde_structure_ok"] = dec.vandermonde_structure_ok;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

void write_pseudospectrum_csv(const std::filesystem::path& path,
                              const modal::PseudospectrumGrid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "re,im,sigma_min\n";
  for (int row = 0; row < grid.im.size(); ++row)
    for (int col = 0; col < grid.re.size(); ++col)
      out << format_double(grid.re(col)) << "," << format_double(grid.im(row))
          << "," << format_double(grid.sigma_min(row, col)) << "\n";
}

void write_condition_csv(const std::filesystem::path& path,
                         const std::vector<ConditionRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "M,L,kappa2,kappa_eff,prop3,bazan,kunis,delta\n";
  for (const auto& r : rows) {
    out << r.M << "," << r.L << "," << format_double(r.report.kappa2) << ","
        << format_double(r.report.kappa_eff) << ","
        << format_double(r.report.prop3_upper) << ",";
    if (r.report.bazan_upper) out << format_double(*r.report.bazan_upper);
    out << ",";
    if (r.report.kunis_lower) out << format_double(*r.report.kunis_lower);
    out << "," << format_double(r.report.delta) << "\n";
  }
}

}  // namespace delay_embed::io
