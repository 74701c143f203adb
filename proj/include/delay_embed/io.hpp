#pragma once

#include "delay_embed/conditioning.hpp"
#include "delay_embed/delay_solver.hpp"
#include "delay_embed/modal.hpp"
#include "delay_embed/spectral.hpp"
#include "delay_embed/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace delay_embed::io {

// CSV layout: header "t,x1,...,xJ", one row per sample, 17 significant
// digits. dt is inferred from the first two t values on read; period_samples
// travels in a sidecar JSON file next to the CSV.
void write_timeseries_csv(const std::filesystem::path& csv_path,
                          const TimeSeries& ts);
TimeSeries read_timeseries_csv(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

void write_model_json(const std::filesystem::path& path,
                      const delay_solver::DelayModel& model);
delay_solver::DelayModel read_model_json(const std::filesystem::path& path);

void write_spectrum_json(const std::filesystem::path& path,
                         const spectral::FourierSpectrum& spec,
                         const spectral::SparsityPattern& pattern);
spectral::FourierSpectrum read_spectrum_json(const std::filesystem::path& path,
                                             spectral::SparsityPattern* pattern = nullptr);

struct VectorReport {
  int P_union = 0;
  int minimal_L = 0;
  int oc_index = 0;
  std::vector<int> ranks_by_L;
};
void write_vector_report_json(const std::filesystem::path& path,
                              const VectorReport& report);

void write_modal_json(const std::filesystem::path& path,
                      const modal::ModalDecomposition& dec);

void write_pseudospectrum_csv(const std::filesystem::path& path,
                              const modal::PseudospectrumGrid& grid);

// Sweep CSV: M,L,kappa2,kappa_eff,prop3,bazan,kunis,delta with empty cells
// for inapplicable bounds.
struct ConditionRow {
  int M = 0;
  int L = 0;
  conditioning::ConditionReport report;
};
void write_condition_csv(const std::filesystem::path& path,
                         const std::vector<ConditionRow>& rows);

std::string format_double(double v);  // 17 significant digits, locale-free

}  // namespace delay_embed::io
