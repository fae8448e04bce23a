#pragma once

#include <filesystem>
#include <string>

#include "ldsmdl/lds_params.hpp"
#include "ldsmdl/selection.hpp"

namespace ldsmdl {

// Sequences: headerless CSV, one row per time step, 17 significant digits.
std::string sequence_to_csv(const SequenceData& data);
/// Throws ParseError on ragged rows, empty input or non-numeric cells.
SequenceData sequence_from_csv(const std::string& text);

// Parameters: JSON object with A, C, R1, R2, mu0, R0 as row-major nested
// arrays plus the integers d and d_out.
std::string params_to_json(const LdsParams& params);
LdsParams params_from_json(const std::string& text);

/// Full trace with per-order fits and per-criterion component breakdowns.
/// Infinite values are written as null.
std::string trace_to_json(const SelectionTrace& trace);

/// One row per evaluated order, in increasing order:
/// order,loglik,aic,bic,fia,mme,mdl,aic_norm,bic_norm,fia_norm,mme_norm,mdl_norm
/// Failed orders have empty cells.
std::string sweep_to_csv(const SelectionTrace& trace);

/// Whole-file read/write. Throw IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// printf("%.17g").
std::string format_double(double value);

}  // namespace ldsmdl
