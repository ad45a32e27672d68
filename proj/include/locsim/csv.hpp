#pragma once

#include <filesystem>
#include <string>

#include "locsim/harness.hpp"

namespace locsim {

/// Shortest round-trippable decimal form (printf %.17g trimmed).
std::string format_double(double v);

/// Columns: x,y,value,estimator,iterations
void write_spectrum_csv(const std::filesystem::path& path,
                        const PowerSpectrum& spectrum);

/// Columns: estimator,axis,axis_value,trials,mse_m2,std_error_m2,
///          resolve_rate,failures
void write_mse_csv(const std::filesystem::path& path,
                   const std::vector<SweepRow>& rows);

/// Columns: sample,node,antenna,re,im  (sample is 1-based)
void write_snapshots_csv(const std::filesystem::path& path,
                         const SampleBatch& batch);

}  // namespace locsim
