#include "locsim/csv.hpp"

#include <cstdio>
#include <fstream>

namespace locsim {

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  // Trim to the shortest form that still parses back exactly.
  for (int precision = 1; precision < 17; ++precision) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", precision, v);
    double parsed = 0.0;
    std::sscanf(shorter, "%lf", &parsed);
    if (parsed == v) return shorter;
  }
  return buffer;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_spectrum_csv(const std::filesystem::path& path,
                        const PowerSpectrum& spectrum) {
  if (spectrum.grid == nullptr) throw ValidationError("spectrum carries no grid");
  std::ofstream out = open_output(path);
  out << "x,y,value,estimator,iterations\n";
  const std::string name = estimator_name(spectrum.estimator);
  for (size_t i = 0; i < spectrum.values.size(); ++i) {
    const Vec3& p = spectrum.grid->points[i];
    out << format_double(p.x()) << ',' << format_double(p.y()) << ','
        << format_double(spectrum.values[i]) << ',' << name << ','
        << spectrum.iterations_run << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

void write_mse_csv(const std::filesystem::path& path,
                   const std::vector<SweepRow>& rows) {
  std::ofstream out = open_output(path);
  out << "estimator,axis,axis_value,trials,mse_m2,std_error_m2,resolve_rate,"
         "failures\n";
  for (const auto& row : rows) {
    out << estimator_name(row.estimator) << ',' << sweep_axis_name(row.axis)
        << ',' << format_double(row.axis_value) << ',' << row.stats.trials
        << ',' << format_double(row.stats.mse) << ','
        << format_double(row.stats.std_error) << ','
        << format_double(row.stats.resolve_rate) << ',' << row.stats.failures
        << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

void write_snapshots_csv(const std::filesystem::path& path,
                         const SampleBatch& batch) {
  std::ofstream out = open_output(path);
  out << "sample,node,antenna,re,im\n";
  for (int n = 0; n < batch.num_samples(); ++n) {
    for (int l = 0; l < batch.num_nodes; ++l) {
      for (int m = 0; m < batch.num_antennas; ++m) {
        const cdouble v = batch.snapshots(l * batch.num_antennas + m, n);
        out << (n + 1) << ',' << l << ',' << m << ','
            << format_double(v.real()) << ',' << format_double(v.imag())
            << '\n';
      }
    }
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

}  // namespace locsim
