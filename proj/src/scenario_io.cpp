#include "locsim/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace locsim {

namespace {

using ordered_json = nlohmann::ordered_json;

Vec3 parse_vec3(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || (j.size() != 2 && j.size() != 3)) {
    throw ValidationError(what + " must be an array of 2 or 3 numbers");
  }
  Vec3 v = Vec3::Zero();
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(what + " must be numeric");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

ordered_json vec3_to_json(const Vec3& v) {
  return ordered_json::array({v.x(), v.y(), v.z()});
}

WaveformSpec parse_waveform(const nlohmann::json& j, int target_index) {
  WaveformSpec spec;
  spec.tone_index = target_index + 1;  // distinct tones by default
  if (j.is_null()) return spec;
  const std::string kind = j.value("kind", "tone");
  if (kind == "tone") {
    spec.kind = WaveformSpec::Kind::tone;
    spec.tone_index = j.value("tone_index", spec.tone_index);
    spec.num_tones = j.value("num_tones", spec.num_tones);
  } else if (kind == "qpsk") {
    spec.kind = WaveformSpec::Kind::qpsk;
  } else {
    throw ValidationError("unknown waveform kind '" + kind + "'");
  }
  return spec;
}

SearchGrid parse_grid(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("grid must be an object");
  const std::string kind = j.value("kind", "");
  if (kind == "line") {
    if (!j.contains("start") || !j.contains("end") || !j.contains("step")) {
      throw ValidationError("line grid needs start, end and step");
    }
    return SearchGrid::line(parse_vec3(j["start"], "grid.start"),
                            parse_vec3(j["end"], "grid.end"),
                            j["step"].get<double>());
  }
  if (kind == "rect") {
    for (const char* key : {"x_min", "x_max", "y_min", "y_max", "step"}) {
      if (!j.contains(key)) {
        throw ValidationError(std::string("rect grid needs ") + key);
      }
    }
    return SearchGrid::rectangle(j["x_min"].get<double>(), j["x_max"].get<double>(),
                                 j["y_min"].get<double>(), j["y_max"].get<double>(),
                                 j["step"].get<double>(), j.value("z", 0.0));
  }
  throw ValidationError("grid kind must be 'line' or 'rect'");
}

}  // namespace

bool operator==(const SensingNode& a, const SensingNode& b) {
  return a.position == b.position && a.axis == b.axis &&
         a.num_antennas == b.num_antennas &&
         a.spacing_over_wavelength == b.spacing_over_wavelength;
}

bool operator==(const WaveformSpec& a, const WaveformSpec& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == WaveformSpec::Kind::tone) {
    return a.tone_index == b.tone_index && a.num_tones == b.num_tones;
  }
  return true;
}

bool operator==(const TargetSource& a, const TargetSource& b) {
  return a.position == b.position && a.channel_variances == b.channel_variances &&
         a.waveform == b.waveform;
}

bool operator==(const SearchGrid& a, const SearchGrid& b) {
  const auto& da = a.descriptor;
  const auto& db = b.descriptor;
  if (da.kind != db.kind || da.step != db.step) return false;
  if (da.kind == SearchGrid::Kind::line) {
    return da.start == db.start && da.end == db.end;
  }
  return da.x_min == db.x_min && da.x_max == db.x_max && da.y_min == db.y_min &&
         da.y_max == db.y_max && da.z == db.z;
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.nodes == b.nodes && a.targets == b.targets && a.grid == b.grid &&
         a.noise_power == b.noise_power && a.snr_db == b.snr_db &&
         a.num_samples == b.num_samples && a.seed == b.seed &&
         a.channel_redraw == b.channel_redraw;
}

Scenario scenario_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }

  Scenario scenario;
  if (!j.contains("nodes") || !j["nodes"].is_array() || j["nodes"].empty()) {
    throw ValidationError("scenario needs a nonempty 'nodes' array");
  }
  for (const auto& jn : j["nodes"]) {
    SensingNode node;
    if (!jn.contains("position")) throw ValidationError("node needs a position");
    node.position = parse_vec3(jn["position"], "node.position");
    if (jn.contains("axis")) node.axis = parse_vec3(jn["axis"], "node.axis");
    if (!jn.contains("num_antennas")) {
      throw ValidationError("node needs num_antennas");
    }
    node.num_antennas = jn["num_antennas"].get<int>();
    node.spacing_over_wavelength = jn.value("spacing_over_wavelength", 0.5);
    scenario.nodes.push_back(node);
  }

  if (!j.contains("targets") || !j["targets"].is_array() || j["targets"].empty()) {
    throw ValidationError("scenario needs a nonempty 'targets' array");
  }
  int target_index = 0;
  for (const auto& jt : j["targets"]) {
    TargetSource target;
    if (!jt.contains("position")) throw ValidationError("target needs a position");
    target.position = parse_vec3(jt["position"], "target.position");
    if (jt.contains("channel_variances")) {
      target.channel_variances = jt["channel_variances"].get<std::vector<double>>();
    } else {
      target.channel_variances.assign(scenario.nodes.size(), 1.0);
    }
    target.waveform = parse_waveform(jt.contains("waveform") ? jt["waveform"]
                                                             : nlohmann::json(),
                                     target_index);
    scenario.targets.push_back(target);
    ++target_index;
  }

  if (!j.contains("grid")) throw ValidationError("scenario needs a grid");
  scenario.grid = parse_grid(j["grid"]);

  if (j.contains("snr_db")) scenario.snr_db = j["snr_db"].get<double>();
  if (j.contains("noise_power")) {
    scenario.noise_power = j["noise_power"].get<double>();
  } else if (scenario.snr_db.has_value()) {
    double sum = 0.0;
    size_t count = 0;
    for (const auto& t : scenario.targets) {
      for (double v : t.channel_variances) {
        sum += v;
        ++count;
      }
    }
    const double mean_variance = sum / static_cast<double>(count);
    scenario.noise_power = mean_variance / std::pow(10.0, *scenario.snr_db / 10.0);
  } else {
    throw ValidationError("scenario needs noise_power or snr_db");
  }

  if (!j.contains("num_samples")) throw ValidationError("scenario needs num_samples");
  scenario.num_samples = j["num_samples"].get<int>();
  scenario.seed = j.value("seed", std::uint64_t{0});
  const std::string redraw = j.value("channel_redraw", "per_trial");
  if (redraw == "per_trial") {
    scenario.channel_redraw = ChannelRedraw::per_trial;
  } else if (redraw == "per_sample") {
    scenario.channel_redraw = ChannelRedraw::per_sample;
  } else {
    throw ValidationError("channel_redraw must be per_trial or per_sample");
  }

  scenario.validate();
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return scenario_from_json_text(buffer.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string scenario_to_json_text(const Scenario& scenario) {
  ordered_json j;
  j["nodes"] = ordered_json::array();
  for (const auto& node : scenario.nodes) {
    ordered_json jn;
    jn["position"] = vec3_to_json(node.position);
    jn["axis"] = vec3_to_json(node.axis);
    jn["num_antennas"] = node.num_antennas;
    jn["spacing_over_wavelength"] = node.spacing_over_wavelength;
    j["nodes"].push_back(jn);
  }
  j["targets"] = ordered_json::array();
  for (const auto& target : scenario.targets) {
    ordered_json jt;
    jt["position"] = vec3_to_json(target.position);
    jt["channel_variances"] = target.channel_variances;
    ordered_json jw;
    if (target.waveform.kind == WaveformSpec::Kind::tone) {
      jw["kind"] = "tone";
      jw["tone_index"] = target.waveform.tone_index;
      jw["num_tones"] = target.waveform.num_tones;
    } else {
      jw["kind"] = "qpsk";
    }
    jt["waveform"] = jw;
    j["targets"].push_back(jt);
  }
  const auto& d = scenario.grid.descriptor;
  ordered_json jg;
  if (d.kind == SearchGrid::Kind::line) {
    jg["kind"] = "line";
    jg["start"] = vec3_to_json(d.start);
    jg["end"] = vec3_to_json(d.end);
    jg["step"] = d.step;
  } else {
    jg["kind"] = "rect";
    jg["x_min"] = d.x_min;
    jg["x_max"] = d.x_max;
    jg["y_min"] = d.y_min;
    jg["y_max"] = d.y_max;
    jg["step"] = d.step;
    jg["z"] = d.z;
  }
  j["grid"] = jg;
  j["noise_power"] = scenario.noise_power;
  if (scenario.snr_db.has_value()) j["snr_db"] = *scenario.snr_db;
  j["num_samples"] = scenario.num_samples;
  j["seed"] = scenario.seed;
  j["channel_redraw"] = scenario.channel_redraw == ChannelRedraw::per_trial
                            ? "per_trial"
                            : "per_sample";
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out << scenario_to_json_text(scenario);
  if (!out) throw ValidationError("write failed: " + path.string());
}

}  // namespace locsim
