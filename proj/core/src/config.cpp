#include "cfsim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cfsim {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw ConfigError(key + ": " + why);
}

double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) bad_key(key, "expected a number");
  return v.get<double>();
}

int as_int(const std::string& key, const json& v) {
  if (!v.is_number_integer()) bad_key(key, "expected an integer");
  return v.get<int>();
}

std::uint64_t as_u64(const std::string& key, const json& v) {
  if (!v.is_number_integer()) bad_key(key, "expected an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto s = v.get<std::int64_t>();
  if (s < 0) bad_key(key, "must be non-negative");
  return static_cast<std::uint64_t>(s);
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) bad_key(key, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) bad_key(key, "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> as_string_list(const std::string& key, const json& v) {
  if (!v.is_array()) bad_key(key, "expected a list");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(as_string(key, e));
  return out;
}

std::vector<double> as_number_list(const std::string& key, const json& v) {
  if (!v.is_array()) bad_key(key, "expected a list");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_number(key, e));
  return out;
}

// Applies one dotted key; `value` is already JSON-typed.
void apply_key(RunConfig& c, const std::string& key, const json& value) {
  SystemParams& p = c.params;
  if (key == "area_side") {
    p.area_side = as_number(key, value);
  } else if (key == "num_rrh") {
    p.num_rrh = as_int(key, value);
  } else if (key == "num_ue") {
    p.num_ue = as_int(key, value);
  } else if (key == "antennas_per_rrh") {
    p.antennas_per_rrh = as_int(key, value);
  } else if (key == "pilot_dim") {
    p.pilot_dim = as_int(key, value);
  } else if (key == "coherence_block") {
    p.coherence_block = as_int(key, value);
  } else if (key == "angular_spread") {
    p.angular_spread = as_number(key, value);
  } else if (key == "qos_threshold") {
    p.qos_threshold = as_number(key, value);
  } else if (key == "max_cluster_size") {
    p.max_cluster_size = as_int(key, value);
  } else if (key == "snr") {
    p.snr = as_number(key, value);
  } else if (key == "num_layouts") {
    p.num_layouts = as_int(key, value);
  } else if (key == "num_fading_draws") {
    p.num_fading_draws = as_int(key, value);
  } else if (key == "master_seed") {
    p.master_seed = as_u64(key, value);
  } else if (key == "shadowing") {
    p.shadowing = as_bool(key, value);
  } else if (key == "rate_in_nats") {
    p.rate_in_nats = as_bool(key, value);
  } else if (key == "pilot_noise_scale") {
    p.pilot_noise_scale = as_number(key, value);
  } else if (key == "schemes") {
    c.schemes.clear();
    for (const auto& name : as_string_list(key, value)) {
      try {
        c.schemes.push_back(scheme_from_name(name));
      } catch (const std::invalid_argument& e) {
        bad_key(key, e.what());
      }
    }
  } else if (key == "csi_modes") {
    c.csi_modes.clear();
    for (const auto& name : as_string_list(key, value)) {
      try {
        c.csi_modes.push_back(csi_mode_from_name(name));
      } catch (const std::invalid_argument& e) {
        bad_key(key, e.what());
      }
    }
  } else if (key == "sweep.axis") {
    try {
      c.sweep_axis = sweep_axis_from_name(as_string(key, value));
    } catch (const std::invalid_argument& e) {
      bad_key(key, e.what());
    }
  } else if (key == "sweep.values") {
    c.sweep_values = as_number_list(key, value);
  } else if (key == "output_dir") {
    c.output_dir = as_string(key, value);
  } else if (key == "output_formats") {
    c.output_formats = as_string_list(key, value);
  } else if (key == "threads") {
    c.threads = as_int(key, value);
  } else {
    bad_key(key, "unknown key");
  }
}

void apply_object(RunConfig& c, const json& obj, const std::string& prefix) {
  if (!obj.is_object()) {
    bad_key(prefix.empty() ? "<root>" : prefix, "expected an object");
  }
  for (const auto& [name, value] : obj.items()) {
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    if (key == "sweep") {
      apply_object(c, value, key);
    } else {
      apply_key(c, key, value);
    }
  }
}

// Turns an override's value text into a JSON value: JSON scalars pass
// through, anything unparsable is a string.
json scalar_from_text(const std::string& text) {
  const json parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded() && (parsed.is_number() || parsed.is_boolean())) {
    return parsed;
  }
  return json(text);
}

bool is_list_key(const std::string& key) {
  return key == "schemes" || key == "csi_modes" || key == "sweep.values" ||
         key == "output_formats";
}

void finish_validation(RunConfig& c) {
  try {
    validate(c.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.schemes.empty()) bad_key("schemes", "must name at least one scheme");
  if (c.csi_modes.empty()) bad_key("csi_modes", "must name at least one CSI mode");
  if (c.threads < 0) bad_key("threads", "must be >= 0 (0 = hardware count)");
  if (c.output_formats.empty()) bad_key("output_formats", "must name at least one format");
  for (const auto& f : c.output_formats) {
    if (f != "csv" && f != "json") bad_key("output_formats", "unknown format '" + f + "'");
  }
  if (c.sweep_axis != SweepAxis::None && c.sweep_values.empty()) {
    bad_key("sweep.values", "a swept axis needs at least one value");
  }
  if (c.sweep_axis == SweepAxis::None && c.sweep_values.size() > 1) {
    bad_key("sweep.values", "axis 'none' takes at most one value");
  }
  for (double v : c.sweep_values) {
    try {
      (void)apply_axis(c.params, c.sweep_axis, v);
    } catch (const std::invalid_argument& e) {
      bad_key("sweep.values", e.what());
    }
  }
}

}  // namespace

std::vector<SchemeCsi> RunConfig::combos() const {
  std::vector<SchemeCsi> out;
  out.reserve(schemes.size() * csi_modes.size());
  for (const ReceiverScheme& s : schemes) {
    for (CsiMode m : csi_modes) {
      out.push_back({s, m});
    }
  }
  return out;
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides) {
  RunConfig c = default_config();

  const bool blank =
      json_text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (!blank) {
    const json parsed = json::parse(json_text, nullptr, false);
    if (parsed.is_discarded()) {
      throw ConfigError("config: not valid JSON");
    }
    apply_object(c, parsed, "");
  }

  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + item + "': expected key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    if (is_list_key(key)) {
      json list = json::array();
      std::stringstream ss(text);
      std::string part;
      while (std::getline(ss, part, ',')) {
        if (!part.empty()) list.push_back(scalar_from_text(part));
      }
      apply_key(c, key, list);
    } else {
      apply_key(c, key, scalar_from_text(text));
    }
  }

  finish_validation(c);
  return c;
}

std::string serialize_config(const RunConfig& c) {
  const SystemParams& p = c.params;
  json j;
  j["area_side"] = p.area_side;
  j["num_rrh"] = p.num_rrh;
  j["num_ue"] = p.num_ue;
  j["antennas_per_rrh"] = p.antennas_per_rrh;
  j["pilot_dim"] = p.pilot_dim;
  j["coherence_block"] = p.coherence_block;
  j["angular_spread"] = p.angular_spread;
  j["qos_threshold"] = p.qos_threshold;
  j["max_cluster_size"] = p.max_cluster_size;
  j["snr"] = p.snr;
  j["num_layouts"] = p.num_layouts;
  j["num_fading_draws"] = p.num_fading_draws;
  j["master_seed"] = p.master_seed;
  j["shadowing"] = p.shadowing;
  j["rate_in_nats"] = p.rate_in_nats;
  j["pilot_noise_scale"] = p.pilot_noise_scale;
  json schemes = json::array();
  for (const auto& s : c.schemes) schemes.push_back(scheme_name(s));
  j["schemes"] = schemes;
  json modes = json::array();
  for (CsiMode m : c.csi_modes) modes.push_back(csi_mode_name(m));
  j["csi_modes"] = modes;
  j["sweep"]["axis"] = sweep_axis_name(c.sweep_axis);
  j["sweep"]["values"] = c.sweep_values;
  j["output_dir"] = c.output_dir;
  j["output_formats"] = c.output_formats;
  j["threads"] = c.threads;
  return j.dump(2) + "\n";
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("config file '" + path + "' cannot be read");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace cfsim
