#include "dimlift/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "dimlift/error.hpp"

namespace dimlift {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, std::string("malformed JSON: ") + e.what());
  }
}

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::config, where + " must be a JSON object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  expect_object(j, where);
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(ErrorKind::config, where + ": unknown key '" + key + "'");
  }
}

void check_version(const json& j) {
  if (!j.contains("schema_version")) fail(ErrorKind::config, "missing schema_version");
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion) {
    fail(ErrorKind::config, "unsupported schema_version (expected " +
                                std::to_string(kSchemaVersion) + ")");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::config, std::string("key '") + key + "' has the wrong type");
  }
}

std::uint64_t get_seed(const json& j, std::uint64_t fallback) {
  if (!j.contains("seed")) return fallback;
  if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
    fail(ErrorKind::config, "seed must be a non-negative integer");
  }
  return j["seed"].get<std::uint64_t>();
}

json lift_to_json(const LiftConfig& l) {
  return {{"k", l.k}, {"n", l.n}, {"max_dim", l.max_dim}, {"permutation", l.permutation}};
}

LiftConfig lift_from_json(const json& j) {
  check_keys(j, {"k", "n", "max_dim", "permutation"}, "lift");
  LiftConfig l;
  l.k = get_or<int>(j, "k", 2);
  l.n = get_or<int>(j, "n", 0);
  l.max_dim = get_or<long>(j, "max_dim", 4096);
  l.permutation = get_or<std::vector<int>>(j, "permutation", {});
  if (l.k < 1) fail(ErrorKind::config, "lift k must be at least 1");
  return l;
}

json window_to_json(const WindowSpec& w) { return {{"width", w.width}, {"stride", w.stride}}; }

WindowSpec window_from_json(const json& j) {
  check_keys(j, {"width", "stride"}, "window");
  return {get_or<int>(j, "width", 200), get_or<int>(j, "stride", 1)};
}

std::string kind_name(AnomalyKind k) { return k == AnomalyKind::step ? "step" : "ramp"; }

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LiftConfig resolve_lift(LiftConfig lift, int channels) {
  if (lift.n == 0) {
    if (lift.k < 1 || channels % lift.k != 0) {
      std::ostringstream msg;
      msg << channels << " channels cannot be split into k=" << lift.k << " equal segments";
      fail(ErrorKind::dimension, msg.str());
    }
    lift.n = channels / lift.k;
  }
  lift.validate(channels);
  return lift;
}

ScenarioConfig parse_scenario_config(const std::string& text) {
  const json j = parse_json(text);
  check_keys(j, {"schema_version", "channels", "samples", "baselines", "white_sigma", "anomalies",
                 "noise", "seed"},
             "scenario");
  check_version(j);
  ScenarioConfig c;
  c.channels = get_or<int>(j, "channels", 28);
  c.samples = get_or<int>(j, "samples", 1000);
  c.baselines = get_or<std::vector<double>>(j, "baselines", {});
  c.white_sigma = get_or<double>(j, "white_sigma", 1e-3);
  c.seed = get_seed(j, 0);
  if (j.contains("noise")) {
    const json& n = j["noise"];
    check_keys(n, {"enabled", "b", "snr"}, "noise");
    c.noise.enabled = get_or<bool>(n, "enabled", true);
    c.noise.b = get_or<double>(n, "b", 0.5);
    c.noise.snr = get_or<double>(n, "snr", 1000.0);
  }
  if (j.contains("anomalies")) {
    if (!j["anomalies"].is_array()) fail(ErrorKind::config, "anomalies must be a list");
    for (const json& a : j["anomalies"]) {
      check_keys(a, {"kind", "onset", "end", "channels", "magnitude"}, "anomaly");
      AnomalySpec s;
      const std::string kind = get_or<std::string>(a, "kind", "step");
      if (kind == "step") s.kind = AnomalyKind::step;
      else if (kind == "ramp") s.kind = AnomalyKind::ramp;
      else fail(ErrorKind::config, "unknown anomaly kind '" + kind + "'");
      s.onset = get_or<long>(a, "onset", 501);
      if (a.contains("end") && !a["end"].is_null()) s.end = get_or<long>(a, "end", 0);
      s.channels = get_or<std::vector<int>>(a, "channels", {});
      s.magnitude = get_or<double>(a, "magnitude", 0.0);
      c.anomalies.push_back(std::move(s));
    }
  }
  c.validate();
  return c;
}

std::string dump_scenario_config(const ScenarioConfig& c) {
  json anomalies = json::array();
  for (const AnomalySpec& a : c.anomalies) {
    json o = {{"kind", kind_name(a.kind)}, {"onset", a.onset}, {"channels", a.channels},
              {"magnitude", a.magnitude}};
    o["end"] = a.end ? json(*a.end) : json(nullptr);
    anomalies.push_back(std::move(o));
  }
  json j = {{"schema_version", kSchemaVersion},
            {"channels", c.channels},
            {"samples", c.samples},
            {"baselines", c.baselines},
            {"white_sigma", c.white_sigma},
            {"noise", {{"enabled", c.noise.enabled}, {"b", c.noise.b}, {"snr", c.noise.snr}}},
            {"anomalies", anomalies},
            {"seed", c.seed}};
  return j.dump(2);
}

RmtDetectorConfig parse_rmt_config(const std::string& text) {
  const json j = parse_json(text);
  check_keys(j, {"schema_version", "lift", "window", "weights", "test_function", "use_residual",
                 "compute_msr", "seed", "deviation", "snapshot_at"},
             "rmt config");
  check_version(j);
  RmtDetectorConfig c;
  c.lift = j.contains("lift") ? lift_from_json(j["lift"]) : LiftConfig{2, 0, 4096, {}};
  if (j.contains("window")) c.window = window_from_json(j["window"]);
  if (j.contains("weights")) {
    const json& w = j["weights"];
    if (w.is_string()) {
      if (w.get<std::string>() != "uniform") fail(ErrorKind::config, "weights must be \"uniform\" or a list");
    } else {
      c.weights = get_or<std::vector<double>>(j, "weights", {});
    }
  }
  if (j.contains("test_function")) {
    const json& tf = j["test_function"];
    check_keys(tf, {"kind", "coefficients"}, "test_function");
    c.test_function = parse_test_function(get_or<std::string>(tf, "kind", "entropy"),
                                          get_or<std::vector<double>>(tf, "coefficients", {}));
  }
  c.use_residual = get_or<bool>(j, "use_residual", true);
  c.compute_msr = get_or<bool>(j, "compute_msr", true);
  c.seed = get_seed(j, 0);
  if (j.contains("deviation")) {
    const json& d = j["deviation"];
    check_keys(d, {"enabled", "baseline_span", "threshold_sigmas"}, "deviation");
    c.deviation.enabled = get_or<bool>(d, "enabled", true);
    c.deviation.baseline_span = get_or<int>(d, "baseline_span", 200);
    c.deviation.threshold_sigmas = get_or<double>(d, "threshold_sigmas", 5.0);
  }
  c.snapshot_at = get_or<std::vector<long>>(j, "snapshot_at", {});
  return c;
}

std::string dump_rmt_config(const RmtDetectorConfig& c) {
  json j = {{"schema_version", kSchemaVersion},
            {"lift", lift_to_json(c.lift)},
            {"window", window_to_json(c.window)},
            {"test_function",
             {{"kind", c.test_function.name()}, {"coefficients", c.test_function.coefficients()}}},
            {"use_residual", c.use_residual},
            {"compute_msr", c.compute_msr},
            {"seed", c.seed},
            {"deviation",
             {{"enabled", c.deviation.enabled},
              {"baseline_span", c.deviation.baseline_span},
              {"threshold_sigmas", c.deviation.threshold_sigmas}}},
            {"snapshot_at", c.snapshot_at}};
  j["weights"] = c.weights.empty() ? json("uniform") : json(c.weights);
  return j.dump(2);
}

namespace {

json sae_to_json(const SaeConfig& c) {
  json j = {{"train_span", {c.train_begin, c.train_end}},
            {"hidden", c.hidden},
            {"train",
             {{"learning_rate", c.train.learning_rate},
              {"max_iterations", c.train.max_iterations},
              {"beta1", c.train.beta1},
              {"beta2", c.train.beta2},
              {"epsilon", c.train.epsilon},
              {"seed", c.train.seed}}}};
  j["lift"] = c.lift ? lift_to_json(*c.lift) : json(nullptr);
  return j;
}

SaeConfig sae_from_json(const json& j) {
  SaeConfig c;
  if (j.contains("lift") && !j["lift"].is_null()) c.lift = lift_from_json(j["lift"]);
  if (j.contains("train_span")) {
    const auto span = get_or<std::vector<long>>(j, "train_span", {});
    if (span.size() != 2) fail(ErrorKind::config, "train_span must be [first, last]");
    c.train_begin = span[0];
    c.train_end = span[1];
  }
  c.hidden = get_or<std::vector<int>>(j, "hidden", kDefaultHidden);
  if (j.contains("train")) {
    const json& t = j["train"];
    check_keys(t, {"learning_rate", "max_iterations", "beta1", "beta2", "epsilon", "seed"}, "train");
    c.train.learning_rate = get_or<double>(t, "learning_rate", 1e-4);
    c.train.max_iterations = get_or<int>(t, "max_iterations", 1000);
    c.train.beta1 = get_or<double>(t, "beta1", 0.9);
    c.train.beta2 = get_or<double>(t, "beta2", 0.999);
    c.train.epsilon = get_or<double>(t, "epsilon", 1e-8);
    c.train.seed = get_seed(t, 0);
  }
  c.train.validate();
  return c;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (long i = 0; i < m.rows(); ++i) {
    for (long k = 0; k < m.cols(); ++k) flat.push_back(m(i, k));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  check_keys(j, {"rows", "cols", "data"}, "matrix");
  const long rows = get_or<long>(j, "rows", 0);
  const long cols = get_or<long>(j, "cols", 0);
  const auto data = get_or<std::vector<double>>(j, "data", {});
  if (rows < 0 || cols < 0 || static_cast<long>(data.size()) != rows * cols) {
    fail(ErrorKind::config, "matrix data does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

}  // namespace

SaeConfig parse_sae_config(const std::string& text) {
  const json j = parse_json(text);
  check_keys(j, {"schema_version", "lift", "train_span", "hidden", "train"}, "sae config");
  check_version(j);
  return sae_from_json(j);
}

std::string dump_sae_config(const SaeConfig& c) {
  json j = sae_to_json(c);
  j["schema_version"] = kSchemaVersion;
  return j.dump(2);
}

EsdConfig parse_esd_config(const std::string& text) {
  const json j = parse_json(text);
  check_keys(j, {"schema_version", "lift", "width", "t", "use_residual", "weights", "sigma2",
                 "histogram_bins", "seed"},
             "esd config");
  check_version(j);
  EsdConfig c;
  c.lift = j.contains("lift") ? lift_from_json(j["lift"]) : LiftConfig{2, 0, 4096, {}};
  if (j.contains("width") && !j["width"].is_null()) c.width = get_or<int>(j, "width", 0);
  if (j.contains("t") && !j["t"].is_null()) c.t = get_or<long>(j, "t", 0);
  c.use_residual = get_or<bool>(j, "use_residual", false);
  const std::string weights = get_or<std::string>(j, "weights", "uniform");
  if (weights == "unit") c.unit_weights = true;
  else if (weights != "uniform") fail(ErrorKind::config, "weights must be \"uniform\" or \"unit\"");
  c.sigma2 = get_or<double>(j, "sigma2", 1.0);
  c.histogram_bins = get_or<int>(j, "histogram_bins", 60);
  if (!(c.sigma2 > 0.0)) fail(ErrorKind::config, "sigma2 must be positive");
  if (c.histogram_bins < 1) fail(ErrorKind::config, "histogram_bins must be positive");
  c.seed = get_seed(j, 0);
  return c;
}

std::string dump_esd_config(const EsdConfig& c) {
  json j = {{"schema_version", kSchemaVersion},
            {"lift", lift_to_json(c.lift)},
            {"use_residual", c.use_residual},
            {"weights", c.unit_weights ? "unit" : "uniform"},
            {"sigma2", c.sigma2},
            {"histogram_bins", c.histogram_bins},
            {"seed", c.seed}};
  j["width"] = c.width ? json(*c.width) : json(nullptr);
  j["t"] = c.t ? json(*c.t) : json(nullptr);
  return j.dump(2);
}

std::string dump_checkpoint(const Checkpoint& ckpt) {
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < ckpt.model.layers(); ++l) {
    weights.push_back(matrix_to_json(ckpt.model.weights[l]));
    biases.push_back(to_vector(ckpt.model.biases[l]));
  }
  json j = {{"schema_version", kSchemaVersion},
            {"format", "dimlift-sae-checkpoint"},
            {"layer_sizes", ckpt.model.layer_sizes},
            {"seed", ckpt.model.seed},
            {"weights", weights},
            {"biases", biases},
            {"scaler", {{"lo", to_vector(ckpt.scaler.lo)}, {"hi", to_vector(ckpt.scaler.hi)}}},
            {"config", sae_to_json(ckpt.config)}};
  return j.dump(1);
}

Checkpoint parse_checkpoint(const std::string& text) {
  const json j = parse_json(text);
  check_keys(j, {"schema_version", "format", "layer_sizes", "seed", "weights", "biases", "scaler",
                 "config"},
             "checkpoint");
  check_version(j);
  if (get_or<std::string>(j, "format", "") != "dimlift-sae-checkpoint") {
    fail(ErrorKind::format, "not a dimlift SAE checkpoint");
  }
  Checkpoint c;
  c.model.layer_sizes = get_or<std::vector<int>>(j, "layer_sizes", {});
  c.model.seed = get_seed(j, 0);
  if (!j.contains("weights") || !j["weights"].is_array() || !j.contains("biases") ||
      !j["biases"].is_array()) {
    fail(ErrorKind::format, "checkpoint lacks weights or biases");
  }
  for (const json& w : j["weights"]) c.model.weights.push_back(matrix_from_json(w));
  for (const json& b : j["biases"]) {
    try {
      c.model.biases.push_back(to_eigen(b.get<std::vector<double>>()));
    } catch (const json::exception&) {
      fail(ErrorKind::format, "checkpoint bias is not a list of numbers");
    }
  }
  if (!j.contains("scaler")) fail(ErrorKind::format, "checkpoint lacks scaler statistics");
  const json& s = j["scaler"];
  check_keys(s, {"lo", "hi"}, "scaler");
  c.scaler.lo = to_eigen(get_or<std::vector<double>>(s, "lo", {}));
  c.scaler.hi = to_eigen(get_or<std::vector<double>>(s, "hi", {}));
  if (j.contains("config")) c.config = sae_from_json(j["config"]);
  c.model.validate();
  if (c.scaler.lo.size() != c.model.input_dim() || c.scaler.hi.size() != c.model.input_dim()) {
    fail(ErrorKind::format, "scaler size does not match the model input");
  }
  return c;
}

std::string dump_spectral_summary(const SpectralSummary& s, long t) {
  json j = {{"t", t},
            {"dim", s.dim},
            {"samples", s.samples},
            {"c_ratio", s.c_ratio},
            {"c_ratio_reciprocal", s.c_ratio_reciprocal},
            {"mp_support", {s.mp_support.first, s.mp_support.second}},
            {"ks_distance_mp", s.ks_distance_mp},
            {"outliers_above_mp", s.outliers_above_mp},
            {"ring_c", s.ring_c},
            {"ring_inner", s.ring_inner},
            {"ring_outer", s.ring_outer},
            {"ring_coverage", s.ring_coverage},
            {"covariance_eig_count", s.covariance_eigs.size()},
            {"ring_eig_count", s.ring_eigs.size()}};
  return j.dump(2);
}

}  // namespace dimlift
