#include "ganerf/core/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace ganerf {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::map<std::string, std::string> parse_kv(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
T parse_value(const std::string& s);

template <>
int parse_value<int>(const std::string& s) {
  return std::stoi(s);
}
template <>
float parse_value<float>(const std::string& s) {
  return std::stof(s);
}
template <>
std::uint32_t parse_value<std::uint32_t>(const std::string& s) {
  return static_cast<std::uint32_t>(std::stoul(s));
}
template <>
std::string parse_value<std::string>(const std::string& s) {
  return s;
}
template <>
bool parse_value<bool>(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::runtime_error("expected bool, got: " + s);
}

std::string to_string_v(int v) { return std::to_string(v); }
std::string to_string_v(std::uint32_t v) { return std::to_string(v); }
std::string to_string_v(bool v) { return v ? "true" : "false"; }
std::string to_string_v(const std::string& v) { return v; }
std::string to_string_v(float v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

const std::map<std::string, Field>& schema() {
  static const std::map<std::string, Field> s = [] {
    std::map<std::string, Field> m;
    auto reg = [&m](const std::string& name, auto member) {
      m[name] = Field{
          [member](RunConfig& c, const std::string& v) {
            c.*member = parse_value<std::decay_t<decltype(RunConfig{}.*member)>>(v);
          },
          [member](const RunConfig& c) { return to_string_v(c.*member); }};
    };
    reg("scale", &RunConfig::scale);
    reg("seed", &RunConfig::seed);
    reg("image_res", &RunConfig::image_res);
    reg("uv_res", &RunConfig::uv_res);
    reg("feature_res", &RunConfig::feature_res);
    reg("neural_texture_res", &RunConfig::neural_texture_res);
    reg("neural_texture_channels", &RunConfig::neural_texture_channels);
    reg("cameras", &RunConfig::cameras);
    reg("train_frames", &RunConfig::train_frames);
    reg("unseen_motion_frames", &RunConfig::unseen_motion_frames);
    reg("history_k", &RunConfig::history_k);
    reg("motion_seed", &RunConfig::motion_seed);
    reg("unseen_motion_seed", &RunConfig::unseen_motion_seed);
    reg("garment_color_r", &RunConfig::garment_color_r);
    reg("garment_color_g", &RunConfig::garment_color_g);
    reg("garment_color_b", &RunConfig::garment_color_b);
    reg("body_color_r", &RunConfig::body_color_r);
    reg("body_color_g", &RunConfig::body_color_g);
    reg("body_color_b", &RunConfig::body_color_b);
    reg("unshaded", &RunConfig::unshaded);
    reg("n_samples", &RunConfig::n_samples);
    reg("nerf_hidden", &RunConfig::nerf_hidden);
    reg("nerf_depth", &RunConfig::nerf_depth);
    reg("zeta_dim", &RunConfig::zeta_dim);
    reg("garment_margin", &RunConfig::garment_margin);
    reg("root_align", &RunConfig::root_align);
    reg("positional_encoding", &RunConfig::positional_encoding);
    reg("chunk", &RunConfig::chunk);
    reg("unet_stem", &RunConfig::unet_stem);
    reg("decomp_mid", &RunConfig::decomp_mid);
    reg("use_dynamic_feature", &RunConfig::use_dynamic_feature);
    reg("use_detail_feature", &RunConfig::use_detail_feature);
    reg("lambda1", &RunConfig::lambda1);
    reg("lambda2", &RunConfig::lambda2);
    reg("lambda3", &RunConfig::lambda3);
    reg("lambda4", &RunConfig::lambda4);
    reg("lambda5", &RunConfig::lambda5);
    reg("lr_start", &RunConfig::lr_start);
    reg("lr_end", &RunConfig::lr_end);
    reg("iterations", &RunConfig::iterations);
    reg("batch_size", &RunConfig::batch_size);
    reg("checkpoint_every", &RunConfig::checkpoint_every);
    reg("pretrain_iterations", &RunConfig::pretrain_iterations);
    reg("jitter", &RunConfig::jitter);
    return m;
  }();
  return s;
}

void apply_scale_preset(RunConfig& c) {
  if (c.scale == "desk") {
    // defaults in the struct are the desk preset
  } else if (c.scale == "paper") {
    c.image_res = 512;
    c.uv_res = 128;
    c.feature_res = 128;
    c.neural_texture_res = 128;
    c.train_frames = 800;
    c.n_samples = 64;
    c.zeta_dim = 128;
    c.nerf_hidden = 256;
    c.unet_stem = 32;
    c.decomp_mid = 64;
    c.iterations = 200000;
    c.pretrain_iterations = 20000;
  } else {
    throw std::runtime_error("unknown scale: " + c.scale + " (expected desk | paper)");
  }
}

}  // namespace

RunConfig RunConfig::from_map(const std::map<std::string, std::string>& kv) {
  RunConfig c;
  for (const auto& [k, v] : kv)
    if (!schema().count(k)) throw std::runtime_error("unknown config key: " + k);
  auto it = kv.find("scale");
  if (it != kv.end()) c.scale = it->second;
  apply_scale_preset(c);
  for (const auto& [k, v] : kv) schema().at(k).set(c, v);
  if (c.image_res != 4 * c.feature_res)
    throw std::runtime_error("image_res must be 4 * feature_res");
  if (c.cameras < 2) throw std::runtime_error("cameras must be >= 2");
  if (c.history_k < 0) throw std::runtime_error("history_k must be >= 0");
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  return from_map(parse_kv(f));
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> kv;
  for (const auto& [k, field] : schema()) kv[k] = field.get(*this);
  return kv;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [k, v] : to_map())
    for (char ch : k + "=" + v + ";") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
  return h;
}

}  // namespace ganerf
