#include "mtsa/serialize.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <vector>

#include <json.hpp>

namespace mtsa {

namespace {

constexpr char kMagic[5] = {'M', 'T', 'S', 'A', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
               static_cast<char>((v >> 16) & 0xFF),
               static_cast<char>((v >> 24) & 0xFF)};
  os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw IoError("parameter container truncated");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

template <typename T>
void put_value(std::ostream& os, T v) {
  if constexpr (sizeof(T) == 4) {
    put_u32(os, std::bit_cast<std::uint32_t>(v));
  } else {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    put_u32(os, static_cast<std::uint32_t>(bits & 0xFFFFFFFFULL));
    put_u32(os, static_cast<std::uint32_t>(bits >> 32));
  }
}

template <typename T>
T get_value(std::istream& is) {
  if constexpr (sizeof(T) == 4) {
    return std::bit_cast<T>(get_u32(is));
  } else {
    const std::uint64_t lo = get_u32(is);
    const std::uint64_t hi = get_u32(is);
    return std::bit_cast<T>(lo | (hi << 32));
  }
}

template <typename T>
void put_matrix(std::ostream& os, const Matrix<T>& m) {
  for (std::size_t i = 0; i < m.size(); ++i) put_value(os, m.data()[i]);
}

template <typename T>
Matrix<T> get_matrix(std::istream& is, int rows, int cols) {
  Matrix<T> m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = get_value<T>(is);
  return m;
}

template <typename T>
std::vector<const Matrix<T>*> declaration_order(const MtsaParams<T>& p) {
  std::vector<const Matrix<T>*> mats;
  for (const auto& h : p.heads) {
    mats.push_back(&h.w_t1);
    mats.push_back(&h.w_t2);
    mats.push_back(&h.w_t3);
    mats.push_back(&h.w_s1);
    mats.push_back(&h.b_s1);
    mats.push_back(&h.w_s2);
    mats.push_back(&h.b_s2);
  }
  mats.push_back(&p.w_o);
  return mats;
}

nlohmann::json config_to_json(const AttentionConfig& cfg,
                              const std::vector<MaskSpec>& assignment,
                              int dtype_size) {
  nlohmann::json j;
  j["d_e"] = cfg.d_e;
  j["d_i"] = cfg.d_i;
  j["d_h"] = cfg.d_h;
  j["d_a"] = cfg.d_a;
  j["heads"] = cfg.heads;
  j["sigma_t"] = to_string(cfg.fns.sigma_t);
  j["sigma_s"] = to_string(cfg.fns.sigma_s);
  j["sigma_m"] = to_string(cfg.fns.sigma_m);
  j["p_ad"] = cfg.p_ad;
  j["stabilize"] = cfg.stabilize;
  j["dtype"] = dtype_size == 4 ? "f32" : "f64";
  nlohmann::json masks = nlohmann::json::array();
  for (const auto& m : assignment) {
    nlohmann::json e;
    e["kind"] = to_string(m.kind);
    if (m.kind == MaskKind::window) e["w"] = m.w;
    masks.push_back(e);
  }
  j["mask_assignment"] = masks;
  return j;
}

std::pair<AttentionConfig, std::vector<MaskSpec>> config_from_json(
    const nlohmann::json& j) {
  AttentionConfig cfg;
  cfg.d_e = j.at("d_e").get<int>();
  cfg.d_i = j.at("d_i").get<int>();
  cfg.d_h = j.at("d_h").get<int>();
  cfg.d_a = j.at("d_a").get<int>();
  cfg.heads = j.at("heads").get<int>();
  cfg.fns.sigma_t = activation_from_string(j.at("sigma_t").get<std::string>());
  cfg.fns.sigma_s = activation_from_string(j.at("sigma_s").get<std::string>());
  cfg.fns.sigma_m = activation_from_string(j.at("sigma_m").get<std::string>());
  cfg.p_ad = j.at("p_ad").get<double>();
  cfg.stabilize = j.at("stabilize").get<bool>();
  std::vector<MaskSpec> assignment;
  for (const auto& e : j.at("mask_assignment")) {
    MaskSpec m;
    m.kind = mask_kind_from_string(e.at("kind").get<std::string>());
    if (m.kind == MaskKind::window) m.w = e.at("w").get<int>();
    assignment.push_back(m);
  }
  return {cfg, assignment};
}

}  // namespace

template <typename T>
void save_params(const std::string& path, const MtsaParams<T>& params,
                 const AttentionConfig& cfg) {
  validate(params, cfg);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);

  os.write(kMagic, sizeof(kMagic));
  const char dtype_size = static_cast<char>(sizeof(T));
  os.write(&dtype_size, 1);
  put_u32(os, static_cast<std::uint32_t>(params.heads.size()));

  const auto mats = declaration_order(params);
  put_u32(os, static_cast<std::uint32_t>(mats.size()));
  for (const auto* m : mats) {
    put_u32(os, static_cast<std::uint32_t>(m->rows()));
    put_u32(os, static_cast<std::uint32_t>(m->cols()));
  }
  for (const auto* m : mats) put_matrix(os, *m);
  if (!os) throw IoError("write failed: " + path);
  os.close();

  std::ofstream js(sidecar_path(path));
  if (!js) throw IoError("cannot open for writing: " + sidecar_path(path));
  js << config_to_json(cfg, params.mask_assignment, sizeof(T)).dump(2) << "\n";
  if (!js) throw IoError("write failed: " + sidecar_path(path));
}

template <typename T>
std::pair<MtsaParams<T>, AttentionConfig> load_params(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);

  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(kMagic)) ||
      !std::equal(magic, magic + sizeof(kMagic), kMagic))
    throw IoError("not a parameter container: " + path);
  char dtype_size = 0;
  if (!is.read(&dtype_size, 1)) throw IoError("parameter container truncated");
  if (dtype_size != static_cast<char>(sizeof(T)))
    throw IoError("parameter container element width does not match");

  const std::uint32_t heads = get_u32(is);
  const std::uint32_t count = get_u32(is);
  if (heads < 1 || count != heads * 7 + 1)
    throw IoError("parameter container has an unexpected matrix count");

  std::vector<std::pair<int, int>> shapes(count);
  for (auto& s : shapes) {
    s.first = static_cast<int>(get_u32(is));
    s.second = static_cast<int>(get_u32(is));
    if (s.first < 1 || s.second < 1 || s.first > (1 << 20) || s.second > (1 << 20))
      throw IoError("parameter container has an invalid shape entry");
  }

  MtsaParams<T> params;
  params.heads.resize(heads);
  std::size_t at = 0;
  for (auto& h : params.heads) {
    h.w_t1 = get_matrix<T>(is, shapes[at].first, shapes[at].second); ++at;
    h.w_t2 = get_matrix<T>(is, shapes[at].first, shapes[at].second); ++at;
    h.w_t3 = get_matrix<T>(is, shapes[at].first, shapes[at].second); ++at;
    h.w_s1 = get_matrix<T>(is, shapes[at].first, shapes[at].second); ++at;
    h.b_s1 = get_matrix<T>(is, shapes[at].first, shapes[at].second); ++at;
    h.w_s2 = get_matrix<T>(is, shapes[at].first, shapes[at].second); ++at;
    h.b_s2 = get_matrix<T>(is, shapes[at].first, shapes[at].second); ++at;
  }
  params.w_o = get_matrix<T>(is, shapes[at].first, shapes[at].second);

  nlohmann::json j;
  {
    std::ifstream js(sidecar_path(path));
    if (!js) throw IoError("cannot open: " + sidecar_path(path));
    try {
      js >> j;
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("corrupt sidecar: ") + e.what());
    }
  }
  AttentionConfig cfg;
  try {
    auto [parsed, assignment] = config_from_json(j);
    cfg = parsed;
    params.mask_assignment = std::move(assignment);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("corrupt sidecar: ") + e.what());
  }
  try {
    validate(params, cfg);
  } catch (const std::exception& e) {
    throw IoError(std::string("container does not match sidecar: ") + e.what());
  }
  return {std::move(params), cfg};
}

template void save_params(const std::string&, const MtsaParams<float>&,
                          const AttentionConfig&);
template void save_params(const std::string&, const MtsaParams<double>&,
                          const AttentionConfig&);
template std::pair<MtsaParams<float>, AttentionConfig> load_params(
    const std::string&);
template std::pair<MtsaParams<double>, AttentionConfig> load_params(
    const std::string&);

}  // namespace mtsa
