#include "rcdenoise/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rcdenoise/error.hpp"

namespace rcdenoise {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const json& j, Eigen::Index cols_if_empty, const char* what) {
  if (!j.is_array()) fail(ErrorKind::Parse, std::string("model: ") + what + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.front().size()) : cols_if_empty;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(ErrorKind::Parse, std::string("model: ragged matrix ") + what);
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json scaling_json(const ChannelScaling& s) {
  if (s.empty()) return nullptr;
  return {{"offset", vector_json(s.offset)}, {"scale", vector_json(s.scale)}};
}

ChannelScaling scaling_from(const json& j) {
  if (j.is_null()) return {};
  return {vector_from(j.at("offset")), vector_from(j.at("scale"))};
}

}  // namespace

std::string model_to_json(const EchoStateNetwork& esn) {
  esn.validate();
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["hyper"] = {{"n_nodes", esn.hyper.n_nodes},
                {"leakage", esn.hyper.leakage},
                {"spectral_radius", esn.hyper.spectral_radius},
                {"input_scaling", esn.hyper.input_scaling},
                {"connectivity", esn.hyper.connectivity}};
  j["options"] = {{"bias_constant", esn.options.bias_constant},
                  {"bias_scale", esn.options.bias_scale},
                  {"input_connectivity", esn.options.input_connectivity}};
  j["seed"] = esn.seed;
  j["washout"] = esn.options.washout;
  j["w_res"] = matrix_json(esn.w_res);
  json edges = json::array();
  for (Eigen::Index i = 0; i < esn.edges.rows(); ++i)
    for (Eigen::Index k = 0; k < esn.edges.cols(); ++k)
      if (esn.edges(i, k)) edges.push_back({i, k});
  j["edges"] = std::move(edges);
  j["w_in"] = matrix_json(esn.w_in);
  j["bias"] = vector_json(esn.bias);
  j["w_out"] = esn.w_out ? matrix_json(*esn.w_out) : json(nullptr);
  j["ridge_lambda"] = esn.ridge_lambda;
  j["input_channels"] = esn.input_channels;
  j["output_channels"] = esn.output_channels;
  j["input_scaling"] = scaling_json(esn.input_scaling);
  j["output_scaling"] = scaling_json(esn.output_scaling);
  // dump() emits the shortest representation that round-trips each double.
  return j.dump(1);
}

EchoStateNetwork model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, "model: malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("schema_version"))
      fail(ErrorKind::SchemaVersion, "model: missing schema_version");
    const auto version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion)
      fail(ErrorKind::SchemaVersion, "model: unsupported schema_version " + std::to_string(version) + " (expected " +
                                         std::to_string(kModelSchemaVersion) + ")");
    EchoStateNetwork esn;
    const auto& h = j.at("hyper");
    esn.hyper.n_nodes = h.at("n_nodes").get<std::size_t>();
    esn.hyper.leakage = h.at("leakage").get<double>();
    esn.hyper.spectral_radius = h.at("spectral_radius").get<double>();
    esn.hyper.input_scaling = h.at("input_scaling").get<double>();
    esn.hyper.connectivity = h.at("connectivity").get<double>();
    const auto& o = j.at("options");
    esn.options.bias_constant = o.at("bias_constant").get<double>();
    esn.options.bias_scale = o.at("bias_scale").get<double>();
    esn.options.input_connectivity = o.at("input_connectivity").get<double>();
    esn.options.washout = j.at("washout").get<std::size_t>();
    esn.seed = j.at("seed").get<std::uint64_t>();
    const auto n = static_cast<Eigen::Index>(esn.hyper.n_nodes);
    esn.w_res = matrix_from(j.at("w_res"), n, "w_res");
    esn.w_in = matrix_from(j.at("w_in"), 0, "w_in");
    esn.bias = vector_from(j.at("bias"));
    esn.edges = EdgeMask::Constant(esn.w_res.rows(), esn.w_res.cols(), false);
    for (const auto& e : j.at("edges")) {
      const auto a = e.at(0).get<Eigen::Index>();
      const auto b = e.at(1).get<Eigen::Index>();
      if (a < 0 || b < 0 || a >= esn.edges.rows() || b >= esn.edges.cols())
        fail(ErrorKind::Parse, "model: edge index out of range");
      esn.edges(a, b) = true;
    }
    if (!j.at("w_out").is_null()) esn.w_out = matrix_from(j.at("w_out"), 0, "w_out");
    esn.ridge_lambda = j.at("ridge_lambda").get<double>();
    esn.input_channels = j.at("input_channels").get<std::vector<std::string>>();
    esn.output_channels = j.at("output_channels").get<std::vector<std::string>>();
    esn.input_scaling = scaling_from(j.at("input_scaling"));
    esn.output_scaling = scaling_from(j.at("output_scaling"));
    if (static_cast<Eigen::Index>(esn.hyper.n_nodes) != esn.w_res.rows())
      fail(ErrorKind::Parse, "model: n_nodes does not match w_res");
    try {
      esn.validate();
    } catch (const Error& e) {
      fail(ErrorKind::Parse, std::string("model: inconsistent content: ") + e.what());
    }
    return esn;
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const EchoStateNetwork& esn) {
  const std::string text = model_to_json(esn);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << text << '\n';
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

EchoStateNetwork load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return model_from_json(buf.str());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) fail(ErrorKind::Parse, path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace rcdenoise
