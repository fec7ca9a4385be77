#include "mag/serialize.hpp"

#include <cstring>
#include <fstream>

namespace mag {

namespace {

constexpr char kNetMagic[8] = {'M', 'A', 'G', 'N', 'E', 'T', '0', '1'};
constexpr char kCapMagic[8] = {'M', 'A', 'G', 'C', 'A', 'P', '0', '1'};

class Writer {
 public:
  explicit Writer(const std::string& path)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f64(double v) { bytes(&v, 8); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  void matrix(const Matrix& m) {
    u64(m.rows());
    u64(m.cols());
    bytes(m.data(), m.size() * sizeof(double));
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    bytes(v.data(), v.size() * sizeof(double));
  }
  void done(const std::string& path) {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path);
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path)
      : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot open for reading: " + path);
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n))
      throw std::runtime_error("truncated file: " + path_);
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, 8);
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    check_size(n);
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  Matrix matrix() {
    const std::uint64_t rows = u64();
    const std::uint64_t cols = u64();
    check_size(rows * cols);
    Matrix m(rows, cols);
    bytes(m.data(), m.size() * sizeof(double));
    return m;
  }
  std::vector<double> doubles() {
    const std::uint64_t n = u64();
    check_size(n);
    std::vector<double> v(n);
    bytes(v.data(), n * sizeof(double));
    return v;
  }

 private:
  void check_size(std::uint64_t n) const {
    if (n > (1ull << 32))
      throw std::runtime_error("implausible field size in " + path_);
  }
  std::ifstream in_;
  std::string path_;
};

void write_activation(Writer& w, const Activation& a) {
  w.u8(static_cast<std::uint8_t>(a.kind));
  w.f64(a.beta);
}

Activation read_activation(Reader& r) {
  Activation a;
  a.kind = static_cast<ActKind>(r.u8());
  a.beta = r.f64();
  return a;
}

void write_stream(Writer& w, const RngStream& s) {
  w.u64(s.seed);
  w.u64(s.stream);
}

RngStream read_stream(Reader& r) {
  RngStream s;
  s.seed = r.u64();
  s.stream = r.u64();
  return s;
}

}  // namespace

void save_network(const NetworkSpec& net, const std::string& path) {
  Writer w(path);
  w.bytes(kNetMagic, sizeof(kNetMagic));
  w.str(net.name);
  w.u64(net.input_dim);
  w.u64(net.layers.size());
  for (const auto& layer : net.layers) {
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      w.u8(0);
      write_activation(w, dense->act);
      w.matrix(dense->w);
      w.doubles(dense->bias);
    } else if (const auto* magl = std::get_if<MagLayer>(&layer)) {
      w.u8(1);
      write_activation(w, magl->act);
      w.u8(static_cast<std::uint8_t>(magl->ensemble));
      write_stream(w, magl->g_stream);
      w.matrix(magl->w);
      w.doubles(magl->bias);
      w.matrix(magl->g);
    } else {
      const auto& fused = std::get<FusedLayer>(layer);
      w.u8(2);
      write_activation(w, fused.feature_act);
      write_activation(w, fused.output_act);
      w.u8(static_cast<std::uint8_t>(fused.ensemble));
      write_stream(w, fused.g_stream);
      w.matrix(fused.w_hat);
      w.doubles(fused.bias);
      w.matrix(fused.concat_w);
      w.matrix(fused.g);
    }
  }
  w.u64(net.skips.size());
  for (const auto& s : net.skips) w.u64(s.at_layer);
  w.u64(net.heads.size());
  for (const auto& h : net.heads) {
    w.str(h.name);
    w.u64(h.offset);
    w.u64(h.width);
    w.u8(static_cast<std::uint8_t>(h.act));
  }
  w.done(path);
}

NetworkSpec load_network(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, 8);
  if (std::memcmp(magic, kNetMagic, 8) != 0)
    throw std::runtime_error("not a network file: " + path);
  NetworkSpec net;
  net.name = r.str();
  net.input_dim = r.u64();
  const std::uint64_t n_layers = r.u64();
  for (std::uint64_t i = 0; i < n_layers; ++i) {
    const std::uint8_t kind = r.u8();
    if (kind == 0) {
      DenseLayer dense;
      dense.act = read_activation(r);
      dense.w = r.matrix();
      dense.bias = r.doubles();
      net.layers.emplace_back(std::move(dense));
    } else if (kind == 1) {
      MagLayer magl;
      magl.act = read_activation(r);
      magl.ensemble = static_cast<EnsembleKind>(r.u8());
      magl.g_stream = read_stream(r);
      magl.w = r.matrix();
      magl.bias = r.doubles();
      magl.g = r.matrix();
      net.layers.emplace_back(std::move(magl));
    } else if (kind == 2) {
      FusedLayer fused;
      fused.feature_act = read_activation(r);
      fused.output_act = read_activation(r);
      fused.ensemble = static_cast<EnsembleKind>(r.u8());
      fused.g_stream = read_stream(r);
      fused.w_hat = r.matrix();
      fused.bias = r.doubles();
      fused.concat_w = r.matrix();
      fused.g = r.matrix();
      net.layers.emplace_back(std::move(fused));
    } else {
      throw std::runtime_error("unknown layer kind in " + path);
    }
  }
  const std::uint64_t n_skips = r.u64();
  for (std::uint64_t i = 0; i < n_skips; ++i) net.skips.push_back({r.u64()});
  const std::uint64_t n_heads = r.u64();
  for (std::uint64_t i = 0; i < n_heads; ++i) {
    Head h;
    h.name = r.str();
    h.offset = r.u64();
    h.width = r.u64();
    h.act = static_cast<HeadActivation>(r.u8());
    net.heads.push_back(std::move(h));
  }
  validate_network(net);
  return net;
}

bool verify_frozen_features(const NetworkSpec& net) {
  for (const auto& layer : net.layers) {
    const Matrix* g = nullptr;
    EnsembleKind ensemble{};
    RngStream stream{};
    if (const auto* magl = std::get_if<MagLayer>(&layer)) {
      g = &magl->g;
      ensemble = magl->ensemble;
      stream = magl->g_stream;
    } else if (const auto* fused = std::get_if<FusedLayer>(&layer)) {
      g = &fused->g;
      ensemble = fused->ensemble;
      stream = fused->g_stream;
    } else {
      continue;
    }
    const Matrix regen = sample_feature_matrix(ensemble, g->rows(), g->cols(), stream);
    if (!(regen == *g)) return false;
  }
  return true;
}

void save_capture(const CaptureDataset& ds, const std::string& path) {
  Writer w(path);
  w.bytes(kCapMagic, sizeof(kCapMagic));
  w.str(ds.network_id);
  w.u64(ds.layer_index);
  w.str(ds.probe_description);
  w.matrix(ds.x);
  w.matrix(ds.y);
  w.done(path);
}

CaptureDataset load_capture(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, 8);
  if (std::memcmp(magic, kCapMagic, 8) != 0)
    throw std::runtime_error("not a capture file: " + path);
  CaptureDataset ds;
  ds.network_id = r.str();
  ds.layer_index = r.u64();
  ds.probe_description = r.str();
  ds.x = r.matrix();
  ds.y = r.matrix();
  if (ds.x.rows() != ds.y.rows())
    throw std::runtime_error("capture row mismatch in " + path);
  return ds;
}

}  // namespace mag
