#include "mtms/models/checkpoint.hpp"

#include <cstring>

#include "mtms/data/bytes.hpp"

namespace mtms::models {

namespace {

constexpr char kMagic[8] = {'M', 'T', 'M', 'S', 'C', 'K', 'P', 'T'};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  validate(ckpt.params);
  const TcnConfig& c = ckpt.params.config;
  data::ByteWriter w;
  w.bytes(kMagic, 8);
  w.u32(kCheckpointVersion);
  for (int v : {static_cast<int>(c.arch), c.input_dim, c.num_stages, c.layers_per_stage, c.filters, c.kernel,
                c.num_phases, c.num_steps, c.multi_task ? 1 : 0, static_cast<int>(c.task), c.lstm_hidden,
                c.framewise_hidden}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  w.f64(c.dropout);
  w.u64(ckpt.seed);
  const std::string meta = ckpt.metadata.dump();
  w.u32(static_cast<std::uint32_t>(meta.size()));
  w.bytes(meta.data(), meta.size());

  std::uint32_t arrays = 0;
  for_each_param(ckpt.params, [&](const Mat&) { ++arrays; });
  w.u32(arrays);
  for_each_param(ckpt.params, [&](const Mat& m) {
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
  });
  return std::move(w.buffer());
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  data::ByteReader r(bytes);
  char magic[8];
  r.bytes(magic, 8, "magic");
  if (std::memcmp(magic, kMagic, 8) != 0) throw ParseError("bad magic, expected MTMSCKPT", 0);
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version), 8);

  const std::size_t config_at = r.offset();
  TcnConfig c;
  const std::uint32_t arch = r.u32("config");
  if (arch > 2) throw ParseError("unknown architecture tag", config_at);
  c.arch = static_cast<Architecture>(arch);
  c.input_dim = static_cast<int>(r.u32("config"));
  c.num_stages = static_cast<int>(r.u32("config"));
  c.layers_per_stage = static_cast<int>(r.u32("config"));
  c.filters = static_cast<int>(r.u32("config"));
  c.kernel = static_cast<int>(r.u32("config"));
  c.num_phases = static_cast<int>(r.u32("config"));
  c.num_steps = static_cast<int>(r.u32("config"));
  c.multi_task = r.u32("config") != 0;
  const std::uint32_t task = r.u32("config");
  if (task > 1) throw ParseError("unknown task tag", r.offset() - 4);
  c.task = static_cast<Task>(task);
  c.lstm_hidden = static_cast<int>(r.u32("config"));
  c.framewise_hidden = static_cast<int>(r.u32("config"));
  c.dropout = r.f64("config");
  try {
    validate(c);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid config record: ") + e.what(), config_at);
  }

  Checkpoint ckpt;
  ckpt.seed = r.u64("seed");
  const std::uint32_t meta_len = r.u32("metadata length");
  const std::size_t meta_at = r.offset();
  std::string meta(meta_len, '\0');
  r.bytes(meta.data(), meta_len, "metadata");
  try {
    ckpt.metadata = nlohmann::ordered_json::parse(meta);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("checkpoint metadata: ") + e.what(), meta_at + e.byte);
  }

  // Shapes come from the config; the stored shapes must agree with them.
  ckpt.params = build_model(c, 0);
  const std::size_t count_at = r.offset();
  const std::uint32_t arrays = r.u32("array count");
  std::uint32_t expected = 0;
  for_each_param(ckpt.params, [&](const Mat&) { ++expected; });
  if (arrays != expected) throw ParseError("array count does not match config", count_at);
  for_each_param(ckpt.params, [&](Mat& m) {
    const std::size_t at = r.offset();
    const std::uint32_t rows = r.u32("array shape");
    const std::uint32_t cols = r.u32("array shape");
    if (rows != m.rows() || cols != m.cols()) throw ParseError("array shape does not match config", at);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64("array data");
  });
  if (r.remaining() != 0) throw ParseError("trailing bytes after checkpoint", r.offset());
  try {
    validate(ckpt.params);
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid weights: ") + e.what(), count_at);
  }
  ckpt.params.config = c;
  return ckpt;
}

void write_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  data::write_file(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::string& path) { return decode_checkpoint(data::read_file(path)); }

}  // namespace mtms::models
