#include "wordrep/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <map>
#include <sstream>
#include <stdexcept>

#include "wordrep/ioutil.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian; big-endian hosts are not supported");

namespace wordrep {

namespace {

constexpr const char* kMagic = "wordrep-checkpoint v1";
constexpr const char* kEndHeader = "end_header";

std::string config_lines(const ModelConfig& c) {
  std::ostringstream out;
  out << "config.cell " << to_string(c.cell) << '\n';
  out << "config.hidden_size " << c.hidden_size << '\n';
  out << "config.num_layers " << c.num_layers << '\n';
  out << "config.dropout " << format_double(c.dropout) << '\n';
  out << "config.batch_size " << c.batch_size << '\n';
  out << "config.learning_rate " << format_double(c.learning_rate) << '\n';
  out << "config.epochs " << c.epochs << '\n';
  out << "config.teacher_forcing " << format_double(c.teacher_forcing) << '\n';
  out << "config.seed " << c.seed << '\n';
  out << "config.vocab_size " << c.vocab_size << '\n';
  out << "config.max_decode_len " << c.max_decode_len << '\n';
  out << "config.adam_beta1 " << format_double(c.adam.beta1) << '\n';
  out << "config.adam_beta2 " << format_double(c.adam.beta2) << '\n';
  out << "config.adam_eps " << format_double(c.adam.eps) << '\n';
  out << "config.grad_clip " << format_double(c.grad_clip) << '\n';
  out << "config.stop_when_memorized " << (c.stop_when_memorized ? 1 : 0) << '\n';
  return out.str();
}

void apply_config_line(ModelConfig& c, const std::string& key, const std::string& value) {
  if (key == "config.cell") c.cell = cell_kind_from_string(value);
  else if (key == "config.hidden_size") c.hidden_size = std::stoi(value);
  else if (key == "config.num_layers") c.num_layers = std::stoi(value);
  else if (key == "config.dropout") c.dropout = parse_double(value);
  else if (key == "config.batch_size") c.batch_size = std::stoi(value);
  else if (key == "config.learning_rate") c.learning_rate = parse_double(value);
  else if (key == "config.epochs") c.epochs = std::stoi(value);
  else if (key == "config.teacher_forcing") c.teacher_forcing = parse_double(value);
  else if (key == "config.seed") c.seed = std::stoull(value);
  else if (key == "config.vocab_size") c.vocab_size = std::stoi(value);
  else if (key == "config.max_decode_len") c.max_decode_len = std::stoi(value);
  else if (key == "config.adam_beta1") c.adam.beta1 = parse_double(value);
  else if (key == "config.adam_beta2") c.adam.beta2 = parse_double(value);
  else if (key == "config.adam_eps") c.adam.eps = parse_double(value);
  else if (key == "config.grad_clip") c.grad_clip = parse_double(value);
  else if (key == "config.stop_when_memorized") c.stop_when_memorized = value == "1";
  else throw std::runtime_error("checkpoint: unknown config key '" + key + "'");
}

}  // namespace

std::string checkpoint_to_bytes(const Checkpoint& ckpt) {
  auto params = const_cast<ModelParams<float>&>(ckpt.params);
  const auto views = tensor_views(params);

  std::ostringstream header;
  header << kMagic << '\n';
  header << "inventory_checksum " << ckpt.inventory_checksum << '\n';
  header << "first_zero_epoch " << ckpt.first_zero_epoch << '\n';
  header << config_lines(ckpt.config);
  header << "rng " << ckpt.rng_state.key;
  for (uint64_t s : ckpt.rng_state.s) header << ' ' << s;
  header << ' ' << format_double(ckpt.rng_state.gauss_spare) << ' '
         << (ckpt.rng_state.has_gauss_spare ? 1 : 0) << '\n';
  header << "log_entries " << ckpt.log.size() << '\n';
  for (const auto& e : ckpt.log)
    header << "log " << e.epoch << ' ' << format_double(e.mean_loss) << ' '
           << format_double(e.train_word_error) << '\n';

  std::string blobs;
  for (const auto& v : views) {
    const size_t bytes = static_cast<size_t>(v.size) * sizeof(float);
    const std::string_view raw(reinterpret_cast<const char*>(v.data), bytes);
    header << "tensor " << v.name << ' ' << v.size << " f32 " << bytes_checksum(raw) << '\n';
    blobs.append(raw);
  }
  header << "blob_bytes " << blobs.size() << '\n';
  header << kEndHeader << '\n';
  return header.str() + blobs;
}

Checkpoint checkpoint_from_bytes(const std::string& bytes) {
  const std::string marker = std::string(kEndHeader) + "\n";
  const size_t marker_pos = bytes.find("\n" + marker);
  if (marker_pos == std::string::npos)
    throw std::runtime_error("checkpoint: truncated or missing header");
  const size_t blob_start = marker_pos + 1 + marker.size();
  const std::string header = bytes.substr(0, marker_pos + 1);

  std::istringstream in(header);
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw std::runtime_error("checkpoint: version mismatch (expected '" + std::string(kMagic) + "')");

  Checkpoint ckpt;
  struct TensorDecl {
    std::string name;
    Eigen::Index size;
    std::string checksum;
  };
  std::vector<TensorDecl> decls;
  size_t blob_bytes = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "inventory_checksum") {
      ls >> ckpt.inventory_checksum;
    } else if (key == "first_zero_epoch") {
      ls >> ckpt.first_zero_epoch;
    } else if (key.rfind("config.", 0) == 0) {
      std::string value;
      ls >> value;
      apply_config_line(ckpt.config, key, value);
    } else if (key == "rng") {
      int has_spare = 0;
      std::string spare;
      ls >> ckpt.rng_state.key;
      for (auto& s : ckpt.rng_state.s) ls >> s;
      ls >> spare >> has_spare;
      ckpt.rng_state.gauss_spare = parse_double(spare);
      ckpt.rng_state.has_gauss_spare = has_spare != 0;
    } else if (key == "log_entries") {
      size_t n;
      ls >> n;
      ckpt.log.reserve(n);
    } else if (key == "log") {
      EpochLog e;
      std::string loss, wer;
      ls >> e.epoch >> loss >> wer;
      e.mean_loss = parse_double(loss);
      e.train_word_error = parse_double(wer);
      ckpt.log.push_back(e);
    } else if (key == "tensor") {
      TensorDecl d;
      std::string dtype;
      ls >> d.name >> d.size >> dtype >> d.checksum;
      if (dtype != "f32") throw std::runtime_error("checkpoint: unsupported dtype " + dtype);
      decls.push_back(std::move(d));
    } else if (key == "blob_bytes") {
      ls >> blob_bytes;
    } else {
      throw std::runtime_error("checkpoint: unknown header line '" + line + "'");
    }
  }

  if (bytes.size() - blob_start != blob_bytes)
    throw std::runtime_error("checkpoint: blob region truncated (expected " +
                             std::to_string(blob_bytes) + " bytes, have " +
                             std::to_string(bytes.size() - blob_start) + ")");

  ckpt.params = ModelParams<float>::zeros(ckpt.config);
  auto views = tensor_views(ckpt.params);
  if (views.size() != decls.size())
    throw std::runtime_error("checkpoint: tensor count does not match config");
  size_t offset = blob_start;
  for (size_t i = 0; i < views.size(); ++i) {
    if (views[i].name != decls[i].name || views[i].size != decls[i].size)
      throw std::runtime_error("checkpoint: tensor '" + decls[i].name +
                               "' does not match the declared config shapes");
    const size_t nbytes = static_cast<size_t>(decls[i].size) * sizeof(float);
    const std::string_view raw(bytes.data() + offset, nbytes);
    if (bytes_checksum(raw) != decls[i].checksum)
      throw std::runtime_error("checkpoint: checksum failure in tensor '" + decls[i].name + "'");
    std::memcpy(views[i].data, raw.data(), nbytes);
    offset += nbytes;
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  atomic_write_file(path, checkpoint_to_bytes(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_bytes(read_file(path));
}

CheckpointHeader read_checkpoint_header(const std::string& path) {
  const std::string bytes = read_file(path);
  const std::string marker = std::string(kEndHeader) + "\n";
  const size_t marker_pos = bytes.find("\n" + marker);
  if (marker_pos == std::string::npos)
    throw std::runtime_error("checkpoint: truncated or missing header");
  std::istringstream in(bytes.substr(0, marker_pos + 1));
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw std::runtime_error("checkpoint: version mismatch");
  CheckpointHeader h;
  long count = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.rfind("config.", 0) == 0) {
      std::string value;
      ls >> value;
      apply_config_line(h.config, key, value);
    } else if (key == "inventory_checksum") {
      ls >> h.inventory_checksum;
    } else if (key == "tensor") {
      std::string name;
      Eigen::Index size;
      ls >> name >> size;
      count += size;
    }
  }
  h.parameter_count = count;
  return h;
}

}  // namespace wordrep
