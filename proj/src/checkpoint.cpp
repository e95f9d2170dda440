// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

namespace vhp::net {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {
constexpr const char* kMagic = "VHPCKPT1";
constexpr int kFormatVersion = 1;

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"seq_len", c.seq_len},       {"input_dim", c.input_dim},
          {"hidden", c.hidden},         {"dense_units", c.dense_units},
          {"num_classes", c.num_classes}, {"dropout_rate", c.dropout_rate}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.seq_len = j.at("seq_len").get<int>();
  c.input_dim = j.at("input_dim").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.dense_units = j.at("dense_units").get<int>();
  c.num_classes = j.at("num_classes").get<int>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  return c;
}
}  // namespace

void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const LabelMap& labels, const ModelParams& params,
                     const nlohmann::json& meta) {
  if (static_cast<int>(labels.size()) != config.num_classes)
    throw ConfigError("save_checkpoint: label map size does not match num_classes");

  nlohmann::json header;
  header["format_version"] = kFormatVersion;
  header["config"] = config_to_json(config);
  header["labels"] = labels.labels();
  header["gate_order"] = "ifgo";
  header["storage"] = "column-major float32 little-endian";
  header["meta"] = meta;

  nlohmann::json tensors = nlohmann::json::array();
  std::int64_t total = 0;
  auto& mut = const_cast<ModelParams&>(params);
  visit_all(mut, [&](TensorRef<float> r) {
    tensors.push_back({{"name", r.name}, {"rows", r.rows}, {"cols", r.cols}});
    total += r.size;
  });
  header["tensors"] = tensors;
  header["byte_count"] = total * static_cast<std::int64_t>(sizeof(float));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("save_checkpoint: cannot open '" + path + "' for writing");
  out << kMagic << "\n" << header.dump() << "\n";
  visit_all(mut, [&](TensorRef<float> r) {
    out.write(reinterpret_cast<const char*>(r.data),
              static_cast<std::streamsize>(r.size * sizeof(float)));
  });
  out.flush();
  if (!out) throw ConfigError("save_checkpoint: write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("load_checkpoint: cannot open '" + path + "'");

  std::string magic, header_line;
  if (!std::getline(in, magic) || magic != kMagic)
    throw ParseError("load_checkpoint: '" + path + "' is not a checkpoint file");
  if (!std::getline(in, header_line))
    throw ParseError("load_checkpoint: missing header line");
  const auto header = nlohmann::json::parse(header_line);
  if (header.at("format_version").get<int>() != kFormatVersion)
    throw ParseError("load_checkpoint: unsupported format version");
  if (header.at("gate_order").get<std::string>() != "ifgo")
    throw ParseError("load_checkpoint: unsupported gate order");

  Checkpoint ckpt;
  ckpt.config = config_from_json(header.at("config"));
  ckpt.config.validate();
  ckpt.labels = LabelMap::from_labels(header.at("labels").get<std::vector<std::string>>());
  if (static_cast<int>(ckpt.labels.size()) != ckpt.config.num_classes)
    throw ParseError("load_checkpoint: label list does not match num_classes");
  ckpt.meta = header.value("meta", nlohmann::json::object());
  ckpt.params = zeros_like_params<float>(ckpt.config);

  const auto& tensors = header.at("tensors");
  std::size_t k = 0;
  visit_all(ckpt.params, [&](TensorRef<float> r) {
    if (k >= tensors.size()) throw ParseError("load_checkpoint: tensor list too short");
    const auto& t = tensors[k++];
    if (t.at("name").get<std::string>() != r.name ||
        t.at("rows").get<Eigen::Index>() != r.rows ||
        t.at("cols").get<Eigen::Index>() != r.cols)
      throw ParseError(std::string("load_checkpoint: tensor mismatch at '") + r.name + "'");
    in.read(reinterpret_cast<char*>(r.data), static_cast<std::streamsize>(r.size * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(r.size * sizeof(float)))
      throw ParseError(std::string("load_checkpoint: truncated data at '") + r.name + "'");
  });
  if (k != tensors.size()) throw ParseError("load_checkpoint: tensor list too long");
  if (in.peek() != std::ifstream::traits_type::eof())
    throw ParseError("load_checkpoint: trailing bytes after tensor data");
  return ckpt;
}

}  // namespace vhp::net
