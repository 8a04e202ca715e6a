// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "netsim/behavior/trajectory_vae.hpp"
#include "netsim/error.hpp"

namespace netsim::behavior {

static_assert(std::endian::native == std::endian::little, "checkpoint encoding assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'N', 'S', 'I', 'M', 'T', 'V', 'A', 'E'};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string text(std::size_t n) {
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) fail(ErrorCode::InvalidCheckpoint, "checkpoint is truncated");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string checkpoint_bytes(const TrajectoryModel& model) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.put<std::uint8_t>(kCheckpointVersion);
  const auto& hp = model.hyper;
  for (std::uint64_t v : {std::uint64_t{model.vocab}, model.seed, std::uint64_t{hp.latent_dim},
                          std::uint64_t{hp.hidden_dim}, std::uint64_t{hp.location_embed}, std::uint64_t{hp.time_embed},
                          std::uint64_t{hp.user_embed}, std::uint64_t{hp.user_buckets}, std::uint64_t{hp.max_steps},
                          std::uint64_t{hp.epochs}, std::uint64_t{hp.batch_size}}) {
    w.put(v);
  }
  for (double v : {hp.duration_scale_s, hp.learning_rate, hp.kl_weight, hp.grad_clip}) w.put(v);
  w.put<std::uint64_t>(model.params.size());
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const auto& name = model.params.name(i);
    const auto& t = model.params.value(i);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.put<std::uint64_t>(d);
    for (double v : t.data()) w.put(v);
  }
  return w.take();
}

TrajectoryModel model_from_checkpoint_bytes(const std::string& bytes) {
  Reader r(bytes);
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorCode::InvalidCheckpoint, "bad checkpoint magic");
  }
  r.text(sizeof(kMagic));
  auto version = r.get<std::uint8_t>();
  if (version != kCheckpointVersion) {
    fail(ErrorCode::InvalidCheckpoint, fmt::format("unsupported checkpoint version {}", version));
  }
  VaeHyperParams hp;
  auto vocab = r.get<std::uint64_t>();
  auto seed = r.get<std::uint64_t>();
  hp.latent_dim = r.get<std::uint64_t>();
  hp.hidden_dim = r.get<std::uint64_t>();
  hp.location_embed = r.get<std::uint64_t>();
  hp.time_embed = r.get<std::uint64_t>();
  hp.user_embed = r.get<std::uint64_t>();
  hp.user_buckets = r.get<std::uint64_t>();
  hp.max_steps = r.get<std::uint64_t>();
  hp.epochs = r.get<std::uint64_t>();
  hp.batch_size = r.get<std::uint64_t>();
  hp.duration_scale_s = r.get<double>();
  hp.learning_rate = r.get<double>();
  hp.kl_weight = r.get<double>();
  hp.grad_clip = r.get<double>();
  constexpr std::uint64_t kMaxDim = 1u << 24;
  if (vocab == 0 || vocab > kMaxDim || hp.latent_dim > 4096 || hp.hidden_dim > 4096 || hp.location_embed > 4096 ||
      hp.time_embed > 4096 || hp.user_embed > 4096 || hp.user_buckets > kMaxDim) {
    fail(ErrorCode::InvalidCheckpoint, "checkpoint dimensions out of range");
  }
  TrajectoryModel model;
  try {
    model = init_trajectory_model(hp, vocab, seed);
  } catch (const Error& e) {
    fail(ErrorCode::InvalidCheckpoint, fmt::format("checkpoint hyperparameters: {}", e.what()));
  }
  auto count = r.get<std::uint64_t>();
  if (count != model.params.size()) {
    fail(ErrorCode::InvalidCheckpoint, fmt::format("checkpoint has {} tensors, expected {}", count, model.params.size()));
  }
  for (std::size_t i = 0; i < count; ++i) {
    auto name = r.text(r.get<std::uint32_t>());
    auto& t = model.params.value(i);
    if (name != model.params.name(i)) {
      fail(ErrorCode::InvalidCheckpoint, fmt::format("tensor {} is '{}', expected '{}'", i, name, model.params.name(i)));
    }
    auto rank = r.get<std::uint32_t>();
    std::vector<std::size_t> shape;
    for (std::uint32_t d = 0; d < rank && d < 8; ++d) shape.push_back(r.get<std::uint64_t>());
    if (shape != t.shape()) fail(ErrorCode::InvalidCheckpoint, fmt::format("tensor '{}' has the wrong shape", name));
    for (double& v : t.data()) v = r.get<double>();
    if (!t.all_finite()) fail(ErrorCode::InvalidCheckpoint, fmt::format("tensor '{}' holds non-finite values", name));
  }
  if (!r.done()) fail(ErrorCode::InvalidCheckpoint, "trailing bytes after checkpoint");
  return model;
}

void save_checkpoint(const TrajectoryModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, fmt::format("cannot write checkpoint '{}'", path));
  auto bytes = checkpoint_bytes(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, fmt::format("write to '{}' failed", path));
}

TrajectoryModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open checkpoint '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_checkpoint_bytes(buf.str());
}

}  // namespace netsim::behavior
