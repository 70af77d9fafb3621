#include <cmath>
#include <limits>

#include "doctest.h"
#include "sccl/checkpoint.hpp"
#include "sccl/error.hpp"
#include "sccl/random.hpp"
#include "toy_data.hpp"

using namespace sccl;

namespace {

ParameterSet sample_params(std::uint64_t seed) {
  Rng rng = derive_rng(seed, "ckpt");
  ParameterSet set;
  set.add("gru.fwd.W", Tensor::parameter({3, 5}, uniform_values(15, -1, 1, rng)));
  set.add("caps.W", Tensor::parameter({2, 2, 2, 2}, uniform_values(16, -1, 1, rng)));
  auto odd = uniform_values(4, -1, 1, rng);
  odd[0] = std::numeric_limits<double>::denorm_min();
  odd[1] = -0.0;
  odd[2] = 1.0 / 3.0;
  set.add("sent.out.b", Tensor::parameter({4}, odd));
  return set;
}

bool bit_equal(const ParameterSet& a, const ParameterSet& b) {
  auto ia = a.begin();
  for (auto ib = b.begin(); ib != b.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    auto va = ia->second.tensor.data(), vb = ib->second.tensor.data();
    for (std::size_t i = 0; i < va.size(); ++i) {
      if (std::signbit(va[i]) != std::signbit(vb[i]) || va[i] != vb[i]) return false;
    }
  }
  return ia == a.end();
}

}  // namespace

TEST_CASE("binary checkpoint round-trips bit-exactly") {
  toy::TempDir dir;
  const ParameterSet src = sample_params(1);
  save_checkpoint(dir / "a.ckpt", snapshot(src, "meta\tdata"));
  ParameterSet dst = sample_params(2);
  const Checkpoint loaded = load_checkpoint(dir / "a.ckpt");
  CHECK(loaded.metadata == "meta\tdata");
  restore(loaded, dst);
  CHECK(bit_equal(src, dst));

  save_checkpoint(dir / "b.ckpt", snapshot(dst, "meta\tdata"));
  CHECK(toy::read_file(dir / "a.ckpt") == toy::read_file(dir / "b.ckpt"));
}

TEST_CASE("json checkpoint round-trips") {
  toy::TempDir dir;
  const ParameterSet src = sample_params(3);
  save_checkpoint_json(dir / "a.json", snapshot(src, "m"));
  ParameterSet dst = sample_params(4);
  restore(load_checkpoint_json(dir / "a.json"), dst);
  CHECK(bit_equal(src, dst));
}

TEST_CASE("restore demands matching names and shapes") {
  const Checkpoint ckpt = snapshot(sample_params(1));
  ParameterSet extra = sample_params(1);
  extra.add("embed.word", Tensor::parameter({1}, {0.0}));
  CHECK_THROWS_AS(restore(ckpt, extra), DataError);

  ParameterSet reshaped;
  reshaped.add("gru.fwd.W", Tensor::parameter({5, 3}, std::vector<double>(15, 0.0)));
  reshaped.add("caps.W", Tensor::parameter({2, 2, 2, 2}, std::vector<double>(16, 0.0)));
  reshaped.add("sent.out.b", Tensor::parameter({4}, std::vector<double>(4, 0.0)));
  CHECK_THROWS_AS(restore(ckpt, reshaped), DataError);
}

TEST_CASE("corrupt or truncated files are data errors") {
  toy::TempDir dir;
  save_checkpoint(dir / "a.ckpt", snapshot(sample_params(1)));
  const std::string bytes = toy::read_file(dir / "a.ckpt");
  toy::write_file(dir / "trunc.ckpt", bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(load_checkpoint(dir / "trunc.ckpt"), DataError);
  toy::write_file(dir / "magic.ckpt", "NOTACKPT" + bytes.substr(8));
  CHECK_THROWS_AS(load_checkpoint(dir / "magic.ckpt"), DataError);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), DataError);
}
